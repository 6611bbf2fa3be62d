#pragma once

#include "novas/garch.hpp"
#include "novas/predict.hpp"
#include "novas/transform.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace novas {

/// A forecasting method in an experiment: a NoVaS kind, or the GARCH-direct
/// benchmark when `novas` is empty.
struct Method {
    std::optional<MethodKind> novas;

    static Method garch_direct() { return {}; }
    static Method of(MethodKind k) { return {k}; }
    bool is_benchmark() const noexcept { return !novas.has_value(); }
    /// Table label: GE, GA, P-GA, P-GE, S, E, GS or GARCH.
    std::string label() const;

    friend auto operator<=>(const Method&, const Method&) = default;
};

/// Accepts "garch" plus every name parse_method_kind understands.
Method parse_method(std::string_view name);

/// GE, GA, P-GA and GARCH-direct.
std::vector<Method> default_methods();

struct WindowPlan {
    std::size_t width = 250;
    std::vector<std::size_t> horizons{1, 5, 30};

    /// Width 250 for two-year data (>= 499 returns), else 100.
    static WindowPlan for_length(std::size_t n_returns);
    std::size_t max_horizon() const;
    /// Throws ConfigError unless width + max horizon <= length.
    void validate(std::size_t length) const;
    /// Number of h-step aggregated forecasts: length - width - h + 1.
    std::size_t window_count(std::size_t length, std::size_t h) const;
};

/// How the 8 alpha x 2 source x 2 criterion candidates collapse to one series.
enum class SelectionMode {
    /// Candidate with the smallest P over the whole series, per horizon.
    Series,
    /// Candidate closest to the realized value, chosen window by window.
    Window,
    /// A single configured variant.
    Fixed,
};

std::string_view to_string(SelectionMode m) noexcept;
SelectionMode parse_selection_mode(std::string_view name);

struct PoosConfig {
    WindowPlan plan;
    std::vector<Method> methods = default_methods();
    CalibrationGrids grids;
    std::size_t paths = 5000;
    std::uint64_t seed = 0;
    SelectionMode selection = SelectionMode::Series;
    Variant fixed_variant;
    /// Recalibrate transforms and GARCH fits every k windows.
    std::size_t recalibrate_every = 1;
    /// 0 selects hardware concurrency.
    std::size_t threads = 0;
    GarchOptions garch;
};

/// Time-aggregated h-step forecasts and realized values, one per window.
struct AggregatedForecastSeries {
    std::size_t horizon = 1;
    /// 0-based index of the first point after each window.
    std::vector<std::size_t> targets;
    std::vector<double> values;
    std::vector<double> realized;
    /// Chosen variant, "per-window oracle", or "failed".
    std::string selected;
    /// Candidates with a forecast in every window.
    std::size_t complete_candidates = 0;
    bool failed = false;
};

struct SeriesKey {
    Method method;
    std::size_t horizon = 1;

    friend auto operator<=>(const SeriesKey&, const SeriesKey&) = default;
};

struct PoosResult {
    std::map<SeriesKey, AggregatedForecastSeries> series;
};

/// Rolling pseudo-out-of-sample experiment. Every window forecasts
/// max(horizons) steps (fewer near the end) and is then aggregated per horizon.
PoosResult run_poos(std::span<const double> returns, const PoosConfig& config);

/// Mean of the first h per-step forecasts.
double aggregate(std::span<const double> per_step, std::size_t h);

/// P = sum over windows of (forecast - realized)^2.
double metric_p(const AggregatedForecastSeries& agg);

struct PerformanceRow {
    Method method;
    std::size_t horizon = 1;
    double p = 0.0;
    /// P / P_benchmark; exactly 1 for the benchmark.
    double relative = 0.0;
    std::string selected;
};

/// One dataset's rows, horizon-major then method order.
struct PerformanceReport {
    std::string dataset;
    std::vector<PerformanceRow> rows;
};

struct MethodScore {
    Method method;
    double p = 0.0;
};

/// Relative P values against `benchmark` for a single horizon.
/// Throws ConfigError if the benchmark is missing and DegenerateDataError
/// if its P is zero.
std::vector<PerformanceRow> relative_table(std::span<const MethodScore> scores,
                                           const Method& benchmark, std::size_t horizon);

/// Relative table for every horizon in a POOS result (benchmark GARCH-direct).
PerformanceReport build_report(std::string dataset, const PoosResult& result);

/// (max - min) / max of two P values.
double pair_relative_value(double p_a, double p_b);

struct CwTestResult {
    double statistic = 0.0;
    double p_value = 0.0;
    std::size_t n_obs = 0;
};

/// Clark-West adjusted-MSPE test of a parsimonious model nested in a larger
/// one. f_t = e_small^2 - (e_large^2 - (yhat_small - yhat_large)^2); the
/// statistic is mean(f) / sqrt(var(f) / n), with a one-sided upper-tail
/// normal p-value. Throws DegenerateTestError when var(f) == 0.
CwTestResult cw_test(std::span<const double> errors_small, std::span<const double> errors_large,
                     std::span<const double> forecasts_small,
                     std::span<const double> forecasts_large);

/// cw_test on two methods' aggregated series at one horizon; nullopt when
/// either series is missing or failed.
std::optional<CwTestResult> cw_test_for(const PoosResult& result, const Method& small,
                                        const Method& large, std::size_t horizon = 1);

/// Writers. Numbers use 17 significant digits so files round-trip exactly.
void write_report_csv(std::ostream& os, std::span<const PerformanceReport> reports);
/// Aligned table: one row per dataset-horizon, relative P per method, '*'
/// after the best method, plus the P-GE/P-GA relative value when both exist.
void write_report_table(std::ostream& os, std::span<const PerformanceReport> reports);
void write_forecasts_csv(std::ostream& os, std::string_view dataset, const PoosResult& result,
                         bool header = true);

} // namespace novas
