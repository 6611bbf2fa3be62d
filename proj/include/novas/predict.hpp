#pragma once

#include "novas/transform.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace novas {

class Xoshiro256;

enum class InnovationMode { TrimmedNormal, EmpiricalBootstrap };
enum class RiskCriterion { L1, L2 };

std::string_view to_string(InnovationMode m) noexcept;
std::string_view to_string(RiskCriterion c) noexcept;
InnovationMode parse_innovation_mode(std::string_view name);
RiskCriterion parse_risk_criterion(std::string_view name);

/// Draws future innovations W_{n+j}: standard normal truncated to
/// |w| < 1/sqrt(c0), or i.i.d. resampling of the calibrated W series.
class InnovationSource {
public:
    static InnovationSource trimmed_normal(double bound);
    /// Throws std::invalid_argument on an empty pool.
    static InnovationSource bootstrap(std::vector<double> pool);
    static InnovationSource for_transform(InnovationMode mode, const CalibratedTransform& t);

    InnovationMode mode() const noexcept { return mode_; }
    double bound() const noexcept { return bound_; }
    std::span<const double> pool() const noexcept { return *pool_; }

    double draw(Xoshiro256& rng) const;

private:
    InnovationSource(InnovationMode mode, double bound, std::shared_ptr<const std::vector<double>> pool)
        : mode_(mode), bound_(bound), pool_(std::move(pool)) {}

    InnovationMode mode_;
    double bound_;
    std::shared_ptr<const std::vector<double>> pool_;
};

struct ForecastRequest {
    std::size_t horizon = 1;
    std::size_t paths = 5000;
    RiskCriterion criterion = RiskCriterion::L2;
    InnovationMode source = InnovationMode::TrimmedNormal;
    std::uint64_t seed = 0;
};

/// M paths of h steps, row-major (path m, step j) at m * horizon + j.
struct PathEnsemble {
    std::size_t paths = 0;
    std::size_t horizon = 0;
    std::vector<double> innovations;
    std::vector<double> sq_returns;

    double sq_return(std::size_t m, std::size_t j) const { return sq_returns[m * horizon + j]; }
    double innovation(std::size_t m, std::size_t j) const { return innovations[m * horizon + j]; }
};

struct PointForecast {
    /// Prediction of Y^2_{n+h}.
    double value = 0.0;
    /// Predictions of Y^2_{n+1}..Y^2_{n+h}.
    std::vector<double> per_step;
};

/// alpha * s^2 + sum_i c_i * lag_sq[i-1], where lag_sq[0] is the most recent
/// squared return. lag_sq must hold at least order() values.
double volatility_proxy(const CoefficientVector& coeffs, std::span<const double> lag_sq,
                        double s_sq);

/// w^2 / (1 - c0 w^2); reduces to w^2 when c0 == 0.
/// Throws std::domain_error when |w| >= 1/sqrt(c0).
double inverse_ratio(double w, double c0);

/// Next squared return implied by innovation w and the current history.
double inverse_step(double w, const CoefficientVector& coeffs, std::span<const double> lag_sq,
                    double s_sq);

/// Iterates inverse_step along M seeded paths. s^2 stays at the window's
/// s^2_n; each pseudo squared return is pushed onto the lag buffer.
PathEnsemble simulate_paths(std::span<const double> window, const CalibratedTransform& transform,
                            const ForecastRequest& req);

/// Per-step median (L1) or mean (L2) across paths.
PointForecast optimal_predictor(const PathEnsemble& ensemble, RiskCriterion criterion);

/// simulate_paths followed by optimal_predictor.
PointForecast forecast(std::span<const double> window, const CalibratedTransform& transform,
                       const ForecastRequest& req);

/// One point of the alpha x innovation x criterion sweep.
struct Variant {
    double alpha = 0.0;
    InnovationMode source = InnovationMode::TrimmedNormal;
    RiskCriterion criterion = RiskCriterion::L2;
};

/// Pick the variant whose aggregated forecast (mean over the h steps) is
/// closest in squared error to the mean of the realized squared returns.
/// In-sample selection: it looks at the outcomes it is scored against.
struct OracleBest {
    std::vector<double> realized_sq;
};

struct FixedVariant {
    Variant variant;
};

using Selection = std::variant<OracleBest, FixedVariant>;

struct BestOfResult {
    PointForecast forecast;
    Variant chosen;
    std::size_t candidates = 0;
};

/// Alphas swept for a kind: the grid, or {0} when alpha is pinned.
std::vector<double> alphas_for(MethodKind kind, const CalibrationGrids& grids);

/// Calibrates every alpha, then forecasts each (source, criterion) pair.
/// Candidate (alpha index a, source v) draws from substream (req.seed, a, v).
/// Alphas whose calibration fails are skipped; if none remain the last
/// CalibrationError propagates.
BestOfResult forecast_best_of(std::span<const double> window, MethodKind kind,
                              const CalibrationGrids& grids, const ForecastRequest& req,
                              const Selection& selection);

} // namespace novas
