#include "novas/evaluation.hpp"

#include "novas/errors.hpp"
#include "novas/parallel.hpp"
#include "novas/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace novas {

std::string Method::label() const {
    if (!novas) return "GARCH";
    switch (*novas) {
    case MethodKind::Simple: return "S";
    case MethodKind::Exponential: return "E";
    case MethodKind::GenSimple: return "GS";
    case MethodKind::GenExponential: return "GE";
    case MethodKind::GA: return "GA";
    case MethodKind::GenExponentialNoBeta: return "P-GE";
    case MethodKind::GANoBeta: return "P-GA";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (s == "garch" || s == "garch-direct") return Method::garch_direct();
    return Method::of(parse_method_kind(name));
}

std::vector<Method> default_methods() {
    return {Method::of(MethodKind::GenExponential), Method::of(MethodKind::GA),
            Method::of(MethodKind::GANoBeta), Method::garch_direct()};
}

WindowPlan WindowPlan::for_length(std::size_t n_returns) {
    WindowPlan plan;
    plan.width = n_returns >= 499 ? 250 : 100;
    return plan;
}

std::size_t WindowPlan::max_horizon() const {
    if (horizons.empty()) throw ConfigError("window plan has no horizons");
    return *std::max_element(horizons.begin(), horizons.end());
}

void WindowPlan::validate(std::size_t length) const {
    if (width == 0) throw ConfigError("window width must be positive");
    for (std::size_t h : horizons) {
        if (h == 0) throw ConfigError("forecast horizons must be >= 1");
    }
    if (width + max_horizon() > length) {
        throw ConfigError("series of length " + std::to_string(length) +
                          " is too short for window " + std::to_string(width) + " and horizon " +
                          std::to_string(max_horizon()));
    }
}

std::size_t WindowPlan::window_count(std::size_t length, std::size_t h) const {
    return width + h > length ? 0 : length - width - h + 1;
}

std::string_view to_string(SelectionMode m) noexcept {
    switch (m) {
    case SelectionMode::Series: return "series";
    case SelectionMode::Window: return "window";
    case SelectionMode::Fixed: return "fixed";
    }
    return "?";
}

SelectionMode parse_selection_mode(std::string_view name) {
    if (name == "series") return SelectionMode::Series;
    if (name == "window") return SelectionMode::Window;
    if (name == "fixed") return SelectionMode::Fixed;
    throw std::invalid_argument("unknown selection mode '" + std::string(name) + "'");
}

namespace {

constexpr InnovationMode kSources[] = {InnovationMode::TrimmedNormal,
                                       InnovationMode::EmpiricalBootstrap};
constexpr RiskCriterion kCriteria[] = {RiskCriterion::L1, RiskCriterion::L2};

std::size_t candidate_index(std::size_t a, std::size_t v, std::size_t c) { return (a * 2 + v) * 2 + c; }

std::uint64_t method_code(const Method& m) {
    return m.novas ? static_cast<std::uint64_t>(*m.novas) + 1 : 0;
}

std::string format_number(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string candidate_label(const Method& m, const std::vector<double>& alphas, std::size_t idx) {
    if (m.is_benchmark()) return "GARCH(1,1) QMLE";
    const std::size_t a = idx / 4;
    const std::size_t v = (idx / 2) % 2;
    const std::size_t c = idx % 2;
    return "alpha=" + format_number(alphas[a], 6) + " " + std::string(to_string(kSources[v])) + " " +
           std::string(to_string(kCriteria[c]));
}

// Per-step forecasts of one method in one window, indexed by candidate.
using CandidateForecasts = std::vector<std::optional<std::vector<double>>>;

struct NovasState {
    std::optional<CoefficientVector> coeffs;
};

void forecast_novas_block(std::span<const double> returns, const PoosConfig& config,
                          MethodKind kind, const Method& method, std::size_t first,
                          std::size_t last, std::size_t n_windows,
                          std::vector<std::vector<CandidateForecasts>>& out, std::size_t m_idx) {
    const auto alphas = alphas_for(kind, config.grids);
    const std::size_t width = config.plan.width;
    const std::size_t max_h = config.plan.max_horizon();
    for (std::size_t l = first; l < last; ++l) {
        out[l][m_idx].assign(alphas.size() * 4, std::nullopt);
    }
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        std::optional<CoefficientVector> coeffs;
        for (std::size_t l = first; l < last; ++l) {
            const auto window = returns.subspan(l, width);
            std::optional<CalibratedTransform> transform;
            try {
                if (!coeffs) {
                    transform = calibrate(window, kind, alphas[a], config.grids);
                    coeffs = transform->coeffs;
                } else {
                    auto w = forward_transform(window, *coeffs);
                    const double obj = normality_objective(w);
                    transform = CalibratedTransform{*coeffs, obj, std::move(w), {}, {}, 0};
                }
            } catch (const CalibrationError&) {
                break;  // this alpha is unusable for the whole block
            } catch (const DegenerateDataError&) {
                continue;
            }
            const std::size_t steps = std::min(max_h, returns.size() - (l + width));
            for (std::size_t v = 0; v < 2; ++v) {
                ForecastRequest req;
                req.horizon = steps;
                req.paths = config.paths;
                req.source = kSources[v];
                req.seed = substream_seed(config.seed, {l, method_code(method), a, v});
                const auto ensemble = simulate_paths(window, *transform, req);
                for (std::size_t c = 0; c < 2; ++c) {
                    out[l][m_idx][candidate_index(a, v, c)] =
                        optimal_predictor(ensemble, kCriteria[c]).per_step;
                }
            }
        }
    }
    (void)n_windows;
}

void forecast_garch_block(std::span<const double> returns, const PoosConfig& config,
                          std::size_t first, std::size_t last,
                          std::vector<std::vector<CandidateForecasts>>& out, std::size_t m_idx) {
    const std::size_t width = config.plan.width;
    const std::size_t max_h = config.plan.max_horizon();
    std::optional<GarchFit> fit;
    for (std::size_t l = first; l < last; ++l) {
        out[l][m_idx].assign(1, std::nullopt);
        const auto window = returns.subspan(l, width);
        try {
            if (!fit) fit = fit_garch11(window, config.garch);
        } catch (const DegenerateDataError&) {
            continue;
        }
        std::vector<double> centered(window.size());
        for (std::size_t t = 0; t < window.size(); ++t) centered[t] = window[t] - fit->mean;
        const auto s2 = garch_sigma2_path(centered, fit->params);
        const std::size_t steps = std::min(max_h, returns.size() - (l + width));
        auto path = forecast_sq_returns(fit->params, centered.back() * centered.back(), s2.back(),
                                        steps);
        const double mean_sq = fit->mean * fit->mean;
        for (double& v : path) v += mean_sq;
        out[l][m_idx][0] = std::move(path);
    }
}

} // namespace

double aggregate(std::span<const double> per_step, std::size_t h) {
    if (h == 0 || per_step.size() < h) throw std::invalid_argument("aggregate needs h per-step values");
    return std::accumulate(per_step.begin(), per_step.begin() + static_cast<std::ptrdiff_t>(h), 0.0) /
           static_cast<double>(h);
}

PoosResult run_poos(std::span<const double> returns, const PoosConfig& config) {
    const std::size_t n = returns.size();
    config.plan.validate(n);
    if (config.methods.empty()) throw ConfigError("no methods requested");
    if (config.recalibrate_every == 0) throw ConfigError("recalibrate-every must be >= 1");
    if (config.paths == 0) throw ConfigError("paths must be >= 1");

    const std::size_t width = config.plan.width;
    const std::size_t n_windows = n - width;
    const std::size_t k = config.recalibrate_every;
    const std::size_t n_blocks = (n_windows + k - 1) / k;

    std::vector<std::vector<CandidateForecasts>> forecasts(
        n_windows, std::vector<CandidateForecasts>(config.methods.size()));

    parallel_for(n_blocks * config.methods.size(), config.threads, [&](std::size_t task) {
        const std::size_t b = task / config.methods.size();
        const std::size_t m_idx = task % config.methods.size();
        const std::size_t first = b * k;
        const std::size_t last = std::min(n_windows, first + k);
        const Method& method = config.methods[m_idx];
        if (method.is_benchmark()) {
            forecast_garch_block(returns, config, first, last, forecasts, m_idx);
        } else {
            forecast_novas_block(returns, config, *method.novas, method, first, last, n_windows,
                                 forecasts, m_idx);
        }
    });

    std::vector<double> ysq(n);
    std::transform(returns.begin(), returns.end(), ysq.begin(), [](double v) { return v * v; });

    PoosResult result;
    for (std::size_t m_idx = 0; m_idx < config.methods.size(); ++m_idx) {
        const Method& method = config.methods[m_idx];
        const auto alphas = method.is_benchmark() ? std::vector<double>{}
                                                  : alphas_for(*method.novas, config.grids);
        const std::size_t n_cand = method.is_benchmark() ? 1 : alphas.size() * 4;

        for (std::size_t h : config.plan.horizons) {
            const std::size_t wh = config.plan.window_count(n, h);
            AggregatedForecastSeries agg;
            agg.horizon = h;
            agg.targets.resize(wh);
            agg.realized.resize(wh);
            for (std::size_t l = 0; l < wh; ++l) {
                agg.targets[l] = l + width;
                agg.realized[l] = aggregate(std::span<const double>(ysq).subspan(l + width, h), h);
            }

            // Aggregated value of candidate c in window l, if it exists.
            auto value_of = [&](std::size_t l, std::size_t c) -> std::optional<double> {
                const auto& slot = forecasts[l][m_idx];
                if (c >= slot.size() || !slot[c]) return std::nullopt;
                return aggregate(*slot[c], h);
            };

            std::vector<double> p_by_cand(n_cand, std::numeric_limits<double>::quiet_NaN());
            for (std::size_t c = 0; c < n_cand; ++c) {
                double p = 0.0;
                bool complete = true;
                for (std::size_t l = 0; l < wh && complete; ++l) {
                    const auto v = value_of(l, c);
                    if (!v) {
                        complete = false;
                    } else {
                        p += (*v - agg.realized[l]) * (*v - agg.realized[l]);
                    }
                }
                if (complete) {
                    p_by_cand[c] = p;
                    ++agg.complete_candidates;
                }
            }

            std::optional<std::size_t> chosen;
            SelectionMode mode = method.is_benchmark() ? SelectionMode::Series : config.selection;
            if (mode == SelectionMode::Fixed) {
                const Variant& fv = config.fixed_variant;
                const double alpha = alpha_is_free(*method.novas) ? fv.alpha : 0.0;
                const auto it = std::find(alphas.begin(), alphas.end(), alpha);
                if (it == alphas.end()) throw ConfigError("fixed variant alpha is not in the grid");
                const std::size_t c = candidate_index(static_cast<std::size_t>(it - alphas.begin()),
                                                      fv.source == InnovationMode::TrimmedNormal ? 0 : 1,
                                                      fv.criterion == RiskCriterion::L1 ? 0 : 1);
                if (!std::isnan(p_by_cand[c])) chosen = c;
            } else if (mode == SelectionMode::Series) {
                for (std::size_t c = 0; c < n_cand; ++c) {
                    if (std::isnan(p_by_cand[c])) continue;
                    if (!chosen || p_by_cand[c] < p_by_cand[*chosen]) chosen = c;
                }
            }

            if (mode == SelectionMode::Window) {
                agg.values.resize(wh);
                agg.selected = "per-window oracle";
                for (std::size_t l = 0; l < wh && !agg.failed; ++l) {
                    std::optional<double> best;
                    for (std::size_t c = 0; c < n_cand; ++c) {
                        const auto v = value_of(l, c);
                        if (!v) continue;
                        const double err = (*v - agg.realized[l]) * (*v - agg.realized[l]);
                        const double best_err = best ? (*best - agg.realized[l]) * (*best - agg.realized[l])
                                                     : std::numeric_limits<double>::infinity();
                        if (err < best_err) best = v;
                    }
                    if (best) {
                        agg.values[l] = *best;
                    } else {
                        agg.failed = true;
                    }
                }
            } else if (chosen) {
                agg.values.resize(wh);
                for (std::size_t l = 0; l < wh; ++l) agg.values[l] = *value_of(l, *chosen);
                agg.selected = candidate_label(method, alphas, *chosen);
            } else {
                agg.failed = true;
            }
            if (agg.failed) {
                agg.values.clear();
                agg.selected = "failed";
            }
            result.series.emplace(SeriesKey{method, h}, std::move(agg));
        }
    }
    return result;
}

double metric_p(const AggregatedForecastSeries& agg) {
    if (agg.values.empty() || agg.values.size() != agg.realized.size()) {
        throw std::invalid_argument("metric_p needs matching nonempty forecast and realized series");
    }
    double p = 0.0;
    for (std::size_t i = 0; i < agg.values.size(); ++i) {
        const double e = agg.values[i] - agg.realized[i];
        p += e * e;
    }
    return p;
}

std::vector<PerformanceRow> relative_table(std::span<const MethodScore> scores,
                                           const Method& benchmark, std::size_t horizon) {
    const auto bench = std::find_if(scores.begin(), scores.end(),
                                    [&](const MethodScore& s) { return s.method == benchmark; });
    if (bench == scores.end()) throw ConfigError("benchmark method missing from the score list");
    if (!(bench->p != 0.0) || std::isnan(bench->p)) {
        throw DegenerateDataError("benchmark P is zero or undefined; relative values are undefined");
    }
    std::vector<PerformanceRow> rows;
    rows.reserve(scores.size());
    for (const auto& s : scores) {
        const double rel = s.method == benchmark ? 1.0 : s.p / bench->p;
        rows.push_back({s.method, horizon, s.p, rel, {}});
    }
    return rows;
}

namespace {

int display_rank(const Method& m) {
    if (m.is_benchmark()) return 100;
    switch (*m.novas) {
    case MethodKind::GenExponential: return 0;
    case MethodKind::GA: return 1;
    case MethodKind::GANoBeta: return 2;
    case MethodKind::GenExponentialNoBeta: return 3;
    default: return 10 + static_cast<int>(*m.novas);
    }
}

} // namespace

PerformanceReport build_report(std::string dataset, const PoosResult& result) {
    PerformanceReport report{std::move(dataset), {}};
    std::set<std::size_t> horizons;
    std::vector<Method> methods;
    for (const auto& [key, _] : result.series) {
        horizons.insert(key.horizon);
        if (std::find(methods.begin(), methods.end(), key.method) == methods.end()) {
            methods.push_back(key.method);
        }
    }
    std::stable_sort(methods.begin(), methods.end(), [](const Method& a, const Method& b) {
        return display_rank(a) < display_rank(b);
    });
    for (std::size_t h : horizons) {
        std::vector<MethodScore> scores;
        std::vector<std::string> selected;
        for (const auto& m : methods) {
            const auto& agg = result.series.at(SeriesKey{m, h});
            scores.push_back({m, agg.failed ? std::numeric_limits<double>::quiet_NaN() : metric_p(agg)});
            selected.push_back(agg.selected);
        }
        auto rows = relative_table(scores, Method::garch_direct(), h);
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i].selected = selected[i];
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    }
    return report;
}

double pair_relative_value(double p_a, double p_b) {
    const double hi = std::max(p_a, p_b);
    const double lo = std::min(p_a, p_b);
    if (!(hi > 0.0)) return 0.0;
    return (hi - lo) / hi;
}

CwTestResult cw_test(std::span<const double> errors_small, std::span<const double> errors_large,
                     std::span<const double> forecasts_small,
                     std::span<const double> forecasts_large) {
    const std::size_t n = errors_small.size();
    if (errors_large.size() != n || forecasts_small.size() != n || forecasts_large.size() != n) {
        throw std::invalid_argument("CW test inputs must have equal length");
    }
    if (n < 10) throw std::invalid_argument("CW test needs at least 10 observations");

    std::vector<double> f(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double gap = forecasts_small[t] - forecasts_large[t];
        f[t] = errors_small[t] * errors_small[t] - (errors_large[t] * errors_large[t] - gap * gap);
    }
    const double mean = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : f) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(n - 1);
    if (!(var > 0.0)) {
        throw DegenerateTestError("CW test is degenerate: the adjusted loss differential is constant");
    }
    const double stat = mean / std::sqrt(var / static_cast<double>(n));
    const double p = 0.5 * std::erfc(stat / std::sqrt(2.0));
    return {stat, std::clamp(p, 0.0, 1.0), n};
}

std::optional<CwTestResult> cw_test_for(const PoosResult& result, const Method& small,
                                        const Method& large, std::size_t horizon) {
    const auto s = result.series.find(SeriesKey{small, horizon});
    const auto l = result.series.find(SeriesKey{large, horizon});
    if (s == result.series.end() || l == result.series.end()) return std::nullopt;
    if (s->second.failed || l->second.failed) return std::nullopt;
    const auto& a = s->second;
    const auto& b = l->second;
    std::vector<double> ea(a.values.size()), eb(b.values.size());
    for (std::size_t i = 0; i < ea.size(); ++i) ea[i] = a.realized[i] - a.values[i];
    for (std::size_t i = 0; i < eb.size(); ++i) eb[i] = b.realized[i] - b.values[i];
    return cw_test(ea, eb, a.values, b.values);
}

namespace {

std::string horizon_label(std::size_t h) {
    return std::to_string(h) + (h == 1 ? "step" : "steps");
}

} // namespace

void write_report_csv(std::ostream& os, std::span<const PerformanceReport> reports) {
    os << "dataset,horizon,method,P,relative,best,selected\n";
    for (const auto& r : reports) {
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            const auto& row = r.rows[i];
            double best = std::numeric_limits<double>::infinity();
            for (const auto& other : r.rows) {
                if (other.horizon == row.horizon && !std::isnan(other.relative)) {
                    best = std::min(best, other.relative);
                }
            }
            os << r.dataset << ',' << row.horizon << ',' << row.method.label() << ','
               << format_number(row.p, 17) << ',' << format_number(row.relative, 17) << ','
               << (row.relative == best ? 1 : 0) << ',' << row.selected << '\n';
        }
    }
}

void write_report_table(std::ostream& os, std::span<const PerformanceReport> reports) {
    for (const auto& r : reports) {
        std::vector<std::string> labels;
        std::set<std::size_t> horizons;
        for (const auto& row : r.rows) {
            horizons.insert(row.horizon);
            if (std::find(labels.begin(), labels.end(), row.method.label()) == labels.end()) {
                labels.push_back(row.method.label());
            }
        }
        const bool pair = std::find(labels.begin(), labels.end(), "P-GE") != labels.end() &&
                          std::find(labels.begin(), labels.end(), "P-GA") != labels.end();
        os << std::left << std::setw(20) << r.dataset;
        for (const auto& l : labels) os << std::right << std::setw(12) << l;
        if (pair) os << std::right << std::setw(14) << "P-GE|P-GA";
        os << '\n';
        for (std::size_t h : horizons) {
            std::vector<const PerformanceRow*> rows;
            for (const auto& row : r.rows) {
                if (row.horizon == h) rows.push_back(&row);
            }
            double best = std::numeric_limits<double>::infinity();
            for (const auto* row : rows) {
                if (!std::isnan(row->relative)) best = std::min(best, row->relative);
            }
            os << std::left << std::setw(20) << (r.dataset + "-" + horizon_label(h));
            double p_ge = 0.0, p_ga = 0.0;
            for (const auto* row : rows) {
                char cell[32];
                if (std::isnan(row->relative)) {
                    std::snprintf(cell, sizeof cell, "failed ");
                } else {
                    std::snprintf(cell, sizeof cell, "%.5f%c", row->relative,
                                  row->relative == best ? '*' : ' ');
                }
                os << std::right << std::setw(12) << cell;
                if (row->method.label() == "P-GE") p_ge = row->p;
                if (row->method.label() == "P-GA") p_ga = row->p;
            }
            if (pair) {
                char cell[32];
                std::snprintf(cell, sizeof cell, "%.2f", pair_relative_value(p_ge, p_ga));
                os << std::right << std::setw(14) << cell;
            }
            os << '\n';
        }
        os << '\n';
    }
}

void write_forecasts_csv(std::ostream& os, std::string_view dataset, const PoosResult& result,
                         bool header) {
    if (header) os << "dataset,method,horizon,target,forecast,realized\n";
    for (const auto& [key, agg] : result.series) {
        if (agg.failed) continue;
        for (std::size_t i = 0; i < agg.values.size(); ++i) {
            os << dataset << ',' << key.method.label() << ',' << key.horizon << ','
               << agg.targets[i] + 1 << ',' << format_number(agg.values[i], 17) << ','
               << format_number(agg.realized[i], 17) << '\n';
        }
    }
}

} // namespace novas
