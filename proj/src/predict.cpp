#include "novas/predict.hpp"

#include "novas/errors.hpp"
#include "novas/rng.hpp"
#include "novas/series.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

namespace novas {

std::string_view to_string(InnovationMode m) noexcept {
    return m == InnovationMode::TrimmedNormal ? "normal" : "bootstrap";
}

std::string_view to_string(RiskCriterion c) noexcept { return c == RiskCriterion::L1 ? "L1" : "L2"; }

namespace {
std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return out;
}
} // namespace

InnovationMode parse_innovation_mode(std::string_view name) {
    const auto s = lower(name);
    if (s == "normal" || s == "trimmed-normal" || s == "mc") return InnovationMode::TrimmedNormal;
    if (s == "bootstrap" || s == "empirical" || s == "bs") return InnovationMode::EmpiricalBootstrap;
    throw std::invalid_argument("unknown innovation source '" + std::string(name) + "'");
}

RiskCriterion parse_risk_criterion(std::string_view name) {
    const auto s = lower(name);
    if (s == "l1" || s == "median") return RiskCriterion::L1;
    if (s == "l2" || s == "mean") return RiskCriterion::L2;
    throw std::invalid_argument("unknown risk criterion '" + std::string(name) + "'");
}

InnovationSource InnovationSource::trimmed_normal(double bound) {
    if (!(bound > 0.0)) throw std::invalid_argument("trimmed normal bound must be positive");
    return InnovationSource(InnovationMode::TrimmedNormal, bound, nullptr);
}

InnovationSource InnovationSource::bootstrap(std::vector<double> pool) {
    if (pool.empty()) throw std::invalid_argument("bootstrap pool is empty");
    return InnovationSource(InnovationMode::EmpiricalBootstrap,
                            std::numeric_limits<double>::infinity(),
                            std::make_shared<const std::vector<double>>(std::move(pool)));
}

InnovationSource InnovationSource::for_transform(InnovationMode mode, const CalibratedTransform& t) {
    if (mode == InnovationMode::TrimmedNormal) {
        return trimmed_normal(t.coeffs.innovation_bound());
    }
    return bootstrap(t.w_series);
}

double InnovationSource::draw(Xoshiro256& rng) const {
    if (mode_ == InnovationMode::EmpiricalBootstrap) {
        std::uniform_int_distribution<std::size_t> pick(0, pool_->size() - 1);
        return (*pool_)[pick(rng)];
    }
    std::normal_distribution<double> normal;
    for (;;) {
        const double w = normal(rng);
        if (std::abs(w) < bound_) return w;
    }
}

double volatility_proxy(const CoefficientVector& coeffs, std::span<const double> lag_sq,
                        double s_sq) {
    const auto c = coeffs.c();
    const std::size_t q = coeffs.order();
    if (lag_sq.size() < q) throw std::invalid_argument("lag buffer shorter than the order");
    double proxy = coeffs.alpha() * s_sq;
    for (std::size_t i = 1; i <= q; ++i) {
        proxy += c[i] * lag_sq[i - 1];
    }
    return proxy;
}

double inverse_ratio(double w, double c0) {
    const double w2 = w * w;
    const double denom = 1.0 - c0 * w2;
    if (!(denom > 0.0)) {
        throw std::domain_error("innovation outside (-1/sqrt(c0), 1/sqrt(c0))");
    }
    return w2 / denom;
}

double inverse_step(double w, const CoefficientVector& coeffs, std::span<const double> lag_sq,
                    double s_sq) {
    return inverse_ratio(w, coeffs.c0()) * volatility_proxy(coeffs, lag_sq, s_sq);
}

PathEnsemble simulate_paths(std::span<const double> window, const CalibratedTransform& transform,
                            const ForecastRequest& req) {
    const auto& coeffs = transform.coeffs;
    const std::size_t q = coeffs.order();
    const std::size_t n = window.size();
    if (n < q + 1) throw std::invalid_argument("window must be longer than the transform order");
    if (req.horizon == 0 || req.paths == 0) {
        throw std::invalid_argument("forecast needs horizon >= 1 and paths >= 1");
    }

    const auto source = InnovationSource::for_transform(req.source, transform);
    const double s_sq = trailing_stats(window, n + 1).s_sq;
    const auto c = coeffs.c();
    const double c0 = coeffs.c0();
    const double alpha_term = coeffs.alpha() * s_sq;
    const std::size_t h = req.horizon;

    // Chronological buffer: q observed squares followed by h pseudo squares.
    std::vector<double> buf(q + h);
    for (std::size_t i = 0; i < q; ++i) {
        const double y = window[n - q + i];
        buf[i] = y * y;
    }

    PathEnsemble out;
    out.paths = req.paths;
    out.horizon = h;
    out.innovations.resize(req.paths * h);
    out.sq_returns.resize(req.paths * h);
    for (std::size_t m = 0; m < req.paths; ++m) {
        Rng rng(substream_seed(req.seed, {m}));
        for (std::size_t j = 0; j < h; ++j) {
            const std::size_t pos = q + j;
            double proxy = alpha_term;
            for (std::size_t i = 1; i <= q; ++i) {
                proxy += c[i] * buf[pos - i];
            }
            const double w = source.draw(rng);
            const double y2 = inverse_ratio(w, c0) * proxy;
            buf[pos] = y2;
            out.innovations[m * h + j] = w;
            out.sq_returns[m * h + j] = y2;
        }
    }
    return out;
}

PointForecast optimal_predictor(const PathEnsemble& ensemble, RiskCriterion criterion) {
    if (ensemble.paths == 0 || ensemble.horizon == 0) {
        throw std::invalid_argument("empty path ensemble");
    }
    PointForecast out;
    out.per_step.resize(ensemble.horizon);
    std::vector<double> column(ensemble.paths);
    for (std::size_t j = 0; j < ensemble.horizon; ++j) {
        for (std::size_t m = 0; m < ensemble.paths; ++m) {
            column[m] = ensemble.sq_return(m, j);
        }
        double stat;
        if (criterion == RiskCriterion::L2) {
            stat = std::accumulate(column.begin(), column.end(), 0.0) /
                   static_cast<double>(column.size());
        } else {
            const std::size_t mid = column.size() / 2;
            std::nth_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(mid),
                             column.end());
            stat = column[mid];
            if (column.size() % 2 == 0) {
                const double lower_mid =
                    *std::max_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(mid));
                stat = 0.5 * (stat + lower_mid);
            }
        }
        out.per_step[j] = stat;
    }
    out.value = out.per_step.back();
    return out;
}

PointForecast forecast(std::span<const double> window, const CalibratedTransform& transform,
                       const ForecastRequest& req) {
    return optimal_predictor(simulate_paths(window, transform, req), req.criterion);
}

std::vector<double> alphas_for(MethodKind kind, const CalibrationGrids& grids) {
    if (!alpha_is_free(kind)) return {0.0};
    if (grids.alpha_grid.empty()) throw ConfigError("alpha grid is empty");
    return grids.alpha_grid;
}

BestOfResult forecast_best_of(std::span<const double> window, MethodKind kind,
                              const CalibrationGrids& grids, const ForecastRequest& req,
                              const Selection& selection) {
    const auto alphas = alphas_for(kind, grids);
    constexpr InnovationMode kSources[] = {InnovationMode::TrimmedNormal,
                                           InnovationMode::EmpiricalBootstrap};
    constexpr RiskCriterion kCriteria[] = {RiskCriterion::L1, RiskCriterion::L2};

    auto sub_request = [&](std::size_t a, InnovationMode source) {
        ForecastRequest r = req;
        r.source = source;
        r.seed = substream_seed(req.seed, {a, static_cast<std::uint64_t>(source)});
        return r;
    };

    if (const auto* fixed = std::get_if<FixedVariant>(&selection)) {
        const auto it = std::find(alphas.begin(), alphas.end(), fixed->variant.alpha);
        if (it == alphas.end()) throw ConfigError("fixed variant alpha is not in the sweep");
        const auto a = static_cast<std::size_t>(it - alphas.begin());
        const auto transform = calibrate(window, kind, fixed->variant.alpha, grids);
        auto r = sub_request(a, fixed->variant.source);
        r.criterion = fixed->variant.criterion;
        return {forecast(window, transform, r), fixed->variant, 1};
    }

    const auto& oracle = std::get<OracleBest>(selection);
    if (oracle.realized_sq.size() != req.horizon) {
        throw ConfigError("oracle selection needs one realized squared return per forecast step");
    }
    const double realized_mean =
        std::accumulate(oracle.realized_sq.begin(), oracle.realized_sq.end(), 0.0) /
        static_cast<double>(req.horizon);

    std::optional<BestOfResult> best;
    double best_err = std::numeric_limits<double>::infinity();
    std::size_t candidates = 0;
    std::optional<CalibrationError> last_failure;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        std::optional<CalibratedTransform> transform;
        try {
            transform = calibrate(window, kind, alphas[a], grids);
        } catch (const CalibrationError& e) {
            last_failure = e;
            continue;
        }
        for (auto source : kSources) {
            const auto ensemble = simulate_paths(window, *transform, sub_request(a, source));
            for (auto criterion : kCriteria) {
                auto fc = optimal_predictor(ensemble, criterion);
                ++candidates;
                const double agg = std::accumulate(fc.per_step.begin(), fc.per_step.end(), 0.0) /
                                   static_cast<double>(req.horizon);
                const double err = (agg - realized_mean) * (agg - realized_mean);
                if (err < best_err) {
                    best_err = err;
                    best = BestOfResult{std::move(fc), {alphas[a], source, criterion}, 0};
                }
            }
        }
    }
    if (!best) {
        if (last_failure) throw *last_failure;
        throw CalibrationError("no candidate forecasts produced",
                               std::numeric_limits<double>::infinity());
    }
    best->candidates = candidates;
    return *best;
}

} // namespace novas
