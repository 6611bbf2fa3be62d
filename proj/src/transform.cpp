#include "novas/transform.hpp"

#include "novas/errors.hpp"
#include "novas/series.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace novas {

std::string_view to_string(MethodKind k) noexcept {
    switch (k) {
    case MethodKind::Simple: return "simple";
    case MethodKind::Exponential: return "exponential";
    case MethodKind::GenSimple: return "gen-simple";
    case MethodKind::GenExponential: return "gen-exponential";
    case MethodKind::GA: return "ga";
    case MethodKind::GenExponentialNoBeta: return "gen-exponential-nobeta";
    case MethodKind::GANoBeta: return "ga-nobeta";
    }
    return "unknown";
}

MethodKind parse_method_kind(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    std::replace(s.begin(), s.end(), '_', '-');
    if (s == "simple" || s == "s") return MethodKind::Simple;
    if (s == "exponential" || s == "e") return MethodKind::Exponential;
    if (s == "gen-simple" || s == "gs") return MethodKind::GenSimple;
    if (s == "gen-exponential" || s == "ge") return MethodKind::GenExponential;
    if (s == "ga") return MethodKind::GA;
    if (s == "gen-exponential-nobeta" || s == "pge" || s == "p-ge") {
        return MethodKind::GenExponentialNoBeta;
    }
    if (s == "ga-nobeta" || s == "pga" || s == "p-ga") return MethodKind::GANoBeta;
    throw std::invalid_argument("unknown method kind '" + std::string(name) + "'");
}

CoefficientVector::CoefficientVector(MethodKind kind, double alpha, std::vector<double> c)
    : kind_(kind), alpha_(alpha), c_(std::move(c)) {
    if (c_.size() < 2) {
        throw std::domain_error("coefficient vector needs c0 and at least one lag");
    }
    if (!(alpha_ >= 0.0 && alpha_ <= 1.0)) {
        throw std::domain_error("alpha must lie in [0, 1]");
    }
    double total = alpha_;
    for (double ci : c_) {
        if (!(ci >= 0.0) || !std::isfinite(ci)) {
            throw std::domain_error("coefficients must be finite and nonnegative");
        }
        total += ci;
    }
    if (std::abs(total - 1.0) > kSimplexTolerance) {
        throw std::domain_error("alpha + sum(c) must equal 1");
    }
    if (!has_beta(kind_) && c_.front() != 0.0) {
        throw std::domain_error("without-beta kinds require c0 == 0");
    }
}

double CoefficientVector::innovation_bound() const noexcept {
    const double c0 = c_.front();
    return c0 > 0.0 ? 1.0 / std::sqrt(c0) : std::numeric_limits<double>::infinity();
}

std::vector<double> CalibrationGrids::default_c_grid() {
    constexpr std::size_t kPoints = 60;
    const double lo = std::log(0.01);
    const double hi = std::log(3.0);
    std::vector<double> grid(kPoints);
    for (std::size_t i = 0; i < kPoints; ++i) {
        grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / (kPoints - 1));
    }
    grid.front() = 0.01;
    grid.back() = 3.0;
    return grid;
}

CalibrationGrids CalibrationGrids::standard() { return {}; }

CalibrationGrids CalibrationGrids::fast() {
    CalibrationGrids g;
    g.alpha_grid = {0.2, 0.5, 0.8};
    g.unit_grid_step = 0.05;
    return g;
}

std::vector<double> CalibrationGrids::unit_grid() const {
    if (!(unit_grid_step > 0.0 && unit_grid_step < 1.0)) {
        throw std::invalid_argument("unit grid step must lie in (0, 1)");
    }
    std::vector<double> out;
    for (std::size_t k = 1;; ++k) {
        const double v = static_cast<double>(k) * unit_grid_step;
        if (v >= 1.0 - 1e-9) break;
        out.push_back(v);
    }
    return out;
}

std::size_t default_exponential_order(double c) {
    if (!(c > 0.0)) return kOrderCap;
    const double exact = -std::log(kTailThreshold) / c;
    const double p = std::floor(exact) + 1.0;
    return static_cast<std::size_t>(std::clamp(p, static_cast<double>(kOrderFloor),
                                               static_cast<double>(kOrderCap)));
}

std::size_t default_ga_order(double a1, double b1) {
    double term = a1;
    std::size_t q = 1;
    while (term >= kTailThreshold && q < kOrderCap) {
        term *= b1;
        ++q;
    }
    return std::max(q, kOrderFloor);
}

std::size_t escalate_order(std::size_t order, std::size_t level) {
    for (std::size_t i = 0; i < level; ++i) {
        order = (3 * order + 1) / 2;
    }
    return order;
}

CoefficientVector build_simple_coeffs(double alpha, std::size_t p) {
    if (p == 0) throw std::domain_error("simple NoVaS order must be >= 1");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in [0, 1)");
    const double w = (1.0 - alpha) / static_cast<double>(p + 1);
    return CoefficientVector(alpha == 0.0 ? MethodKind::Simple : MethodKind::GenSimple, alpha,
                             std::vector<double>(p + 1, w));
}

CoefficientVector build_exponential_coeffs(double alpha, double c, std::size_t p, bool with_beta) {
    if (p == 0) throw std::domain_error("exponential NoVaS order must be >= 1");
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::domain_error("decay rate c must be >= 0");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in [0, 1)");

    std::vector<double> coeffs(p + 1, 0.0);
    const std::size_t first = with_beta ? 0 : 1;
    double total = 0.0;
    for (std::size_t i = first; i <= p; ++i) {
        coeffs[i] = std::exp(-c * static_cast<double>(i));
        total += coeffs[i];
    }
    const double scale = (1.0 - alpha) / total;
    for (double& ci : coeffs) ci *= scale;

    MethodKind kind = MethodKind::GenExponentialNoBeta;
    if (with_beta) kind = alpha == 0.0 ? MethodKind::Exponential : MethodKind::GenExponential;
    return CoefficientVector(kind, alpha, std::move(coeffs));
}

CoefficientVector build_ga_coeffs(double alpha, const GAFreeParams& params, std::size_t q,
                                  bool with_beta) {
    if (q == 0) throw std::domain_error("GA NoVaS order must be >= 1");
    if (!(params.b1 >= 0.0 && params.b1 < 1.0)) {
        throw std::domain_error("b1 must lie in [0, 1); the geometric tail diverges otherwise");
    }
    if (!(params.a1 > 0.0 && params.a1 < 1.0)) throw std::domain_error("a1 must lie in (0, 1)");
    if (with_beta && !(params.beta >= 0.0 && params.beta < 1.0)) {
        throw std::domain_error("beta must lie in [0, 1)");
    }
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in [0, 1)");

    std::vector<double> coeffs(q + 1, 0.0);
    if (with_beta) coeffs[0] = params.beta / (1.0 - params.b1);
    double lag = params.a1;
    for (std::size_t i = 1; i <= q; ++i) {
        coeffs[i] = lag;
        lag *= params.b1;
    }
    const double total = std::accumulate(coeffs.begin(), coeffs.end(), 0.0);
    const double scale = (1.0 - alpha) / total;
    for (double& ci : coeffs) ci *= scale;
    return CoefficientVector(with_beta ? MethodKind::GA : MethodKind::GANoBeta, alpha,
                             std::move(coeffs));
}

namespace {

// Shared inner loop. pv[i] is the population variance of y[0..i].
void transform_into(std::span<const double> y, std::span<const double> ysq,
                    std::span<const double> pv, const CoefficientVector& coeffs,
                    std::vector<double>& out) {
    const std::size_t n = y.size();
    const std::size_t q = coeffs.order();
    const auto c = coeffs.c();
    const double alpha = coeffs.alpha();
    out.resize(n - q);
    for (std::size_t i = q; i < n; ++i) {
        double history = alpha * pv[i - 1];
        for (std::size_t j = 1; j <= q; ++j) {
            history += c[j] * ysq[i - j];
        }
        if (!(history > 0.0)) {
            throw DegenerateDataError("transform denominator has no history weight at index " +
                                      std::to_string(i));
        }
        out[i - q] = y[i] / std::sqrt(c[0] * ysq[i] + history);
    }
}

} // namespace

std::vector<double> forward_transform(std::span<const double> returns,
                                      const CoefficientVector& coeffs) {
    if (returns.size() <= coeffs.order()) {
        throw std::invalid_argument("forward_transform needs more points than the order");
    }
    std::vector<double> ysq(returns.size());
    std::transform(returns.begin(), returns.end(), ysq.begin(), [](double v) { return v * v; });
    const auto pv = prefix_variances(returns);
    std::vector<double> w;
    transform_into(returns, ysq, pv, coeffs, w);
    return w;
}

double normality_objective(std::span<const double> w) {
    return std::abs(sample_kurtosis(w) - 3.0);
}

namespace {

inline constexpr std::size_t kMinUsablePoints = 10;

struct Candidate {
    CoefficientVector coeffs;
    std::optional<GAFreeParams> ga;
    std::optional<double> decay;
};

// Calls visit(candidate) for each structurally admissible grid point at the
// given escalation level, in lexicographic parameter order.
template <typename Visit>
void enumerate_candidates(MethodKind kind, double alpha, const CalibrationGrids& grids,
                          std::size_t level, std::size_t max_order, Visit&& visit) {
    switch (kind) {
    case MethodKind::Simple:
    case MethodKind::GenSimple: {
        const std::size_t cap = escalate_order(grids.simple_order_cap, level);
        for (std::size_t p = 1; p <= std::min(cap, max_order); ++p) {
            visit(Candidate{build_simple_coeffs(alpha, p), std::nullopt, std::nullopt});
        }
        break;
    }
    case MethodKind::Exponential:
    case MethodKind::GenExponential:
    case MethodKind::GenExponentialNoBeta: {
        const bool with_beta = has_beta(kind);
        for (double c : grids.c_grid) {
            const std::size_t p = escalate_order(default_exponential_order(c), level);
            if (p > max_order) continue;
            visit(Candidate{build_exponential_coeffs(alpha, c, p, with_beta), std::nullopt, c});
        }
        break;
    }
    case MethodKind::GA: {
        const auto unit = grids.unit_grid();
        for (double beta : unit) {
            for (double a1 : unit) {
                for (double b1 : unit) {
                    if (beta + a1 + b1 >= 1.0 - 1e-9) break;
                    // c0 must dominate; scaling keeps the ordering, so check unscaled.
                    if (beta / (1.0 - b1) < a1) continue;
                    const std::size_t q = escalate_order(default_ga_order(a1, b1), level);
                    if (q > max_order) continue;
                    const GAFreeParams params{beta, a1, b1};
                    visit(Candidate{build_ga_coeffs(alpha, params, q, true), params, std::nullopt});
                }
            }
        }
        break;
    }
    case MethodKind::GANoBeta: {
        const auto unit = grids.unit_grid();
        for (double a1 : unit) {
            for (double b1 : unit) {
                if (a1 + b1 >= 1.0 - 1e-9) break;
                const std::size_t q = escalate_order(default_ga_order(a1, b1), level);
                if (q > max_order) continue;
                const GAFreeParams params{0.0, a1, b1};
                visit(Candidate{build_ga_coeffs(alpha, params, q, false), params, std::nullopt});
            }
        }
        break;
    }
    }
}

} // namespace

CalibratedTransform calibrate(std::span<const double> returns, MethodKind kind, double alpha,
                              const CalibrationGrids& grids) {
    if (!alpha_is_free(kind)) {
        if (alpha != 0.0) {
            throw std::invalid_argument(std::string(to_string(kind)) + " NoVaS fixes alpha at 0");
        }
    } else if (std::find(grids.alpha_grid.begin(), grids.alpha_grid.end(), alpha) ==
               grids.alpha_grid.end()) {
        throw std::invalid_argument("alpha is not a member of the calibration alpha grid");
    }
    const std::size_t n = returns.size();
    if (n < kOrderFloor + kMinUsablePoints) {
        throw std::invalid_argument("calibration window too short: need at least " +
                                    std::to_string(kOrderFloor + kMinUsablePoints) + " points");
    }
    const std::size_t max_order = n - kMinUsablePoints;

    std::vector<double> ysq(n);
    std::transform(returns.begin(), returns.end(), ysq.begin(), [](double v) { return v * v; });
    const auto pv = prefix_variances(returns);

    std::vector<double> w;
    for (std::size_t level = 0; level <= grids.max_escalations; ++level) {
        std::optional<Candidate> best;
        double best_objective = std::numeric_limits<double>::infinity();
        std::optional<Candidate> nearest_capped;
        std::size_t capped = 0;

        enumerate_candidates(kind, alpha, grids, level, max_order, [&](Candidate cand) {
            if (has_beta(kind) && cand.coeffs.c0() > grids.beta_cap) {
                if (!nearest_capped || cand.coeffs.c0() < nearest_capped->coeffs.c0()) {
                    nearest_capped = cand;
                }
                ++capped;
                return;
            }
            double objective;
            try {
                transform_into(returns, ysq, pv, cand.coeffs, w);
                objective = normality_objective(w);
            } catch (const DegenerateDataError&) {
                return;
            }
            if (objective < best_objective) {
                best_objective = objective;
                best = std::move(cand);
            }
        });

        if (best) {
            CalibratedTransform out{best->coeffs, best_objective, {}, best->ga, best->decay, level};
            transform_into(returns, ysq, pv, out.coeffs, out.w_series);
            return out;
        }
        if (capped == 0 || level == grids.max_escalations) {
            double nearest_objective = std::numeric_limits<double>::infinity();
            if (nearest_capped) {
                try {
                    transform_into(returns, ysq, pv, nearest_capped->coeffs, w);
                    nearest_objective = normality_objective(w);
                } catch (const DegenerateDataError&) {
                }
            }
            throw CalibrationError(
                std::string(to_string(kind)) + " calibration found no admissible grid point" +
                    (capped > 0 ? " with c0 <= beta cap after " + std::to_string(level) +
                                      " order escalations"
                                : ""),
                nearest_objective);
        }
    }
    throw CalibrationError("calibration exhausted escalations",
                           std::numeric_limits<double>::infinity());
}

} // namespace novas
