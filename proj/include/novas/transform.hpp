#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace novas {

enum class MethodKind {
    Simple,
    Exponential,
    GenSimple,
    GenExponential,
    GA,
    GenExponentialNoBeta,
    GANoBeta,
};

inline constexpr MethodKind kAllMethodKinds[] = {
    MethodKind::Simple,   MethodKind::Exponential,          MethodKind::GenSimple,
    MethodKind::GenExponential, MethodKind::GA, MethodKind::GenExponentialNoBeta,
    MethodKind::GANoBeta,
};

/// True when the contemporaneous Y_t^2 term (c0) is part of the transform.
constexpr bool has_beta(MethodKind k) noexcept {
    return k != MethodKind::GenExponentialNoBeta && k != MethodKind::GANoBeta;
}

/// False for the two original NoVaS families, which pin alpha to zero.
constexpr bool alpha_is_free(MethodKind k) noexcept {
    return k != MethodKind::Simple && k != MethodKind::Exponential;
}

std::string_view to_string(MethodKind k) noexcept;

/// Accepts the canonical names plus short aliases (ge, ga, pga, pge, ...).
/// Throws std::invalid_argument otherwise.
MethodKind parse_method_kind(std::string_view name);

/// Transform weights: alpha on the trailing variance, c[0] on Y_t^2 and
/// c[i] on Y_{t-i}^2. alpha + sum(c) = 1 and every entry is nonnegative.
class CoefficientVector {
public:
    /// Throws std::domain_error when the simplex or sign constraints fail,
    /// or when a without-beta kind carries a nonzero c[0].
    CoefficientVector(MethodKind kind, double alpha, std::vector<double> c);

    MethodKind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return alpha_; }
    std::span<const double> c() const noexcept { return c_; }
    double c0() const noexcept { return c_.front(); }
    std::size_t order() const noexcept { return c_.size() - 1; }

    /// Innovation bound 1/sqrt(c0); +inf when c0 == 0.
    double innovation_bound() const noexcept;

private:
    MethodKind kind_;
    double alpha_;
    std::vector<double> c_;
};

inline constexpr double kSimplexTolerance = 1e-12;

/// GARCH(1,1)-derived free parameters of the GA family.
struct GAFreeParams {
    double beta = 0.0;
    double a1 = 0.0;
    double b1 = 0.0;
};

struct CalibrationGrids {
    std::vector<double> alpha_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    /// Spacing of the beta, a1, b1 grids on (0, 1).
    double unit_grid_step = 0.02;
    /// Decay rates c for the exponential families.
    std::vector<double> c_grid = default_c_grid();
    /// Largest admissible c0 for beta-bearing kinds (1/sqrt(c0) >= 3).
    double beta_cap = 0.111;
    std::size_t max_escalations = 3;
    /// Highest order searched by the simple families before escalation.
    std::size_t simple_order_cap = 50;

    /// 60 log-spaced points on [0.01, 3].
    static std::vector<double> default_c_grid();
    static CalibrationGrids standard();
    /// Reduced budget: alpha {0.2, 0.5, 0.8}, unit step 0.05.
    static CalibrationGrids fast();

    /// Points step, 2*step, ... strictly inside (0, 1).
    std::vector<double> unit_grid() const;
};

struct CalibratedTransform {
    CoefficientVector coeffs;
    /// |KURT(W) - 3| at the selected grid point.
    double objective = 0.0;
    /// W_{q+1}..W_n, also the empirical innovation pool.
    std::vector<double> w_series;
    /// Selected free parameters, for whichever family applies.
    std::optional<GAFreeParams> ga_params;
    std::optional<double> decay;
    std::size_t escalations = 0;
};

inline constexpr double kTailThreshold = 1e-8;
inline constexpr std::size_t kOrderFloor = 10;
inline constexpr std::size_t kOrderCap = 50;

/// Smallest p with e^{-c p} < 1e-8, clamped to [10, 50].
std::size_t default_exponential_order(double c);
/// Smallest q with a1 * b1^{q-1} < 1e-8, clamped to [10, 50].
std::size_t default_ga_order(double a1, double b1);
/// Order after `level` escalations, each multiplying by 1.5 and rounding up.
std::size_t escalate_order(std::size_t order, std::size_t level);

/// Equal weights (1 - alpha)/(p + 1) on Y_t^2..Y_{t-p}^2.
CoefficientVector build_simple_coeffs(double alpha, std::size_t p);

/// Exponentially decaying weights e^{-c i}. With beta the weights cover
/// i = 0..p; without it c0 = 0 and the decay starts at lag 1.
CoefficientVector build_exponential_coeffs(double alpha, double c, std::size_t p, bool with_beta);

/// Truncated ARCH(inf) weights of a GARCH(1,1): (beta/(1-b1), a1, a1 b1, ...,
/// a1 b1^{q-1}), rescaled so the vector sums to 1 - alpha.
CoefficientVector build_ga_coeffs(double alpha, const GAFreeParams& params, std::size_t q,
                                  bool with_beta);

/// W_t for t = q+1..n. Throws DegenerateDataError when the history part of a
/// denominator (alpha s^2 + lagged terms) is zero.
std::vector<double> forward_transform(std::span<const double> returns,
                                      const CoefficientVector& coeffs);

/// |KURT(W) - 3|.
double normality_objective(std::span<const double> w);

/// Grid search minimizing |KURT(W) - 3| for a fixed alpha. Alpha must be 0
/// for Simple/Exponential and a member of grids.alpha_grid otherwise.
CalibratedTransform calibrate(std::span<const double> returns, MethodKind kind, double alpha,
                              const CalibrationGrids& grids);

} // namespace novas
