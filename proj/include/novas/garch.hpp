#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace novas {

struct GarchParams {
    double omega = 0.0;
    double a1 = 0.0;
    double b1 = 0.0;

    /// omega > 0, a1 >= 0, b1 >= 0, a1 + b1 < 1.
    bool admissible() const noexcept;
    /// omega / (1 - a1 - b1).
    double unconditional_variance() const noexcept;
};

struct GarchOptions {
    /// Subtract the sample mean before fitting. Off: returns are zero-mean.
    bool demean = false;
    std::size_t max_iterations = 2000;
    /// Upper bound imposed on a1 + b1 during the search.
    double persistence_cap = 0.999;
};

struct GarchFit {
    GarchParams params;
    /// Gaussian quasi log-likelihood without the -n/2 log(2 pi) constant.
    double loglik = 0.0;
    std::vector<double> sigma2_path;
    bool converged = false;
    double mean = 0.0;
};

/// sigma^2_1 = mean of y^2, then sigma^2_t = omega + a1 y^2_{t-1} + b1 sigma^2_{t-1}.
std::vector<double> garch_sigma2_path(std::span<const double> y, const GarchParams& params);

/// sum over t of -0.5 (log sigma^2_t + y^2_t / sigma^2_t).
double garch_loglik(std::span<const double> y, const GarchParams& params);

/// Quasi-MLE of a GARCH(1,1) from 5 fixed starting points; the best
/// likelihood wins. Non-convergence is flagged, never thrown.
/// Throws std::invalid_argument for fewer than 50 points and
/// DegenerateDataError for a zero-variance series.
GarchFit fit_garch11(std::span<const double> returns, const GarchOptions& options = {});

/// E[Y^2_{n+1}], ..., E[Y^2_{n+h}].
std::vector<double> forecast_sq_returns(const GarchParams& params, double last_y2,
                                        double last_sigma2, std::size_t h);

} // namespace novas
