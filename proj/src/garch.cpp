#include "novas/garch.hpp"

#include "novas/errors.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace novas {

bool GarchParams::admissible() const noexcept {
    return omega > 0.0 && a1 >= 0.0 && b1 >= 0.0 && a1 + b1 < 1.0;
}

double GarchParams::unconditional_variance() const noexcept { return omega / (1.0 - a1 - b1); }

std::vector<double> garch_sigma2_path(std::span<const double> y, const GarchParams& params) {
    std::vector<double> s2(y.size());
    if (y.empty()) return s2;
    double init = 0.0;
    for (double v : y) init += v * v;
    s2[0] = init / static_cast<double>(y.size());
    for (std::size_t t = 1; t < y.size(); ++t) {
        s2[t] = params.omega + params.a1 * y[t - 1] * y[t - 1] + params.b1 * s2[t - 1];
    }
    return s2;
}

double garch_loglik(std::span<const double> y, const GarchParams& params) {
    const auto s2 = garch_sigma2_path(y, params);
    double ll = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (!(s2[t] > 0.0)) return -std::numeric_limits<double>::infinity();
        ll -= 0.5 * (std::log(s2[t]) + y[t] * y[t] / s2[t]);
    }
    return ll;
}

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

struct Objective {
    std::span<const double> y;
    double cap;
};

GarchParams unpack(const gsl_vector* x) {
    return {std::exp(gsl_vector_get(x, 0)), logistic(gsl_vector_get(x, 1)),
            logistic(gsl_vector_get(x, 2))};
}

double negative_loglik(const gsl_vector* x, void* data) {
    const auto* obj = static_cast<const Objective*>(data);
    const auto p = unpack(x);
    const double persistence = p.a1 + p.b1;
    // Penalty grows with the violation so the simplex is pushed back inside.
    if (persistence > obj->cap) return 1e10 * (1.0 + persistence - obj->cap);
    const double ll = garch_loglik(obj->y, p);
    return std::isfinite(ll) ? -ll : 1e10;
}

struct MinimizerDeleter {
    void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
    void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

struct LocalResult {
    GarchParams params;
    double nll;
    bool converged;
};

LocalResult minimize_from(const Objective& obj, const GarchParams& start, std::size_t max_iter) {
    std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(3));
    std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(3));
    gsl_vector_set(x.get(), 0, std::log(start.omega));
    gsl_vector_set(x.get(), 1, logit(start.a1));
    gsl_vector_set(x.get(), 2, logit(start.b1));
    gsl_vector_set_all(step.get(), 0.5);

    gsl_multimin_function fn{&negative_loglik, 3, const_cast<Objective*>(&obj)};
    std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> solver(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3));
    gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), step.get());

    int status = GSL_CONTINUE;
    for (std::size_t iter = 0; iter < max_iter && status == GSL_CONTINUE; ++iter) {
        if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver.get()), 1e-7);
    }
    return {unpack(solver->x), solver->fval, status == GSL_SUCCESS};
}

} // namespace

GarchFit fit_garch11(std::span<const double> returns, const GarchOptions& options) {
    const std::size_t n = returns.size();
    if (n < 50) throw std::invalid_argument("GARCH(1,1) fit needs at least 50 points");

    if (std::adjacent_find(returns.begin(), returns.end(), std::not_equal_to<>()) == returns.end()) {
        throw DegenerateDataError("GARCH fit on a constant series");
    }
    double mean = 0.0;
    if (options.demean) mean = std::accumulate(returns.begin(), returns.end(), 0.0) / n;
    // Standardize so the optimizer works on O(1) parameters; omega scales back by sd^2.
    double ss = 0.0;
    for (double v : returns) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(n);
    if (!(var > 0.0)) throw DegenerateDataError("GARCH fit on a constant series");
    const double sd = std::sqrt(var);
    std::vector<double> z(n);
    for (std::size_t t = 0; t < n; ++t) z[t] = (returns[t] - mean) / sd;

    // gsl_multimin reports failures through return codes; keep the global
    // handler from aborting the process.
    gsl_set_error_handler_off();

    constexpr std::array<std::array<double, 2>, 5> kStarts{{
        {0.05, 0.90}, {0.10, 0.80}, {0.15, 0.70}, {0.05, 0.50}, {0.20, 0.40}}};
    const Objective obj{z, options.persistence_cap};
    std::optional<LocalResult> best;
    for (const auto& [a1, b1] : kStarts) {
        // mean(z^2) == 1, so this start sits at the unit unconditional variance.
        const GarchParams start{1.0 - a1 - b1, a1, b1};
        auto local = minimize_from(obj, start, options.max_iterations);
        if (!best || local.nll < best->nll) best = local;
    }

    GarchFit fit;
    fit.mean = mean;
    fit.converged = best->converged;
    fit.params = {best->params.omega * var, best->params.a1, best->params.b1};
    std::vector<double> centered(n);
    for (std::size_t t = 0; t < n; ++t) centered[t] = returns[t] - mean;
    fit.sigma2_path = garch_sigma2_path(centered, fit.params);
    fit.loglik = garch_loglik(centered, fit.params);
    return fit;
}

std::vector<double> forecast_sq_returns(const GarchParams& params, double last_y2,
                                        double last_sigma2, std::size_t h) {
    if (h == 0) throw std::invalid_argument("forecast horizon must be >= 1");
    std::vector<double> out(h);
    out[0] = params.omega + params.a1 * last_y2 + params.b1 * last_sigma2;
    const double persistence = params.a1 + params.b1;
    for (std::size_t j = 1; j < h; ++j) {
        out[j] = params.omega + persistence * out[j - 1];
    }
    return out;
}

} // namespace novas
