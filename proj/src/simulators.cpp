#include "novas/simulators.hpp"

#include "novas/rng.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace novas {

namespace {

void check_model(int model_id) {
    if (model_id < 1 || model_id > 8) {
        throw std::invalid_argument("simulation model must be 1..8, got " +
                                    std::to_string(model_id));
    }
}

constexpr double kOmega = 0.00001;

} // namespace

VarianceCoefficients model_coefficients(int model_id, std::size_t t, std::size_t n) {
    check_model(model_id);
    const double g = n == 0 ? 0.0 : static_cast<double>(t) / static_cast<double>(n);
    switch (model_id) {
    case 1: {
        const double s = std::sin(0.5 * std::numbers::pi * g);
        return {-4.0 * s + 5.0, -1.0 * (g - 0.3) * (g - 0.3) + 0.5, 0.2 * s + 0.2};
    }
    case 2:
        // Written as interpolations so the t = n endpoints are exact.
        return {kOmega, 0.1 * (1.0 - g) + 0.05 * g, 0.73 * (1.0 - g) + 0.93 * g};
    case 3:
    case 5:
    case 8:
        return {kOmega, 0.1, 0.73};
    case 4:
        return {kOmega, 0.1, 0.8895};
    case 6:
        return {kOmega, 0.1, 0.8895};
    case 7:
        return {kOmega, 0.5, 0.5};
    }
    return {};
}

double initial_variance(int model_id) {
    check_model(model_id);
    const auto c = model_coefficients(model_id, 0, 1);
    switch (model_id) {
    case 5:
        // Raw t5 draws have variance 5/3.
        return c.omega / (1.0 - c.beta1 - c.alpha1 * 5.0 / 3.0);
    case 6:
        return std::exp(c.omega / (1.0 - c.beta1));
    case 7:
        // The leverage term removes half of the ARCH load on average.
        return c.omega / (1.0 - c.beta1 - c.alpha1 + 0.5 * 0.5);
    case 8:
        return c.omega / (1.0 - c.beta1 - c.alpha1 - 0.3 * 0.5);
    default:
        return c.omega / (1.0 - c.alpha1 - c.beta1);
    }
}

std::vector<double> draw_innovations(int model_id, std::size_t count, std::uint64_t seed) {
    check_model(model_id);
    Rng rng(seed);
    std::vector<double> out(count);
    if (model_id == 5) {
        std::student_t_distribution<double> t5(5.0);
        for (double& e : out) e = t5(rng);
    } else {
        std::normal_distribution<double> normal;
        for (double& e : out) e = normal(rng);
    }
    return out;
}

double variance_step(int model_id, const VarianceCoefficients& c, double sigma2, double prev_x,
                     double prev_eps) {
    const double x2 = prev_x * prev_x;
    switch (model_id) {
    case 6: {
        const double abs_mean = std::sqrt(2.0 / std::numbers::pi);
        const double log_sigma2 = c.omega + c.beta1 * std::log(sigma2) + c.alpha1 * prev_eps +
                                  0.3 * (std::abs(prev_eps) - abs_mean);
        return std::exp(log_sigma2);
    }
    case 7: {
        const double lev = prev_x <= 0.0 ? 1.0 : 0.0;
        return c.omega + c.beta1 * sigma2 + c.alpha1 * x2 - 0.5 * lev * x2;
    }
    case 8: {
        const double lev = prev_x <= 0.0 ? 1.0 : 0.0;
        return c.omega + c.beta1 * sigma2 + c.alpha1 * x2 + 0.3 * lev * x2;
    }
    default:
        return c.omega + c.beta1 * sigma2 + c.alpha1 * x2;
    }
}

ReturnSeries generate_from(int model_id, std::size_t n, std::span<const double> eps,
                           std::size_t burn_in) {
    check_model(model_id);
    if (n < 2) throw std::invalid_argument("simulated series needs n >= 2");
    if (eps.size() != burn_in + n) {
        throw std::invalid_argument("need burn_in + n innovations");
    }
    std::vector<double> out;
    out.reserve(n);
    double sigma2 = initial_variance(model_id);
    double prev_x = 0.0;
    for (std::size_t step = 0; step < eps.size(); ++step) {
        const std::size_t t = step < burn_in ? 0 : step - burn_in + 1;
        if (step > 0) {
            sigma2 = variance_step(model_id, model_coefficients(model_id, t, n), sigma2, prev_x,
                                   eps[step - 1]);
        }
        prev_x = std::sqrt(sigma2) * eps[step];
        if (step >= burn_in) out.push_back(prev_x);
    }
    return ReturnSeries(std::move(out));
}

ReturnSeries generate(const SimModelSpec& spec) {
    check_model(spec.model_id);
    if (spec.n < 2) throw std::invalid_argument("simulated series needs n >= 2");
    const auto eps = draw_innovations(spec.model_id, spec.burn_in + spec.n, spec.seed);
    return generate_from(spec.model_id, spec.n, eps, spec.burn_in);
}

ReturnSeries dataset_returns(const ReturnSeries& generated, DatasetMode mode) {
    if (generated.size() < 2) throw std::invalid_argument("dataset needs at least two points");
    const auto x = generated.values();
    if (mode == DatasetMode::Direct) {
        return ReturnSeries(std::vector<double>(x.begin() + 1, x.end()));
    }
    std::vector<double> prices(x.size());
    prices[0] = 100.0;
    for (std::size_t t = 1; t < x.size(); ++t) {
        prices[t] = prices[t - 1] * std::exp(x[t] / 100.0);
    }
    return to_log_returns(PriceSeries(std::move(prices)));
}

} // namespace novas
