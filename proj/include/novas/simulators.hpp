#pragma once

#include "novas/series.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace novas {

/// Models 1-8: time-varying GARCH (1, 2), GARCH (3, 4), GARCH with raw t5
/// errors (5), EGARCH (6) and GJR-GARCH (7, 8).
struct SimModelSpec {
    int model_id = 3;
    std::size_t n = 500;
    std::uint64_t seed = 0;
    std::size_t burn_in = 500;
};

/// Variance-recursion coefficients in force at emitted step t (1-based) of n.
/// Models 1 and 2 evaluate g = t/n; t = 0 gives the burn-in values (g = 0).
/// For Model 6 these are the log-variance intercept and persistence, with
/// alpha1 holding the sign coefficient.
struct VarianceCoefficients {
    double omega = 0.0;
    double alpha1 = 0.0;
    double beta1 = 0.0;
};

VarianceCoefficients model_coefficients(int model_id, std::size_t t, std::size_t n);

/// Starting variance: the unconditional variance at g = 0, or 1e-5 if none.
double initial_variance(int model_id);

/// X_1..X_n after a discarded burn-in. Deterministic in spec.seed.
/// Throws std::invalid_argument for an unknown model or n < 2.
ReturnSeries generate(const SimModelSpec& spec);

/// One step of the model's variance recursion given the previous variance,
/// return X_{t-1} and innovation eps_{t-1}. Model 6 updates log-variance.
double variance_step(int model_id, const VarianceCoefficients& c, double sigma2, double prev_x,
                     double prev_eps);

/// generate() driven by caller-supplied innovations (burn_in + n of them).
ReturnSeries generate_from(int model_id, std::size_t n, std::span<const double> eps,
                           std::size_t burn_in);

/// The raw innovation stream the model would draw (N(0,1), or t5 for Model 5).
std::vector<double> draw_innovations(int model_id, std::size_t count, std::uint64_t seed);

/// How a simulated dataset of n observations becomes the n-1 returns the
/// experiments use. Direct treats X_2..X_n as returns. ViaPrices builds the
/// price path P_t = P_{t-1} exp(X_t / 100) and log-differences it, which
/// gives the same series up to rounding.
enum class DatasetMode { Direct, ViaPrices };

ReturnSeries dataset_returns(const ReturnSeries& generated, DatasetMode mode = DatasetMode::Direct);

} // namespace novas
