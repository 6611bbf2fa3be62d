#include "novas/errors.hpp"
#include "novas/simulators.hpp"
#include "novas/transform.hpp"

#include "test_helpers.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>

using namespace novas;
using Catch::Approx;

namespace {

double simplex_sum(const CoefficientVector& cv) {
    return std::accumulate(cv.c().begin(), cv.c().end(), cv.alpha());
}

} // namespace

TEST_CASE("method kind names round-trip", "[transform]") {
    for (auto k : kAllMethodKinds) CHECK(parse_method_kind(to_string(k)) == k);
    CHECK(parse_method_kind("P-GA") == MethodKind::GANoBeta);
    CHECK(parse_method_kind("GE") == MethodKind::GenExponential);
    CHECK_THROWS_AS(parse_method_kind("garch"), std::invalid_argument);
}

TEST_CASE("coefficient vectors enforce their invariants", "[transform]") {
    CHECK_NOTHROW(CoefficientVector(MethodKind::GA, 0.2, {0.3, 0.5}));
    CHECK_THROWS_AS(CoefficientVector(MethodKind::GA, 0.2, {0.3, 0.4}), std::domain_error);
    CHECK_THROWS_AS(CoefficientVector(MethodKind::GA, 0.2, {-0.1, 0.9}), std::domain_error);
    CHECK_THROWS_AS(CoefficientVector(MethodKind::GANoBeta, 0.2, {0.3, 0.5}), std::domain_error);
    CHECK_THROWS_AS(CoefficientVector(MethodKind::GA, 0.2, {0.8}), std::domain_error);
    CHECK(CoefficientVector(MethodKind::GA, 0.0, {0.25, 0.75}).innovation_bound() == Approx(2.0));
    CHECK(std::isinf(CoefficientVector(MethodKind::GANoBeta, 0.5, {0.0, 0.5}).innovation_bound()));
}

TEST_CASE("equal weights when the decay rate is zero", "[transform]") {
    const auto cv = build_exponential_coeffs(0.0, 0.0, 1, true);
    CHECK(cv.c()[0] == Approx(0.5).epsilon(1e-15));
    CHECK(cv.c()[1] == Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(build_exponential_coeffs(0.0, -0.1, 3, true), std::domain_error);
}

TEST_CASE("exponential coefficients with decay ln 2", "[transform]") {
    const auto cv = build_exponential_coeffs(0.2, std::log(2.0), 2, true);
    const double cp = 0.8 / 1.75;
    REQUIRE(cv.order() == 2);
    CHECK(cv.c()[0] == Approx(cp).epsilon(1e-14));
    CHECK(cv.c()[0] == Approx(0.45714285714285714).epsilon(1e-14));
    CHECK(cv.c()[1] == Approx(0.22857142857142857).epsilon(1e-14));
    CHECK(cv.c()[2] == Approx(0.11428571428571429).epsilon(1e-14));
}

TEST_CASE("exponential coefficients without beta start at lag one", "[transform]") {
    const auto cv = build_exponential_coeffs(0.3, 0.5, 4, false);
    CHECK(cv.c0() == 0.0);
    double denom = 0.0;
    for (int j = 1; j <= 4; ++j) denom += std::exp(-0.5 * j);
    for (int i = 1; i <= 4; ++i) CHECK(cv.c()[i] == Approx(0.7 * std::exp(-0.5 * i) / denom).epsilon(1e-14));
}

TEST_CASE("simple coefficients are equal", "[transform]") {
    const auto cv = build_simple_coeffs(0.4, 5);
    for (double c : cv.c()) CHECK(c == Approx(0.1).epsilon(1e-14));
}

TEST_CASE("GA coefficients by hand", "[transform]") {
    const auto cv = build_ga_coeffs(0.2, {0.1, 0.3, 0.5}, 3, true);
    const double scale = 0.8 / 0.725;
    REQUIRE(cv.order() == 3);
    CHECK(cv.c()[0] == Approx(0.2 * scale).epsilon(1e-14));
    CHECK(cv.c()[0] == Approx(0.22068965517241379).epsilon(1e-14));
    CHECK(cv.c()[1] == Approx(0.33103448275862069).epsilon(1e-14));
    CHECK(cv.c()[2] == Approx(0.16551724137931034).epsilon(1e-14));
    CHECK(cv.c()[3] == Approx(0.08275862068965517).epsilon(1e-14));
}

TEST_CASE("GA without beta collapses onto lag one as b1 vanishes", "[transform]") {
    const auto cv = build_ga_coeffs(0.3, {0.0, 0.4, 0.0}, 5, false);
    CHECK(cv.c()[1] == Approx(0.7).epsilon(1e-15));
    for (std::size_t i = 2; i <= 5; ++i) CHECK(cv.c()[i] == 0.0);
    const auto tiny = build_ga_coeffs(0.3, {0.0, 0.4, 1e-12}, 5, false);
    CHECK(tiny.c()[1] == Approx(0.7).epsilon(1e-11));
}

TEST_CASE("GA-without-beta with b1 = exp(-c) equals GE-without-beta", "[transform]") {
    for (double c : CalibrationGrids::default_c_grid()) {
        for (std::size_t q : {10u, 30u, 50u}) {
            const auto ga = build_ga_coeffs(0.4, {0.0, 0.2, std::exp(-c)}, q, false);
            const auto ge = build_exponential_coeffs(0.4, c, q, false);
            for (std::size_t i = 0; i <= q; ++i) REQUIRE(std::abs(ga.c()[i] - ge.c()[i]) <= 1e-12);
        }
    }
}

TEST_CASE("random constructions satisfy the simplex", "[transform][property]") {
    Rng rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> order(1, 60);
    for (int i = 0; i < 2000; ++i) {
        const double alpha = u(rng);
        const std::size_t q = order(rng);
        const auto e = build_exponential_coeffs(alpha, 3.0 * u(rng), q, i % 2 == 0);
        const auto g = build_ga_coeffs(alpha, {0.01 + 0.3 * u(rng), 0.01 + 0.3 * u(rng), 0.9 * u(rng)}, q, i % 2 == 1);
        const auto s = build_simple_coeffs(alpha, q);
        for (const auto* cv : {&e, &g, &s}) {
            REQUIRE(std::abs(simplex_sum(*cv) - 1.0) <= 1e-12);
            for (double c : cv->c()) REQUIRE(c >= 0.0);
        }
    }
}

TEST_CASE("order helpers", "[transform]") {
    CHECK(default_exponential_order(3.0) == kOrderFloor);
    CHECK(default_exponential_order(0.01) == kOrderCap);
    // e^{-0.5 p} < 1e-8 first at p = 37
    CHECK(default_exponential_order(0.5) == 37);
    CHECK(default_ga_order(0.1, 0.9) == kOrderCap);
    CHECK(default_ga_order(0.1, 0.1) == kOrderFloor);
    CHECK(escalate_order(10, 0) == 10);
    CHECK(escalate_order(10, 1) == 15);
    CHECK(escalate_order(15, 1) == 23);
    CHECK(escalate_order(10, 3) == 35);
}

TEST_CASE("forward transform by hand", "[transform]") {
    const std::vector<double> y{1.0, 2.0};
    const CoefficientVector cv(MethodKind::GenExponential, 0.0, {0.5, 0.5});
    const auto w = forward_transform(y, cv);
    REQUIRE(w.size() == 1);
    CHECK(w[0] == Approx(2.0 / std::sqrt(2.5)).epsilon(1e-15));
    CHECK(w[0] == Approx(1.2649110640673518).epsilon(1e-15));
}

TEST_CASE("alpha one standardizes by the trailing deviation", "[transform]") {
    const auto y = test::random_returns(100, 4);
    const CoefficientVector cv(MethodKind::GenSimple, 1.0, {0.0, 0.0, 0.0});
    const auto w = forward_transform(y, cv);
    REQUIRE(w.size() == 98);
    for (std::size_t k = 0; k < w.size(); ++k) {
        const std::size_t t = k + 3;  // 1-based index of W
        CHECK(w[k] == Approx(y[t - 1] / std::sqrt(trailing_stats(y, t).s_sq)).epsilon(1e-13));
    }
}

TEST_CASE("transformed values respect 1/sqrt(c0)", "[transform][property]") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto y = test::random_returns(300, seed);
        y[150] *= 1e3;
        const CoefficientVector cv(MethodKind::GenSimple, 0.5, {0.1, 0.2, 0.2});
        for (double w : forward_transform(y, cv)) REQUIRE(std::abs(w) <= std::sqrt(10.0));
    }
}

TEST_CASE("forward transform rejects an all-zero history", "[transform]") {
    const std::vector<double> y(30, 0.0);
    const CoefficientVector cv(MethodKind::GANoBeta, 0.5, {0.0, 0.5});
    CHECK_THROWS_AS(forward_transform(y, cv), DegenerateDataError);
}

TEST_CASE("calibration output is on the simplex and respects the cap", "[transform][calibrate]") {
    const auto y = dataset_returns(generate({3, 500, 17, 500}));
    const auto grids = CalibrationGrids::fast();
    for (auto kind : kAllMethodKinds) {
        for (double alpha : alpha_is_free(kind) ? grids.alpha_grid : std::vector<double>{0.0}) {
            try {
                const auto t = calibrate(y.values(), kind, alpha, grids);
                INFO(to_string(kind) << " alpha " << alpha);
                CHECK(std::abs(simplex_sum(t.coeffs) - 1.0) <= 1e-12);
                CHECK(t.coeffs.alpha() == alpha);
                if (has_beta(kind)) CHECK(t.coeffs.c0() <= 0.111);
                if (kind == MethodKind::GA) {
                    for (std::size_t i = 1; i <= t.coeffs.order(); ++i) CHECK(t.coeffs.c0() >= t.coeffs.c()[i]);
                }
                CHECK(t.w_series.size() == y.size() - t.coeffs.order());
                CHECK(t.objective == Approx(normality_objective(t.w_series)).epsilon(1e-12));
            } catch (const CalibrationError&) {
                // Only the beta cap can make a grid infeasible.
                CHECK(has_beta(kind));
            }
        }
    }
}

TEST_CASE("calibration rejects alphas outside the grid", "[transform][calibrate]") {
    const auto y = test::random_returns(200, 1);
    CHECK_THROWS_AS(calibrate(y, MethodKind::GA, 0.25, CalibrationGrids::standard()), std::invalid_argument);
    CHECK_THROWS_AS(calibrate(y, MethodKind::Simple, 0.2, CalibrationGrids::standard()), std::invalid_argument);
    CHECK_THROWS_AS(calibrate(std::vector<double>(15, 1.0), MethodKind::GANoBeta, 0.5, CalibrationGrids::standard()),
                    std::invalid_argument);
}

TEST_CASE("infeasible GA reports the nearest capped objective", "[transform][calibrate]") {
    const auto y = dataset_returns(generate({3, 500, 7, 500}));
    try {
        calibrate(y.values(), MethodKind::GA, 0.2, CalibrationGrids::fast());
        FAIL("expected a calibration failure");
    } catch (const CalibrationError& e) {
        CHECK(std::isfinite(e.best_objective()));
    }
}

// Without c0 the transform is unbounded and can reach kurtosis 3; bounded
// transforms stay below 3 on near-Gaussian data like Model 3.
TEST_CASE("calibration improves on the raw kurtosis gap", "[calibrate][kurtosis-oracle]") {
    int better = 0;
    const auto grids = CalibrationGrids::standard();
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto y = generate({3, 500, seed, 500});
        const auto t = calibrate(y.values(), MethodKind::GANoBeta, 0.5, grids);
        if (t.objective <= std::abs(sample_kurtosis(y.values()) - 3.0)) ++better;
    }
    CHECK(better >= 95);
}

TEST_CASE("calibration is deterministic", "[transform][calibrate]") {
    const auto y = test::random_returns(250, 8);
    const auto a = calibrate(y, MethodKind::GANoBeta, 0.5, CalibrationGrids::fast());
    const auto b = calibrate(y, MethodKind::GANoBeta, 0.5, CalibrationGrids::fast());
    CHECK(std::equal(a.coeffs.c().begin(), a.coeffs.c().end(), b.coeffs.c().begin()));
    CHECK(a.w_series == b.w_series);
}
