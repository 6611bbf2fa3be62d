// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "novas/cli.hpp"
#include "novas/errors.hpp"
#include "novas/evaluation.hpp"
#include "novas/garch.hpp"
#include "novas/predict.hpp"
#include "novas/rng.hpp"
#include "novas/simulators.hpp"
#include "novas/transform.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace novas;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<double> random_series(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> u(0.2, 3.0);
    const double scale = u(rng);
    std::vector<double> out(n);
    double vol = 1.0;
    for (auto& y : out) {
        vol = 0.1 + 0.85 * vol + 0.05 * normal(rng) * normal(rng);
        y = scale * std::sqrt(std::abs(vol)) * normal(rng);
    }
    return out;
}

// A random valid coefficient vector of the given kind.
CoefficientVector random_coeffs(MethodKind kind, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> order(1, 50);
    const double alpha = alpha_is_free(kind) ? u(rng) : 0.0;
    const std::size_t q = order(rng);
    switch (kind) {
    case MethodKind::Simple:
    case MethodKind::GenSimple:
        return build_simple_coeffs(alpha, q);
    case MethodKind::Exponential:
    case MethodKind::GenExponential:
    case MethodKind::GenExponentialNoBeta:
        return build_exponential_coeffs(alpha, 0.01 + 2.99 * u(rng), q, has_beta(kind));
    case MethodKind::GA:
    case MethodKind::GANoBeta: {
        for (;;) {
            const GAFreeParams p{has_beta(kind) ? 0.001 + 0.5 * u(rng) : 0.0, 0.001 + 0.5 * u(rng),
                                 0.999 * u(rng)};
            if (p.beta + p.a1 + p.b1 >= 1.0) continue;
            if (has_beta(kind) && p.beta / (1.0 - p.b1) < p.a1) continue;
            return build_ga_coeffs(alpha, p, q, has_beta(kind));
        }
    }
    }
    throw std::logic_error("unreachable");
}

Outcome criterion_1() {
    const auto start = Clock::now();
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const auto kind = kAllMethodKinds[i % 7];
        Rng rng(substream_seed(1, {i}));
        const auto cv = random_coeffs(kind, rng);
        const auto y = random_series(cv.order() + 150, substream_seed(2, {i}));
        const auto w = forward_transform(y, cv);
        const std::size_t q = cv.order();
        std::vector<double> lags(q);
        for (std::size_t k = 0; k < w.size(); ++k) {
            const std::size_t t = k + q + 1;
            for (std::size_t j = 1; j <= q; ++j) lags[j - 1] = y[t - 1 - j] * y[t - 1 - j];
            const double s_sq = trailing_stats(y, t).s_sq;
            const double rebuilt = std::sqrt(inverse_step(w[k], cv, lags, s_sq));
            worst = std::max(worst, std::abs(rebuilt - std::abs(y[t - 1])));
        }
    }
    const double secs = seconds_since(start);
    return {worst <= 1e-10 && secs <= 60.0,
            "max |error| " + fmt("%.3g", worst) + " over 1000 series, " + fmt("%.1f", secs) + " s"};
}

Outcome criterion_2() {
    Rng rng(22);
    std::size_t bad_simplex = 0, negative = 0, bad_order = 0, bad_decay = 0;
    for (std::size_t i = 0; i < 10000; ++i) {
        const auto kind = kAllMethodKinds[i % 7];
        const auto cv = random_coeffs(kind, rng);
        const auto c = cv.c();
        const double sum = std::accumulate(c.begin(), c.end(), cv.alpha());
        if (std::abs(sum - 1.0) > 1e-12) ++bad_simplex;
        for (double v : c) if (v < 0.0) ++negative;
        if (kind == MethodKind::GA) {
            for (std::size_t k = 1; k < c.size(); ++k) if (c[k] > c[0]) ++bad_order;
        }
        if (kind == MethodKind::GA || kind == MethodKind::GANoBeta) {
            // Lags 1..q decay geometrically with a common ratio.
            if (c.size() > 3 && c[1] > 0.0) {
                const double ratio = c[2] / c[1];
                for (std::size_t k = 2; k + 1 < c.size(); ++k) {
                    if (std::abs(c[k + 1] - ratio * c[k]) > 1e-12) ++bad_decay;
                }
            }
        }
    }
    // Calibrated beta-bearing transforms must respect the cap.
    std::size_t calibrated = 0, over_cap = 0;
    const auto grids = CalibrationGrids::fast();
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto y = dataset_returns(generate({3, 500, s, 500}));
        for (auto kind : kAllMethodKinds) {
            if (!has_beta(kind)) continue;
            for (double alpha : alphas_for(kind, grids)) {
                try {
                    const auto t = calibrate(y.values(), kind, alpha, grids);
                    ++calibrated;
                    if (t.coeffs.c0() > 0.111) ++over_cap;
                } catch (const CalibrationError&) {
                }
            }
        }
    }
    const bool pass = bad_simplex == 0 && negative == 0 && bad_order == 0 && bad_decay == 0 &&
                      over_cap == 0 && calibrated > 0;
    std::ostringstream d;
    d << "10000 constructions: simplex " << bad_simplex << ", negative " << negative << ", GA order "
      << bad_order << ", decay " << bad_decay << " violations; " << calibrated
      << " calibrations, " << over_cap << " with c0 > 0.111";
    return {pass, d.str()};
}

Outcome criterion_3() {
    double worst = 0.0;
    std::size_t checks = 0;
    for (double c : CalibrationGrids::default_c_grid()) {
        for (std::size_t q : {10u, 30u, 50u}) {
            for (double alpha : CalibrationGrids::standard().alpha_grid) {
                const auto ga = build_ga_coeffs(alpha, {0.0, 0.3, std::exp(-c)}, q, false);
                const auto ge = build_exponential_coeffs(alpha, c, q, false);
                for (std::size_t i = 0; i <= q; ++i) worst = std::max(worst, std::abs(ga.c()[i] - ge.c()[i]));
                ++checks;
            }
        }
    }
    return {worst <= 1e-12, std::to_string(checks) + " vectors, max |diff| " + fmt("%.3g", worst)};
}

Outcome criterion_4() {
    const auto trimmed = InnovationSource::trimmed_normal(1.0 / std::sqrt(0.111));
    Rng rng(44);
    std::size_t outside = 0;
    double largest = 0.0;
    for (int i = 0; i < 1'000'000; ++i) {
        const double w = trimmed.draw(rng);
        largest = std::max(largest, std::abs(w));
        if (!(std::abs(w) < 3.0003)) ++outside;
    }
    std::vector<double> pool(257);
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = std::sin(static_cast<double>(i)) * 2.5;
    const auto boot = InnovationSource::bootstrap(pool);
    std::size_t foreign = 0;
    for (int i = 0; i < 100000; ++i) {
        const double w = boot.draw(rng);
        if (std::find(pool.begin(), pool.end(), w) == pool.end()) ++foreign;
    }
    std::ostringstream d;
    d << outside << " of 1e6 trimmed draws with |w| >= 3.0003 (bound 1/sqrt(0.111) = "
      << fmt("%.5f", 1.0 / std::sqrt(0.111)) << ", max |w| " << fmt("%.5f", largest) << "); "
      << foreign << " bootstrap draws outside the pool";
    return {outside == 0 && foreign == 0, d.str()};
}

Outcome criterion_5() {
    const auto start = Clock::now();
    const auto y = generate({3, 1'000'000, 55, 500});
    const auto v = y.values();
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(v.size() - 1);
    const double target = 1e-5 / (1.0 - 0.1 - 0.73);
    const auto end = model_coefficients(2, 500, 500);
    const double secs = seconds_since(start);
    const bool pass = std::abs(var / target - 1.0) <= 0.10 && end.alpha1 == 0.05 && end.beta1 == 0.93 && secs <= 30.0;
    return {pass, "variance " + fmt("%.6g", var) + " vs " + fmt("%.6g", target) + ", Model 2 end (" +
                      fmt("%.17g", end.alpha1) + ", " + fmt("%.17g", end.beta1) + "), " +
                      fmt("%.1f", secs) + " s"};
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

Outcome criterion_6() {
    const auto start = Clock::now();
    std::vector<double> da, db;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto y = generate({3, 5000, substream_seed(66, {s}), 500});
        const auto fit = fit_garch11(y.values());
        da.push_back(std::abs(fit.params.a1 - 0.1));
        db.push_back(std::abs(fit.params.b1 - 0.73));
    }
    const double secs = seconds_since(start);
    const double ma = median(da), mb = median(db);
    return {ma <= 0.05 && mb <= 0.10 && secs <= 120.0,
            "median |a1 - 0.1| " + fmt("%.4f", ma) + ", median |b1 - 0.73| " + fmt("%.4f", mb) + ", " +
                fmt("%.1f", secs) + " s"};
}

Outcome criterion_7() {
    PoosConfig cfg;
    cfg.methods = {Method::of(MethodKind::GANoBeta), Method::garch_direct()};
    cfg.grids = CalibrationGrids::fast();
    cfg.grids.alpha_grid = {0.5};
    cfg.paths = 20;
    std::ostringstream d;
    bool pass = true;
    for (auto [n, width, expected] : {std::tuple{500u, 250u, std::vector<std::size_t>{249, 245, 220}},
                                      std::tuple{250u, 100u, std::vector<std::size_t>{149, 145, 120}}}) {
        const auto y = dataset_returns(generate({3, n, 77, 500}));
        cfg.plan.width = width;
        const auto r = run_poos(y.values(), cfg);
        d << "n=" << n << "/w=" << width << ": (";
        for (std::size_t i = 0; i < 3; ++i) {
            const std::size_t h = cfg.plan.horizons[i];
            for (const auto& m : cfg.methods) {
                if (r.series.at({m, h}).values.size() != expected[i]) pass = false;
            }
            d << r.series.at({Method::garch_direct(), h}).values.size() << (i < 2 ? ", " : ") ");
        }
    }
    return {pass, d.str()};
}

struct ReportCell {
    std::string dataset;
    std::size_t horizon;
    std::string method;
    double relative;
};

std::vector<ReportCell> read_report(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<ReportCell> out;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        out.push_back({f[0], std::stoul(f[1]), f[2], std::stod(f[4])});
    }
    return out;
}

int run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    if (code != 0) std::cerr << err.str();
    return code;
}

Outcome criterion_8(const fs::path& work) {
    const auto start = Clock::now();
    const auto a = work / "c8_m1";
    const auto b = work / "c8_all";
    if (run_cli({"evaluate", "--models", "1", "--n", "500", "--width", "250", "--fast", "--seed", "8", "--out", a.string()}) != 0 ||
        run_cli({"evaluate", "--models", "1,2,3,4,5,6,7,8", "--n", "250", "--fast", "--seed", "8", "--horizons", "1",
                 "--methods", "GE,GA,P-GA,GARCH", "--out", b.string()}) != 0) {
        return {false, "evaluate failed"};
    }
    std::ostringstream d;
    bool pass = true;
    d << "M1 30-step:";
    for (const auto& cell : read_report(a / "report.csv")) {
        if (cell.horizon != 30 || cell.method == "GARCH") continue;
        d << ' ' << cell.method << '=' << fmt("%.5f", cell.relative);
        if (!(cell.relative < 0.5)) pass = false;
    }
    int ok = 0;
    d << "; n=250 P-GA 1-step:";
    for (const auto& cell : read_report(b / "report.csv")) {
        if (cell.method != "P-GA") continue;
        d << ' ' << fmt("%.3f", cell.relative);
        if (cell.relative <= 1.05) ++ok;
    }
    const double secs = seconds_since(start);
    d << " (" << ok << "/8 <= 1.05), " << fmt("%.1f", secs) << " s";
    return {pass && ok >= 6 && secs <= 45 * 60, d.str()};
}

Outcome criterion_9() {
    // Nested null: y_t i.i.d. N(0,1), target y_t^2. The small model forecasts
    // the expanding mean of past squares; the large model adds a pure-noise
    // regressor x_t fitted by expanding-window OLS.
    const std::size_t r = 100, p = 150;
    int rejections = 0;
    const int reps = 500;
    for (int rep = 0; rep < reps; ++rep) {
        Rng rng(substream_seed(99, {static_cast<std::uint64_t>(rep)}));
        std::normal_distribution<double> normal;
        std::vector<double> y2(r + p), x(r + p);
        for (std::size_t t = 0; t < r + p; ++t) {
            const double y = normal(rng);
            y2[t] = y * y;
            x[t] = normal(rng);
        }
        std::vector<double> es, el, fs_, fl;
        double sy = 0, sx = 0, sxx = 0, sxy = 0;
        for (std::size_t t = 0; t < r; ++t) {
            sy += y2[t]; sx += x[t]; sxx += x[t] * x[t]; sxy += x[t] * y2[t];
        }
        for (std::size_t t = r; t < r + p; ++t) {
            const double n = static_cast<double>(t);
            const double mean_y = sy / n;
            const double mean_x = sx / n;
            const double slope = (sxy - n * mean_x * mean_y) / (sxx - n * mean_x * mean_x);
            const double fs_t = mean_y;
            const double fl_t = mean_y + slope * (x[t] - mean_x);
            fs_.push_back(fs_t);
            fl.push_back(fl_t);
            es.push_back(y2[t] - fs_t);
            el.push_back(y2[t] - fl_t);
            sy += y2[t]; sx += x[t]; sxx += x[t] * x[t]; sxy += x[t] * y2[t];
        }
        if (cw_test(es, el, fs_, fl).p_value < 0.05) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / reps;

    bool degenerate_reported = false;
    std::vector<double> e(40), f(40);
    for (std::size_t i = 0; i < 40; ++i) {
        e[i] = std::cos(static_cast<double>(i));
        f[i] = 2.0 + 0.01 * static_cast<double>(i);
    }
    try {
        cw_test(e, e, f, f);
    } catch (const DegenerateTestError&) {
        degenerate_reported = true;
    }
    return {rate >= 0.02 && rate <= 0.10 && degenerate_reported,
            "5% rejection rate " + fmt("%.3f", rate) + " over 500 null replications; identical forecasts " +
                (degenerate_reported ? "reported degenerate" : "NOT reported degenerate")};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion_10(const fs::path& work) {
    const std::vector<std::string> base{"evaluate", "--models", "2,6", "--n", "250", "--fast",
                                        "--seed", "10", "--methods", "GE,GA,P-GA,GARCH"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", (work / "c10_a").string()});
    b.insert(b.end(), {"--out", (work / "c10_b").string()});
    if (run_cli(a) != 0 || run_cli(b) != 0) return {false, "evaluate failed"};
    std::size_t same = 0;
    std::ostringstream d;
    const char* files[] = {"report.csv", "report.txt", "forecasts.csv", "cw.csv", "manifest.json"};
    for (const char* f : files) {
        const auto x = slurp(work / "c10_a" / f);
        if (!x.empty() && x == slurp(work / "c10_b" / f)) ++same;
        else d << f << " differs; ";
    }
    d << same << "/5 report files byte-identical";
    return {same == 5, d.str()};
}

} // namespace

int main() {
    const auto work = fs::temp_directory_path() / "novas_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"round-trip identity", criterion_1},
        {"simplex and constraint suite", criterion_2},
        {"parsimonious equivalence", criterion_3},
        {"trimmed-innovation bound", criterion_4},
        {"simulator moments", criterion_5},
        {"GARCH MLE recovery", criterion_6},
        {"window-count identity", criterion_7},
        {"M1 30-step ranking and n=250 P-GA parity", [&] { return criterion_8(work); }},
        {"CW-test calibration", criterion_9},
        {"end-to-end determinism", [&] { return criterion_10(work); }},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << " (" << criteria[i].first
                  << "): " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
