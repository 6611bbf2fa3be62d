#include "novas/errors.hpp"
#include "novas/evaluation.hpp"
#include "novas/garch.hpp"
#include "novas/io.hpp"
#include "novas/predict.hpp"
#include "novas/simulators.hpp"
#include "novas/transform.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace novas;

namespace {

CalibrationGrids grids_for(bool fast) { return fast ? CalibrationGrids::fast() : CalibrationGrids::standard(); }

py::dict transform_dict(const CalibratedTransform& t) {
    py::dict d;
    d["kind"] = std::string(to_string(t.coeffs.kind()));
    d["alpha"] = t.coeffs.alpha();
    d["coefficients"] = std::vector<double>(t.coeffs.c().begin(), t.coeffs.c().end());
    d["objective"] = t.objective;
    d["w"] = t.w_series;
    d["escalations"] = t.escalations;
    if (t.ga_params) d["ga_params"] = py::make_tuple(t.ga_params->beta, t.ga_params->a1, t.ga_params->b1);
    if (t.decay) d["decay"] = *t.decay;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "NoVaS volatility forecasting: transforms, GARCH benchmark, simulators and evaluation.";

    py::register_exception<DegenerateDataError>(m, "DegenerateDataError", PyExc_ValueError);
    py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<DegenerateTestError>(m, "DegenerateTestError", PyExc_ValueError);

    m.def("log_returns", [](const std::vector<double>& prices) {
        const auto r = to_log_returns(PriceSeries(prices));
        return std::vector<double>(r.values().begin(), r.values().end());
    }, py::arg("prices"), "Percent log-returns 100 log(X_{t+1}/X_t).");

    m.def("simulate", [](int model, std::size_t n, std::uint64_t seed, std::size_t burn_in) {
        const auto r = generate({model, n, seed, burn_in});
        return std::vector<double>(r.values().begin(), r.values().end());
    }, py::arg("model"), py::arg("n") = 500, py::arg("seed") = 0, py::arg("burn_in") = 500,
       "Simulate Models 1-8.");

    m.def("coefficients", [](const std::string& kind, double alpha, double param, std::size_t order,
                             double a1, double b1) {
        const auto k = parse_method_kind(kind);
        std::optional<CoefficientVector> cv;
        switch (k) {
        case MethodKind::Simple:
        case MethodKind::GenSimple: cv = build_simple_coeffs(alpha, order); break;
        case MethodKind::Exponential:
        case MethodKind::GenExponential:
        case MethodKind::GenExponentialNoBeta:
            cv = build_exponential_coeffs(alpha, param, order, has_beta(k));
            break;
        case MethodKind::GA:
        case MethodKind::GANoBeta: cv = build_ga_coeffs(alpha, {param, a1, b1}, order, has_beta(k)); break;
        }
        return std::vector<double>(cv->c().begin(), cv->c().end());
    }, py::arg("kind"), py::arg("alpha"), py::arg("param"), py::arg("order"), py::arg("a1") = 0.0,
       py::arg("b1") = 0.0,
       "Transform weights c0..cq. `param` is the decay rate c, or beta for the GA kinds.");

    m.def("forward_transform", [](const std::vector<double>& returns, const std::string& kind, double alpha,
                                  const std::vector<double>& c) {
        return forward_transform(returns, CoefficientVector(parse_method_kind(kind), alpha, c));
    }, py::arg("returns"), py::arg("kind"), py::arg("alpha"), py::arg("c"));

    m.def("calibrate", [](const std::vector<double>& returns, const std::string& kind, double alpha, bool fast) {
        return transform_dict(calibrate(returns, parse_method_kind(kind), alpha, grids_for(fast)));
    }, py::arg("returns"), py::arg("kind"), py::arg("alpha"), py::arg("fast") = false,
       "Kurtosis-matching grid search for one alpha.");

    m.def("forecast", [](const std::vector<double>& returns, const std::string& kind, double alpha,
                         std::size_t horizon, std::size_t paths, const std::string& criterion,
                         const std::string& source, std::uint64_t seed, bool fast) {
        const auto t = calibrate(returns, parse_method_kind(kind), alpha, grids_for(fast));
        ForecastRequest req;
        req.horizon = horizon;
        req.paths = paths;
        req.criterion = parse_risk_criterion(criterion);
        req.source = parse_innovation_mode(source);
        req.seed = seed;
        return novas::forecast(returns, t, req).per_step;
    }, py::arg("returns"), py::arg("kind"), py::arg("alpha"), py::arg("horizon") = 1, py::arg("paths") = 5000,
       py::arg("criterion") = "l2", py::arg("source") = "normal", py::arg("seed") = 0, py::arg("fast") = false,
       "Per-step predictions of Y^2_{n+1}..Y^2_{n+h}.");

    m.def("fit_garch", [](const std::vector<double>& returns) {
        const auto f = fit_garch11(returns);
        py::dict d;
        d["omega"] = f.params.omega;
        d["a1"] = f.params.a1;
        d["b1"] = f.params.b1;
        d["loglik"] = f.loglik;
        d["converged"] = f.converged;
        d["sigma2"] = f.sigma2_path;
        return d;
    }, py::arg("returns"), "GARCH(1,1) quasi-MLE.");

    m.def("garch_forecast", [](double omega, double a1, double b1, double last_y2, double last_sigma2,
                               std::size_t h) {
        return forecast_sq_returns({omega, a1, b1}, last_y2, last_sigma2, h);
    }, py::arg("omega"), py::arg("a1"), py::arg("b1"), py::arg("last_y2"), py::arg("last_sigma2"), py::arg("h"));

    m.def("evaluate", [](const std::vector<double>& returns, const std::vector<std::string>& methods,
                         std::size_t width, const std::vector<std::size_t>& horizons, std::size_t paths,
                         std::uint64_t seed, bool fast, std::size_t threads) {
        PoosConfig cfg;
        cfg.plan.width = width > 0 ? width : WindowPlan::for_length(returns.size()).width;
        cfg.plan.horizons = horizons;
        cfg.methods.clear();
        for (const auto& name : methods) cfg.methods.push_back(parse_method(name));
        cfg.grids = grids_for(fast);
        cfg.paths = paths;
        cfg.seed = seed;
        cfg.threads = threads;
        PoosResult result;
        {
            py::gil_scoped_release release;
            result = run_poos(returns, cfg);
        }
        const auto report = build_report("data", result);
        py::list rows;
        for (const auto& row : report.rows) {
            py::dict d;
            d["method"] = row.method.label();
            d["horizon"] = row.horizon;
            d["P"] = row.p;
            d["relative"] = row.relative;
            d["selected"] = row.selected;
            rows.append(d);
        }
        return rows;
    }, py::arg("returns"), py::arg("methods") = std::vector<std::string>{"GE", "GA", "P-GA", "GARCH"},
       py::arg("width") = 0, py::arg("horizons") = std::vector<std::size_t>{1, 5, 30}, py::arg("paths") = 1000,
       py::arg("seed") = 0, py::arg("fast") = true, py::arg("threads") = 0,
       "Rolling out-of-sample comparison; relative P against GARCH-direct.");

    m.def("cw_test", [](const std::vector<double>& errors_small, const std::vector<double>& errors_large,
                        const std::vector<double>& forecasts_small, const std::vector<double>& forecasts_large) {
        const auto r = novas::cw_test(errors_small, errors_large, forecasts_small, forecasts_large);
        return py::make_tuple(r.statistic, r.p_value, r.n_obs);
    }, py::arg("errors_small"), py::arg("errors_large"), py::arg("forecasts_small"), py::arg("forecasts_large"),
       "Clark-West statistic, one-sided p-value and sample size.");

    m.attr("__version__") = library_version();
}
