#include "novas/cli.hpp"

#include "novas/errors.hpp"
#include "novas/evaluation.hpp"
#include "novas/garch.hpp"
#include "novas/io.hpp"
#include "novas/predict.hpp"
#include "novas/rng.hpp"
#include "novas/simulators.hpp"
#include "novas/transform.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace novas {

namespace {

// Stream tag for deriving simulated dataset seeds from the run seed.
constexpr std::uint64_t kDatasetStream = 0x5349'4d44;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::size_t env_threads() {
    const char* v = std::getenv("NOVAS_THREADS");
    if (v == nullptr || *v == '\0') return 0;
    try {
        return static_cast<std::size_t>(std::stoul(v));
    } catch (const std::exception&) {
        throw ConfigError(std::string("NOVAS_THREADS must be a nonnegative integer, got '") + v + "'");
    }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << content;
}

std::string join(const std::vector<std::string>& xs, char sep = ',') {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += xs[i];
    }
    return out;
}

template <typename T>
std::string join_numbers(const std::vector<T>& xs) {
    std::vector<std::string> s;
    for (const auto& x : xs) {
        std::ostringstream os;
        os << x;
        s.push_back(os.str());
    }
    return join(s);
}

struct Budget {
    bool fast = false;
    std::size_t paths = 0;

    CalibrationGrids grids() const { return fast ? CalibrationGrids::fast() : CalibrationGrids::standard(); }
    std::size_t resolved_paths() const { return paths > 0 ? paths : (fast ? 1000 : 5000); }
};

void add_budget(CLI::App* sub, Budget& b) {
    sub->add_flag("--fast", b.fast, "Reduced budget: M=1000, alpha {0.2,0.5,0.8}, grid step 0.05");
    sub->add_option("--paths", b.paths, "Monte Carlo paths M (default 5000, or 1000 with --fast)");
}

// ---- simulate ----

struct SimulateArgs {
    int model = 3;
    std::size_t n = 500;
    std::uint64_t seed = 0;
    std::size_t burn_in = 500;
    bool raw = false;
    std::string mode = "direct";
    std::string out;
};

int do_simulate(const SimulateArgs& a, std::ostream& out) {
    SimModelSpec spec{a.model, a.n, a.seed, a.burn_in};
    const auto generated = generate(spec);
    const auto mode = a.mode == "prices" ? DatasetMode::ViaPrices : DatasetMode::Direct;
    const auto series = a.raw ? generated : dataset_returns(generated, mode);
    std::ostringstream csv;
    write_returns_csv(csv, series);
    if (a.out.empty() || a.out == "-") {
        out << csv.str();
    } else {
        write_file(a.out, csv.str());
    }
    return kExitOk;
}

// ---- calibrate ----

struct CalibrateArgs {
    std::string input;
    std::string kind = "ga";
    double alpha = -1.0;
    std::size_t window = 0;
    Budget budget;
};

ReturnSeries tail_window(const ReturnSeries& r, std::size_t width) {
    if (width == 0 || width >= r.size()) return r;
    return r.slice(r.size() - width, width);
}

double resolve_alpha(MethodKind kind, double requested) {
    if (!alpha_is_free(kind)) {
        if (requested > 0.0) throw ConfigError(std::string(to_string(kind)) + " has alpha pinned at 0");
        return 0.0;
    }
    return requested < 0.0 ? 0.5 : requested;
}

int do_calibrate(const CalibrateArgs& a, std::ostream& out) {
    const auto kind = parse_method_kind(a.kind);
    const double alpha = resolve_alpha(kind, a.alpha);
    const auto data = tail_window(load_returns(a.input), a.window);
    const auto t = calibrate(data.values(), kind, alpha, a.budget.grids());
    double sum = t.coeffs.alpha();
    for (double c : t.coeffs.c()) sum += c;
    out << "kind " << to_string(kind) << '\n';
    out << "alpha " << format_double(t.coeffs.alpha()) << '\n';
    out << "order " << t.coeffs.order() << '\n';
    out << "objective " << format_double(t.objective) << '\n';
    if (t.ga_params) {
        out << "beta " << format_double(t.ga_params->beta) << '\n';
        out << "a1 " << format_double(t.ga_params->a1) << '\n';
        out << "b1 " << format_double(t.ga_params->b1) << '\n';
    }
    if (t.decay) out << "decay " << format_double(*t.decay) << '\n';
    out << "escalations " << t.escalations << '\n';
    out << "alpha_plus_sum " << format_double(sum) << '\n';
    for (std::size_t i = 0; i < t.coeffs.c().size(); ++i) {
        out << 'c' << i << ' ' << format_double(t.coeffs.c()[i]) << '\n';
    }
    return kExitOk;
}

// ---- forecast ----

struct ForecastArgs {
    std::string input;
    std::string kind = "ga";
    double alpha = -1.0;
    std::size_t window = 0;
    std::vector<std::size_t> horizons{1, 5, 30};
    std::string criterion = "l2";
    std::string source = "normal";
    std::uint64_t seed = 0;
    Budget budget;
};

int do_forecast(const ForecastArgs& a, std::ostream& out) {
    const auto kind = parse_method_kind(a.kind);
    const double alpha = resolve_alpha(kind, a.alpha);
    if (a.horizons.empty()) throw ConfigError("no horizons requested");
    const auto data = tail_window(load_returns(a.input), a.window);
    const auto t = calibrate(data.values(), kind, alpha, a.budget.grids());
    ForecastRequest req;
    req.horizon = *std::max_element(a.horizons.begin(), a.horizons.end());
    req.paths = a.budget.resolved_paths();
    req.criterion = parse_risk_criterion(a.criterion);
    req.source = parse_innovation_mode(a.source);
    req.seed = a.seed;
    const auto f = forecast(data.values(), t, req);
    out << "step,prediction\n";
    for (std::size_t j = 0; j < f.per_step.size(); ++j) {
        out << j + 1 << ',' << format_double(f.per_step[j]) << '\n';
    }
    out << "horizon,aggregated\n";
    for (std::size_t h : a.horizons) {
        if (h == 0) throw ConfigError("horizons must be >= 1");
        out << h << ',' << format_double(aggregate(f.per_step, h)) << '\n';
    }
    return kExitOk;
}

// ---- evaluate ----

struct EvaluateArgs {
    std::string input;
    std::vector<int> models;
    std::size_t n = 0;
    std::size_t width = 0;
    std::vector<std::size_t> horizons{1, 5, 30};
    std::vector<std::string> methods{"GE", "GA", "P-GA", "GARCH"};
    std::uint64_t seed = 0;
    std::string selection = "series";
    double variant_alpha = 0.5;
    std::string variant_source = "normal";
    std::string variant_criterion = "l2";
    std::size_t recalibrate_every = 1;
    std::size_t threads = 0;
    std::string dataset_mode = "direct";
    std::string out_dir;
    Budget budget;
};

struct Dataset {
    std::string name;
    ReturnSeries returns;
};

std::vector<Dataset> evaluation_datasets(const EvaluateArgs& a) {
    if (!a.input.empty() && !a.models.empty()) throw ConfigError("use either --input or --models");
    std::vector<Dataset> out;
    if (!a.input.empty()) {
        out.push_back({std::filesystem::path(a.input).stem().string(), load_returns(a.input)});
        return out;
    }
    if (a.models.empty()) throw ConfigError("evaluate needs --input or --models");
    const std::size_t n = a.n == 0 ? 500 : a.n;
    const auto mode = a.dataset_mode == "prices" ? DatasetMode::ViaPrices : DatasetMode::Direct;
    for (int m : a.models) {
        SimModelSpec spec{m, n, substream_seed(a.seed, {kDatasetStream, static_cast<std::uint64_t>(m)}), 500};
        out.push_back({"M" + std::to_string(m), dataset_returns(generate(spec), mode)});
    }
    return out;
}

int do_evaluate(const EvaluateArgs& a, std::ostream& out) {
    if (a.out_dir.empty()) throw ConfigError("evaluate needs --out");
    const auto datasets = evaluation_datasets(a);

    PoosConfig base;
    base.plan.horizons = a.horizons;
    base.methods.clear();
    for (const auto& m : a.methods) {
        const auto parsed = parse_method(m);
        if (std::find(base.methods.begin(), base.methods.end(), parsed) == base.methods.end()) {
            base.methods.push_back(parsed);
        }
    }
    if (std::none_of(base.methods.begin(), base.methods.end(),
                     [](const Method& m) { return m.is_benchmark(); })) {
        base.methods.push_back(Method::garch_direct());
    }
    base.grids = a.budget.grids();
    base.paths = a.budget.resolved_paths();
    base.seed = a.seed;
    base.selection = parse_selection_mode(a.selection);
    base.fixed_variant = {a.variant_alpha, parse_innovation_mode(a.variant_source),
                          parse_risk_criterion(a.variant_criterion)};
    base.recalibrate_every = a.recalibrate_every;
    base.threads = a.threads > 0 ? a.threads : env_threads();

    std::filesystem::create_directories(a.out_dir);
    std::vector<PerformanceReport> reports;
    std::ostringstream forecasts_csv;
    std::ostringstream cw_csv;
    cw_csv << "dataset,small,large,horizon,statistic,p_value,n,status\n";
    const std::pair<MethodKind, MethodKind> nested[] = {
        {MethodKind::GANoBeta, MethodKind::GA},
        {MethodKind::GenExponentialNoBeta, MethodKind::GenExponential},
    };
    std::vector<std::string> widths;

    for (std::size_t d = 0; d < datasets.size(); ++d) {
        const auto& ds = datasets[d];
        PoosConfig cfg = base;
        cfg.plan.width = a.width > 0 ? a.width : WindowPlan::for_length(ds.returns.size()).width;
        cfg.seed = substream_seed(a.seed, {d});
        widths.push_back(std::to_string(cfg.plan.width));
        const auto result = run_poos(ds.returns.values(), cfg);
        reports.push_back(build_report(ds.name, result));
        write_forecasts_csv(forecasts_csv, ds.name, result, d == 0);
        for (const auto& [small, large] : nested) {
            for (std::size_t h : cfg.plan.horizons) {
                const auto s = Method::of(small);
                const auto l = Method::of(large);
                if (!result.series.contains({s, h}) || !result.series.contains({l, h})) continue;
                cw_csv << ds.name << ',' << s.label() << ',' << l.label() << ',' << h << ',';
                try {
                    const auto r = cw_test_for(result, s, l, h);
                    if (r) {
                        cw_csv << format_double(r->statistic) << ',' << format_double(r->p_value) << ','
                               << r->n_obs << ",ok\n";
                    } else {
                        cw_csv << ",,,failed\n";
                    }
                } catch (const DegenerateTestError&) {
                    cw_csv << ",,,degenerate\n";
                }
            }
        }
    }

    std::ostringstream report_csv;
    write_report_csv(report_csv, reports);
    std::ostringstream table;
    write_report_table(table, reports);

    RunManifest manifest;
    manifest.command = "evaluate";
    manifest.seed = a.seed;
    manifest.grids = base.grids;
    std::vector<std::string> method_labels;
    for (const auto& m : base.methods) method_labels.push_back(m.label());
    std::vector<std::string> names;
    for (const auto& ds : datasets) names.push_back(ds.name);
    manifest.options = {
        {"input", a.input},
        {"models", join_numbers(a.models)},
        {"n", std::to_string(a.n)},
        {"datasets", join(names)},
        {"widths", join(widths)},
        {"horizons", join_numbers(a.horizons)},
        {"methods", join(method_labels)},
        {"paths", std::to_string(base.paths)},
        {"selection", std::string(to_string(base.selection))},
        {"variant", format_double(base.fixed_variant.alpha) + " " +
                        std::string(to_string(base.fixed_variant.source)) + " " +
                        std::string(to_string(base.fixed_variant.criterion))},
        {"recalibrate_every", std::to_string(base.recalibrate_every)},
        {"dataset_mode", a.dataset_mode},
        {"fast", a.budget.fast ? "true" : "false"},
    };
    std::ostringstream manifest_json;
    write_manifest(manifest_json, manifest);

    const std::filesystem::path dir(a.out_dir);
    write_file(dir / "report.csv", report_csv.str());
    write_file(dir / "report.txt", table.str());
    write_file(dir / "forecasts.csv", forecasts_csv.str());
    write_file(dir / "cw.csv", cw_csv.str());
    write_file(dir / "manifest.json", manifest_json.str());
    out << table.str();
    return kExitOk;
}

// ---- cwtest ----

struct CwArgs {
    std::string input;
    std::string small = "P-GA";
    std::string large = "GA";
    std::size_t horizon = 1;
    std::string dataset;
};

int do_cwtest(const CwArgs& a, std::ostream& out) {
    std::ifstream in(a.input);
    if (!in) throw std::runtime_error("cannot open '" + a.input + "'");
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || trim(line) != "dataset,method,horizon,target,forecast,realized") {
        throw FormatError("expected a forecasts file header", 1);
    }
    const std::string small = parse_method(a.small).label();
    const std::string large = parse_method(a.large).label();
    std::string dataset = a.dataset;
    // target -> (forecast, realized) for each side
    std::map<std::size_t, std::pair<double, double>> s_rows, l_rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(trim(field));
        if (f.size() != 6) throw FormatError("expected 6 fields", line_no);
        if (dataset.empty()) dataset = f[0];
        if (f[0] != dataset) continue;
        try {
            if (std::stoul(f[2]) != a.horizon) continue;
            const std::size_t target = std::stoul(f[3]);
            const std::pair<double, double> v{std::stod(f[4]), std::stod(f[5])};
            if (f[1] == small) s_rows[target] = v;
            if (f[1] == large) l_rows[target] = v;
        } catch (const std::logic_error&) {
            throw FormatError("malformed number", line_no);
        }
    }
    std::vector<double> es, el, fs, fl;
    for (const auto& [target, sv] : s_rows) {
        const auto it = l_rows.find(target);
        if (it == l_rows.end()) continue;
        fs.push_back(sv.first);
        es.push_back(sv.second - sv.first);
        fl.push_back(it->second.first);
        el.push_back(it->second.second - it->second.first);
    }
    if (fs.empty()) throw std::runtime_error("no matched forecasts for " + small + " and " + large);
    const auto r = cw_test(es, el, fs, fl);
    out << "dataset " << dataset << '\n';
    out << "small " << small << "\nlarge " << large << "\nhorizon " << a.horizon << '\n';
    out << "statistic " << format_double(r.statistic) << '\n';
    out << "p_value " << format_double(r.p_value) << '\n';
    out << "n " << r.n_obs << '\n';
    return kExitOk;
}

// Inserts config-file tokens right after the subcommand, skipping keys that
// are also given on the command line so flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string path;
    std::set<std::string> given;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& t = args[i];
        if (t == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (t.rfind("--config=", 0) == 0) path = t.substr(9);
        if (t.rfind("--", 0) == 0) given.insert(t.substr(2, t.find('=') == std::string::npos ? std::string::npos : t.find('=') - 2));
    }
    if (path.empty() || args.empty()) return args;
    std::vector<std::string> out{args.front()};
    for (const auto& tok : config_tokens(path)) {
        const auto key = tok.substr(2, tok.find('=') - 2);
        if (!given.contains(key)) out.push_back(tok);
    }
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

} // namespace

std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    std::vector<std::string> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw FormatError("expected 'key = value'", line_no);
        const auto key = trim(t.substr(0, eq));
        if (key.empty() || key == "config") throw FormatError("invalid key", line_no);
        out.push_back("--" + key + "=" + trim(t.substr(eq + 1)));
    }
    return out;
}

int run_command(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"NoVaS volatility forecasting", "novas"};
    app.require_subcommand(1);
    app.set_version_flag("--version", library_version());

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Simulate one of Models 1-8 and write a returns CSV");
    s->add_option("--model", sim.model, "Model id 1-8")->check(CLI::Range(1, 8));
    s->add_option("--n", sim.n, "Observations to simulate");
    s->add_option("--seed", sim.seed, "Master seed");
    s->add_option("--burn-in", sim.burn_in, "Discarded warm-up draws");
    s->add_flag("--raw", sim.raw, "Emit all n simulated values instead of the n-1 experiment returns");
    s->add_option("--mode", sim.mode, "direct or prices")->check(CLI::IsMember({"direct", "prices"}));
    s->add_option("--out", sim.out, "Output file (default stdout)");

    CalibrateArgs cal;
    auto* c = app.add_subcommand("calibrate", "Calibrate a NoVaS transform and print its coefficients");
    c->add_option("--input", cal.input, "Price (date,close) or return (index,return) CSV")->required();
    c->add_option("--kind", cal.kind, "simple, exponential, gs, ge, ga, p-ge or p-ga");
    c->add_option("--alpha", cal.alpha, "Alpha grid value (default 0.5; pinned kinds use 0)");
    c->add_option("--window", cal.window, "Use only the last N returns");
    add_budget(c, cal.budget);

    ForecastArgs fc;
    auto* f = app.add_subcommand("forecast", "Forecast squared returns from the end of a series");
    f->add_option("--input", fc.input, "Price or return CSV")->required();
    f->add_option("--kind", fc.kind, "NoVaS kind");
    f->add_option("--alpha", fc.alpha, "Alpha grid value (default 0.5)");
    f->add_option("--window", fc.window, "Use only the last N returns");
    f->add_option("--horizons", fc.horizons, "Aggregation horizons")->delimiter(',');
    f->add_option("--criterion", fc.criterion, "l1 (median) or l2 (mean)");
    f->add_option("--source", fc.source, "normal or bootstrap innovations");
    f->add_option("--seed", fc.seed, "Master seed");
    add_budget(f, fc.budget);

    EvaluateArgs ev;
    std::string config_path;
    auto* e = app.add_subcommand("evaluate", "Rolling out-of-sample comparison against GARCH-direct");
    e->add_option("--config", config_path, "Flat key = value file; flags override it");
    e->add_option("--input", ev.input, "Price or return CSV");
    e->add_option("--models", ev.models, "Simulated models, e.g. 1,2,3")->delimiter(',')->check(CLI::Range(1, 8));
    e->add_option("--n", ev.n, "Simulated dataset size (default 500)");
    e->add_option("--width", ev.width, "Window width (default 250 for >= 499 returns, else 100)");
    e->add_option("--horizons", ev.horizons, "Horizons")->delimiter(',');
    e->add_option("--methods", ev.methods, "Methods, e.g. GE,GA,P-GA,GARCH")->delimiter(',');
    e->add_option("--seed", ev.seed, "Master seed");
    e->add_option("--selection", ev.selection, "series, window or fixed")
        ->check(CLI::IsMember({"series", "window", "fixed"}));
    e->add_option("--variant-alpha", ev.variant_alpha, "Alpha for --selection fixed");
    e->add_option("--variant-source", ev.variant_source, "Innovations for --selection fixed");
    e->add_option("--variant-criterion", ev.variant_criterion, "Criterion for --selection fixed");
    e->add_option("--recalibrate-every", ev.recalibrate_every, "Recalibrate every k windows");
    e->add_option("--threads", ev.threads, "Worker threads (default NOVAS_THREADS or all cores)");
    e->add_option("--dataset-mode", ev.dataset_mode, "direct or prices")
        ->check(CLI::IsMember({"direct", "prices"}));
    e->add_option("--out", ev.out_dir, "Output directory")->required();
    add_budget(e, ev.budget);

    CwArgs cw;
    auto* w = app.add_subcommand("cwtest", "Clark-West test on a forecasts.csv written by evaluate");
    w->add_option("--input", cw.input, "forecasts.csv")->required();
    w->add_option("--small", cw.small, "Nested (parsimonious) method");
    w->add_option("--large", cw.large, "Larger method");
    w->add_option("--horizon", cw.horizon, "Horizon");
    w->add_option("--dataset", cw.dataset, "Dataset name (default: first in file)");

    try {
        auto args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << library_version() << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& ex) {
        err << "usage error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitFailure;
    }

    try {
        if (s->parsed()) return do_simulate(sim, out);
        if (c->parsed()) return do_calibrate(cal, out);
        if (f->parsed()) return do_forecast(fc, out);
        if (e->parsed()) return do_evaluate(ev, out);
        if (w->parsed()) return do_cwtest(cw, out);
    } catch (const ConfigError& ex) {
        err << "usage error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace novas
