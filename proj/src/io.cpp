#include "novas/io.hpp"

#include "novas/errors.hpp"

#include <gsl/gsl_version.h>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <system_error>

#ifndef NOVAS_VERSION
#define NOVAS_VERSION "0.0.0"
#endif

namespace novas {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_number(std::string_view field, std::size_t line_no, std::string_view what) {
    if (field.empty()) throw FormatError("empty " + std::string(what) + " field", line_no);
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw FormatError("cannot parse " + std::string(what) + " '" + std::string(field) + "'", line_no);
    }
    return v;
}

// Reads the header and returns its normalized form; throws on an empty file.
std::string read_header(std::istream& in, std::size_t& line_no) {
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (!t.empty()) return std::string(t);
    }
    throw FormatError("empty file", 0);
}

} // namespace

PriceSeries parse_price_csv(std::istream& in) {
    std::size_t line_no = 0;
    const std::string header = read_header(in, line_no);
    if (header != "date,close") {
        throw FormatError("expected header 'date,close', got '" + header + "'", line_no);
    }
    std::vector<double> values;
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 2) {
            throw FormatError("expected 2 fields, got " + std::to_string(fields.size()), line_no);
        }
        if (fields[0].empty()) throw FormatError("empty date field", line_no);
        const double close = parse_number(fields[1], line_no, "close");
        if (!(close > 0.0) || !std::isfinite(close)) {
            throw std::domain_error("line " + std::to_string(line_no) + ": close must be positive and finite");
        }
        labels.emplace_back(fields[0]);
        values.push_back(close);
    }
    if (values.size() < 2) throw FormatError("need at least two price rows", line_no);
    return PriceSeries(std::move(values), std::move(labels));
}

PriceSeries ingest_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    return parse_price_csv(in);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_returns_csv(std::ostream& os, const ReturnSeries& returns) {
    os << "index,return\n";
    for (std::size_t i = 0; i < returns.size(); ++i) {
        os << i + 1 << ',' << format_double(returns[i]) << '\n';
    }
}

ReturnSeries parse_returns_csv(std::istream& in) {
    std::size_t line_no = 0;
    const std::string header = read_header(in, line_no);
    if (header != "index,return") {
        throw FormatError("expected header 'index,return', got '" + header + "'", line_no);
    }
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 2) {
            throw FormatError("expected 2 fields, got " + std::to_string(fields.size()), line_no);
        }
        parse_number(fields[0], line_no, "index");
        const double r = parse_number(fields[1], line_no, "return");
        if (!std::isfinite(r)) throw FormatError("return must be finite", line_no);
        values.push_back(r);
    }
    if (values.empty()) throw FormatError("no return rows", line_no);
    return ReturnSeries(std::move(values));
}

ReturnSeries load_returns(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::string first;
    while (std::getline(in, first) && trim(first).empty()) {
    }
    in.clear();
    in.seekg(0);
    if (trim(first) == "index,return") return parse_returns_csv(in);
    return to_log_returns(parse_price_csv(in));
}

std::string library_version() { return NOVAS_VERSION; }

void write_manifest(std::ostream& os, const RunManifest& m) {
    nlohmann::json j;
    j["command"] = m.command;
    j["seed"] = m.seed;
    j["grids"] = {
        {"alpha", m.grids.alpha_grid},
        {"unit_step", m.grids.unit_grid_step},
        {"c_grid_size", m.grids.c_grid.size()},
        {"c_grid_min", m.grids.c_grid.empty() ? 0.0 : m.grids.c_grid.front()},
        {"c_grid_max", m.grids.c_grid.empty() ? 0.0 : m.grids.c_grid.back()},
        {"beta_cap", m.grids.beta_cap},
        {"max_escalations", m.grids.max_escalations},
        {"simple_order_cap", m.grids.simple_order_cap},
    };
    nlohmann::json opts = nlohmann::json::object();
    for (const auto& [k, v] : m.options) opts[k] = v;
    j["options"] = opts;
    j["versions"] = {
        {"novas", library_version()},
        {"gsl", GSL_VERSION},
        {"compiler", __VERSION__},
        {"cxx_standard", __cplusplus},
    };
    os << j.dump(2) << '\n';
}

} // namespace novas
