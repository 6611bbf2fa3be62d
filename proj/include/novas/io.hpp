#pragma once

#include "novas/series.hpp"
#include "novas/transform.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace novas {

/// Reads a `date,close` price file. Rows are parsed strictly: exactly two
/// fields, a nonempty date and a fully consumed number. Throws FormatError
/// (with the 1-based line) for malformed input or an empty file, and
/// std::domain_error for a nonpositive close.
PriceSeries ingest_csv(const std::filesystem::path& path);
PriceSeries parse_price_csv(std::istream& in);

/// `index,return` files, 1-based index, 17 significant digits.
void write_returns_csv(std::ostream& os, const ReturnSeries& returns);
ReturnSeries parse_returns_csv(std::istream& in);

/// Returns from either file shape, chosen by the header: prices are
/// converted to log-returns, return files are taken as they are.
ReturnSeries load_returns(const std::filesystem::path& path);

/// 17 significant digits: enough for an exact double round-trip.
std::string format_double(double v);

/// Everything needed to rerun a command bit-identically.
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    CalibrationGrids grids;
    /// Resolved option values in a stable order.
    std::vector<std::pair<std::string, std::string>> options;
};

/// Pretty-printed JSON with sorted keys and no timestamps, so identical
/// runs produce identical files.
void write_manifest(std::ostream& os, const RunManifest& manifest);

std::string library_version();

} // namespace novas
