#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "auxbound/types.hpp"

namespace auxbound {

/// Shortest round-trip-exact decimal rendering (17 significant digits).
std::string format_double(double v);

/// FNV-1a 64-bit over a string, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

/// Header metadata embedded as '#'-prefixed comment lines in every output.
struct OutputMeta {
    std::string command;
    std::string config_hash;
    std::map<std::string, std::string> fields; // kappa, delta, tolerances, horizon, ...

    std::string render() const;
};

/// CSV table: '#'-comment header lines, one header row, 17-digit values.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string render(const OutputMeta& meta) const;
};

/// Write-temp-then-rename; creates parent directories.
void atomic_write(const std::filesystem::path& path, const std::string& content);

} // namespace auxbound
