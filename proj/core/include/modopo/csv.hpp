#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace modopo {

/// Shortest round-trip is not used on purpose: every double is written with
/// exactly 17 significant digits so files diff cleanly.
[[nodiscard]] std::string format_double(double x);

using CsvCell = std::variant<double, std::int64_t, std::string>;

struct CsvTable {
    /// Written as "# <line>" before the header.
    std::vector<std::string> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<CsvCell>> rows;

    void add_row(std::vector<CsvCell> row);
};

[[nodiscard]] std::string to_csv(const CsvTable& table);

/// Throws std::filesystem::filesystem_error when the parent directory is
/// missing or the file cannot be written.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

struct ParsedCsv {
    std::vector<std::string> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

[[nodiscard]] ParsedCsv parse_csv(const std::string& text);

}  // namespace modopo
