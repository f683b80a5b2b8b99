#include "modopo/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "modopo/errors.hpp"

namespace modopo {

std::string format_double(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void CsvTable::add_row(std::vector<CsvCell> row)
{
    if (row.size() != columns.size()) {
        throw InvalidParameter("CSV row width does not match the header");
    }
    rows.push_back(std::move(row));
}

std::string to_csv(const CsvTable& table)
{
    std::string out;
    for (const std::string& line : table.metadata) {
        out += "# ";
        out += line;
        out += '\n';
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out += i ? "," : "";
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += i ? "," : "";
            if (const auto* d = std::get_if<double>(&row[i])) {
                out += format_double(*d);
            } else if (const auto* n = std::get_if<std::int64_t>(&row[i])) {
                out += std::to_string(*n);
            } else {
                out += std::get<std::string>(row[i]);
            }
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table)
{
    const auto parent = path.parent_path();
    if (!parent.empty() && !std::filesystem::is_directory(parent)) {
        throw std::filesystem::filesystem_error("output directory does not exist", parent,
                                                std::make_error_code(std::errc::no_such_file_or_directory));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::filesystem::filesystem_error("cannot open output file", path,
                                                std::make_error_code(std::errc::permission_denied));
    }
    out << to_csv(table);
    if (!out) {
        throw std::filesystem::filesystem_error("write failed", path, std::make_error_code(std::errc::io_error));
    }
}

ParsedCsv parse_csv(const std::string& text)
{
    ParsedCsv parsed;
    std::istringstream in(text);
    std::string line;
    bool header = false;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(s);
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        return cells;
    };
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0 && !header) {
            parsed.metadata.push_back(line.substr(2));
        } else if (!header) {
            parsed.columns = split(line);
            header = true;
        } else if (!line.empty()) {
            parsed.rows.push_back(split(line));
        }
    }
    return parsed;
}

}  // namespace modopo
