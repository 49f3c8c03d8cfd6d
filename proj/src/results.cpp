#include "keyhole/results.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace keyhole {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::optional<double> as_number(const std::string& text) {
    if (text.empty()) return std::nullopt;
    if (text == "nan") return std::nan("");
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return value;
}

bool cells_match(const std::string& a, const std::string& b, double rel_tol) {
    if (a == b) return true;
    const auto x = as_number(a);
    const auto y = as_number(b);
    if (!x || !y) return false;
    if (std::isnan(*x) || std::isnan(*y)) return std::isnan(*x) && std::isnan(*y);
    return std::abs(*x - *y) <= rel_tol * std::max(std::abs(*x), std::abs(*y));
}

}  // namespace

std::string format_value(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_value(const std::optional<double>& v) { return v ? format_value(*v) : std::string(); }

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path.string() + ": empty file");
    table.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        table.rows.push_back(split_csv_line(line));
        if (table.rows.back().size() != table.header.size()) {
            throw SchemaError(path.string() + ": row " + std::to_string(table.rows.size()) +
                              " has " + std::to_string(table.rows.back().size()) + " cells, header has " +
                              std::to_string(table.header.size()));
        }
    }
    return table;
}

std::string to_csv_text(const CsvTable& table) {
    std::string out;
    auto append = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    append(table.header);
    for (const auto& row : table.rows) append(row);
    return out;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::ios_base::failure("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out) throw std::ios_base::failure("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::ios_base::failure("cannot rename " + tmp.string() + ": " + ec.message());
    }
}

std::string DiffReport::to_text() const {
    std::ostringstream out;
    if (entries.empty()) out << "results identical\n";
    for (const DiffEntry& e : entries) {
        out << "row " << e.row << " column " << e.column << ": " << e.left << " != " << e.right << "\n";
    }
    return out.str();
}

DiffReport diff_results(const std::filesystem::path& a, const std::filesystem::path& b, double rel_tol,
                        const std::vector<std::string>& ignore) {
    const CsvTable left = read_csv(a);
    const CsvTable right = read_csv(b);
    if (left.header != right.header) throw SchemaError("column headers differ");
    if (left.rows.size() != right.rows.size()) {
        throw SchemaError("row counts differ: " + std::to_string(left.rows.size()) + " vs " +
                          std::to_string(right.rows.size()));
    }
    DiffReport report;
    for (std::size_t r = 0; r < left.rows.size(); ++r) {
        for (std::size_t c = 0; c < left.header.size(); ++c) {
            const std::string& column = left.header[c];
            if (std::find(ignore.begin(), ignore.end(), column) != ignore.end()) continue;
            if (!cells_match(left.rows[r][c], right.rows[r][c], rel_tol)) {
                report.entries.push_back({r + 1, column, left.rows[r][c], right.rows[r][c]});
            }
        }
    }
    return report;
}

}  // namespace keyhole
