#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace keyhole {

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A results table as text cells; empty cells mean "not applicable".
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// 17 significant digits, the schema's float format.
std::string format_value(double v);
std::string format_value(const std::optional<double>& v);

CsvTable read_csv(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& contents);
std::string to_csv_text(const CsvTable& table);

struct DiffEntry {
    std::size_t row = 0;  // 1-based data row
    std::string column;
    std::string left;
    std::string right;
};

struct DiffReport {
    std::vector<DiffEntry> entries;

    bool empty() const { return entries.empty(); }
    std::string to_text() const;
};

/// Columns excluded from comparison by default: wall-clock timings.
inline const std::vector<std::string> kVolatileColumns = {"seconds"};

/// Compares two results files cell by cell; numeric cells may differ by
/// rel_tol relative to the larger magnitude. Throws SchemaError when headers
/// or row counts disagree.
DiffReport diff_results(const std::filesystem::path& a, const std::filesystem::path& b,
                        double rel_tol = 1e-12,
                        const std::vector<std::string>& ignore = kVolatileColumns);

}  // namespace keyhole
