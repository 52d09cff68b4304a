#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace gog {

/// 17 significant digits, enough for an exact round trip.
std::string format_real(double x);

/// Comma-separated table with leading `# ...` comment lines. Reals are
/// written with 17 significant digits, LF line endings.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void comment(const std::string& line) { comments_.push_back(line); }
    void add_row(std::vector<double> row);
    void add_row(std::initializer_list<double> row) { add_row(std::vector<double>(row)); }

    const std::vector<std::vector<double>>& rows() const { return rows_; }
    const std::vector<std::string>& columns() const { return columns_; }

    void write(std::ostream& out) const;
    void write_file(const std::string& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::string> comments_;
    std::vector<std::vector<double>> rows_;
};

}  // namespace gog
