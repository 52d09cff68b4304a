#include "gogrow/csv.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "gogrow/errors.hpp"

namespace gog {

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void CsvTable::add_row(std::vector<double> row) {
    if (row.size() != columns_.size()) throw PreconditionError("csv row width does not match header");
    rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& out) const {
    for (const auto& c : comments_) out << "# " << c << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
    out << '\n';
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_real(r[i]);
        out << '\n';
    }
}

void CsvTable::write_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    write(f);
    if (!f) throw std::runtime_error("write failed for " + path);
}

}  // namespace gog
