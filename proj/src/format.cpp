#include "cevsim/format.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cevsim {

std::string format_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) {
        throw std::logic_error("CSV row width does not match the header");
    }
    rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
    std::string out;
    auto append_line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    append_line(header_);
    for (const auto& row : rows_) append_line(row);
    return out;
}

void CsvTable::write_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << str();
    if (!f) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace cevsim
