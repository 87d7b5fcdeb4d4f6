#pragma once

#include <string>
#include <vector>

namespace cevsim {

inline constexpr const char* kVersion = "0.1.0";

/// Fixed 12-significant-digit rendering used for every CSV cell, so that
/// identical invocations produce byte-identical files.
std::string format_sig(double v);

/// Comma-separated table with a header row, UTF-8, LF line endings.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> cells);
    std::string str() const;
    void write_file(const std::string& path) const;

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace cevsim
