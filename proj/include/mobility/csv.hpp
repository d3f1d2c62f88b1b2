#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mobility {

/// Minimal RFC-4180-ish reader: comma separated, double-quoted fields with
/// "" escapes, no embedded newlines. Lines starting with '#' before the
/// header are skipped (our own writers put provenance comments there).
class CsvReader {
public:
    explicit CsvReader(std::istream& in);

    const std::vector<std::string>& header() const { return header_; }
    std::optional<std::size_t> column(const std::string& name) const;

    /// Reads the next data row. Returns false at end of input.
    bool next(std::vector<std::string>& fields, std::size_t& line_no);

private:
    std::istream& in_;
    std::vector<std::string> header_;
    std::size_t line_no_ = 0;
};

std::vector<std::string> split_csv_line(const std::string& line);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest decimal text that round-trips the exact double value.
std::string format_double(double v);

/// FNV-1a 64-bit, as a lowercase hex string. Used for config provenance.
std::string fnv1a_hex(const std::string& text);

} // namespace mobility
