#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cpf {

/// Shortest decimal text that round-trips the double (up to 17 significant digits).
[[nodiscard]] std::string format_double(double value);

/// Fixed significant-digit formatting for reports.
[[nodiscard]] std::string format_double(double value, int significant_digits);

/// Writes content to path via a sibling temporary file and rename, so readers
/// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);

[[nodiscard]] std::vector<std::string> split(std::string_view text, char delimiter);

[[nodiscard]] std::string_view trim(std::string_view text);

/// A parsed comma-separated file: header names plus string cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of the named column, or throws std::runtime_error listing the available columns.
    [[nodiscard]] std::size_t column(std::string_view name) const;
    [[nodiscard]] bool has_column(std::string_view name) const;
};

[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

/// Accumulates CSV text row by row.
class CsvWriter {
public:
    explicit CsvWriter(const std::vector<std::string>& header);

    CsvWriter& cell(std::string_view text);
    CsvWriter& cell(double value);
    CsvWriter& cell(long long value);
    CsvWriter& cell(int value) { return cell(static_cast<long long>(value)); }
    CsvWriter& cell(std::size_t value) { return cell(static_cast<long long>(value)); }
    void end_row();

    [[nodiscard]] const std::string& str() const { return out_; }

private:
    std::string out_;
    bool row_open_ = false;
};

}  // namespace cpf
