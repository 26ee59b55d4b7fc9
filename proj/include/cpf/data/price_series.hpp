#pragma once

#include <compare>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cpf::data {

/// A calendar month.
struct YearMonth {
    int year = 1970;
    int month = 1;  ///< 1..12

    /// Parses "YYYY-MM"; throws std::invalid_argument otherwise.
    static YearMonth parse(std::string_view text);

    [[nodiscard]] std::string str() const;
    [[nodiscard]] YearMonth next() const;
    /// Months from *this to other (positive when other is later).
    [[nodiscard]] int months_until(const YearMonth& other) const;
    [[nodiscard]] YearMonth plus_months(int months) const;

    auto operator<=>(const YearMonth&) const = default;
};

/// Problem found while reading a price file. row is the 1-based line number
/// in the file (header is line 1), or 0 when not tied to a row.
class LoadError : public std::runtime_error {
public:
    LoadError(const std::string& what, std::size_t row) : std::runtime_error(what), row_(row) {}
    [[nodiscard]] std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/**
 * A dated univariate monthly price sequence.
 *
 * Dates are consecutive calendar months with no gaps and values are finite.
 * Loaded series carry at least two observations; a split part may be a
 * single point.
 */
class PriceSeries {
public:
    PriceSeries(std::string name, std::vector<YearMonth> dates, std::vector<double> values);

    /// Builds a series starting at `start` with one value per consecutive month.
    static PriceSeries from_start(std::string name, YearMonth start, std::vector<double> values);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const std::vector<YearMonth>& dates() const { return dates_; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] YearMonth first_date() const { return dates_.front(); }
    [[nodiscard]] YearMonth last_date() const { return dates_.back(); }

    /// Contiguous sub-range [begin, begin+count).
    [[nodiscard]] PriceSeries slice(std::size_t begin, std::size_t count) const;

private:
    std::string name_;
    std::vector<YearMonth> dates_;
    std::vector<double> values_;
};

/// Loads the `date` column and the named numeric column from a CSV file.
/// Rows may appear in any order; they are sorted by date before the gap check.
[[nodiscard]] PriceSeries load_series(const std::filesystem::path& path, std::string_view column);

/// Chronological split: the first floor(train_ratio * m) points train, the rest test.
[[nodiscard]] std::pair<PriceSeries, PriceSeries> train_test_split(const PriceSeries& series, double train_ratio);

/// Number of training points floor(train_ratio * m) used by train_test_split.
[[nodiscard]] std::size_t split_index(std::size_t length, double train_ratio);

}  // namespace cpf::data
