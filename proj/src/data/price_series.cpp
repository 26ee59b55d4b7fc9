#include "cpf/data/price_series.hpp"

#include "cpf/util/text_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace cpf::data {

YearMonth YearMonth::parse(std::string_view text) {
    text = trim(text);
    YearMonth ym;
    const bool shape_ok = text.size() == 7 && text[4] == '-';
    if (shape_ok) {
        const auto [p1, e1] = std::from_chars(text.data(), text.data() + 4, ym.year);
        const auto [p2, e2] = std::from_chars(text.data() + 5, text.data() + 7, ym.month);
        if (e1 == std::errc{} && e2 == std::errc{} && p1 == text.data() + 4 && p2 == text.data() + 7 &&
            ym.month >= 1 && ym.month <= 12) {
            return ym;
        }
    }
    throw std::invalid_argument("unparseable date '" + std::string(text) + "' (expected YYYY-MM)");
}

std::string YearMonth::str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
    return buf;
}

YearMonth YearMonth::next() const { return plus_months(1); }

int YearMonth::months_until(const YearMonth& other) const {
    return (other.year - year) * 12 + (other.month - month);
}

YearMonth YearMonth::plus_months(int months) const {
    const int index = year * 12 + (month - 1) + months;
    YearMonth out;
    out.year = index / 12;
    out.month = index % 12 + 1;
    return out;
}

PriceSeries::PriceSeries(std::string name, std::vector<YearMonth> dates, std::vector<double> values)
    : name_(std::move(name)), dates_(std::move(dates)), values_(std::move(values)) {
    if (dates_.size() != values_.size()) {
        throw std::invalid_argument("PriceSeries: dates and values differ in length");
    }
    if (values_.empty()) {
        throw std::invalid_argument("PriceSeries: empty series");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw std::invalid_argument("PriceSeries: non-finite value at " + dates_[i].str());
        }
        if (i > 0 && dates_[i - 1].next() != dates_[i]) {
            throw std::invalid_argument("PriceSeries: dates " + dates_[i - 1].str() + " and " + dates_[i].str() +
                                        " are not consecutive months");
        }
    }
}

PriceSeries PriceSeries::from_start(std::string name, YearMonth start, std::vector<double> values) {
    std::vector<YearMonth> dates;
    dates.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        dates.push_back(start.plus_months(static_cast<int>(i)));
    }
    return PriceSeries(std::move(name), std::move(dates), std::move(values));
}

PriceSeries PriceSeries::slice(std::size_t begin, std::size_t count) const {
    if (begin + count > size()) {
        throw std::out_of_range("PriceSeries::slice out of range");
    }
    return PriceSeries(name_, std::vector<YearMonth>(dates_.begin() + begin, dates_.begin() + begin + count),
                       std::vector<double>(values_.begin() + begin, values_.begin() + begin + count));
}

PriceSeries load_series(const std::filesystem::path& path, std::string_view column) {
    if (!std::filesystem::exists(path)) {
        throw LoadError("missing file: " + path.string(), 0);
    }
    CsvTable table;
    try {
        table = read_csv(path);
    } catch (const std::exception& e) {
        throw LoadError(e.what(), 0);
    }
    std::size_t date_col = 0;
    std::size_t value_col = 0;
    try {
        date_col = table.column("date");
        value_col = table.column(column);
    } catch (const std::exception& e) {
        throw LoadError(path.string() + ": " + e.what(), 1);
    }

    struct Row {
        YearMonth date;
        double value;
        std::size_t line;
    };
    std::vector<Row> rows;
    rows.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::size_t line = r + 2;
        const auto& cells = table.rows[r];
        if (cells.size() <= std::max(date_col, value_col)) {
            throw LoadError(path.string() + ": row " + std::to_string(line) + " has too few fields", line);
        }
        Row row{};
        row.line = line;
        try {
            row.date = YearMonth::parse(cells[date_col]);
        } catch (const std::exception& e) {
            throw LoadError(path.string() + ": row " + std::to_string(line) + ": " + e.what(), line);
        }
        const std::string& text = cells[value_col];
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), row.value);
        if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(row.value)) {
            throw LoadError(path.string() + ": row " + std::to_string(line) + ": non-numeric value '" + text +
                                "' in column '" + std::string(column) + "'",
                            line);
        }
        rows.push_back(row);
    }
    if (rows.size() < 2) {
        throw LoadError(path.string() + ": need at least 2 data rows", 0);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });

    std::vector<YearMonth> dates;
    std::vector<double> values;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0) {
            const YearMonth expected = rows[i - 1].date.next();
            if (rows[i].date == rows[i - 1].date) {
                throw LoadError(path.string() + ": row " + std::to_string(rows[i].line) + ": duplicate month " +
                                    rows[i].date.str(),
                                rows[i].line);
            }
            if (rows[i].date != expected) {
                throw LoadError(path.string() + ": row " + std::to_string(rows[i].line) + ": missing month " +
                                    expected.str() + " (gap before " + rows[i].date.str() + ")",
                                rows[i].line);
            }
        }
        dates.push_back(rows[i].date);
        values.push_back(rows[i].value);
    }
    return PriceSeries(std::string(column), std::move(dates), std::move(values));
}

std::size_t split_index(std::size_t length, double train_ratio) {
    if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
        throw std::invalid_argument("train ratio must lie in (0, 1)");
    }
    // The small offset keeps products such as 0.29 * 100 from flooring to 28.
    return static_cast<std::size_t>(std::floor(train_ratio * static_cast<double>(length) + 1e-9));
}

std::pair<PriceSeries, PriceSeries> train_test_split(const PriceSeries& series, double train_ratio) {
    const std::size_t m = series.size();
    const std::size_t cut = split_index(m, train_ratio);
    if (cut == 0 || cut == m) {
        throw std::invalid_argument("train/test split with ratio " + format_double(train_ratio) + " on " +
                                    std::to_string(m) + " points leaves an empty part");
    }
    return {series.slice(0, cut), series.slice(cut, m - cut)};
}

}  // namespace cpf::data
