#pragma once

#include "cpf/data/price_series.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cpf::evaluation {

/// Root mean squared error. Throws std::invalid_argument on length mismatch or empty input.
[[nodiscard]] double rmse(std::span<const double> actual, std::span<const double> predicted);

/// Mean absolute percentage error in percent, relative to actual. Throws on a zero actual.
[[nodiscard]] double mape(std::span<const double> actual, std::span<const double> predicted);

struct HlnResult {
    double statistic = 0.0;  ///< corrected Diebold-Mariano statistic
    double p_value = 1.0;    ///< two-sided, Student t with n - 1 df
    std::size_t n = 0;
    std::size_t h = 1;
    double mean_loss_diff = 0.0;  ///< mean of e_a^2 - e_b^2
    bool degenerate = false;      ///< loss differential has zero variance
};

/**
 * Harvey-Leybourne-Newbold test of equal squared-error accuracy. Negative
 * statistics favour forecast a. The long-run variance uses h - 1
 * autocovariances with rectangular weights, falling back to the plain
 * variance if that sum is not positive.
 */
[[nodiscard]] HlnResult hln_test(std::span<const double> errors_a, std::span<const double> errors_b,
                                 std::size_t h = 1);

struct NamedForecast {
    std::string name;
    std::vector<double> values;
};

/// Actuals plus forecasts on a common date axis.
struct ForecastSet {
    std::vector<data::YearMonth> dates;
    std::vector<double> actual;
    std::vector<NamedForecast> forecasts;

    /// Throws std::invalid_argument unless all series align and are finite.
    void validate() const;
    [[nodiscard]] std::vector<double> errors(std::size_t forecast) const;
    [[nodiscard]] const NamedForecast& find(const std::string& name) const;
};

struct DatedForecast {
    std::string name;
    std::vector<data::YearMonth> dates;
    std::vector<double> values;
};

/// Keeps the dates present in actual and in every forecast, in date order.
[[nodiscard]] ForecastSet inner_join(const data::PriceSeries& actual, const std::vector<DatedForecast>& forecasts);

struct AccuracyRow {
    std::string name;
    double rmse = 0.0;
    double mape = 0.0;
};

struct PairwiseHln {
    std::string a;
    std::string b;
    HlnResult result;
};

struct EvaluationReport {
    std::size_t n = 0;
    std::vector<AccuracyRow> accuracy;
    std::vector<PairwiseHln> hln;  ///< every pair i < j in listed order
};

[[nodiscard]] EvaluationReport evaluate(const ForecastSet& set, std::size_t h = 1);

}  // namespace cpf::evaluation
