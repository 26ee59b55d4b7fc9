#pragma once

#include "cpf/evaluation/accuracy.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cpf::combine {

enum class Scheme { SimpleMean, LeastSquares, InverseMse, MseRanks };

[[nodiscard]] std::string to_string(Scheme s);
[[nodiscard]] Scheme parse_scheme(const std::string& s);
[[nodiscard]] const std::vector<Scheme>& all_schemes();

/// How rank weights are formed: 1/rank normalized, or rank / sum of ranks.
enum class RankWeighting { Inverse, Proportional };

/// Half-open index range [begin, end) into the aligned series.
struct Window {
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t size() const { return end - begin; }
    auto operator<=>(const Window&) const = default;
};

struct CombinationResult {
    Scheme scheme = Scheme::SimpleMean;
    std::vector<double> weights;    ///< one per forecast
    std::optional<double> intercept;  ///< least squares only
    std::vector<double> combined;   ///< full length of the inputs
    Window fit_window;
    bool degenerate = false;  ///< a forecast had zero MSE and took all the weight
    double condition = 0.0;   ///< least-squares design condition number
};

using Forecasts = std::vector<std::vector<double>>;

[[nodiscard]] CombinationResult combine_simple_mean(const Forecasts& forecasts);

/// OLS of actual on [1, f_1..f_k] over fit_window. Throws SingularDesignError for collinear forecasts.
[[nodiscard]] CombinationResult combine_least_squares(const Forecasts& forecasts, std::span<const double> actual,
                                                      Window fit_window);

[[nodiscard]] CombinationResult combine_inverse_mse(const Forecasts& forecasts, std::span<const double> actual,
                                                    Window fit_window);

/// Rank 1 is the lowest MSE; equal MSEs rank in input order.
[[nodiscard]] CombinationResult combine_mse_ranks(const Forecasts& forecasts, std::span<const double> actual,
                                                  Window fit_window,
                                                  RankWeighting weighting = RankWeighting::Inverse);

/// Weights fixed elsewhere applied to every index.
[[nodiscard]] std::vector<double> apply_weights(const Forecasts& forecasts, std::span<const double> weights,
                                                double intercept = 0.0);

struct CombinationOptions {
    std::vector<Scheme> schemes = all_schemes();
    RankWeighting rank_weighting = RankWeighting::Inverse;
};

struct ReportRow {
    std::string name;
    bool is_scheme = false;
    bool ok = true;
    double rmse = 0.0;
    double mape = 0.0;
    std::string note;
    std::optional<CombinationResult> result;
};

struct CombinationReport {
    Window fit_window;
    Window eval_window;
    std::vector<ReportRow> rows;  ///< schemes first, then individual forecasts
    std::size_t best_rmse = 0;
    std::size_t best_mape = 0;
    /// With fit_window == eval_window: least-squares RMSE is no larger than
    /// every individual RMSE (a 1e-12 relative allowance covers exact fits).
    std::optional<bool> projection_holds;
};

/**
 * Fits every scheme on fit_window and scores schemes and individual
 * forecasts on eval_window. A singular least-squares fit is reported as a
 * failed row. With one forecast every scheme reproduces it.
 */
[[nodiscard]] CombinationReport evaluate_combinations(const evaluation::ForecastSet& set, Window fit_window,
                                                      Window eval_window, const CombinationOptions& options = {});

}  // namespace cpf::combine
