#pragma once

#include "cpf/data/price_series.hpp"
#include "cpf/neural/trainer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cpf::neural {

/// Hyperparameter value lists crossed by the grid search.
struct GridSpec {
    std::vector<double> dropout;
    std::vector<std::size_t> units;
    std::vector<std::size_t> epochs;
    std::vector<std::size_t> lookback;

    void validate() const;
    [[nodiscard]] std::size_t size() const { return dropout.size() * units.size() * epochs.size() * lookback.size(); }
};

struct GridTrial {
    std::size_t index = 0;  ///< position in listed (dropout, units, epochs, lookback) order
    double dropout = 0.0;
    std::size_t units = 0;
    std::size_t epochs = 0;
    std::size_t lookback = 0;
    bool ok = false;
    double train_rmse = 0.0;  ///< scaled units, final epoch
    double test_rmse = 0.0;   ///< scaled units, test windows
    double wall_seconds = 0.0;
    std::string error;
};

struct GridResult {
    std::vector<GridTrial> trials;  ///< successful trials by ascending test RMSE, failures last
    std::optional<GridTrial> best;
};

/// True when a should rank ahead of b: lower test RMSE, then fewer units,
/// smaller lookback, fewer epochs, then listed order.
[[nodiscard]] bool ranks_before(const GridTrial& a, const GridTrial& b);

/// Trials in listed order: dropout outermost, lookback innermost.
[[nodiscard]] std::vector<GridTrial> enumerate_grid(const GridSpec& grid);

/**
 * Trains one model per grid point and scores it on the test split.
 *
 * The scaler is fit on train; train and test are windowed separately
 * (test yields m_test - lookback windows). Every trial uses base.seed for
 * initialisation, shuffling and dropout, so results do not depend on trial
 * order or on `parallel`. A failed trial is recorded and excluded from `best`.
 */
[[nodiscard]] GridResult grid_search(CellKind kind, const GridSpec& grid, const data::PriceSeries& train,
                                     const data::PriceSeries& test, const TrainConfig& base,
                                     std::size_t parallel = 1);

}  // namespace cpf::neural
