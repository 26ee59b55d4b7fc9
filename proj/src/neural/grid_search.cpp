#include "cpf/neural/grid_search.hpp"

#include "cpf/data/scaler.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace cpf::neural {

void GridSpec::validate() const {
    if (dropout.empty() || units.empty() || epochs.empty() || lookback.empty()) {
        throw std::invalid_argument("GridSpec: every value list must be nonempty");
    }
    for (double d : dropout) {
        if (!(d >= 0.0 && d < 1.0)) {
            throw std::invalid_argument("GridSpec: dropout values must lie in [0, 1)");
        }
    }
    const auto positive = [](const std::vector<std::size_t>& v) {
        return std::all_of(v.begin(), v.end(), [](std::size_t x) { return x >= 1; });
    };
    if (!positive(units) || !positive(epochs) || !positive(lookback)) {
        throw std::invalid_argument("GridSpec: units, epochs and lookback values must be at least 1");
    }
}

bool ranks_before(const GridTrial& a, const GridTrial& b) {
    if (a.ok != b.ok) {
        return a.ok;
    }
    if (a.ok && a.test_rmse != b.test_rmse) {
        return a.test_rmse < b.test_rmse;
    }
    if (a.units != b.units) return a.units < b.units;
    if (a.lookback != b.lookback) return a.lookback < b.lookback;
    if (a.epochs != b.epochs) return a.epochs < b.epochs;
    return a.index < b.index;
}

std::vector<GridTrial> enumerate_grid(const GridSpec& grid) {
    std::vector<GridTrial> trials;
    trials.reserve(grid.size());
    for (double d : grid.dropout) {
        for (std::size_t u : grid.units) {
            for (std::size_t e : grid.epochs) {
                for (std::size_t l : grid.lookback) {
                    GridTrial t;
                    t.index = trials.size();
                    t.dropout = d;
                    t.units = u;
                    t.epochs = e;
                    t.lookback = l;
                    trials.push_back(t);
                }
            }
        }
    }
    return trials;
}

namespace {

void run_trial(GridTrial& trial, CellKind kind, const std::vector<double>& train_scaled,
               const std::vector<double>& test_scaled, const TrainConfig& base) {
    const auto started = std::chrono::steady_clock::now();
    try {
        const auto train_ds = data::make_windows(train_scaled, trial.lookback);
        const auto test_ds = data::make_windows(test_scaled, trial.lookback);
        NetworkConfig net_cfg;
        net_cfg.kind = kind;
        net_cfg.hidden_units = trial.units;
        net_cfg.lookback = trial.lookback;
        net_cfg.dropout = trial.dropout;
        net_cfg.seed = base.seed;
        TrainConfig cfg = base;
        cfg.epochs = trial.epochs;
        auto trained = train(init_network(net_cfg), train_ds, cfg);
        trial.train_rmse = trained.loss_history.back();
        trial.test_rmse = dataset_rmse(trained.net, test_ds);
        trial.ok = std::isfinite(trial.test_rmse);
        if (!trial.ok) {
            trial.error = "non-finite test RMSE";
        }
    } catch (const std::exception& e) {
        trial.ok = false;
        trial.error = e.what();
    }
    trial.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
}

}  // namespace

GridResult grid_search(CellKind kind, const GridSpec& grid, const data::PriceSeries& train,
                       const data::PriceSeries& test, const TrainConfig& base, std::size_t parallel) {
    grid.validate();
    base.validate();
    const auto scaler = data::MinMaxScaler::fit(train);
    const auto train_scaled = scaler.apply(train.values());
    const auto test_scaled = scaler.apply(test.values());

    std::vector<GridTrial> trials = enumerate_grid(grid);
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < trials.size(); i = next.fetch_add(1)) {
            run_trial(trials[i], kind, train_scaled, test_scaled, base);
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(parallel, trials.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    std::sort(trials.begin(), trials.end(), ranks_before);
    GridResult result;
    result.trials = std::move(trials);
    if (!result.trials.empty() && result.trials.front().ok) {
        result.best = result.trials.front();
    }
    return result;
}

}  // namespace cpf::neural
