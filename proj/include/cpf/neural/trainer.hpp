#pragma once

#include "cpf/data/windowed_dataset.hpp"
#include "cpf/neural/adam.hpp"
#include "cpf/neural/network.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cpf::neural {

struct TrainConfig {
    std::size_t epochs = 50;
    std::size_t batch_size = 32;
    bool shuffle = true;
    std::uint64_t seed = 3;
    double clip_norm = 5.0;      ///< global-norm clip; 0 disables
    double weight_decay = 0.0;   ///< lambda on non-bias weights, scaled by 1/batch
    AdamConfig adam;

    void validate() const;
};

/// Raised when an epoch's loss is not finite. last_finite_epoch is 1-based (0 if none).
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::size_t last_finite_epoch, std::vector<double> history)
        : std::runtime_error(what), last_finite_epoch_(last_finite_epoch), history_(std::move(history)) {}
    [[nodiscard]] std::size_t last_finite_epoch() const noexcept { return last_finite_epoch_; }
    [[nodiscard]] const std::vector<double>& history() const noexcept { return history_; }

private:
    std::size_t last_finite_epoch_;
    std::vector<double> history_;
};

struct TrainResult {
    RecurrentNetwork net;
    std::vector<double> loss_history;  ///< training RMSE (scaled units) after each epoch
};

/**
 * Mini-batch BPTT with ADAM on the mean squared error.
 *
 * Each epoch visits every example once (shuffled when cfg.shuffle), keeping
 * the final partial batch. The batch gradient is the mean over its examples,
 * clipped to cfg.clip_norm. Dropout masks come from a stream seeded by
 * cfg.seed. After each epoch the full training set is re-evaluated without
 * dropout and its RMSE recorded.
 */
[[nodiscard]] TrainResult train(RecurrentNetwork net, const data::WindowedDataset& dataset, const TrainConfig& cfg);

/// Root mean squared error of the network on a dataset (inference mode).
[[nodiscard]] double dataset_rmse(const RecurrentNetwork& net, const data::WindowedDataset& dataset);

}  // namespace cpf::neural
