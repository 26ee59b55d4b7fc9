#include "cpf/neural/trainer.hpp"

#include "cpf/neural/dropout.hpp"
#include "cpf/util/rng.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace cpf::neural {

void TrainConfig::validate() const {
    if (epochs < 1) {
        throw std::invalid_argument("TrainConfig: epochs must be at least 1");
    }
    if (batch_size < 1) {
        throw std::invalid_argument("TrainConfig: batch_size must be at least 1");
    }
    if (clip_norm < 0.0 || weight_decay < 0.0) {
        throw std::invalid_argument("TrainConfig: clip_norm and weight_decay must be nonnegative");
    }
    if (!(adam.alpha > 0.0 && adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0 &&
          adam.epsilon > 0.0)) {
        throw std::invalid_argument("TrainConfig: invalid ADAM settings");
    }
}

double dataset_rmse(const RecurrentNetwork& net, const data::WindowedDataset& dataset) {
    const Eigen::RowVectorXd y = forward(net, dataset.features).predictions;
    const double mse = (y.transpose() - dataset.labels).squaredNorm() / static_cast<double>(dataset.size());
    return std::sqrt(mse);
}

TrainResult train(RecurrentNetwork net, const data::WindowedDataset& dataset, const TrainConfig& cfg) {
    cfg.validate();
    if (dataset.size() == 0) {
        throw std::invalid_argument("train: empty dataset");
    }
    if (dataset.lookback != net.config.lookback) {
        throw std::invalid_argument("train: dataset lookback " + std::to_string(dataset.lookback) +
                                    " differs from network lookback " + std::to_string(net.config.lookback));
    }

    const std::size_t n = dataset.size();
    const auto h = static_cast<Eigen::Index>(net.config.hidden_units);
    const double dropout = net.config.dropout;
    Rng shuffle_rng(cfg.seed, Stream::Shuffle);
    Rng dropout_rng(cfg.seed, Stream::Dropout);
    AdamState adam(net.params, cfg.adam);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult result;
    result.loss_history.reserve(cfg.epochs);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.shuffle) {
            for (std::size_t i = n - 1; i > 0; --i) {
                std::swap(order[i], order[static_cast<std::size_t>(shuffle_rng.below(i + 1))]);
            }
        }
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t count = std::min(cfg.batch_size, n - start);
            Eigen::MatrixXd windows(static_cast<Eigen::Index>(count), dataset.features.cols());
            Eigen::RowVectorXd labels(static_cast<Eigen::Index>(count));
            for (std::size_t b = 0; b < count; ++b) {
                const auto row = static_cast<Eigen::Index>(order[start + b]);
                windows.row(static_cast<Eigen::Index>(b)) = dataset.features.row(row);
                labels(static_cast<Eigen::Index>(b)) = dataset.labels(row);
            }

            Eigen::MatrixXd mask;
            if (dropout > 0.0) {
                mask = dropout_mask(h, static_cast<Eigen::Index>(count), dropout, dropout_rng);
            }
            const ForwardResult fwd = forward(net, windows, dropout > 0.0 ? &mask : nullptr);
            // d/dy of mean (y - label)^2 over the batch.
            const Eigen::RowVectorXd d_pred = 2.0 * (fwd.predictions - labels) / static_cast<double>(count);
            ParameterSet grads = backward(net, fwd.cache, d_pred);
            if (cfg.weight_decay > 0.0) {
                for (Tensor t : grads.active()) {
                    if (!is_bias(t)) {
                        grads[t] += (cfg.weight_decay / static_cast<double>(count)) * net.params[t];
                    }
                }
            }
            if (!grads.all_finite()) {
                throw DivergenceError("train: non-finite gradient in epoch " + std::to_string(epoch + 1),
                                      result.loss_history.size(), result.loss_history);
            }
            clip_global_norm(grads, cfg.clip_norm);
            adam_step(net.params, grads, adam);
        }
        const double rmse = dataset_rmse(net, dataset);
        if (!std::isfinite(rmse)) {
            throw DivergenceError("train: loss became non-finite in epoch " + std::to_string(epoch + 1) +
                                      " (last finite epoch " + std::to_string(result.loss_history.size()) + ")",
                                  result.loss_history.size(), result.loss_history);
        }
        result.loss_history.push_back(rmse);
    }
    result.net = std::move(net);
    return result;
}

}  // namespace cpf::neural
