#pragma once

#include "cpf/neural/cells.hpp"
#include "cpf/neural/parameters.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace cpf::neural {

struct NetworkConfig {
    CellKind kind = CellKind::Lstm;
    std::size_t hidden_units = 170;
    std::size_t input_size = 1;
    std::size_t lookback = 2;
    double dropout = 0.0;  ///< applied to the final activation while training
    std::uint64_t seed = 3;
};

/// One recurrent layer unrolled over the lookback window, plus a linear head.
struct RecurrentNetwork {
    NetworkConfig config;
    ParameterSet params;
};

/// Glorot-style bound sqrt(6 / (fan_in + fan_out)) used for weight initialisation.
[[nodiscard]] double init_bound(std::size_t fan_in, std::size_t fan_out);

/**
 * Weights uniform on [-bound, bound], biases zero. Gate matrices use
 * fan_in = hidden + input and fan_out = hidden (the RNN's W_aa and W_ax
 * share that bound); the head uses fan_in = hidden, fan_out = 1.
 * Deterministic in config.seed.
 */
[[nodiscard]] RecurrentNetwork init_network(const NetworkConfig& config);

struct ForwardCache {
    std::vector<StepCache> steps;
    Eigen::MatrixXd final_activation;  ///< before dropout
    Eigen::MatrixXd dropout_mask;      ///< empty when no dropout was applied
};

struct ForwardResult {
    Eigen::RowVectorXd predictions;
    ForwardCache cache;
};

/**
 * Runs the network over a batch of windows (rows = examples, cols = lookback,
 * oldest first). Each window element is one time step with input size 1 and
 * the state starts at zero. dropout_mask, when non-null, multiplies the final
 * activation (hidden x batch) before the head.
 */
[[nodiscard]] ForwardResult forward(const RecurrentNetwork& net, const Eigen::MatrixXd& windows,
                                    const Eigen::MatrixXd* dropout_mask = nullptr);

/// Single-window convenience wrapper.
[[nodiscard]] double forward(const RecurrentNetwork& net, std::span<const double> window);

/// Backpropagation through time: gradients of sum_b d_pred(b) * prediction(b).
[[nodiscard]] ParameterSet backward(const RecurrentNetwork& net, const ForwardCache& cache,
                                    const Eigen::RowVectorXd& d_pred);

/// Inference (no dropout), one scalar per window row.
[[nodiscard]] std::vector<double> predict(const RecurrentNetwork& net, const Eigen::MatrixXd& windows);

}  // namespace cpf::neural
