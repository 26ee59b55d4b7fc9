#pragma once

#include "cpf/neural/parameters.hpp"

#include <Eigen/Dense>

namespace cpf::neural {

/// Recurrent state for a batch: one column per example.
/// For GRU cells the activation is the memory itself, so a == c.
/// For the plain RNN c is unused and left empty.
struct CellState {
    Eigen::MatrixXd a;
    Eigen::MatrixXd c;

    static CellState zeros(CellKind kind, std::size_t hidden_units, std::size_t batch);
};

/// Everything one step's backward pass needs.
struct StepCache {
    Eigen::MatrixXd stacked;    ///< [state_prev; x]
    Eigen::MatrixXd gated;      ///< GRU full: [relevance o c_prev; x]
    Eigen::MatrixXd a_prev;
    Eigen::MatrixXd c_prev;
    Eigen::MatrixXd candidate;  ///< c-tilde (RNN: the new activation)
    Eigen::MatrixXd update;
    Eigen::MatrixXd relevance;
    Eigen::MatrixXd forget;
    Eigen::MatrixXd output;
    Eigen::MatrixXd tanh_c;     ///< LSTM only
};

[[nodiscard]] double sigmoid(double z);

/// Plain RNN step. x is input_size x batch.
[[nodiscard]] CellState rnn_cell_forward(const Eigen::MatrixXd& x, const CellState& prev, const ParameterSet& p,
                                         StepCache* cache = nullptr);

/// y = W_y a + b_y (linear read-out), 1 x batch.
[[nodiscard]] Eigen::MatrixXd output_head(const Eigen::MatrixXd& a, const ParameterSet& p);

enum class GruVariant { Simple, Full };

/// GRU step; p.kind() must match the variant.
[[nodiscard]] CellState gru_cell_forward(const Eigen::MatrixXd& x, const CellState& prev, const ParameterSet& p,
                                         GruVariant variant, StepCache* cache = nullptr);

[[nodiscard]] CellState lstm_cell_forward(const Eigen::MatrixXd& x, const CellState& prev, const ParameterSet& p,
                                          StepCache* cache = nullptr);

/// Dispatches on p.kind().
[[nodiscard]] CellState cell_forward(const Eigen::MatrixXd& x, const CellState& prev, const ParameterSet& p,
                                     StepCache* cache = nullptr);

/**
 * One step of backpropagation through time.
 *
 * d_state holds dLoss/da and dLoss/dc for this step's outputs (d_state.c is
 * ignored for RNN and GRU cells, whose memory is the activation). Parameter
 * gradients are accumulated into grads. Returns the gradient with respect to
 * the previous state.
 */
[[nodiscard]] CellState cell_backward(const StepCache& cache, const ParameterSet& p, const CellState& d_state,
                                      ParameterSet& grads);

}  // namespace cpf::neural
