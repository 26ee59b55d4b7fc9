#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace cpf::neural {

/// Recurrent cell families.
enum class CellKind {
    Rnn,        ///< a = tanh(W_aa a_prev + W_ax x + b_a)
    GruSimple,  ///< candidate + update gate
    GruFull,    ///< adds the relevance gate on the previous memory
    Lstm,       ///< candidate, update, forget and output gates
};

[[nodiscard]] std::string_view to_string(CellKind kind);
/// Accepts rnn, gru_simple, gru_full, lstm (case-sensitive).
[[nodiscard]] CellKind parse_cell_kind(std::string_view text);

/// Every tensor a network may own. Gate matrices (W_c .. W_o) act on the
/// stacked vector [state_prev; x] and are hidden x (hidden + input).
/// Biases are hidden x 1 column matrices. W_y / b_y form the linear output head.
enum class Tensor : std::size_t {
    Wc, Wu, Wr, Wf, Wo,
    Bc, Bu, Br, Bf, Bo,
    Waa, Wax, Ba,
    Wy, By,
    Count
};

[[nodiscard]] std::string_view tensor_name(Tensor t);
[[nodiscard]] bool is_bias(Tensor t);

/// Tensors used by a cell kind, output head included, in serialization order.
[[nodiscard]] std::span<const Tensor> active_tensors(CellKind kind);

/**
 * Named parameter tensors of one network (also used for gradients and
 * optimizer moments, which share the shape).
 */
class ParameterSet {
public:
    ParameterSet() = default;
    /// All active tensors allocated with the right shape and set to zero.
    ParameterSet(CellKind kind, std::size_t hidden_units, std::size_t input_size);

    [[nodiscard]] CellKind kind() const { return kind_; }
    [[nodiscard]] std::size_t hidden_units() const { return hidden_; }
    [[nodiscard]] std::size_t input_size() const { return input_; }
    [[nodiscard]] std::span<const Tensor> active() const { return active_tensors(kind_); }

    [[nodiscard]] Eigen::MatrixXd& operator[](Tensor t) { return tensors_[static_cast<std::size_t>(t)]; }
    [[nodiscard]] const Eigen::MatrixXd& operator[](Tensor t) const { return tensors_[static_cast<std::size_t>(t)]; }

    [[nodiscard]] bool same_shape(const ParameterSet& other) const;
    [[nodiscard]] std::size_t parameter_count() const;
    [[nodiscard]] double squared_norm() const;
    [[nodiscard]] bool all_finite() const;
    void set_zero();
    void scale(double factor);

private:
    CellKind kind_ = CellKind::Lstm;
    std::size_t hidden_ = 0;
    std::size_t input_ = 0;
    std::array<Eigen::MatrixXd, static_cast<std::size_t>(Tensor::Count)> tensors_;
};

}  // namespace cpf::neural
