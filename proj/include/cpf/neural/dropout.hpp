#pragma once

#include "cpf/util/rng.hpp"

#include <Eigen/Dense>

namespace cpf::neural {

/// Inverted-dropout mask: each entry is 0 with probability rate, else 1/(1-rate).
[[nodiscard]] Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng);

/// Applies inverted dropout while training; identity at inference or rate 0.
/// Throws std::invalid_argument unless 0 <= rate < 1.
[[nodiscard]] Eigen::MatrixXd apply_dropout(const Eigen::MatrixXd& activations, double rate, Rng& rng,
                                            bool training);

}  // namespace cpf::neural
