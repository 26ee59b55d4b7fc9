#include "cpf/neural/dropout.hpp"

#include <stdexcept>

namespace cpf::neural {

namespace {

void check_rate(double rate) {
    if (!(rate >= 0.0 && rate < 1.0)) {
        throw std::invalid_argument("dropout rate must lie in [0, 1)");
    }
}

}  // namespace

Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
    check_rate(rate);
    const double keep_scale = 1.0 / (1.0 - rate);
    Eigen::MatrixXd mask(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            mask(i, j) = rng.uniform() < rate ? 0.0 : keep_scale;
        }
    }
    return mask;
}

Eigen::MatrixXd apply_dropout(const Eigen::MatrixXd& activations, double rate, Rng& rng, bool training) {
    check_rate(rate);
    if (!training || rate == 0.0) {
        return activations;
    }
    return activations.cwiseProduct(dropout_mask(activations.rows(), activations.cols(), rate, rng));
}

}  // namespace cpf::neural
