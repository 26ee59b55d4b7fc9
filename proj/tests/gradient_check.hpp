#pragma once

// Central finite-difference oracle for the recurrent networks. It only calls
// forward(); backward() is what it checks.

#include "cpf/neural/network.hpp"
#include "cpf/util/rng.hpp"

#include <algorithm>
#include <cmath>

namespace cpf::testing {

struct GradientCheckResult {
    double max_relative_error = 0.0;
    std::size_t entries = 0;
};

/// Relative error |a - b| / max(|a|, |b|, floor). The floor keeps entries whose
/// true gradient is numerically zero from dividing round-off by round-off.
inline double relative_error(double a, double b, double floor) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Random small network with nonzero biases so every parameter is exercised.
inline neural::RecurrentNetwork random_network(neural::CellKind kind, std::size_t hidden, std::size_t lookback,
                                               Rng& rng) {
    neural::RecurrentNetwork net{{kind, hidden, 1, lookback, 0.0, 0},
                                 neural::ParameterSet(kind, hidden, 1)};
    for (neural::Tensor t : net.params.active()) {
        auto& m = net.params[t];
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                m(i, j) = rng.uniform(-1.0, 1.0);
            }
        }
    }
    return net;
}

/**
 * Compares BPTT gradients of L = sum_b upstream(b) * prediction(b) with the
 * five-point central difference of step h (error O(h^4)) on every parameter entry.
 */
inline GradientCheckResult check_gradients(const neural::RecurrentNetwork& net, const Eigen::MatrixXd& windows,
                                           const Eigen::RowVectorXd& upstream, const Eigen::MatrixXd* mask,
                                           double h, double floor) {
    const auto fwd = neural::forward(net, windows, mask);
    const auto grads = neural::backward(net, fwd.cache, upstream);

    GradientCheckResult result;
    neural::RecurrentNetwork probe = net;
    const auto loss = [&](const neural::RecurrentNetwork& n) {
        return upstream.dot(neural::forward(n, windows, mask).predictions);
    };
    for (neural::Tensor t : net.params.active()) {
        auto& m = probe.params[t];
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                const double saved = m(i, j);
                const auto at = [&](double offset) {
                    m(i, j) = saved + offset;
                    return loss(probe);
                };
                const double numeric = (at(-2.0 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h);
                m(i, j) = saved;
                result.max_relative_error =
                    std::max(result.max_relative_error, relative_error(grads[t](i, j), numeric, floor));
                ++result.entries;
            }
        }
    }
    return result;
}

}  // namespace cpf::testing
