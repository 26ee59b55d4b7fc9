#include "cpf/neural/network.hpp"

#include "cpf/util/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cpf::neural {

double init_bound(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

RecurrentNetwork init_network(const NetworkConfig& config) {
    if (config.hidden_units == 0) {
        throw std::invalid_argument("init_network: hidden_units must be at least 1");
    }
    if (config.lookback == 0) {
        throw std::invalid_argument("init_network: lookback must be at least 1");
    }
    if (!(config.dropout >= 0.0 && config.dropout < 1.0)) {
        throw std::invalid_argument("init_network: dropout must lie in [0, 1)");
    }
    RecurrentNetwork net{config, ParameterSet(config.kind, config.hidden_units, config.input_size)};
    Rng rng(config.seed, Stream::Init);
    const std::size_t h = config.hidden_units;
    const double gate_bound = init_bound(h + config.input_size, h);
    const double head_bound = init_bound(h, 1);
    for (Tensor t : net.params.active()) {
        if (is_bias(t)) {
            continue;
        }
        const double bound = t == Tensor::Wy ? head_bound : gate_bound;
        auto& m = net.params[t];
        // Column-major fill order is part of the reproducibility contract.
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                m(i, j) = rng.uniform(-bound, bound);
            }
        }
    }
    return net;
}

ForwardResult forward(const RecurrentNetwork& net, const Eigen::MatrixXd& windows,
                      const Eigen::MatrixXd* dropout_mask) {
    const auto lookback = static_cast<Eigen::Index>(net.config.lookback);
    if (windows.cols() != lookback) {
        throw std::invalid_argument("forward: window length " + std::to_string(windows.cols()) +
                                    " does not match lookback " + std::to_string(lookback));
    }
    if (net.params.input_size() != 1) {
        throw std::invalid_argument("forward: windowed input requires input_size 1");
    }
    const auto batch = static_cast<std::size_t>(windows.rows());
    CellState state = CellState::zeros(net.params.kind(), net.params.hidden_units(), batch);
    ForwardResult result;
    result.cache.steps.resize(static_cast<std::size_t>(lookback));
    for (Eigen::Index t = 0; t < lookback; ++t) {
        const Eigen::MatrixXd x = windows.col(t).transpose();
        state = cell_forward(x, state, net.params, &result.cache.steps[static_cast<std::size_t>(t)]);
    }
    result.cache.final_activation = state.a;
    if (dropout_mask != nullptr) {
        if (dropout_mask->rows() != state.a.rows() || dropout_mask->cols() != state.a.cols()) {
            throw std::invalid_argument("forward: dropout mask shape mismatch");
        }
        result.cache.dropout_mask = *dropout_mask;
        result.predictions = output_head(state.a.cwiseProduct(*dropout_mask), net.params).row(0);
    } else {
        result.predictions = output_head(state.a, net.params).row(0);
    }
    return result;
}

double forward(const RecurrentNetwork& net, std::span<const double> window) {
    Eigen::MatrixXd w(1, static_cast<Eigen::Index>(window.size()));
    for (std::size_t i = 0; i < window.size(); ++i) {
        w(0, static_cast<Eigen::Index>(i)) = window[i];
    }
    return forward(net, w).predictions(0);
}

ParameterSet backward(const RecurrentNetwork& net, const ForwardCache& cache, const Eigen::RowVectorXd& d_pred) {
    const auto& p = net.params;
    if (cache.steps.size() != net.config.lookback) {
        throw std::invalid_argument("backward: cache has " + std::to_string(cache.steps.size()) +
                                    " steps, network lookback is " + std::to_string(net.config.lookback));
    }
    if (cache.final_activation.rows() != static_cast<Eigen::Index>(p.hidden_units()) ||
        cache.final_activation.cols() != d_pred.size()) {
        throw std::invalid_argument("backward: cache does not match parameters or upstream gradient");
    }
    ParameterSet grads(p.kind(), p.hidden_units(), p.input_size());

    Eigen::MatrixXd head_input = cache.final_activation;
    if (cache.dropout_mask.size() != 0) {
        head_input = head_input.cwiseProduct(cache.dropout_mask);
    }
    grads[Tensor::Wy].noalias() += d_pred * head_input.transpose();
    grads[Tensor::By](0, 0) += d_pred.sum();

    CellState d_state;
    d_state.a = p[Tensor::Wy].transpose() * d_pred;
    if (cache.dropout_mask.size() != 0) {
        d_state.a = d_state.a.cwiseProduct(cache.dropout_mask);
    }
    for (auto it = cache.steps.rbegin(); it != cache.steps.rend(); ++it) {
        d_state = cell_backward(*it, p, d_state, grads);
    }
    return grads;
}

std::vector<double> predict(const RecurrentNetwork& net, const Eigen::MatrixXd& windows) {
    const Eigen::RowVectorXd y = forward(net, windows).predictions;
    return {y.data(), y.data() + y.size()};
}

}  // namespace cpf::neural
