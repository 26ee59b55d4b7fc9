#include "cpf/neural/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace cpf::neural {

AdamState::AdamState(const ParameterSet& like, AdamConfig cfg)
    : config(cfg),
      m(like.kind(), like.hidden_units(), like.input_size()),
      v(like.kind(), like.hidden_units(), like.input_size()) {}

void adam_step(ParameterSet& params, const ParameterSet& grads, AdamState& state) {
    if (!params.same_shape(grads) || !params.same_shape(state.m)) {
        throw std::invalid_argument("adam_step: parameter, gradient and moment shapes differ");
    }
    if (!grads.all_finite()) {
        throw std::domain_error("adam_step: non-finite gradient");
    }
    const auto& c = state.config;
    state.t += 1;
    const double t = static_cast<double>(state.t);
    const double correction1 = 1.0 - std::pow(c.beta1, t);
    const double correction2 = 1.0 - std::pow(c.beta2, t);
    for (Tensor name : params.active()) {
        auto theta = params[name].array();
        const auto g = grads[name].array();
        auto m = state.m[name].array();
        auto v = state.v[name].array();
        m = c.beta1 * m + (1.0 - c.beta1) * g;
        v = c.beta2 * v + (1.0 - c.beta2) * g.square();
        theta -= c.alpha * (m / correction1) / ((v / correction2).sqrt() + c.epsilon);
    }
}

double clip_global_norm(ParameterSet& grads, double max_norm) {
    const double norm = std::sqrt(grads.squared_norm());
    if (max_norm > 0.0 && norm > max_norm) {
        grads.scale(max_norm / norm);
    }
    return norm;
}

}  // namespace cpf::neural
