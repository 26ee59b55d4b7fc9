#pragma once

#include "cpf/neural/parameters.hpp"

#include <cstdint>

namespace cpf::neural {

struct AdamConfig {
    double alpha = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First/second moment accumulators shaped like the parameters they update.
struct AdamState {
    AdamConfig config;
    ParameterSet m;
    ParameterSet v;
    std::uint64_t t = 0;

    AdamState(const ParameterSet& like, AdamConfig cfg = {});
};

/**
 * One bias-corrected ADAM update:
 *   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2,
 *   theta <- theta - alpha * m_hat / (sqrt(v_hat) + eps).
 * Throws std::domain_error (leaving params and state untouched) if any
 * gradient entry is non-finite.
 */
void adam_step(ParameterSet& params, const ParameterSet& grads, AdamState& state);

/// Rescales grads so their global L2 norm is at most max_norm; returns the norm before clipping.
double clip_global_norm(ParameterSet& grads, double max_norm);

}  // namespace cpf::neural
