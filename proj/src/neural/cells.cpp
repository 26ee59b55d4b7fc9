#include "cpf/neural/cells.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cpf::neural {

namespace {

Eigen::MatrixXd stack(const Eigen::MatrixXd& state, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd z(state.rows() + x.rows(), x.cols());
    z.topRows(state.rows()) = state;
    z.bottomRows(x.rows()) = x;
    return z;
}

Eigen::MatrixXd affine(const ParameterSet& p, Tensor w, Tensor b, const Eigen::MatrixXd& z) {
    Eigen::MatrixXd out = p[w] * z;
    out.colwise() += p[b].col(0);
    return out;
}

Eigen::MatrixXd sigmoid_of(const Eigen::MatrixXd& z) {
    return z.unaryExpr([](double v) { return sigmoid(v); });
}

Eigen::MatrixXd tanh_of(const Eigen::MatrixXd& z) {
    return z.array().tanh().matrix();
}

void check_dims(const Eigen::MatrixXd& x, const CellState& prev, const ParameterSet& p, bool needs_memory) {
    const auto h = static_cast<Eigen::Index>(p.hidden_units());
    const auto n = static_cast<Eigen::Index>(p.input_size());
    if (x.rows() != n) {
        throw std::invalid_argument("cell forward: input has " + std::to_string(x.rows()) + " rows, expected " +
                                    std::to_string(n));
    }
    const Eigen::MatrixXd& state = needs_memory ? prev.c : prev.a;
    if (state.rows() != h || state.cols() != x.cols()) {
        throw std::invalid_argument("cell forward: state is " + std::to_string(state.rows()) + "x" +
                                    std::to_string(state.cols()) + ", expected " + std::to_string(h) + "x" +
                                    std::to_string(x.cols()));
    }
    if (needs_memory && p.kind() == CellKind::Lstm && (prev.a.rows() != h || prev.a.cols() != x.cols())) {
        throw std::invalid_argument("cell forward: LSTM activation has wrong shape");
    }
}

}  // namespace

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

CellState CellState::zeros(CellKind kind, std::size_t hidden_units, std::size_t batch) {
    const auto h = static_cast<Eigen::Index>(hidden_units);
    const auto b = static_cast<Eigen::Index>(batch);
    CellState s;
    s.a = Eigen::MatrixXd::Zero(h, b);
    if (kind != CellKind::Rnn) {
        s.c = Eigen::MatrixXd::Zero(h, b);
    }
    return s;
}

CellState rnn_cell_forward(const Eigen::MatrixXd& x, const CellState& prev, const ParameterSet& p,
                           StepCache* cache) {
    if (p.kind() != CellKind::Rnn) {
        throw std::invalid_argument("rnn_cell_forward: parameters are for " + std::string(to_string(p.kind())));
    }
    check_dims(x, prev, p, false);
    Eigen::MatrixXd pre = p[Tensor::Waa] * prev.a + p[Tensor::Wax] * x;
    pre.colwise() += p[Tensor::Ba].col(0);
    CellState next;
    next.a = tanh_of(pre);
    if (cache != nullptr) {
        cache->stacked = stack(prev.a, x);
        cache->a_prev = prev.a;
        cache->candidate = next.a;
    }
    return next;
}

Eigen::MatrixXd output_head(const Eigen::MatrixXd& a, const ParameterSet& p) {
    Eigen::MatrixXd y = p[Tensor::Wy] * a;
    y.array() += p[Tensor::By](0, 0);
    return y;
}

CellState gru_cell_forward(const Eigen::MatrixXd& x, const CellState& prev, const ParameterSet& p,
                           GruVariant variant, StepCache* cache) {
    const CellKind expected = variant == GruVariant::Simple ? CellKind::GruSimple : CellKind::GruFull;
    if (p.kind() != expected) {
        throw std::invalid_argument("gru_cell_forward: parameters are for " + std::string(to_string(p.kind())));
    }
    check_dims(x, prev, p, true);
    const auto h = static_cast<Eigen::Index>(p.hidden_units());
    Eigen::MatrixXd z = stack(prev.c, x);
    Eigen::MatrixXd update = sigmoid_of(affine(p, Tensor::Wu, Tensor::Bu, z));

    Eigen::MatrixXd relevance;
    Eigen::MatrixXd gated;
    Eigen::MatrixXd candidate;
    if (variant == GruVariant::Full) {
        relevance = sigmoid_of(affine(p, Tensor::Wr, Tensor::Br, z));
        gated = z;
        gated.topRows(h) = relevance.cwiseProduct(prev.c);
        candidate = tanh_of(affine(p, Tensor::Wc, Tensor::Bc, gated));
    } else {
        candidate = tanh_of(affine(p, Tensor::Wc, Tensor::Bc, z));
    }

    CellState next;
    next.c = update.cwiseProduct(candidate) + (Eigen::MatrixXd::Ones(h, x.cols()) - update).cwiseProduct(prev.c);
    next.a = next.c;
    if (cache != nullptr) {
        cache->stacked = std::move(z);
        cache->gated = std::move(gated);
        cache->c_prev = prev.c;
        cache->candidate = std::move(candidate);
        cache->update = std::move(update);
        cache->relevance = std::move(relevance);
    }
    return next;
}

CellState lstm_cell_forward(const Eigen::MatrixXd& x, const CellState& prev, const ParameterSet& p,
                            StepCache* cache) {
    if (p.kind() != CellKind::Lstm) {
        throw std::invalid_argument("lstm_cell_forward: parameters are for " + std::string(to_string(p.kind())));
    }
    check_dims(x, prev, p, true);
    Eigen::MatrixXd z = stack(prev.a, x);
    Eigen::MatrixXd candidate = tanh_of(affine(p, Tensor::Wc, Tensor::Bc, z));
    Eigen::MatrixXd update = sigmoid_of(affine(p, Tensor::Wu, Tensor::Bu, z));
    Eigen::MatrixXd forget = sigmoid_of(affine(p, Tensor::Wf, Tensor::Bf, z));
    Eigen::MatrixXd output = sigmoid_of(affine(p, Tensor::Wo, Tensor::Bo, z));

    CellState next;
    next.c = update.cwiseProduct(candidate) + forget.cwiseProduct(prev.c);
    Eigen::MatrixXd tanh_c = tanh_of(next.c);
    next.a = output.cwiseProduct(tanh_c);
    if (cache != nullptr) {
        cache->stacked = std::move(z);
        cache->a_prev = prev.a;
        cache->c_prev = prev.c;
        cache->candidate = std::move(candidate);
        cache->update = std::move(update);
        cache->forget = std::move(forget);
        cache->output = std::move(output);
        cache->tanh_c = std::move(tanh_c);
    }
    return next;
}

CellState cell_forward(const Eigen::MatrixXd& x, const CellState& prev, const ParameterSet& p, StepCache* cache) {
    switch (p.kind()) {
        case CellKind::Rnn: return rnn_cell_forward(x, prev, p, cache);
        case CellKind::GruSimple: return gru_cell_forward(x, prev, p, GruVariant::Simple, cache);
        case CellKind::GruFull: return gru_cell_forward(x, prev, p, GruVariant::Full, cache);
        case CellKind::Lstm: return lstm_cell_forward(x, prev, p, cache);
    }
    throw std::logic_error("unknown CellKind");
}

CellState cell_backward(const StepCache& cache, const ParameterSet& p, const CellState& d_state,
                        ParameterSet& grads) {
    const auto h = static_cast<Eigen::Index>(p.hidden_units());
    CellState d_prev;
    switch (p.kind()) {
        case CellKind::Rnn: {
            const Eigen::MatrixXd& a = cache.candidate;
            const Eigen::MatrixXd d_pre = d_state.a.array() * (1.0 - a.array().square());
            grads[Tensor::Waa].noalias() += d_pre * cache.a_prev.transpose();
            grads[Tensor::Wax].noalias() += d_pre * cache.stacked.bottomRows(cache.stacked.rows() - h).transpose();
            grads[Tensor::Ba] += d_pre.rowwise().sum();
            d_prev.a = p[Tensor::Waa].transpose() * d_pre;
            return d_prev;
        }
        case CellKind::GruSimple:
        case CellKind::GruFull: {
            // Memory and activation coincide; both incoming gradients act on c.
            Eigen::MatrixXd dc = d_state.a;
            if (d_state.c.size() != 0) {
                dc += d_state.c;
            }
            const auto& u = cache.update.array();
            const auto& ct = cache.candidate.array();
            const Eigen::MatrixXd d_update = dc.array() * (ct - cache.c_prev.array());
            const Eigen::MatrixXd d_cand = dc.array() * u;
            Eigen::MatrixXd dc_prev = dc.array() * (1.0 - u);

            const Eigen::MatrixXd d_upre = d_update.array() * u * (1.0 - u);
            const Eigen::MatrixXd d_cpre = d_cand.array() * (1.0 - ct.square());

            grads[Tensor::Wu].noalias() += d_upre * cache.stacked.transpose();
            grads[Tensor::Bu] += d_upre.rowwise().sum();
            Eigen::MatrixXd d_stacked = p[Tensor::Wu].transpose() * d_upre;

            if (p.kind() == CellKind::GruFull) {
                grads[Tensor::Wc].noalias() += d_cpre * cache.gated.transpose();
                grads[Tensor::Bc] += d_cpre.rowwise().sum();
                const Eigen::MatrixXd d_gated = p[Tensor::Wc].transpose() * d_cpre;
                const auto& r = cache.relevance.array();
                const Eigen::MatrixXd d_rel = d_gated.topRows(h).array() * cache.c_prev.array();
                dc_prev.array() += d_gated.topRows(h).array() * r;
                const Eigen::MatrixXd d_rpre = d_rel.array() * r * (1.0 - r);
                grads[Tensor::Wr].noalias() += d_rpre * cache.stacked.transpose();
                grads[Tensor::Br] += d_rpre.rowwise().sum();
                d_stacked.noalias() += p[Tensor::Wr].transpose() * d_rpre;
            } else {
                grads[Tensor::Wc].noalias() += d_cpre * cache.stacked.transpose();
                grads[Tensor::Bc] += d_cpre.rowwise().sum();
                d_stacked.noalias() += p[Tensor::Wc].transpose() * d_cpre;
            }
            dc_prev += d_stacked.topRows(h);
            d_prev.c = dc_prev;
            d_prev.a = Eigen::MatrixXd::Zero(dc_prev.rows(), dc_prev.cols());
            return d_prev;
        }
        case CellKind::Lstm: {
            const auto& o = cache.output.array();
            const auto& u = cache.update.array();
            const auto& f = cache.forget.array();
            const auto& ct = cache.candidate.array();
            const auto& tc = cache.tanh_c.array();

            const Eigen::MatrixXd d_out = d_state.a.array() * tc;
            Eigen::MatrixXd dc = d_state.a.array() * o * (1.0 - tc.square());
            if (d_state.c.size() != 0) {
                dc += d_state.c;
            }
            const Eigen::MatrixXd d_upd = dc.array() * ct;
            const Eigen::MatrixXd d_cand = dc.array() * u;
            const Eigen::MatrixXd d_fgt = dc.array() * cache.c_prev.array();

            const Eigen::MatrixXd d_opre = d_out.array() * o * (1.0 - o);
            const Eigen::MatrixXd d_upre = d_upd.array() * u * (1.0 - u);
            const Eigen::MatrixXd d_fpre = d_fgt.array() * f * (1.0 - f);
            const Eigen::MatrixXd d_cpre = d_cand.array() * (1.0 - ct.square());

            const Eigen::MatrixXd zt = cache.stacked.transpose();
            grads[Tensor::Wo].noalias() += d_opre * zt;
            grads[Tensor::Wu].noalias() += d_upre * zt;
            grads[Tensor::Wf].noalias() += d_fpre * zt;
            grads[Tensor::Wc].noalias() += d_cpre * zt;
            grads[Tensor::Bo] += d_opre.rowwise().sum();
            grads[Tensor::Bu] += d_upre.rowwise().sum();
            grads[Tensor::Bf] += d_fpre.rowwise().sum();
            grads[Tensor::Bc] += d_cpre.rowwise().sum();

            Eigen::MatrixXd d_stacked = p[Tensor::Wo].transpose() * d_opre;
            d_stacked.noalias() += p[Tensor::Wu].transpose() * d_upre;
            d_stacked.noalias() += p[Tensor::Wf].transpose() * d_fpre;
            d_stacked.noalias() += p[Tensor::Wc].transpose() * d_cpre;

            d_prev.a = d_stacked.topRows(h);
            d_prev.c = dc.array() * f;
            return d_prev;
        }
    }
    throw std::logic_error("unknown CellKind");
}

}  // namespace cpf::neural
