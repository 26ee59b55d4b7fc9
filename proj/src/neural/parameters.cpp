#include "cpf/neural/parameters.hpp"

#include <stdexcept>
#include <string>

namespace cpf::neural {

namespace {

constexpr std::array kRnnTensors = {Tensor::Waa, Tensor::Wax, Tensor::Ba, Tensor::Wy, Tensor::By};
constexpr std::array kGruSimpleTensors = {Tensor::Wc, Tensor::Wu, Tensor::Bc, Tensor::Bu, Tensor::Wy, Tensor::By};
constexpr std::array kGruFullTensors = {Tensor::Wc, Tensor::Wu, Tensor::Wr, Tensor::Bc,
                                        Tensor::Bu, Tensor::Br, Tensor::Wy, Tensor::By};
constexpr std::array kLstmTensors = {Tensor::Wc, Tensor::Wu, Tensor::Wf, Tensor::Wo, Tensor::Bc,
                                     Tensor::Bu, Tensor::Bf, Tensor::Bo, Tensor::Wy, Tensor::By};

}  // namespace

std::string_view to_string(CellKind kind) {
    switch (kind) {
        case CellKind::Rnn: return "rnn";
        case CellKind::GruSimple: return "gru_simple";
        case CellKind::GruFull: return "gru_full";
        case CellKind::Lstm: return "lstm";
    }
    throw std::logic_error("unknown CellKind");
}

CellKind parse_cell_kind(std::string_view text) {
    if (text == "rnn") return CellKind::Rnn;
    if (text == "gru_simple") return CellKind::GruSimple;
    if (text == "gru_full") return CellKind::GruFull;
    if (text == "lstm") return CellKind::Lstm;
    throw std::invalid_argument("unknown cell kind '" + std::string(text) +
                                "' (expected rnn, gru_simple, gru_full or lstm)");
}

std::string_view tensor_name(Tensor t) {
    switch (t) {
        case Tensor::Wc: return "W_c";
        case Tensor::Wu: return "W_u";
        case Tensor::Wr: return "W_r";
        case Tensor::Wf: return "W_f";
        case Tensor::Wo: return "W_o";
        case Tensor::Bc: return "b_c";
        case Tensor::Bu: return "b_u";
        case Tensor::Br: return "b_r";
        case Tensor::Bf: return "b_f";
        case Tensor::Bo: return "b_o";
        case Tensor::Waa: return "W_aa";
        case Tensor::Wax: return "W_ax";
        case Tensor::Ba: return "b_a";
        case Tensor::Wy: return "W_y";
        case Tensor::By: return "b_y";
        case Tensor::Count: break;
    }
    throw std::logic_error("unknown Tensor");
}

bool is_bias(Tensor t) {
    switch (t) {
        case Tensor::Bc:
        case Tensor::Bu:
        case Tensor::Br:
        case Tensor::Bf:
        case Tensor::Bo:
        case Tensor::Ba:
        case Tensor::By:
            return true;
        default:
            return false;
    }
}

std::span<const Tensor> active_tensors(CellKind kind) {
    switch (kind) {
        case CellKind::Rnn: return kRnnTensors;
        case CellKind::GruSimple: return kGruSimpleTensors;
        case CellKind::GruFull: return kGruFullTensors;
        case CellKind::Lstm: return kLstmTensors;
    }
    throw std::logic_error("unknown CellKind");
}

ParameterSet::ParameterSet(CellKind kind, std::size_t hidden_units, std::size_t input_size)
    : kind_(kind), hidden_(hidden_units), input_(input_size) {
    if (hidden_units == 0) {
        throw std::invalid_argument("ParameterSet: hidden_units must be at least 1");
    }
    if (input_size == 0) {
        throw std::invalid_argument("ParameterSet: input_size must be at least 1");
    }
    const auto h = static_cast<Eigen::Index>(hidden_units);
    const auto n = static_cast<Eigen::Index>(input_size);
    for (Tensor t : active()) {
        auto& m = (*this)[t];
        switch (t) {
            case Tensor::Waa: m = Eigen::MatrixXd::Zero(h, h); break;
            case Tensor::Wax: m = Eigen::MatrixXd::Zero(h, n); break;
            case Tensor::Wy: m = Eigen::MatrixXd::Zero(1, h); break;
            case Tensor::By: m = Eigen::MatrixXd::Zero(1, 1); break;
            default:
                m = is_bias(t) ? Eigen::MatrixXd::Zero(h, 1) : Eigen::MatrixXd::Zero(h, h + n);
        }
    }
}

bool ParameterSet::same_shape(const ParameterSet& other) const {
    if (kind_ != other.kind_ || hidden_ != other.hidden_ || input_ != other.input_) {
        return false;
    }
    for (Tensor t : active()) {
        if ((*this)[t].rows() != other[t].rows() || (*this)[t].cols() != other[t].cols()) {
            return false;
        }
    }
    return true;
}

std::size_t ParameterSet::parameter_count() const {
    std::size_t n = 0;
    for (Tensor t : active()) {
        n += static_cast<std::size_t>((*this)[t].size());
    }
    return n;
}

double ParameterSet::squared_norm() const {
    double acc = 0.0;
    for (Tensor t : active()) {
        acc += (*this)[t].squaredNorm();
    }
    return acc;
}

bool ParameterSet::all_finite() const {
    for (Tensor t : active()) {
        if (!(*this)[t].allFinite()) {
            return false;
        }
    }
    return true;
}

void ParameterSet::set_zero() {
    for (Tensor t : active()) {
        (*this)[t].setZero();
    }
}

void ParameterSet::scale(double factor) {
    for (Tensor t : active()) {
        (*this)[t] *= factor;
    }
}

}  // namespace cpf::neural
