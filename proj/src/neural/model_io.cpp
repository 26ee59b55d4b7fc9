#include "cpf/neural/model_io.hpp"

#include "cpf/util/text_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace cpf::neural {

namespace {

constexpr const char* kMagic = "cpf-recurrent-model";
constexpr int kVersion = 1;

std::string hex(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double parse_hex(const std::string& token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
        throw std::runtime_error("model file: bad number '" + token + "'");
    }
    return v;
}

template <typename T>
T expect_field(std::istream& in, const std::string& key) {
    std::string got;
    T value{};
    if (!(in >> got) || got != key || !(in >> value)) {
        throw std::runtime_error("model file: expected field '" + key + "'");
    }
    return value;
}

}  // namespace

std::string serialize_model(const RecurrentNetwork& net) {
    std::ostringstream out;
    const auto& c = net.config;
    out << kMagic << ' ' << kVersion << '\n';
    out << "kind " << to_string(c.kind) << '\n';
    out << "hidden_units " << c.hidden_units << '\n';
    out << "input_size " << c.input_size << '\n';
    out << "lookback " << c.lookback << '\n';
    out << "dropout " << hex(c.dropout) << '\n';
    out << "seed " << c.seed << '\n';
    for (Tensor t : net.params.active()) {
        const auto& m = net.params[t];
        out << "tensor " << tensor_name(t) << ' ' << m.rows() << ' ' << m.cols() << '\n';
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                out << (j == 0 ? "" : " ") << hex(m(i, j));
            }
            out << '\n';
        }
    }
    out << "end\n";
    return out.str();
}

RecurrentNetwork deserialize_model(const std::string& text) {
    std::istringstream in(text);
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kMagic) {
        throw std::runtime_error("model file: missing header");
    }
    if (version != kVersion) {
        throw std::runtime_error("model file: unsupported version " + std::to_string(version));
    }
    NetworkConfig cfg;
    cfg.kind = parse_cell_kind(expect_field<std::string>(in, "kind"));
    cfg.hidden_units = expect_field<std::size_t>(in, "hidden_units");
    cfg.input_size = expect_field<std::size_t>(in, "input_size");
    cfg.lookback = expect_field<std::size_t>(in, "lookback");
    cfg.dropout = parse_hex(expect_field<std::string>(in, "dropout"));
    cfg.seed = expect_field<std::uint64_t>(in, "seed");

    RecurrentNetwork net{cfg, ParameterSet(cfg.kind, cfg.hidden_units, cfg.input_size)};
    for (Tensor t : net.params.active()) {
        std::string key;
        std::string name;
        Eigen::Index rows = 0;
        Eigen::Index cols = 0;
        if (!(in >> key >> name >> rows >> cols) || key != "tensor" || name != tensor_name(t)) {
            throw std::runtime_error("model file: expected tensor " + std::string(tensor_name(t)));
        }
        auto& m = net.params[t];
        if (rows != m.rows() || cols != m.cols()) {
            throw std::runtime_error("model file: tensor " + name + " has wrong shape");
        }
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) {
                std::string token;
                if (!(in >> token)) {
                    throw std::runtime_error("model file: truncated tensor " + name);
                }
                m(i, j) = parse_hex(token);
            }
        }
    }
    std::string end;
    if (!(in >> end) || end != "end") {
        throw std::runtime_error("model file: missing end marker");
    }
    return net;
}

void save_model(const std::filesystem::path& path, const RecurrentNetwork& net) {
    write_file_atomic(path, serialize_model(net));
}

RecurrentNetwork load_model(const std::filesystem::path& path) { return deserialize_model(read_file(path)); }

}  // namespace cpf::neural
