#pragma once

#include "cpf/neural/network.hpp"

#include <filesystem>
#include <string>

namespace cpf::neural {

/**
 * Plain-text model format, version 1:
 *
 *   cpf-recurrent-model 1
 *   kind lstm
 *   hidden_units 170
 *   input_size 1
 *   lookback 2
 *   dropout 0x1.3333333333333p-2
 *   seed 3
 *   tensor W_c 170 171
 *   <row-major values, one row per line, hexadecimal floating point>
 *   ...
 *   end
 *
 * Tensors appear in active_tensors(kind) order. Hex floats make the round
 * trip bit-exact.
 */
[[nodiscard]] std::string serialize_model(const RecurrentNetwork& net);
[[nodiscard]] RecurrentNetwork deserialize_model(const std::string& text);

void save_model(const std::filesystem::path& path, const RecurrentNetwork& net);
[[nodiscard]] RecurrentNetwork load_model(const std::filesystem::path& path);

}  // namespace cpf::neural
