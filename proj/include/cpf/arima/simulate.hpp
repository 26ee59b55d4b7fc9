#pragma once

#include "cpf/util/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace cpf::arima {

/// Draws n points of the ARMA process with the sign convention of ArmaModel,
/// Gaussian innovations with standard deviation sigma, after burn_in discarded steps.
[[nodiscard]] std::vector<double> simulate_arma(std::span<const double> ar, std::span<const double> ma, double mean,
                                                double sigma, std::size_t n, Rng& rng, std::size_t burn_in = 200);

}  // namespace cpf::arima
