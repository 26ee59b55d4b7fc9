#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cpf::arima {

/**
 * Sample autocorrelations r_0..r_max_lag (r_0 = 1), using the full-sample
 * mean and the lag-0 sum of squares as denominator.
 * Throws std::invalid_argument for a constant series or max_lag >= n/2.
 */
[[nodiscard]] std::vector<double> acf(std::span<const double> series, std::size_t max_lag);

/// Partial autocorrelations by the Durbin-Levinson recursion; index k is lag k, index 0 is 1.
[[nodiscard]] std::vector<double> pacf(std::span<const double> series, std::size_t max_lag);

/// Durbin-Levinson on a given autocorrelation sequence (r[0] must be 1).
[[nodiscard]] std::vector<double> durbin_levinson(std::span<const double> autocorrelations);

}  // namespace cpf::arima
