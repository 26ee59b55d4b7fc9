#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cpf::arima {

/// Applies (1 - L)^d; the result has n - d points. Throws unless n > d.
[[nodiscard]] std::vector<double> difference(std::span<const double> series, std::size_t d);

/**
 * Inverse of difference(): given the d-times differenced values and the first
 * d original values (anchors), rebuilds the original series (anchors included).
 */
[[nodiscard]] std::vector<double> integrate(std::span<const double> differenced, std::span<const double> anchors,
                                            std::size_t d);

/**
 * y_t - (1 - L)^d y_t, i.e. the part of y_t determined by its d predecessors.
 * history must end at y_{t-1} and hold at least d values. Adding a forecast of
 * (1 - L)^d y_t turns it into a level forecast.
 */
[[nodiscard]] double undifference_offset(std::span<const double> history, std::size_t d);

}  // namespace cpf::arima
