#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>

namespace cpf::data {

/**
 * Supervised (window, next value) pairs cut from a scaled series.
 *
 * Row i of features is series[i .. i+lookback) and label i is
 * series[i+lookback]. With stride 1 there are m - lookback rows.
 */
struct WindowedDataset {
    Eigen::MatrixXd features;  ///< rows = examples, cols = lookback (oldest first)
    Eigen::VectorXd labels;
    std::size_t lookback = 0;
    std::size_t stride = 1;

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(labels.size()); }

    /// (examples, stride, lookback): the 3-D layout fed to the recurrent model.
    [[nodiscard]] std::array<std::size_t, 3> shape() const { return {size(), stride, lookback}; }
};

/// Only stride 1 is accepted; any other value throws std::invalid_argument.
[[nodiscard]] WindowedDataset make_windows(std::span<const double> scaled, std::size_t lookback,
                                           std::size_t stride = 1);

}  // namespace cpf::data
