#include "cpf/data/windowed_dataset.hpp"

#include <stdexcept>
#include <string>

namespace cpf::data {

WindowedDataset make_windows(std::span<const double> scaled, std::size_t lookback, std::size_t stride) {
    if (lookback < 1) {
        throw std::invalid_argument("make_windows: lookback must be at least 1");
    }
    if (stride != 1) {
        throw std::invalid_argument("make_windows: only stride 1 is supported (got " + std::to_string(stride) + ")");
    }
    const std::size_t m = scaled.size();
    if (m <= lookback) {
        throw std::invalid_argument("make_windows: series of length " + std::to_string(m) +
                                    " yields no examples for lookback " + std::to_string(lookback));
    }
    const std::size_t count = m - lookback;
    WindowedDataset ds;
    ds.lookback = lookback;
    ds.stride = stride;
    ds.features.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(lookback));
    ds.labels.resize(static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < lookback; ++j) {
            ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = scaled[i + j];
        }
        ds.labels(static_cast<Eigen::Index>(i)) = scaled[i + lookback];
    }
    return ds;
}

}  // namespace cpf::data
