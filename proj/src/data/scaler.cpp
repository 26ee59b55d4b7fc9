#include "cpf/data/scaler.hpp"

#include "cpf/util/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpf::data {

MinMaxScaler::MinMaxScaler(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && hi > lo)) {
        throw std::invalid_argument("MinMaxScaler: need finite bounds with hi > lo (got lo=" + format_double(lo) +
                                    ", hi=" + format_double(hi) + ")");
    }
}

MinMaxScaler MinMaxScaler::fit(std::span<const double> sample) {
    if (sample.size() < 2) {
        throw std::invalid_argument("MinMaxScaler::fit: need at least 2 points");
    }
    const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
    if (*hi == *lo) {
        throw std::invalid_argument("MinMaxScaler::fit: constant training series (hi == lo == " +
                                    format_double(*lo) + ")");
    }
    return MinMaxScaler(*lo, *hi);
}

std::vector<double> MinMaxScaler::apply(std::span<const double> values) const {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        out.push_back(apply(v));
    }
    return out;
}

std::vector<double> MinMaxScaler::invert(std::span<const double> scaled) const {
    std::vector<double> out;
    out.reserve(scaled.size());
    for (double v : scaled) {
        out.push_back(invert(v));
    }
    return out;
}

}  // namespace cpf::data
