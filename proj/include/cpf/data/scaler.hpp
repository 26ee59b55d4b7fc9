#pragma once

#include "cpf/data/price_series.hpp"

#include <span>
#include <vector>

namespace cpf::data {

/**
 * Min-max scaler fit on one sample (the training split) and applied to any other.
 *
 * apply maps x to (x - lo) / (hi - lo). Values outside the fit sample map
 * outside [0, 1]; that is expected for test data and not clamped.
 */
class MinMaxScaler {
public:
    MinMaxScaler(double lo, double hi);

    /// Fits on the sample's range. Throws for fewer than two points or a constant sample.
    static MinMaxScaler fit(std::span<const double> sample);
    static MinMaxScaler fit(const PriceSeries& train) { return fit(train.values()); }

    [[nodiscard]] double lo() const { return lo_; }
    [[nodiscard]] double hi() const { return hi_; }

    [[nodiscard]] double apply(double x) const { return (x - lo_) / (hi_ - lo_); }
    [[nodiscard]] double invert(double scaled) const { return lo_ + scaled * (hi_ - lo_); }

    [[nodiscard]] std::vector<double> apply(std::span<const double> values) const;
    [[nodiscard]] std::vector<double> invert(std::span<const double> scaled) const;

private:
    double lo_;
    double hi_;
};

}  // namespace cpf::data
