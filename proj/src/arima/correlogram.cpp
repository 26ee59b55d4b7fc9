#include "cpf/arima/correlogram.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cpf::arima {

std::vector<double> acf(std::span<const double> series, std::size_t max_lag) {
    const std::size_t n = series.size();
    if (2 * max_lag >= n) {
        throw std::invalid_argument("acf: max_lag " + std::to_string(max_lag) + " must be below n/2 (n = " +
                                    std::to_string(n) + ")");
    }
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    double c0 = 0.0;
    for (double x : series) {
        c0 += (x - mean) * (x - mean);
    }
    if (c0 == 0.0) {
        throw std::invalid_argument("acf: constant series");
    }
    std::vector<double> r(max_lag + 1);
    r[0] = 1.0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double ck = 0.0;
        for (std::size_t t = k; t < n; ++t) {
            ck += (series[t] - mean) * (series[t - k] - mean);
        }
        r[k] = ck / c0;
    }
    return r;
}

std::vector<double> durbin_levinson(std::span<const double> r) {
    if (r.empty() || r[0] != 1.0) {
        throw std::invalid_argument("durbin_levinson: autocorrelations must start with 1");
    }
    const std::size_t max_lag = r.size() - 1;
    std::vector<double> out(max_lag + 1, 0.0);
    out[0] = 1.0;
    std::vector<double> phi;  // coefficients of the order-(k-1) predictor
    double v = 1.0;           // prediction error variance, relative to r_0
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = r[k];
        for (std::size_t j = 1; j < k; ++j) {
            num -= phi[j - 1] * r[k - j];
        }
        const double kk = v > 0.0 ? num / v : 0.0;
        std::vector<double> next(k);
        for (std::size_t j = 1; j < k; ++j) {
            next[j - 1] = phi[j - 1] - kk * phi[k - j - 1];
        }
        next[k - 1] = kk;
        phi = std::move(next);
        v *= (1.0 - kk * kk);
        out[k] = kk;
    }
    return out;
}

std::vector<double> pacf(std::span<const double> series, std::size_t max_lag) {
    return durbin_levinson(acf(series, max_lag));
}

}  // namespace cpf::arima
