#include "cpf/arima/simulate.hpp"

namespace cpf::arima {

std::vector<double> simulate_arma(std::span<const double> ar, std::span<const double> ma, double mean, double sigma,
                                  std::size_t n, Rng& rng, std::size_t burn_in) {
    const std::size_t total = n + burn_in;
    std::vector<double> w(total, 0.0);
    std::vector<double> e(total, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        e[t] = sigma * rng.normal();
        double v = e[t];
        for (std::size_t i = 1; i <= ar.size() && i <= t; ++i) {
            v += ar[i - 1] * w[t - i];
        }
        for (std::size_t j = 1; j <= ma.size() && j <= t; ++j) {
            v -= ma[j - 1] * e[t - j];
        }
        w[t] = v;
    }
    std::vector<double> out(w.begin() + static_cast<std::ptrdiff_t>(burn_in), w.end());
    for (double& x : out) {
        x += mean;
    }
    return out;
}

}  // namespace cpf::arima
