#include "cpf/arima/differencing.hpp"

#include <stdexcept>
#include <string>

namespace cpf::arima {

std::vector<double> difference(std::span<const double> series, std::size_t d) {
    if (series.size() <= d) {
        throw std::invalid_argument("difference: need more than " + std::to_string(d) + " points");
    }
    std::vector<double> out(series.begin(), series.end());
    for (std::size_t pass = 0; pass < d; ++pass) {
        for (std::size_t i = out.size() - 1; i > 0; --i) {
            out[i] -= out[i - 1];
        }
        out.erase(out.begin());
    }
    return out;
}

std::vector<double> integrate(std::span<const double> differenced, std::span<const double> anchors,
                              std::size_t d) {
    if (anchors.size() != d) {
        throw std::invalid_argument("integrate: need exactly " + std::to_string(d) + " anchor values");
    }
    std::vector<double> out(anchors.begin(), anchors.end());
    out.reserve(d + differenced.size());
    for (double x : differenced) {
        out.push_back(x + undifference_offset(out, d));
    }
    return out;
}

double undifference_offset(std::span<const double> history, std::size_t d) {
    if (history.size() < d) {
        throw std::invalid_argument("undifference_offset: history shorter than d");
    }
    // y_t - (1-L)^d y_t = -sum_{k=1}^{d} (-1)^k C(d,k) y_{t-k}
    double offset = 0.0;
    double binom = 1.0;
    for (std::size_t k = 1; k <= d; ++k) {
        binom = binom * static_cast<double>(d - k + 1) / static_cast<double>(k);
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        offset += sign * binom * history[history.size() - k];
    }
    return offset;
}

}  // namespace cpf::arima
