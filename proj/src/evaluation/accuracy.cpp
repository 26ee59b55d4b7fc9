#include "cpf/evaluation/accuracy.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace cpf::evaluation {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b, const char* what) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
    if (a.empty()) {
        throw std::invalid_argument(std::string(what) + ": empty input");
    }
}

}  // namespace

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted, "rmse");
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(actual.size()));
}

double mape(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted, "mape");
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) {
            throw std::invalid_argument("mape: actual value is zero at position " + std::to_string(i));
        }
        s += std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
    }
    return 100.0 * s / static_cast<double>(actual.size());
}

HlnResult hln_test(std::span<const double> errors_a, std::span<const double> errors_b, std::size_t h) {
    check_pair(errors_a, errors_b, "hln_test");
    const std::size_t n = errors_a.size();
    if (n < 10) {
        throw std::invalid_argument("hln_test: need at least 10 paired errors");
    }
    if (h < 1 || h >= n) {
        throw std::invalid_argument("hln_test: horizon must lie in [1, n)");
    }
    std::vector<double> d(n);
    for (std::size_t t = 0; t < n; ++t) {
        d[t] = errors_a[t] * errors_a[t] - errors_b[t] * errors_b[t];
    }
    const double nn = static_cast<double>(n);
    double mean = 0.0;
    for (double v : d) {
        mean += v;
    }
    mean /= nn;
    auto autocov = [&](std::size_t k) {
        double s = 0.0;
        for (std::size_t t = k; t < n; ++t) {
            s += (d[t] - mean) * (d[t - k] - mean);
        }
        return s / nn;
    };
    HlnResult out;
    out.n = n;
    out.h = h;
    out.mean_loss_diff = mean;
    const double gamma0 = autocov(0);
    const double scale = std::max({std::abs(mean), std::sqrt(std::abs(gamma0)), 1e-300});
    if (!(gamma0 > 1e-28 * scale * scale) || !std::isfinite(gamma0)) {
        out.degenerate = true;
        out.statistic = 0.0;
        out.p_value = 1.0;
        return out;
    }
    double v = gamma0;
    for (std::size_t k = 1; k < h; ++k) {
        v += 2.0 * autocov(k);
    }
    if (!(v > 0.0)) {
        v = gamma0;
    }
    const double dm = mean / std::sqrt(v / nn);
    const double hd = static_cast<double>(h);
    const double correction = std::sqrt((nn + 1.0 - 2.0 * hd + hd * (hd - 1.0) / nn) / nn);
    out.statistic = correction * dm;
    const boost::math::students_t_distribution<double> dist(nn - 1.0);
    out.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.statistic))), 0.0, 1.0);
    return out;
}

void ForecastSet::validate() const {
    if (forecasts.empty()) {
        throw std::invalid_argument("forecast set has no forecasts");
    }
    if (!dates.empty() && dates.size() != actual.size()) {
        throw std::invalid_argument("forecast set dates and actuals differ in length");
    }
    for (double v : actual) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("forecast set actuals contain non-finite values");
        }
    }
    for (const auto& f : forecasts) {
        if (f.values.size() != actual.size()) {
            throw std::invalid_argument("forecast '" + f.name + "' is not aligned with the actuals");
        }
        for (double v : f.values) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("forecast '" + f.name + "' contains non-finite values");
            }
        }
    }
}

std::vector<double> ForecastSet::errors(std::size_t forecast) const {
    const auto& f = forecasts.at(forecast).values;
    std::vector<double> e(actual.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = actual[i] - f[i];
    }
    return e;
}

const NamedForecast& ForecastSet::find(const std::string& name) const {
    for (const auto& f : forecasts) {
        if (f.name == name) {
            return f;
        }
    }
    throw std::invalid_argument("no forecast named '" + name + "'");
}

ForecastSet inner_join(const data::PriceSeries& actual, const std::vector<DatedForecast>& forecasts) {
    if (forecasts.empty()) {
        throw std::invalid_argument("inner_join: no forecasts");
    }
    std::vector<std::map<data::YearMonth, double>> lookup;
    for (const auto& f : forecasts) {
        if (f.dates.size() != f.values.size()) {
            throw std::invalid_argument("inner_join: forecast '" + f.name + "' has mismatched dates and values");
        }
        std::map<data::YearMonth, double> m;
        for (std::size_t i = 0; i < f.dates.size(); ++i) {
            m[f.dates[i]] = f.values[i];
        }
        lookup.push_back(std::move(m));
    }
    ForecastSet set;
    for (const auto& f : forecasts) {
        set.forecasts.push_back({f.name, {}});
    }
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const data::YearMonth date = actual.dates()[i];
        const bool everywhere =
            std::all_of(lookup.begin(), lookup.end(), [&](const auto& m) { return m.contains(date); });
        if (!everywhere) {
            continue;
        }
        set.dates.push_back(date);
        set.actual.push_back(actual.values()[i]);
        for (std::size_t k = 0; k < lookup.size(); ++k) {
            set.forecasts[k].values.push_back(lookup[k].at(date));
        }
    }
    if (set.actual.empty()) {
        throw std::invalid_argument("inner_join: forecasts share no dates with the actual series");
    }
    return set;
}

EvaluationReport evaluate(const ForecastSet& set, std::size_t h) {
    set.validate();
    EvaluationReport report;
    report.n = set.actual.size();
    for (const auto& f : set.forecasts) {
        report.accuracy.push_back({f.name, rmse(set.actual, f.values), mape(set.actual, f.values)});
    }
    for (std::size_t i = 0; i < set.forecasts.size(); ++i) {
        for (std::size_t j = i + 1; j < set.forecasts.size(); ++j) {
            report.hln.push_back(
                {set.forecasts[i].name, set.forecasts[j].name, hln_test(set.errors(i), set.errors(j), h)});
        }
    }
    return report;
}

}  // namespace cpf::evaluation
