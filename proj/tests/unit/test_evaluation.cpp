#include "doctest.h"

#include "cpf/evaluation/accuracy.hpp"
#include "cpf/util/rng.hpp"

#include <cmath>
#include <numbers>

using namespace cpf::evaluation;
using cpf::data::PriceSeries;
using cpf::data::YearMonth;

namespace {

// Two-sided Student t tail by Simpson integration of the density.
double t_two_sided(double t, double df) {
    const double c = std::exp(std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0)) / std::sqrt(df * std::numbers::pi);
    auto pdf = [&](double x) { return c * std::pow(1.0 + x * x / df, -(df + 1.0) / 2.0); };
    const double a = 0.0;
    const double b = std::abs(t);
    const int steps = 20000;
    const double h = (b - a) / steps;
    double s = pdf(a) + pdf(b);
    for (int i = 1; i < steps; ++i) {
        s += (i % 2 == 1 ? 4.0 : 2.0) * pdf(a + i * h);
    }
    return 1.0 - 2.0 * (s * h / 3.0);
}

std::vector<double> noise(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    cpf::Rng rng(seed, cpf::Stream::Simulation);
    std::vector<double> v(n);
    for (double& x : v) {
        x = scale * rng.normal();
    }
    return v;
}

}  // namespace

TEST_CASE("rmse and mape") {
    const std::vector<double> a{1.5, 2.5, 4.0};
    CHECK(rmse(a, a) == 0.0);
    CHECK(mape(a, a) == 0.0);
    CHECK(rmse(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == doctest::Approx(3.5355339059327378));
    CHECK(mape(std::vector<double>{100, 200}, std::vector<double>{110, 180}) == doctest::Approx(10.0));
    // The denominator is the actual value.
    CHECK(mape(std::vector<double>{100, 200}, std::vector<double>{110, 180}) !=
          doctest::Approx(mape(std::vector<double>{110, 180}, std::vector<double>{100, 200})));
    for (double c : {-2.5, 0.75, 3.0}) {
        std::vector<double> shifted(a);
        for (double& v : shifted) {
            v += c;
        }
        CHECK(rmse(a, shifted) == doctest::Approx(std::abs(c)).epsilon(1e-14));
    }
    CHECK_THROWS_AS((void)rmse(a, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)rmse(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS((void)mape(std::vector<double>{1.0, 0.0}, std::vector<double>{1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("hln_test against hand computation") {
    const std::vector<double> ea{0.5, -1.2, 0.3, 2.0, -0.7, 1.1, -0.4, 0.9, -1.5, 0.2, 0.8, -0.6};
    const std::vector<double> eb{0.4, -0.9, 0.6, 1.1, -0.2, 0.8, -0.5, 0.3, -1.0, 0.4, 0.5, -0.1};
    const double n = 12.0;
    std::vector<double> d;
    double mean = 0.0;
    for (std::size_t i = 0; i < ea.size(); ++i) {
        d.push_back(ea[i] * ea[i] - eb[i] * eb[i]);
        mean += d.back() / n;
    }
    auto gamma = [&](std::size_t k) {
        double s = 0.0;
        for (std::size_t t = k; t < d.size(); ++t) {
            s += (d[t] - mean) * (d[t - k] - mean);
        }
        return s / n;
    };

    const HlnResult one = hln_test(ea, eb, 1);
    const double stat1 = mean / std::sqrt(gamma(0) / n) * std::sqrt((n - 1.0) / n);
    CHECK(one.statistic == doctest::Approx(stat1).epsilon(1e-12));
    CHECK(one.p_value == doctest::Approx(t_two_sided(stat1, n - 1.0)).epsilon(1e-8));
    CHECK(one.mean_loss_diff == doctest::Approx(mean));
    CHECK(one.n == 12);
    CHECK_FALSE(one.degenerate);

    const HlnResult two = hln_test(ea, eb, 2);
    const double v2 = gamma(0) + 2.0 * gamma(1);
    REQUIRE(v2 > 0.0);
    const double stat2 = mean / std::sqrt(v2 / n) * std::sqrt((n + 1.0 - 4.0 + 2.0 / n) / n);
    CHECK(two.statistic == doctest::Approx(stat2).epsilon(1e-12));
}

TEST_CASE("hln_test properties") {
    const auto ea = noise(80, 1);
    const auto eb = noise(80, 2, 1.3);
    const HlnResult ab = hln_test(ea, eb);
    const HlnResult ba = hln_test(eb, ea);
    CHECK(ab.statistic == doctest::Approx(-ba.statistic).epsilon(1e-12));
    CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-12));
    CHECK(ab.p_value >= 0.0);
    CHECK(ab.p_value <= 1.0);

    for (double c : {0.01, 7.0, 1e4}) {
        std::vector<double> sa(ea);
        std::vector<double> sb(eb);
        for (double& v : sa) {
            v *= c;
        }
        for (double& v : sb) {
            v *= c;
        }
        CHECK(hln_test(sa, sb).p_value == doctest::Approx(ab.p_value).epsilon(1e-10));
    }

    const HlnResult same = hln_test(ea, ea);
    CHECK(same.degenerate);
    CHECK(same.statistic == 0.0);
    CHECK(same.p_value == 1.0);

    CHECK_THROWS_AS((void)hln_test(noise(9, 1), noise(9, 2)), std::invalid_argument);
    CHECK_THROWS_AS((void)hln_test(ea, eb, 0), std::invalid_argument);
}

TEST_CASE("forecast sets") {
    const PriceSeries actual("cotton", {YearMonth{2000, 1}, {2000, 2}, {2000, 3}, {2000, 4}}, {1.0, 2.0, 3.0, 4.0});
    const DatedForecast lstm{"lstm", {{2000, 2}, {2000, 3}, {2000, 4}}, {2.1, 2.9, 4.2}};
    const DatedForecast arima{"arima", {{2000, 1}, {2000, 2}, {2000, 3}}, {1.1, 1.9, 3.1}};
    const ForecastSet set = inner_join(actual, {lstm, arima});
    CHECK(set.dates == std::vector<YearMonth>{{2000, 2}, {2000, 3}});
    CHECK(set.actual == std::vector<double>{2.0, 3.0});
    CHECK(set.find("lstm").values == std::vector<double>{2.1, 2.9});
    CHECK(set.find("arima").values == std::vector<double>{1.9, 3.1});
    CHECK_THROWS_AS((void)set.find("x"), std::invalid_argument);
    CHECK_THROWS_AS((void)inner_join(actual, {DatedForecast{"far", {{2010, 1}}, {1.0}}}), std::invalid_argument);

    ForecastSet big;
    big.actual = noise(30, 5);
    for (double& v : big.actual) {
        v += 10.0;
    }
    for (std::uint64_t s = 0; s < 3; ++s) {
        auto f = big.actual;
        const auto e = noise(30, 10 + s);
        for (std::size_t i = 0; i < f.size(); ++i) {
            f[i] += e[i];
        }
        big.forecasts.push_back({"m" + std::to_string(s), f});
    }
    const EvaluationReport report = evaluate(big);
    CHECK(report.n == 30);
    CHECK(report.accuracy.size() == 3);
    REQUIRE(report.hln.size() == 3);
    CHECK(report.hln[0].a == "m0");
    CHECK(report.hln[0].b == "m1");
    CHECK(report.hln[2].a == "m1");
    big.forecasts[1].values.pop_back();
    CHECK_THROWS_AS(big.validate(), std::invalid_argument);
}
