#include "doctest.h"

#include "cpf/data/price_series.hpp"
#include "cpf/data/scaler.hpp"
#include "cpf/neural/adam.hpp"
#include "cpf/neural/dropout.hpp"
#include "cpf/neural/grid_search.hpp"
#include "cpf/neural/model_io.hpp"
#include "cpf/neural/trainer.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace cpf::neural;

namespace {

std::vector<double> sine_series(std::size_t m) {
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) {
        v[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 25.0);
    }
    return v;
}

}  // namespace

TEST_CASE("adam_step") {
    ParameterSet theta(CellKind::Rnn, 1, 1);
    ParameterSet g(CellKind::Rnn, 1, 1);
    SUBCASE("single step from zero with unit gradient") {
        for (Tensor t : g.active()) {
            g[t].setOnes();
        }
        AdamState st(theta);
        adam_step(theta, g, st);
        CHECK(st.t == 1);
        const double expected = -0.001 * (1.0 / (1.0 + 1e-8));
        for (Tensor t : theta.active()) {
            CHECK(std::abs(theta[t](0, 0) - expected) < 1e-12);
            CHECK(std::abs(theta[t](0, 0) - (-0.0009999999900000003)) < 1e-18);
        }
    }
    SUBCASE("zero gradient leaves parameters unchanged but advances t") {
        theta[Tensor::Waa].setConstant(0.3);
        const ParameterSet before = theta;
        AdamState st(theta);
        adam_step(theta, g, st);
        adam_step(theta, g, st);
        CHECK(st.t == 2);
        for (Tensor t : theta.active()) {
            CHECK(theta[t] == before[t]);
        }
    }
    SUBCASE("constant gradient: step size tends to alpha * sign(g)") {
        for (Tensor t : g.active()) {
            g[t].setConstant(-2.5);
        }
        AdamState st(theta);
        double previous = 0.0;
        double step = 0.0;
        for (int i = 0; i < 2000; ++i) {
            previous = theta[Tensor::Waa](0, 0);
            adam_step(theta, g, st);
            step = theta[Tensor::Waa](0, 0) - previous;
            for (Tensor t : st.v.active()) {
                REQUIRE(st.v[t].minCoeff() >= 0.0);
            }
        }
        CHECK(step == doctest::Approx(0.001).epsilon(1e-6));
    }
    SUBCASE("non-finite gradient is rejected without touching state") {
        g[Tensor::Ba](0, 0) = std::nan("");
        AdamState st(theta);
        CHECK_THROWS_AS(adam_step(theta, g, st), std::domain_error);
        CHECK(st.t == 0);
    }
}

TEST_CASE("clip_global_norm") {
    ParameterSet g(CellKind::Rnn, 1, 1);
    g[Tensor::Waa](0, 0) = 3.0;
    g[Tensor::Wax](0, 0) = 4.0;
    CHECK(clip_global_norm(g, 10.0) == doctest::Approx(5.0));
    CHECK(g[Tensor::Waa](0, 0) == 3.0);
    clip_global_norm(g, 1.0);
    CHECK(std::sqrt(g.squared_norm()) == doctest::Approx(1.0));
}

TEST_CASE("apply_dropout") {
    cpf::Rng rng(3, cpf::Stream::Dropout);
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(100000, 1);
    CHECK(apply_dropout(ones, 0.0, rng, true) == ones);
    CHECK(apply_dropout(ones, 0.6, rng, false) == ones);
    const auto masked = apply_dropout(ones, 0.3, rng, true);
    const double zero_fraction = static_cast<double>((masked.array() == 0.0).count()) / 100000.0;
    CHECK(std::abs(zero_fraction - 0.3) < 0.01);
    CHECK(masked.maxCoeff() == doctest::Approx(1.0 / 0.7));
    CHECK_THROWS_AS((void)apply_dropout(ones, 1.0, rng, true), std::invalid_argument);
}

TEST_CASE("train: degenerate zero target") {
    std::vector<double> zeros(60, 0.0);
    const auto ds = cpf::data::make_windows(zeros, 3);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.batch_size = 8;

    SUBCASE("zero-bias initialisation already fits and stays put") {
        const auto result = train(init_network({CellKind::Lstm, 8, 1, 3, 0.0, 3}), ds, cfg);
        REQUIRE(result.loss_history.size() == 50);
        for (std::size_t i = 1; i < result.loss_history.size(); ++i) {
            CHECK(result.loss_history[i] <= result.loss_history[i - 1]);
        }
        CHECK(result.loss_history.back() < 1e-3);
    }
    SUBCASE("an offset output bias is trained away") {
        // ADAM's momentum overshoots zero, so the curve is not monotone epoch to epoch.
        auto net = init_network({CellKind::Lstm, 8, 1, 3, 0.0, 3});
        net.params[Tensor::By](0, 0) = 0.05;
        const auto result = train(net, ds, cfg);
        CHECK(result.loss_history.back() < 1e-3);
        CHECK(result.loss_history.back() < result.loss_history.front());
        for (double p : predict(result.net, ds.features)) {
            CHECK(std::abs(p) < 1e-3);
        }
    }
}

TEST_CASE("train: sine wave is learnable and deterministic") {
    const auto raw = sine_series(500);
    const auto scaler = cpf::data::MinMaxScaler::fit(raw);
    const auto ds = cpf::data::make_windows(scaler.apply(raw), 4);
    TrainConfig cfg;
    cfg.epochs = 100;
    const auto net = init_network({CellKind::Lstm, 16, 1, 4, 0.0, 3});
    const auto a = train(net, ds, cfg);
    const auto b = train(net, ds, cfg);
    CHECK(a.loss_history.size() == 100);
    CHECK(a.loss_history.back() < 0.05);
    CHECK(a.loss_history == b.loss_history);
    CHECK(predict(a.net, ds.features) == predict(b.net, ds.features));
}

TEST_CASE("train: every cell kind reduces the loss") {
    const auto raw = sine_series(200);
    const auto scaler = cpf::data::MinMaxScaler::fit(raw);
    const auto ds = cpf::data::make_windows(scaler.apply(raw), 3);
    TrainConfig cfg;
    cfg.epochs = 30;
    for (CellKind kind : {CellKind::Rnn, CellKind::GruSimple, CellKind::GruFull, CellKind::Lstm}) {
        const auto result = train(init_network({kind, 8, 1, 3, 0.1, 3}), ds, cfg);
        CHECK(result.loss_history.back() < result.loss_history.front());
    }
}

TEST_CASE("train: argument checks") {
    const auto ds = cpf::data::make_windows(sine_series(30), 3);
    TrainConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS_AS((void)train(init_network({CellKind::Lstm, 2, 1, 3, 0.0, 3}), ds, cfg), std::invalid_argument);
    cfg.epochs = 1;
    CHECK_THROWS_AS((void)train(init_network({CellKind::Lstm, 2, 1, 4, 0.0, 3}), ds, cfg), std::invalid_argument);
}

TEST_CASE("train: divergence is reported with the last finite epoch") {
    const auto ds = cpf::data::make_windows(sine_series(40), 2);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.adam.alpha = 1e300;
    cfg.clip_norm = 0.0;
    try {
        (void)train(init_network({CellKind::Rnn, 3, 1, 2, 0.0, 3}), ds, cfg);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.last_finite_epoch() == e.history().size());
        CHECK(e.last_finite_epoch() < 5);
    }
}

TEST_CASE("model serialisation round trip is exact") {
    auto net = init_network({CellKind::GruFull, 6, 1, 4, 0.3, 17});
    net.params[Tensor::Bc](2, 0) = 1.0 / 3.0;
    const auto back = deserialize_model(serialize_model(net));
    CHECK(back.config.kind == net.config.kind);
    CHECK(back.config.hidden_units == 6);
    CHECK(back.config.lookback == 4);
    CHECK(back.config.dropout == 0.3);
    CHECK(back.config.seed == 17);
    for (Tensor t : net.params.active()) {
        CHECK(back.params[t] == net.params[t]);
    }
    CHECK(serialize_model(back) == serialize_model(net));
    CHECK_THROWS((void)deserialize_model("cpf-recurrent-model 2\n"));
    CHECK_THROWS((void)deserialize_model("garbage"));
}

TEST_CASE("grid search") {
    std::vector<double> values;
    for (std::size_t i = 0; i < 80; ++i) {
        values.push_back(10.0 + std::sin(static_cast<double>(i) / 4.0) + 0.01 * static_cast<double>(i));
    }
    const auto series = cpf::data::PriceSeries::from_start("x", cpf::data::YearMonth::parse("2000-01"), values);
    auto [train_part, test_part] = cpf::data::train_test_split(series, 0.7);
    TrainConfig base;
    base.batch_size = 16;

    SUBCASE("full grid has 625 points") {
        GridSpec full{{0.001, 0.01, 0.03, 0.1, 0.3}, {10, 50, 90, 130, 170}, {20, 40, 60, 80, 100}, {2, 4, 6, 8, 10}};
        CHECK(full.size() == 625);
        CHECK(enumerate_grid(full).size() == 625);
    }
    SUBCASE("singleton grid returns its point") {
        GridSpec g{{0.1}, {4}, {3}, {2}};
        const auto r = grid_search(CellKind::Lstm, g, train_part, test_part, base);
        REQUIRE(r.trials.size() == 1);
        REQUIRE(r.best.has_value());
        CHECK(r.best->units == 4);
        CHECK(r.best->ok);
    }
    SUBCASE("parallel equals serial and failures are excluded") {
        // lookback 30 exceeds the 24-point test split, so those trials fail.
        GridSpec g{{0.0, 0.2}, {3, 5}, {2}, {2, 30}};
        const auto serial = grid_search(CellKind::GruSimple, g, train_part, test_part, base, 1);
        const auto parallel = grid_search(CellKind::GruSimple, g, train_part, test_part, base, 3);
        REQUIRE(serial.trials.size() == 8);
        for (std::size_t i = 0; i < serial.trials.size(); ++i) {
            CHECK(serial.trials[i].index == parallel.trials[i].index);
            CHECK(serial.trials[i].test_rmse == parallel.trials[i].test_rmse);
            CHECK(serial.trials[i].train_rmse == parallel.trials[i].train_rmse);
        }
        std::size_t failed = 0;
        for (std::size_t i = 0; i < serial.trials.size(); ++i) {
            if (!serial.trials[i].ok) {
                ++failed;
                CHECK(serial.trials[i].lookback == 30);
                CHECK_FALSE(serial.trials[i].error.empty());
            } else if (i > 0 && serial.trials[i - 1].ok) {
                CHECK(serial.trials[i - 1].test_rmse <= serial.trials[i].test_rmse);
            }
        }
        CHECK(failed == 4);
        REQUIRE(serial.best.has_value());
        CHECK(serial.best->lookback == 2);
    }
    SUBCASE("tie breaking") {
        GridTrial a;
        a.ok = true;
        a.test_rmse = 0.1;
        a.units = 50;
        a.lookback = 4;
        a.epochs = 20;
        a.index = 7;
        GridTrial b = a;
        b.units = 10;
        b.index = 9;
        CHECK(ranks_before(b, a));
        b.units = 50;
        b.lookback = 2;
        CHECK(ranks_before(b, a));
        b.lookback = 4;
        b.epochs = 10;
        CHECK(ranks_before(b, a));
        b.epochs = 20;
        CHECK(ranks_before(a, b));
        GridTrial failed = a;
        failed.ok = false;
        failed.test_rmse = 0.0;
        CHECK(ranks_before(a, failed));
    }
}
