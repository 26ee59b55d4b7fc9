#include "cpf/cli/commands.hpp"
#include "cpf/cli/config.hpp"
#include "cpf/data/price_series.hpp"
#include "cpf/neural/grid_search.hpp"
#include "cpf/util/rng.hpp"
#include "cpf/util/text_io.hpp"
#include "test_support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sstream>

namespace fs = std::filesystem;
using cpf::testing::TempDir;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run cpf_run(std::vector<std::string> args) {
    args.insert(args.begin(), "cpf");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cpf::cli::run_app(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string cotton() { return (cpf::testing::data_dir() / "cotton.csv").string(); }

// Monthly CSV from 1990-01 with a single "price" column.
fs::path write_series(const TempDir& dir, const std::string& name, const std::vector<double>& values) {
    cpf::CsvWriter w({"date", "price"});
    cpf::data::YearMonth date{1990, 1};
    for (const double v : values) {
        w.cell(date.str()).cell(v);
        w.end_row();
        date = date.next();
    }
    return dir.write(name, w.str());
}

std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
    cpf::Rng rng(seed, cpf::Stream::Simulation);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = 50.0 + rng.normal();
    }
    return v;
}

std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
    cpf::Rng rng(seed, cpf::Stream::Simulation);
    std::vector<double> v(n);
    double level = 100.0;
    for (auto& x : v) {
        level += rng.normal();
        x = level;
    }
    return v;
}

std::size_t data_rows(const fs::path& csv) { return cpf::read_csv(csv).rows.size(); }

}  // namespace

TEST_CASE("config round-trips through JSON") {
    cpf::cli::PipelineConfig cfg;
    cfg.split_ratio = 0.8;
    cfg.neural.cell = "gru_full";
    cfg.neural.dropout = 0.123456789;
    cfg.grid.units = {3, 7};
    cfg.arima.d = 1;
    cfg.unitroot.lag_max = 4;
    cfg.combine.fit_window = "holdout";
    cfg.seed = 42;
    const auto text = cpf::cli::config_to_json(cfg);
    CHECK(cpf::cli::config_from_json(text) == cfg);
    CHECK(cpf::cli::config_from_json(cpf::cli::config_to_json({})) == cpf::cli::PipelineConfig{});
}

TEST_CASE("config rejects unknown keys and invalid values") {
    CHECK_THROWS_WITH_AS((void)cpf::cli::config_from_json(R"({"neural": {"unitz": 4}})"),
                         doctest::Contains("unitz"), std::exception);
    cpf::cli::PipelineConfig cfg;
    cfg.split_ratio = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.neural.cell = "transformer";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.unitroot.variant = "no_break";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("config file paths resolve against the file's directory") {
    TempDir dir("cfg");
    fs::create_directories(dir.path() / "sub");
    const auto path = dir.write("sub/run.json", R"({"commodities": [{"name": "x", "path": "x.csv", "column": "price"}]})");
    const auto cfg = cpf::cli::load_config(path);
    REQUIRE(cfg.commodities.size() == 1);
    CHECK(fs::path(cfg.commodities[0].path) == dir.path() / "sub" / "x.csv");
}

TEST_CASE("config init prints a loadable default") {
    const auto r = cpf_run({"config", "init"});
    REQUIRE(r.code == 0);
    CHECK(cpf::cli::config_from_json(r.out) == cpf::cli::PipelineConfig{});
    CHECK(cpf::cli::PipelineConfig{}.seed == 3);
}

TEST_CASE("default grid has 625 points") {
    const cpf::cli::GridSettings g;
    const cpf::neural::GridSpec spec{g.dropout, g.units, g.epochs, g.lookback};
    CHECK(spec.size() == 625);
}

TEST_CASE("ingest reports length, range and split") {
    TempDir dir("ingest");
    const auto r = cpf_run({"ingest", "--data", cotton(), "--column", "cotton", "--ratio", "0.7", "--out",
                            dir.path().string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("708 rows, 1960-01..2018-12") != std::string::npos);
    CHECK(r.out.find("495/213") != std::string::npos);
    CHECK(fs::exists(dir.path() / "ingest.csv"));
    CHECK(fs::exists(dir.path() / "cotton" / "series.svg"));
}

TEST_CASE("ingest with a missing column names the available ones") {
    TempDir dir("ingest-bad");
    const auto r = cpf_run({"ingest", "--data", cotton(), "--column", "wheat", "--out", dir.path().string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("available columns") != std::string::npos);
    CHECK(r.err.find("cotton") != std::string::npos);
}

TEST_CASE("bad arguments exit nonzero") {
    CHECK(cpf_run({}).code != 0);
    CHECK(cpf_run({"frobnicate"}).code != 0);
    CHECK(cpf_run({"ingest", "--ratio", "1.5"}).code != 0);
    CHECK(cpf_run({"ingest", "--commodity", "wheat"}).code != 0);
    CHECK(cpf_run({"train", "--cell", "transformer"}).code != 0);
}

TEST_CASE("train with one epoch writes one loss row and is deterministic") {
    TempDir dir("train");
    const std::vector<std::string> base{"train", "--data", cotton(), "--column", "cotton", "--units", "6",
                                        "--epochs", "1"};
    auto a = base;
    a.insert(a.end(), {"--out", (dir.path() / "a").string()});
    auto b = base;
    b.insert(b.end(), {"--out", (dir.path() / "b").string()});
    REQUIRE(cpf_run(a).code == 0);
    REQUIRE(cpf_run(b).code == 0);
    const auto da = dir.path() / "a" / "cotton";
    const auto db = dir.path() / "b" / "cotton";
    CHECK(data_rows(da / "loss.csv") == 1);
    CHECK(data_rows(da / "neural_predictions.csv") == 213 - 2);
    for (const char* f : {"loss.csv", "neural_predictions.csv", "neural_train_fit.csv", "neural.model",
                          "train_summary.json"}) {
        CHECK_MESSAGE(cpf::read_file(da / f) == cpf::read_file(db / f), f);
    }
    const auto table = cpf::read_csv(da / "neural_predictions.csv");
    CHECK(table.has_column("predicted_scaled"));
    CHECK(table.has_column("actual_scaled"));
}

TEST_CASE("train --from-best needs a grid search") {
    TempDir dir("frombest");
    const auto r = cpf_run({"train", "--data", cotton(), "--column", "cotton", "--from-best", "--out",
                            dir.path().string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("gridsearch") != std::string::npos);
}

TEST_CASE("gridsearch: singleton grid and parallel equals serial") {
    TempDir dir("grid");
    const std::vector<std::string> one{"gridsearch", "--data", cotton(), "--column", "cotton", "--dropouts",
                                       "0.01", "--units-list", "4", "--epochs-list", "2", "--lookbacks", "2",
                                       "--out", (dir.path() / "one").string()};
    REQUIRE(cpf_run(one).code == 0);
    CHECK(data_rows(dir.path() / "one" / "cotton" / "grid.csv") == 1);

    const std::vector<std::string> base{"gridsearch", "--data", cotton(), "--column", "cotton", "--dropouts",
                                        "0.01,0.2", "--units-list", "4,6", "--epochs-list", "2",
                                        "--lookbacks", "2,3"};
    auto serial = base;
    serial.insert(serial.end(), {"--out", (dir.path() / "s").string(), "--parallel", "1"});
    auto parallel = base;
    parallel.insert(parallel.end(), {"--out", (dir.path() / "p").string(), "--parallel", "4"});
    REQUIRE(cpf_run(serial).code == 0);
    REQUIRE(cpf_run(parallel).code == 0);
    for (const char* f : {"grid.csv", "grid_best.json"}) {
        CHECK(cpf::read_file(dir.path() / "s" / "cotton" / f) == cpf::read_file(dir.path() / "p" / "cotton" / f));
    }
    CHECK(data_rows(dir.path() / "s" / "cotton" / "grid.csv") == 8);

    auto then_train = std::vector<std::string>{"train", "--data", cotton(), "--column", "cotton", "--from-best",
                                               "--out", (dir.path() / "s").string()};
    REQUIRE(cpf_run(then_train).code == 0);
    const auto summary =
        nlohmann::json::parse(cpf::read_file(dir.path() / "s" / "cotton" / "train_summary.json"));
    const auto best = nlohmann::json::parse(cpf::read_file(dir.path() / "s" / "cotton" / "grid_best.json"));
    CHECK(summary["units"] == best["units"]);
    CHECK(summary["lookback"] == best["lookback"]);
}

TEST_CASE("arima on white noise selects (0,0)") {
    TempDir dir("arima-wn");
    const auto csv = write_series(dir, "wn.csv", white_noise(400, 11));
    const auto before = cpf::read_file(csv);
    const auto r = cpf_run({"arima", "--data", csv.string(), "--column", "price", "--name", "wn", "--reps", "200",
                            "--p-max", "3", "--q-max", "3", "--out", (dir.path() / "out").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto ur = nlohmann::json::parse(cpf::read_file(dir.path() / "out" / "wn" / "unitroot.json"));
    CHECK(ur["rejects_unit_root"] == true);
    CHECK(ur["d"] == 0);
    const auto model = nlohmann::json::parse(cpf::read_file(dir.path() / "out" / "wn" / "arima_model.json"));
    CHECK(model["spec"]["p"] == 0);
    CHECK(model["spec"]["q"] == 0);
    const auto orders = cpf::read_csv(dir.path() / "out" / "wn" / "arma_orders.csv");
    CHECK(orders.rows.size() == 16);
    CHECK(data_rows(dir.path() / "out" / "wn" / "arima_predictions.csv") == 400 - 280);
    CHECK(cpf::read_file(csv) == before);
}

TEST_CASE("arima keeps the unit root on a random walk and differences once") {
    TempDir dir("arima-rw");
    const auto csv = write_series(dir, "rw.csv", random_walk(300, 5));
    const auto r = cpf_run({"arima", "--data", csv.string(), "--column", "price", "--name", "rw", "--reps", "200",
                            "--p-max", "2", "--q-max", "2", "--significance", "0.01", "--out",
                            (dir.path() / "out").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto ur = nlohmann::json::parse(cpf::read_file(dir.path() / "out" / "rw" / "unitroot.json"));
    REQUIRE(ur["rejects_unit_root"] == false);
    CHECK(ur["d"] == 1);
    const auto model = nlohmann::json::parse(cpf::read_file(dir.path() / "out" / "rw" / "arima_model.json"));
    CHECK(model["spec"]["d"] == 1);
    CHECK(data_rows(dir.path() / "out" / "rw" / "arima_predictions.csv") == 90);
}

TEST_CASE("compare needs both model outputs and reports every row and pair") {
    TempDir dir("compare");
    const auto csv = write_series(dir, "px.csv", random_walk(240, 9));
    const std::string out = (dir.path() / "out").string();
    const std::vector<std::string> common{"--data", csv.string(), "--column", "price", "--name", "px", "--out", out};
    auto with = [&](std::vector<std::string> head) {
        head.insert(head.end(), common.begin(), common.end());
        return cpf_run(head);
    };
    REQUIRE(with({"arima", "--reps", "100", "--p-max", "1", "--q-max", "1"}).code == 0);
    const auto missing = with({"compare"});
    CHECK(missing.code != 0);
    CHECK(missing.err.find("neural_predictions.csv") != std::string::npos);
    CHECK(missing.err.find("cpf train") != std::string::npos);

    REQUIRE(with({"train", "--units", "4", "--epochs", "3"}).code == 0);
    const auto ok = with({"compare"});
    REQUIRE_MESSAGE(ok.code == 0, ok.err);
    const auto comb = cpf::read_csv(dir.path() / "out" / "px" / "combinations.csv");
    REQUIRE(comb.rows.size() == 6);
    std::size_t schemes = 0;
    for (const auto& row : comb.rows) {
        schemes += row[comb.column("kind")] == "combination";
    }
    CHECK(schemes == 4);
    const auto hln = cpf::read_csv(dir.path() / "out" / "px" / "hln.csv");
    REQUIRE(hln.rows.size() == 1);
    CHECK_FALSE(hln.rows[0][hln.column("p_value")].empty());
    const auto plot = cpf::read_csv(dir.path() / "out" / "px" / "comparison.csv");
    CHECK(plot.header.size() == 2 + 2 + 4);
    CHECK(fs::exists(dir.path() / "out" / "px" / "comparison.svg"));
    const auto report = cpf::read_file(dir.path() / "out" / "report.md");
    CHECK(report.find("## px") != std::string::npos);
    CHECK(report.find("Reference comparison") == std::string::npos);

    const auto first = cpf::read_file(dir.path() / "out" / "report.md");
    REQUIRE(with({"compare"}).code == 0);
    CHECK(cpf::read_file(dir.path() / "out" / "report.md") == first);

    const auto holdout = with({"compare", "--fit-window", "holdout"});
    REQUIRE_MESSAGE(holdout.code == 0, holdout.err);
    const auto comb2 = cpf::read_csv(dir.path() / "out" / "px" / "combinations.csv");
    CHECK(comb2.rows[0][comb2.column("fit_end")] == comb2.rows[0][comb2.column("eval_begin")]);
}
