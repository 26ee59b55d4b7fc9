#include "common.hpp"
#include "cpf/cli/commands.hpp"
#include "cpf/data/scaler.hpp"
#include "cpf/evaluation/accuracy.hpp"
#include "cpf/neural/grid_search.hpp"
#include "cpf/neural/model_io.hpp"
#include "cpf/util/svg_chart.hpp"

#include <ostream>

namespace cpf::cli {

using namespace detail;

namespace {

neural::TrainConfig train_config(const PipelineConfig& cfg) {
    neural::TrainConfig t;
    t.epochs = cfg.neural.epochs;
    t.batch_size = cfg.neural.batch_size;
    t.shuffle = cfg.neural.shuffle;
    t.seed = cfg.seed;
    t.clip_norm = cfg.neural.clip_norm;
    t.weight_decay = cfg.neural.weight_decay;
    t.adam.alpha = cfg.neural.learning_rate;
    t.adam.beta1 = cfg.neural.beta1;
    t.adam.beta2 = cfg.neural.beta2;
    t.adam.epsilon = cfg.neural.epsilon;
    return t;
}

struct Hyper {
    std::size_t units = 0;
    std::size_t lookback = 0;
    std::size_t epochs = 0;
    double dropout = 0.0;
};

void write_prediction_csv(const fs::path& path, const std::vector<data::YearMonth>& dates,
                          std::span<const double> actual, std::span<const double> predicted,
                          std::span<const double> actual_scaled, std::span<const double> predicted_scaled) {
    CsvWriter w({"date", "actual", "predicted", "actual_scaled", "predicted_scaled"});
    for (std::size_t i = 0; i < dates.size(); ++i) {
        w.cell(dates[i].str()).cell(actual[i]).cell(predicted[i]).cell(actual_scaled[i]).cell(predicted_scaled[i]);
        w.end_row();
    }
    write_file_atomic(path, w.str());
}

}  // namespace

void cmd_ingest(const PipelineConfig& cfg, std::ostream& out) {
    cfg.validate();
    fs::create_directories(cfg.output_dir);
    CsvWriter w({"name", "rows", "first", "last", "train_rows", "test_rows", "train_last", "test_first", "min", "max"});
    for (const auto& src : cfg.commodities) {
        const auto series = load_commodity(src);
        const auto [train, test] = data::train_test_split(series, cfg.split_ratio);
        const auto [lo, hi] = std::minmax_element(series.values().begin(), series.values().end());
        w.cell(src.name).cell(series.size()).cell(series.first_date().str()).cell(series.last_date().str());
        w.cell(train.size()).cell(test.size()).cell(train.last_date().str()).cell(test.first_date().str());
        w.cell(*lo).cell(*hi);
        w.end_row();
        out << src.name << ": " << series.size() << " rows, " << series.first_date().str() << ".."
            << series.last_date().str() << "; split " << format_double(cfg.split_ratio) << " -> " << train.size()
            << "/" << test.size() << " (train to " << train.last_date().str() << ")\n";
        write_file_atomic(commodity_dir(cfg, src.name) / "series.svg",
                          render_line_chart(src.name + " monthly price", date_labels(series.dates()),
                                            {{src.name, series.values()}}, "price"));
    }
    write_file_atomic(fs::path(cfg.output_dir) / "ingest.csv", w.str());
}

void cmd_gridsearch(const PipelineConfig& cfg, std::ostream& out) {
    cfg.validate();
    const auto kind = neural::parse_cell_kind(cfg.neural.cell);
    const neural::GridSpec grid{cfg.grid.dropout, cfg.grid.units, cfg.grid.epochs, cfg.grid.lookback};
    for (const auto& src : cfg.commodities) {
        const auto series = load_commodity(src);
        const auto [train, test] = data::train_test_split(series, cfg.split_ratio);
        const auto result = neural::grid_search(kind, grid, train, test, train_config(cfg), cfg.parallel);
        const fs::path dir = commodity_dir(cfg, src.name);

        CsvWriter table({"rank", "trial", "dropout", "units", "epochs", "lookback", "status", "train_rmse",
                         "test_rmse", "error"});
        CsvWriter timing({"trial", "wall_seconds"});
        std::vector<neural::GridTrial> by_index = result.trials;
        std::sort(by_index.begin(), by_index.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
        for (std::size_t r = 0; r < result.trials.size(); ++r) {
            const auto& t = result.trials[r];
            table.cell(r + 1).cell(t.index).cell(t.dropout).cell(t.units).cell(t.epochs).cell(t.lookback);
            table.cell(t.ok ? "ok" : "failed");
            if (t.ok) {
                table.cell(t.train_rmse).cell(t.test_rmse);
            } else {
                table.cell("").cell("");
            }
            table.cell(t.error);
            table.end_row();
        }
        for (const auto& t : by_index) {
            timing.cell(t.index).cell(t.wall_seconds);
            timing.end_row();
        }
        write_file_atomic(dir / "grid.csv", table.str());
        write_file_atomic(dir / "gridsearch_timing.csv", timing.str());
        if (!result.best) {
            throw std::runtime_error("gridsearch: every trial failed for " + src.name);
        }
        const auto& b = *result.best;
        nlohmann::ordered_json j;
        j["cell"] = cfg.neural.cell;
        j["dropout"] = b.dropout;
        j["units"] = b.units;
        j["epochs"] = b.epochs;
        j["lookback"] = b.lookback;
        j["train_rmse"] = b.train_rmse;
        j["test_rmse"] = b.test_rmse;
        j["trials"] = result.trials.size();
        write_json(dir / "grid_best.json", j);
        out << src.name << ": " << result.trials.size() << " trials; best lookback " << b.lookback << ", dropout "
            << format_double(b.dropout) << ", units " << b.units << ", epochs " << b.epochs << ", test RMSE "
            << format_double(b.test_rmse, 4) << " (scaled)\n";
    }
}

void cmd_train(const PipelineConfig& cfg, std::ostream& out) {
    cfg.validate();
    const auto kind = neural::parse_cell_kind(cfg.neural.cell);
    for (const auto& src : cfg.commodities) {
        const fs::path dir = commodity_dir(cfg, src.name);
        Hyper h{cfg.neural.units, cfg.neural.lookback, cfg.neural.epochs, cfg.neural.dropout};
        if (cfg.neural.use_grid_best) {
            const auto best = read_json(dir / "grid_best.json", "run `cpf gridsearch` first or drop --from-best");
            if (best.at("cell").get<std::string>() != cfg.neural.cell) {
                throw std::runtime_error("grid_best.json for " + src.name + " was searched with cell " +
                                         best.at("cell").get<std::string>());
            }
            h = {best.at("units").get<std::size_t>(), best.at("lookback").get<std::size_t>(),
                 best.at("epochs").get<std::size_t>(), best.at("dropout").get<double>()};
        }
        const auto series = load_commodity(src);
        const auto [train, test] = data::train_test_split(series, cfg.split_ratio);
        const auto scaler = data::MinMaxScaler::fit(train);
        const auto train_scaled = scaler.apply(train.values());
        const auto test_scaled = scaler.apply(test.values());
        const auto train_ds = data::make_windows(train_scaled, h.lookback);
        const auto test_ds = data::make_windows(test_scaled, h.lookback);

        neural::NetworkConfig net_cfg;
        net_cfg.kind = kind;
        net_cfg.hidden_units = h.units;
        net_cfg.lookback = h.lookback;
        net_cfg.dropout = h.dropout;
        net_cfg.seed = cfg.seed;
        neural::TrainConfig tcfg = train_config(cfg);
        tcfg.epochs = h.epochs;
        const auto trained = neural::train(neural::init_network(net_cfg), train_ds, tcfg);

        neural::save_model(dir / "neural.model", trained.net);
        CsvWriter loss({"epoch", "train_rmse"});
        for (std::size_t e = 0; e < trained.loss_history.size(); ++e) {
            loss.cell(e + 1).cell(trained.loss_history[e]);
            loss.end_row();
        }
        write_file_atomic(dir / "loss.csv", loss.str());

        const auto pred_test_scaled = neural::predict(trained.net, test_ds.features);
        const auto pred_train_scaled = neural::predict(trained.net, train_ds.features);
        const auto pred_test = scaler.invert(pred_test_scaled);
        const auto pred_train = scaler.invert(pred_train_scaled);
        const std::span<const double> test_vals(test.values());
        const std::span<const double> train_vals(train.values());
        const std::vector<data::YearMonth> test_dates(test.dates().begin() + static_cast<std::ptrdiff_t>(h.lookback),
                                                      test.dates().end());
        const std::vector<data::YearMonth> train_dates(
            train.dates().begin() + static_cast<std::ptrdiff_t>(h.lookback), train.dates().end());
        const std::vector<double> test_labels(test_ds.labels.data(), test_ds.labels.data() + test_ds.labels.size());
        const std::vector<double> train_labels(train_ds.labels.data(),
                                               train_ds.labels.data() + train_ds.labels.size());
        write_prediction_csv(dir / "neural_predictions.csv", test_dates, test_vals.subspan(h.lookback), pred_test,
                             test_labels, pred_test_scaled);
        write_prediction_csv(dir / "neural_train_fit.csv", train_dates, train_vals.subspan(h.lookback), pred_train,
                             train_labels, pred_train_scaled);

        const double test_rmse_scaled = evaluation::rmse(test_labels, pred_test_scaled);
        const double test_rmse = evaluation::rmse(test_vals.subspan(h.lookback), pred_test);
        const double test_mape = evaluation::mape(test_vals.subspan(h.lookback), pred_test);
        nlohmann::ordered_json j;
        j["cell"] = cfg.neural.cell;
        j["units"] = h.units;
        j["lookback"] = h.lookback;
        j["epochs"] = h.epochs;
        j["dropout"] = h.dropout;
        j["batch_size"] = cfg.neural.batch_size;
        j["seed"] = cfg.seed;
        j["from_grid_best"] = cfg.neural.use_grid_best;
        j["scaler_lo"] = scaler.lo();
        j["scaler_hi"] = scaler.hi();
        j["final_train_rmse_scaled"] = trained.loss_history.back();
        j["test_rmse_scaled"] = test_rmse_scaled;
        j["test_rmse"] = test_rmse;
        j["test_mape"] = test_mape;
        j["test_points"] = test_labels.size();
        write_json(dir / "train_summary.json", j);

        std::vector<std::string> epochs;
        for (std::size_t e = 1; e <= trained.loss_history.size(); ++e) {
            epochs.push_back(std::to_string(e));
        }
        write_file_atomic(dir / "loss.svg", render_line_chart(src.name + " training loss", epochs,
                                                              {{"train RMSE", trained.loss_history}}, "RMSE (scaled)"));
        write_file_atomic(dir / "neural_forecast.svg",
                          render_line_chart(src.name + " test set: actual vs " + cfg.neural.cell,
                                            date_labels(test_dates),
                                            {{"actual", {test_vals.begin() + static_cast<std::ptrdiff_t>(h.lookback),
                                                         test_vals.end()}},
                                             {cfg.neural.cell, pred_test}},
                                            "price"));
        write_file_atomic(dir / "neural_train_fit.svg",
                          render_line_chart(src.name + " training fit", date_labels(train_dates),
                                            {{"actual", {train_vals.begin() + static_cast<std::ptrdiff_t>(h.lookback),
                                                         train_vals.end()}},
                                             {cfg.neural.cell, pred_train}},
                                            "price"));
        out << src.name << ": " << cfg.neural.cell << " " << h.units << " units, lookback " << h.lookback << ", "
            << h.epochs << " epochs; train RMSE " << format_double(trained.loss_history.back(), 4)
            << " (scaled), test RMSE " << format_double(test_rmse, 4) << ", MAPE " << format_double(test_mape, 4)
            << "%\n";
    }
}

}  // namespace cpf::cli
