#include "cpf/cli/commands.hpp"
#include "cpf/cli/config.hpp"
#include "cpf/util/text_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>

namespace cpf::cli {

namespace {

namespace fs = std::filesystem;

struct Overrides {
    std::optional<std::string> config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> parallel;
    std::optional<double> ratio;
    std::vector<std::string> only;
    std::optional<std::string> data;
    std::optional<std::string> column;
    std::optional<std::string> name;

    std::optional<std::string> cell;
    std::optional<std::size_t> units;
    std::optional<std::size_t> lookback;
    std::optional<std::size_t> epochs;
    std::optional<double> dropout;
    std::optional<std::size_t> batch_size;
    bool from_best = false;

    std::vector<double> grid_dropout;
    std::vector<std::size_t> grid_units;
    std::vector<std::size_t> grid_epochs;
    std::vector<std::size_t> grid_lookback;

    std::optional<std::size_t> p_max;
    std::optional<std::size_t> q_max;
    std::optional<std::size_t> d;
    bool refit = false;
    std::optional<std::string> variant;
    std::optional<double> trimming;
    std::optional<std::string> lag_rule;
    std::optional<std::size_t> lag_max;
    std::optional<std::size_t> reps;
    std::optional<double> significance;

    std::optional<std::string> fit_window;
    std::optional<std::string> rank_weighting;
    std::optional<double> holdout_fraction;
    std::vector<std::string> schemes;

    std::optional<std::string> init_output;
};

template <typename T>
void set_if(const std::optional<T>& value, T& target) {
    if (value) {
        target = *value;
    }
}

// Bundled data paths are relative; fall back to the source tree when run elsewhere.
void locate_default_data(PipelineConfig& cfg) {
#ifdef CPF_DEFAULT_DATA_DIR
    for (auto& c : cfg.commodities) {
        const fs::path p(c.path);
        if (p.is_relative() && !fs::exists(p)) {
            const fs::path alt = fs::path(CPF_DEFAULT_DATA_DIR) / p.filename();
            if (fs::exists(alt)) {
                c.path = alt.string();
            }
        }
    }
#else
    (void)cfg;
#endif
}

PipelineConfig build_config(const Overrides& o) {
    PipelineConfig cfg;
    if (o.config) {
        cfg = load_config(*o.config);
    } else {
        locate_default_data(cfg);
    }
    set_if(o.out, cfg.output_dir);
    set_if(o.seed, cfg.seed);
    set_if(o.parallel, cfg.parallel);
    set_if(o.ratio, cfg.split_ratio);
    if (o.data) {
        if (!o.column) {
            throw std::invalid_argument("--data needs --column");
        }
        cfg.commodities = {{o.name.value_or(*o.column), *o.data, *o.column}};
    } else if (o.column || o.name) {
        throw std::invalid_argument("--column and --name need --data");
    }
    if (!o.only.empty()) {
        std::vector<CommoditySource> kept;
        for (const auto& name : o.only) {
            bool found = false;
            for (const auto& c : cfg.commodities) {
                if (c.name == name) {
                    kept.push_back(c);
                    found = true;
                }
            }
            if (!found) {
                std::string known;
                for (const auto& c : cfg.commodities) {
                    known += (known.empty() ? "" : ", ") + c.name;
                }
                throw std::invalid_argument("unknown commodity '" + name + "' (configured: " + known + ")");
            }
        }
        cfg.commodities = kept;
    }

    set_if(o.cell, cfg.neural.cell);
    set_if(o.units, cfg.neural.units);
    set_if(o.lookback, cfg.neural.lookback);
    set_if(o.epochs, cfg.neural.epochs);
    set_if(o.dropout, cfg.neural.dropout);
    set_if(o.batch_size, cfg.neural.batch_size);
    cfg.neural.use_grid_best = cfg.neural.use_grid_best || o.from_best;

    if (!o.grid_dropout.empty()) cfg.grid.dropout = o.grid_dropout;
    if (!o.grid_units.empty()) cfg.grid.units = o.grid_units;
    if (!o.grid_epochs.empty()) cfg.grid.epochs = o.grid_epochs;
    if (!o.grid_lookback.empty()) cfg.grid.lookback = o.grid_lookback;

    set_if(o.p_max, cfg.arima.p_max);
    set_if(o.q_max, cfg.arima.q_max);
    if (o.d) cfg.arima.d = o.d;
    cfg.arima.refit = cfg.arima.refit || o.refit;
    set_if(o.variant, cfg.unitroot.variant);
    set_if(o.trimming, cfg.unitroot.trimming);
    set_if(o.lag_rule, cfg.unitroot.lag_rule);
    if (o.lag_max) cfg.unitroot.lag_max = o.lag_max;
    set_if(o.reps, cfg.unitroot.reps);
    set_if(o.significance, cfg.unitroot.significance);

    set_if(o.fit_window, cfg.combine.fit_window);
    set_if(o.rank_weighting, cfg.combine.rank_weighting);
    set_if(o.holdout_fraction, cfg.combine.holdout_fraction);
    if (!o.schemes.empty()) cfg.combine.schemes = o.schemes;

    cfg.validate();
    return cfg;
}

}  // namespace

int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Commodity price forecasting pipeline"};
    app.require_subcommand(1);
    Overrides o;

    app.add_option("--config", o.config, "Pipeline config file (JSON)");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--seed", o.seed, "Random seed");
    app.add_option("--parallel", o.parallel, "Worker threads");
    app.add_option("--ratio", o.ratio, "Training share of each series");
    app.add_option("--commodity", o.only, "Restrict to configured commodities (repeatable)");
    app.add_option("--data", o.data, "Price CSV replacing the configured commodities");
    app.add_option("--column", o.column, "Price column in --data");
    app.add_option("--name", o.name, "Commodity name for --data (default: the column)");

    std::function<void(const PipelineConfig&, std::ostream&)> action;
    auto pipeline = [&](CLI::App* sub, void (*fn)(const PipelineConfig&, std::ostream&)) {
        sub->fallthrough();
        sub->callback([&action, fn] { action = fn; });
    };

    auto* ingest = app.add_subcommand("ingest", "Validate price files and report the split");
    pipeline(ingest, cmd_ingest);

    auto* train = app.add_subcommand("train", "Train one recurrent network per commodity");
    train->add_option("--cell", o.cell, "rnn, gru_simple, gru_full or lstm");
    train->add_option("--units", o.units, "Hidden units");
    train->add_option("--lookback", o.lookback, "Window length");
    train->add_option("--epochs", o.epochs, "Training epochs");
    train->add_option("--dropout", o.dropout, "Dropout rate");
    train->add_option("--batch-size", o.batch_size, "Mini-batch size");
    train->add_flag("--from-best", o.from_best, "Use the grid search winner");
    pipeline(train, cmd_train);

    auto* grid = app.add_subcommand("gridsearch", "Search the hyperparameter grid");
    grid->add_option("--cell", o.cell, "rnn, gru_simple, gru_full or lstm");
    grid->add_option("--dropouts", o.grid_dropout, "Dropout values")->delimiter(',');
    grid->add_option("--units-list", o.grid_units, "Hidden unit counts")->delimiter(',');
    grid->add_option("--epochs-list", o.grid_epochs, "Epoch counts")->delimiter(',');
    grid->add_option("--lookbacks", o.grid_lookback, "Window lengths")->delimiter(',');
    grid->add_option("--batch-size", o.batch_size, "Mini-batch size");
    pipeline(grid, cmd_gridsearch);

    auto* arima = app.add_subcommand("arima", "Unit-root pretest, ARMA order search and forecasts");
    arima->add_option("--p-max", o.p_max, "Largest AR order");
    arima->add_option("--q-max", o.q_max, "Largest MA order");
    arima->add_option("--d", o.d, "Differencing order (default: from the unit-root test)");
    arima->add_flag("--refit", o.refit, "Re-estimate before every forecast");
    arima->add_option("--variant", o.variant, "intercept_only, intercept_break, trend_break or both_breaks");
    arima->add_option("--trimming", o.trimming, "Break-date trimming fraction");
    arima->add_option("--lag-rule", o.lag_rule, "sic or t_sig");
    arima->add_option("--lag-max", o.lag_max, "Largest augmentation lag");
    arima->add_option("--reps", o.reps, "Null distribution replications");
    arima->add_option("--significance", o.significance, "Unit-root test level");
    pipeline(arima, cmd_arima);

    auto* compare = app.add_subcommand("compare", "Evaluate and combine the model forecasts");
    compare->add_option("--fit-window", o.fit_window, "evaluation or holdout");
    compare->add_option("--rank-weighting", o.rank_weighting, "inverse or proportional");
    compare->add_option("--holdout-fraction", o.holdout_fraction, "Share of dates used to fit weights");
    compare->add_option("--schemes", o.schemes, "Combination schemes")->delimiter(',');
    pipeline(compare, cmd_compare);

    auto* config = app.add_subcommand("config", "Config file helpers");
    config->require_subcommand(1);
    auto* init = config->add_subcommand("init", "Print or write the default config");
    init->add_option("--output", o.init_output, "Write to this file instead of stdout");
    init->callback([&] {
        action = [&o](const PipelineConfig&, std::ostream& os) {
            const std::string text = config_to_json(PipelineConfig{});
            if (o.init_output) {
                write_file_atomic(*o.init_output, text);
                os << "wrote " << *o.init_output << "\n";
            } else {
                os << text;
            }
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        if (init->parsed()) {
            action(PipelineConfig{}, out);
        } else {
            action(build_config(o), out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace cpf::cli
