#include "common.hpp"
#include "cpf/arima/arma.hpp"
#include "cpf/arima/correlogram.hpp"
#include "cpf/arima/differencing.hpp"
#include "cpf/cli/commands.hpp"
#include "cpf/evaluation/accuracy.hpp"
#include "cpf/unitroot/breakpoint_adf.hpp"
#include "cpf/util/svg_chart.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace cpf::cli {

using namespace detail;

namespace {

unitroot::BreakSpec break_spec(const UnitRootSettings& s) {
    unitroot::BreakSpec spec;
    spec.variant = unitroot::parse_break_variant(s.variant);
    spec.trimming = s.trimming;
    spec.lag_rule = unitroot::parse_lag_rule(s.lag_rule);
    spec.lag_max = s.lag_max;
    return spec;
}

void write_correlogram(const fs::path& path, std::span<const double> w, std::size_t lags) {
    const std::size_t max_lag = std::min(lags, (w.size() - 1) / 2);
    const auto r = arima::acf(w, max_lag);
    const auto phi = arima::pacf(w, max_lag);
    const double band = 1.96 / std::sqrt(static_cast<double>(w.size()));
    CsvWriter csv({"lag", "acf", "pacf", "band"});
    for (std::size_t k = 1; k <= max_lag; ++k) {
        csv.cell(k).cell(r[k]).cell(phi[k]).cell(band);
        csv.end_row();
    }
    write_file_atomic(path, csv.str());
}

}  // namespace

void cmd_arima(const PipelineConfig& cfg, std::ostream& out) {
    cfg.validate();
    const auto spec = break_spec(cfg.unitroot);
    const fs::path cache = fs::path(cfg.output_dir) / "cache";
    fs::create_directories(cache);
    for (const auto& src : cfg.commodities) {
        const fs::path dir = commodity_dir(cfg, src.name);
        const auto series = load_commodity(src);
        const auto [train, test] = data::train_test_split(series, cfg.split_ratio);

        unitroot::NullOptions null;
        null.reps = cfg.unitroot.reps;
        null.seed = cfg.seed;
        null.parallel = cfg.parallel;
        null.cache_dir = cache.string();
        const auto ur = unitroot::breakpoint_adf(series.values(), spec, null);
        const bool rejects = ur.p_value < cfg.unitroot.significance;
        const std::size_t d = cfg.arima.d.value_or(rejects ? 0 : 1);

        nlohmann::ordered_json uj;
        uj["variant"] = unitroot::to_string(spec.variant);
        uj["trimming"] = spec.trimming;
        uj["lag_rule"] = unitroot::to_string(spec.lag_rule);
        uj["lag_max"] = spec.lag_max_for(series.size());
        uj["n"] = series.size();
        uj["min_t"] = ur.min_t;
        uj["break_index"] = ur.break_date;
        uj["break_date"] = series.dates()[ur.break_date - 1].str();
        uj["alpha_hat"] = ur.alpha_hat;
        uj["lag"] = ur.chosen_lag;
        uj["p_value"] = ur.p_value;
        uj["reps"] = ur.reps;
        uj["seed"] = ur.seed;
        uj["significance"] = cfg.unitroot.significance;
        uj["rejects_unit_root"] = rejects;
        uj["d"] = d;
        uj["d_from_config"] = cfg.arima.d.has_value();
        write_json(dir / "unitroot.json", uj);

        CsvWriter prof({"break_index", "break_date", "status", "t_alpha", "lag"});
        std::vector<std::string> prof_labels;
        std::vector<double> prof_t;
        for (const auto& s : ur.per_date_t) {
            const std::string date = series.dates()[s.break_date - 1].str();
            prof.cell(s.break_date).cell(date).cell(s.ok ? "ok" : "singular");
            if (s.ok) {
                prof.cell(s.t_alpha).cell(s.lag);
            } else {
                prof.cell("").cell("");
            }
            prof.end_row();
            prof_labels.push_back(date);
            prof_t.push_back(s.ok ? s.t_alpha : std::numeric_limits<double>::quiet_NaN());
        }
        write_file_atomic(dir / "unitroot_profile.csv", prof.str());
        write_file_atomic(dir / "unitroot_profile.svg",
                          render_line_chart(src.name + " break-date t statistics", prof_labels,
                                            {{"t(alpha)", prof_t}}, "t"));

        const auto w = arima::difference(train.values(), d);
        write_correlogram(dir / "correlogram.csv", w, cfg.arima.correlogram_lags);

        arima::SelectOptions sel;
        sel.d = d;
        sel.fit.max_iterations = cfg.arima.max_iterations;
        sel.fit.gradient_tolerance = cfg.arima.gradient_tolerance;
        sel.parallel = cfg.parallel;
        const auto chosen = arima::select_order(train.values(), cfg.arima.p_max, cfg.arima.q_max, sel);

        CsvWriter orders({"p", "d", "q", "status", "css", "sic", "n_used", "selected", "error"});
        for (const auto& c : chosen.table) {
            orders.cell(c.spec.p).cell(c.spec.d).cell(c.spec.q).cell(c.ok ? "ok" : "failed");
            if (c.ok) {
                orders.cell(c.css).cell(c.sic).cell(c.n_used);
            } else {
                orders.cell("").cell("").cell("");
            }
            orders.cell(c.spec == chosen.best ? "yes" : "no").cell(c.error);
            orders.end_row();
        }
        write_file_atomic(dir / "arma_orders.csv", orders.str());

        arima::ArmaModel model = chosen.best_model;
        std::vector<double> forecasts;
        if (cfg.arima.refit) {
            arima::RollingOptions ro;
            ro.refit = true;
            ro.fit = sel.fit;
            auto rolled = arima::rolling_forecast(chosen.best, train.values(), test.values(), ro);
            model = std::move(rolled.model);
            forecasts = std::move(rolled.forecasts);
        } else {
            forecasts = arima::rolling_forecast(model, train.values(), test.values());
        }
        write_file_atomic(dir / "arima_model.json", arima::serialize_model(model));

        CsvWriter preds({"date", "actual", "predicted"});
        for (std::size_t i = 0; i < test.size(); ++i) {
            preds.cell(test.dates()[i].str()).cell(test.values()[i]).cell(forecasts[i]);
            preds.end_row();
        }
        write_file_atomic(dir / "arima_predictions.csv", preds.str());
        write_file_atomic(dir / "arima_forecast.svg",
                          render_line_chart(src.name + " test set: actual vs " + chosen.best.str(),
                                            date_labels(test.dates()),
                                            {{"actual", test.values()}, {"arima", forecasts}}, "price"));

        const double rmse = evaluation::rmse(test.values(), forecasts);
        const double mape = evaluation::mape(test.values(), forecasts);
        out << src.name << ": min-t " << format_double(ur.min_t, 4) << " at " << uj["break_date"].get<std::string>()
            << ", p " << format_double(ur.p_value, 4) << " (" << (rejects ? "rejects" : "keeps") << " unit root); "
            << chosen.best.str() << "; test RMSE " << format_double(rmse, 4) << ", MAPE " << format_double(mape, 4)
            << "%\n";
    }
}

}  // namespace cpf::cli
