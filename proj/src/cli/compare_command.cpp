#include "common.hpp"
#include "cpf/cli/commands.hpp"
#include "cpf/combine/combination.hpp"
#include "cpf/evaluation/accuracy.hpp"
#include "cpf/util/svg_chart.hpp"

#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

namespace cpf::cli {

using namespace detail;

namespace {

/// Published values for the bundled commodities.
struct ReferenceValues {
    double min_t;
    double unitroot_p;
    std::size_t p;
    std::size_t q;
    double hln_p;
    bool combination_beats_arima;
};

std::optional<ReferenceValues> reference_for(const std::string& name) {
    if (name == "cotton") {
        return ReferenceValues{-4.94, 0.0391, 4, 2, 0.007, true};
    }
    if (name == "oil") {
        return ReferenceValues{-4.85, 0.0275, 4, 1, 0.001, false};
    }
    return std::nullopt;
}

struct ReferenceRow {
    std::string commodity;
    std::string item;
    std::string reference;
    std::string ours;
    bool pass = false;
};

std::string join_weights(const std::vector<double>& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        s += (i ? ";" : "") + format_double(w[i]);
    }
    return s;
}

std::string fmt(double v) { return format_double(v, 4); }

struct CommodityOutcome {
    std::string name;
    std::string neural_label;
    evaluation::EvaluationReport eval;
    combine::CombinationReport comb;
    std::size_t n = 0;
    std::string first;
    std::string last;
    std::vector<ReferenceRow> reference;
};

const combine::ReportRow& row_named(const combine::CombinationReport& r, const std::string& name) {
    for (const auto& row : r.rows) {
        if (row.name == name) {
            return row;
        }
    }
    throw std::logic_error("no report row " + name);
}

std::vector<ReferenceRow> reference_rows(const std::string& name, const ReferenceValues& ref,
                                         const nlohmann::ordered_json& ur, const nlohmann::ordered_json& model,
                                         const CommodityOutcome& o, double significance) {
    std::vector<ReferenceRow> rows;
    const double min_t = ur.at("min_t").get<double>();
    rows.push_back({name, "breakpoint min-t (within 0.5)", fmt(ref.min_t), fmt(min_t), std::abs(min_t - ref.min_t) <= 0.5});
    const double p = ur.at("p_value").get<double>();
    rows.push_back({name, "unit-root verdict at " + format_double(significance), fmt(ref.unitroot_p), fmt(p),
                    (p < significance) == (ref.unitroot_p < significance)});
    const auto& spec = model.at("spec");
    const std::size_t mp = spec.at("p").get<std::size_t>();
    const std::size_t md = spec.at("d").get<std::size_t>();
    const std::size_t mq = spec.at("q").get<std::size_t>();
    rows.push_back({name, "SIC-selected ARMA order",
                    "(" + std::to_string(ref.p) + "," + std::to_string(ref.q) + ") on levels",
                    "(" + std::to_string(mp) + "," + std::to_string(mq) + ") d=" + std::to_string(md),
                    mp == ref.p && mq == ref.q && md == 0});

    const auto& arima = row_named(o.comb, "arima");
    const auto& neural = row_named(o.comb, o.neural_label);
    rows.push_back({name, "ARIMA RMSE below " + o.neural_label + " RMSE", "yes",
                    arima.rmse < neural.rmse ? "yes" : "no", arima.rmse < neural.rmse});
    const double hln_p = o.eval.hln.front().result.p_value;
    rows.push_back({name, "HLN p-value below 0.05", fmt(ref.hln_p), fmt(hln_p), hln_p < 0.05});

    std::optional<std::size_t> best_rmse;
    std::optional<std::size_t> best_mape;
    for (std::size_t i = 0; i < o.comb.rows.size(); ++i) {
        const auto& r = o.comb.rows[i];
        if (!r.is_scheme || !r.ok) {
            continue;
        }
        if (!best_rmse || r.rmse < o.comb.rows[*best_rmse].rmse) {
            best_rmse = i;
        }
        if (!best_mape || r.mape < o.comb.rows[*best_mape].mape) {
            best_mape = i;
        }
    }
    const std::string rmse_scheme = best_rmse ? o.comb.rows[*best_rmse].name : "none";
    const std::string mape_scheme = best_mape ? o.comb.rows[*best_mape].name : "none";
    rows.push_back({name, "best combination by RMSE", "least_squares", rmse_scheme, rmse_scheme == "least_squares"});
    rows.push_back({name, "best combination by MAPE", "mse_ranks", mape_scheme, mape_scheme == "mse_ranks"});

    if (ref.combination_beats_arima) {
        const bool ok = best_rmse && o.comb.rows[*best_rmse].rmse <= arima.rmse;
        rows.push_back({name, "best combination RMSE <= ARIMA RMSE", "yes", ok ? "yes" : "no", ok});
    } else {
        bool all = true;
        for (const auto& r : o.comb.rows) {
            if (r.is_scheme && r.ok && r.rmse <= arima.rmse) {
                all = false;
            }
        }
        rows.push_back({name, "ARIMA RMSE below every combination", "yes", all ? "yes" : "no", all});
    }
    return rows;
}

void check_weights(const combine::CombinationReport& report, const std::string& name) {
    for (const auto& row : report.rows) {
        if (!row.result || row.result->intercept) {
            continue;
        }
        double sum = 0.0;
        for (const double w : row.result->weights) {
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw std::runtime_error(name + ": " + row.name + " weights sum to " + format_double(sum));
        }
    }
    if (report.projection_holds && !*report.projection_holds) {
        throw std::runtime_error(name + ": least-squares combination RMSE exceeds an individual RMSE");
    }
}

}  // namespace

void cmd_compare(const PipelineConfig& cfg, std::ostream& out) {
    cfg.validate();
    combine::CombinationOptions opts;
    opts.schemes.clear();
    for (const auto& s : cfg.combine.schemes) {
        opts.schemes.push_back(combine::parse_scheme(s));
    }
    opts.rank_weighting = cfg.combine.rank_weighting == "proportional" ? combine::RankWeighting::Proportional
                                                                      : combine::RankWeighting::Inverse;

    std::vector<CommodityOutcome> outcomes;
    for (const auto& src : cfg.commodities) {
        const fs::path dir = commodity_dir(cfg, src.name);
        const auto series = load_commodity(src);
        const auto nn = read_dated_column(dir / "neural_predictions.csv", "predicted", "run `cpf train` first");
        const auto summary = read_json(dir / "train_summary.json", "run `cpf train` first");
        const std::string neural_label = summary.at("cell").get<std::string>();
        const auto ar = read_dated_column(dir / "arima_predictions.csv", "predicted", "run `cpf arima` first");
        const auto ur = read_json(dir / "unitroot.json", "run `cpf arima` first");
        const auto model = read_json(dir / "arima_model.json", "run `cpf arima` first");

        const auto set = evaluation::inner_join(series, {{neural_label, nn.dates, nn.values}, {"arima", ar.dates, ar.values}});
        const std::size_t n = set.dates.size();
        if (n < 10) {
            throw std::runtime_error(src.name + ": only " + std::to_string(n) + " dates shared by the forecasts");
        }
        combine::Window fit{0, n};
        combine::Window eval{0, n};
        if (cfg.combine.fit_window == "holdout") {
            const auto k = static_cast<std::size_t>(std::floor(cfg.combine.holdout_fraction * static_cast<double>(n)));
            if (k < 3 || n - k < 2) {
                throw std::runtime_error(src.name + ": holdout split leaves too few points");
            }
            fit = {0, k};
            eval = {k, n};
        }

        CommodityOutcome o;
        o.name = src.name;
        o.neural_label = neural_label;
        o.n = n;
        o.first = set.dates.front().str();
        o.last = set.dates.back().str();
        o.eval = evaluation::evaluate(set);
        o.comb = combine::evaluate_combinations(set, fit, eval, opts);
        check_weights(o.comb, src.name);

        CsvWriter acc({"model", "rmse", "mape", "n"});
        for (const auto& a : o.eval.accuracy) {
            acc.cell(a.name).cell(a.rmse).cell(a.mape).cell(n);
            acc.end_row();
        }
        write_file_atomic(dir / "accuracy.csv", acc.str());

        CsvWriter hln({"model_a", "model_b", "statistic", "p_value", "n", "h", "mean_loss_diff", "degenerate"});
        for (const auto& h : o.eval.hln) {
            hln.cell(h.a).cell(h.b).cell(h.result.statistic).cell(h.result.p_value).cell(h.result.n).cell(h.result.h);
            hln.cell(h.result.mean_loss_diff).cell(h.result.degenerate ? "yes" : "no");
            hln.end_row();
        }
        write_file_atomic(dir / "hln.csv", hln.str());

        CsvWriter cw({"name", "kind", "status", "rmse", "mape", "weights", "intercept", "fit_begin", "fit_end",
                      "eval_begin", "eval_end", "note"});
        for (const auto& r : o.comb.rows) {
            cw.cell(r.name).cell(r.is_scheme ? "combination" : "model").cell(r.ok ? "ok" : "failed");
            if (r.ok) {
                cw.cell(r.rmse).cell(r.mape);
            } else {
                cw.cell("").cell("");
            }
            cw.cell(r.result ? join_weights(r.result->weights) : "");
            if (r.result && r.result->intercept) {
                cw.cell(*r.result->intercept);
            } else {
                cw.cell("");
            }
            cw.cell(fit.begin).cell(fit.end).cell(eval.begin).cell(eval.end).cell(r.note);
            cw.end_row();
        }
        write_file_atomic(dir / "combinations.csv", cw.str());

        std::vector<std::string> header{"date", "actual"};
        std::vector<ChartSeries> chart{{"actual", set.actual}};
        for (const auto& f : set.forecasts) {
            header.push_back(f.name);
            chart.push_back({f.name, f.values});
        }
        for (const auto& r : o.comb.rows) {
            if (r.is_scheme && r.result) {
                header.push_back(r.name);
                chart.push_back({r.name, r.result->combined});
            }
        }
        CsvWriter plot(header);
        for (std::size_t i = 0; i < n; ++i) {
            plot.cell(set.dates[i].str());
            for (const auto& c : chart) {
                plot.cell(c.values[i]);
            }
            plot.end_row();
        }
        write_file_atomic(dir / "comparison.csv", plot.str());
        write_file_atomic(dir / "comparison.svg", render_line_chart(src.name + " test set forecasts",
                                                                    date_labels(set.dates), chart, "price"));

        if (const auto ref = reference_for(src.name)) {
            o.reference = reference_rows(src.name, *ref, ur, model, o, cfg.unitroot.significance);
        }
        const auto& best = o.comb.rows[o.comb.best_rmse];
        out << src.name << ": " << n << " common dates " << o.first << ".." << o.last << "; best RMSE " << best.name
            << " " << fmt(best.rmse) << "; HLN p " << fmt(o.eval.hln.front().result.p_value) << "\n";
        outcomes.push_back(std::move(o));
    }

    std::ostringstream md;
    CsvWriter refcsv({"commodity", "item", "reference", "ours", "status"});
    md << "# Forecast comparison\n\n";
    md << "Combination weights fit on the " << cfg.combine.fit_window << " window";
    if (cfg.combine.fit_window == "holdout") {
        md << " (leading " << format_double(cfg.combine.holdout_fraction) << " of the common dates)";
    }
    md << "; rank weighting " << cfg.combine.rank_weighting << ".\n";
    for (const auto& o : outcomes) {
        md << "\n## " << o.name << "\n\n";
        md << o.n << " common test dates, " << o.first << " to " << o.last << ".\n\n";
        md << "| forecast | kind | RMSE | MAPE (%) | note |\n|---|---|---|---|---|\n";
        for (std::size_t i = 0; i < o.comb.rows.size(); ++i) {
            const auto& r = o.comb.rows[i];
            md << "| " << r.name << " | " << (r.is_scheme ? "combination" : "model") << " | ";
            if (r.ok) {
                md << fmt(r.rmse) << (i == o.comb.best_rmse ? " (best)" : "") << " | " << fmt(r.mape)
                   << (i == o.comb.best_mape ? " (best)" : "");
            } else {
                md << "failed | failed";
            }
            md << " | " << r.note << " |\n";
        }
        md << "\n| HLN pair | statistic | p-value |\n|---|---|---|\n";
        for (const auto& h : o.eval.hln) {
            md << "| " << h.a << " vs " << h.b << " | " << fmt(h.result.statistic) << " | " << fmt(h.result.p_value)
               << (h.result.degenerate ? " (identical losses)" : "") << " |\n";
        }
        if (o.comb.projection_holds) {
            md << "\nLeast-squares projection check: " << (*o.comb.projection_holds ? "holds" : "violated") << ".\n";
        }
    }
    bool any_reference = false;
    for (const auto& o : outcomes) {
        any_reference = any_reference || !o.reference.empty();
    }
    if (any_reference) {
        md << "\n## Reference comparison\n\n";
        md << "Published figures for the bundled series. Divergence is reported, not treated as an error.\n\n";
        md << "| commodity | item | reference | ours | status |\n|---|---|---|---|---|\n";
        for (const auto& o : outcomes) {
            for (const auto& r : o.reference) {
                const char* status = r.pass ? "pass" : "diverge";
                md << "| " << r.commodity << " | " << r.item << " | " << r.reference << " | " << r.ours << " | "
                   << status << " |\n";
                refcsv.cell(r.commodity).cell(r.item).cell(r.reference).cell(r.ours).cell(status);
                refcsv.end_row();
            }
        }
    }
    write_file_atomic(fs::path(cfg.output_dir) / "reference_comparison.csv", refcsv.str());
    write_file_atomic(fs::path(cfg.output_dir) / "report.md", md.str());
}

}  // namespace cpf::cli
