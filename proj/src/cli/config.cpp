#include "cpf/cli/config.hpp"

#include "cpf/combine/combination.hpp"
#include "cpf/neural/parameters.hpp"
#include "cpf/unitroot/breakpoint_adf.hpp"
#include "cpf/util/text_io.hpp"

#include <json.hpp>

#include <set>
#include <type_traits>
#include <stdexcept>

namespace cpf::cli {

namespace {

using nlohmann::ordered_json;

void fail(const std::string& field, const std::string& why) {
    throw std::invalid_argument("config: " + field + " " + why);
}

void check_keys(const ordered_json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) {
        fail(where.empty() ? "document" : where, "must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) {
            fail(where.empty() ? key : where + "." + key, "is not a known setting");
        }
    }
}

template <typename T>
void read(const ordered_json& j, const char* key, T& target, const std::string& where) {
    if (!j.contains(key)) {
        return;
    }
    if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        if (!j.at(key).is_number_unsigned()) {
            fail(where + key, "must be a nonnegative integer");
        }
    }
    try {
        target = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(where + key, "has the wrong type");
    }
}

template <typename T>
void read_optional(const ordered_json& j, const char* key, std::optional<T>& target, const std::string& where) {
    if (!j.contains(key)) {
        return;
    }
    if (j.at(key).is_null()) {
        target.reset();
        return;
    }
    T value{};
    read(j, key, value, where);
    target = value;
}

template <typename T>
ordered_json optional_json(const std::optional<T>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

void PipelineConfig::validate() const {
    if (commodities.empty()) {
        fail("commodities", "must list at least one series");
    }
    std::set<std::string> names;
    for (const auto& c : commodities) {
        if (c.name.empty() || c.path.empty() || c.column.empty()) {
            fail("commodities", "entries need name, path and column");
        }
        if (c.name.find_first_of("/\\ ") != std::string::npos) {
            fail("commodities.name", "'" + c.name + "' must not contain spaces or path separators");
        }
        if (!names.insert(c.name).second) {
            fail("commodities.name", "'" + c.name + "' is repeated");
        }
    }
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
        fail("split_ratio", "must lie in (0, 1)");
    }
    if (scaler != "minmax_train") {
        fail("scaler", "must be minmax_train (min-max fit on the training split)");
    }
    try {
        (void)neural::parse_cell_kind(neural.cell);
    } catch (const std::exception&) {
        fail("neural.cell", "must be rnn, gru_simple, gru_full or lstm");
    }
    if (neural.units < 1 || neural.lookback < 1 || neural.epochs < 1 || neural.batch_size < 1) {
        fail("neural", "units, lookback, epochs and batch_size must be at least 1");
    }
    if (!(neural.dropout >= 0.0 && neural.dropout < 1.0)) {
        fail("neural.dropout", "must lie in [0, 1)");
    }
    if (!(neural.clip_norm >= 0.0) || !(neural.weight_decay >= 0.0)) {
        fail("neural", "clip_norm and weight_decay must be nonnegative");
    }
    if (!(neural.learning_rate > 0.0) || !(neural.beta1 >= 0.0 && neural.beta1 < 1.0) ||
        !(neural.beta2 >= 0.0 && neural.beta2 < 1.0) || !(neural.epsilon > 0.0)) {
        fail("neural", "ADAM settings need learning_rate > 0, beta1 and beta2 in [0, 1), epsilon > 0");
    }
    if (grid.dropout.empty() || grid.units.empty() || grid.epochs.empty() || grid.lookback.empty()) {
        fail("grid", "value lists must be nonempty");
    }
    for (double d : grid.dropout) {
        if (!(d >= 0.0 && d < 1.0)) {
            fail("grid.dropout", "values must lie in [0, 1)");
        }
    }
    for (const auto* list : {&grid.units, &grid.epochs, &grid.lookback}) {
        for (std::size_t v : *list) {
            if (v < 1) {
                fail("grid", "units, epochs and lookback values must be at least 1");
            }
        }
    }
    if (arima.p_max > 12 || arima.q_max > 12) {
        fail("arima", "p_max and q_max must not exceed 12");
    }
    if (arima.d && *arima.d > 2) {
        fail("arima.d", "must be 0, 1 or 2");
    }
    if (arima.max_iterations < 1 || !(arima.gradient_tolerance > 0.0)) {
        fail("arima", "max_iterations must be positive and gradient_tolerance > 0");
    }
    if (arima.correlogram_lags < 1) {
        fail("arima.correlogram_lags", "must be at least 1");
    }
    try {
        (void)unitroot::parse_break_variant(unitroot.variant);
        (void)unitroot::parse_lag_rule(unitroot.lag_rule);
    } catch (const std::exception& e) {
        fail("unitroot", e.what());
    }
    if (!(unitroot.trimming >= 0.0 && unitroot.trimming < 0.5)) {
        fail("unitroot.trimming", "must lie in [0, 0.5)");
    }
    if (unitroot.reps < 100) {
        fail("unitroot.reps", "must be at least 100");
    }
    if (!(unitroot.significance > 0.0 && unitroot.significance < 1.0)) {
        fail("unitroot.significance", "must lie in (0, 1)");
    }
    if (combine.schemes.empty()) {
        fail("combine.schemes", "must name at least one scheme");
    }
    for (const auto& s : combine.schemes) {
        try {
            (void)combine::parse_scheme(s);
        } catch (const std::exception& e) {
            fail("combine.schemes", e.what());
        }
    }
    if (combine.rank_weighting != "inverse" && combine.rank_weighting != "proportional") {
        fail("combine.rank_weighting", "must be inverse or proportional");
    }
    if (combine.fit_window != "evaluation" && combine.fit_window != "holdout") {
        fail("combine.fit_window", "must be evaluation or holdout");
    }
    if (!(combine.holdout_fraction > 0.0 && combine.holdout_fraction < 1.0)) {
        fail("combine.holdout_fraction", "must lie in (0, 1)");
    }
    if (parallel < 1) {
        fail("parallel", "must be at least 1");
    }
    if (output_dir.empty()) {
        fail("output_dir", "must not be empty");
    }
}

std::string config_to_json(const PipelineConfig& c) {
    ordered_json j;
    j["commodities"] = ordered_json::array();
    for (const auto& s : c.commodities) {
        j["commodities"].push_back({{"name", s.name}, {"path", s.path}, {"column", s.column}});
    }
    j["split_ratio"] = c.split_ratio;
    j["scaler"] = c.scaler;
    const auto& n = c.neural;
    j["neural"] = {{"cell", n.cell},
                   {"units", n.units},
                   {"lookback", n.lookback},
                   {"epochs", n.epochs},
                   {"dropout", n.dropout},
                   {"batch_size", n.batch_size},
                   {"shuffle", n.shuffle},
                   {"clip_norm", n.clip_norm},
                   {"weight_decay", n.weight_decay},
                   {"learning_rate", n.learning_rate},
                   {"beta1", n.beta1},
                   {"beta2", n.beta2},
                   {"epsilon", n.epsilon},
                   {"use_grid_best", n.use_grid_best}};
    j["grid"] = {{"dropout", c.grid.dropout},
                 {"units", c.grid.units},
                 {"epochs", c.grid.epochs},
                 {"lookback", c.grid.lookback}};
    const auto& a = c.arima;
    j["arima"] = {{"p_max", a.p_max},
                  {"q_max", a.q_max},
                  {"d", optional_json(a.d)},
                  {"max_iterations", a.max_iterations},
                  {"gradient_tolerance", a.gradient_tolerance},
                  {"refit", a.refit},
                  {"correlogram_lags", a.correlogram_lags}};
    const auto& u = c.unitroot;
    j["unitroot"] = {{"variant", u.variant},
                     {"trimming", u.trimming},
                     {"lag_rule", u.lag_rule},
                     {"lag_max", optional_json(u.lag_max)},
                     {"reps", u.reps},
                     {"significance", u.significance}};
    j["combine"] = {{"schemes", c.combine.schemes},
                    {"rank_weighting", c.combine.rank_weighting},
                    {"fit_window", c.combine.fit_window},
                    {"holdout_fraction", c.combine.holdout_fraction}};
    j["seed"] = c.seed;
    j["parallel"] = c.parallel;
    j["output_dir"] = c.output_dir;
    return j.dump(2) + "\n";
}

PipelineConfig config_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
    }
    check_keys(j, "", {"commodities", "split_ratio", "scaler", "neural", "grid", "arima", "unitroot", "combine",
                       "seed", "parallel", "output_dir"});
    PipelineConfig c;
    if (j.contains("commodities")) {
        const auto& list = j.at("commodities");
        if (!list.is_array()) {
            fail("commodities", "must be an array");
        }
        c.commodities.clear();
        for (const auto& item : list) {
            check_keys(item, "commodities[]", {"name", "path", "column"});
            CommoditySource s;
            read(item, "name", s.name, "commodities[].");
            read(item, "path", s.path, "commodities[].");
            read(item, "column", s.column, "commodities[].");
            if (s.column.empty()) {
                s.column = s.name;
            }
            c.commodities.push_back(s);
        }
    }
    read(j, "split_ratio", c.split_ratio, "");
    read(j, "scaler", c.scaler, "");
    if (j.contains("neural")) {
        const auto& n = j.at("neural");
        check_keys(n, "neural",
                   {"cell", "units", "lookback", "epochs", "dropout", "batch_size", "shuffle", "clip_norm",
                    "weight_decay", "learning_rate", "beta1", "beta2", "epsilon", "use_grid_best"});
        auto& t = c.neural;
        read(n, "cell", t.cell, "neural.");
        read(n, "units", t.units, "neural.");
        read(n, "lookback", t.lookback, "neural.");
        read(n, "epochs", t.epochs, "neural.");
        read(n, "dropout", t.dropout, "neural.");
        read(n, "batch_size", t.batch_size, "neural.");
        read(n, "shuffle", t.shuffle, "neural.");
        read(n, "clip_norm", t.clip_norm, "neural.");
        read(n, "weight_decay", t.weight_decay, "neural.");
        read(n, "learning_rate", t.learning_rate, "neural.");
        read(n, "beta1", t.beta1, "neural.");
        read(n, "beta2", t.beta2, "neural.");
        read(n, "epsilon", t.epsilon, "neural.");
        read(n, "use_grid_best", t.use_grid_best, "neural.");
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        check_keys(g, "grid", {"dropout", "units", "epochs", "lookback"});
        read(g, "dropout", c.grid.dropout, "grid.");
        read(g, "units", c.grid.units, "grid.");
        read(g, "epochs", c.grid.epochs, "grid.");
        read(g, "lookback", c.grid.lookback, "grid.");
    }
    if (j.contains("arima")) {
        const auto& a = j.at("arima");
        check_keys(a, "arima",
                   {"p_max", "q_max", "d", "max_iterations", "gradient_tolerance", "refit", "correlogram_lags"});
        read(a, "p_max", c.arima.p_max, "arima.");
        read(a, "q_max", c.arima.q_max, "arima.");
        read_optional(a, "d", c.arima.d, "arima.");
        read(a, "max_iterations", c.arima.max_iterations, "arima.");
        read(a, "gradient_tolerance", c.arima.gradient_tolerance, "arima.");
        read(a, "refit", c.arima.refit, "arima.");
        read(a, "correlogram_lags", c.arima.correlogram_lags, "arima.");
    }
    if (j.contains("unitroot")) {
        const auto& u = j.at("unitroot");
        check_keys(u, "unitroot", {"variant", "trimming", "lag_rule", "lag_max", "reps", "significance"});
        read(u, "variant", c.unitroot.variant, "unitroot.");
        read(u, "trimming", c.unitroot.trimming, "unitroot.");
        read(u, "lag_rule", c.unitroot.lag_rule, "unitroot.");
        read_optional(u, "lag_max", c.unitroot.lag_max, "unitroot.");
        read(u, "reps", c.unitroot.reps, "unitroot.");
        read(u, "significance", c.unitroot.significance, "unitroot.");
    }
    if (j.contains("combine")) {
        const auto& m = j.at("combine");
        check_keys(m, "combine", {"schemes", "rank_weighting", "fit_window", "holdout_fraction"});
        read(m, "schemes", c.combine.schemes, "combine.");
        read(m, "rank_weighting", c.combine.rank_weighting, "combine.");
        read(m, "fit_window", c.combine.fit_window, "combine.");
        read(m, "holdout_fraction", c.combine.holdout_fraction, "combine.");
    }
    read(j, "seed", c.seed, "");
    read(j, "parallel", c.parallel, "");
    read(j, "output_dir", c.output_dir, "");
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    PipelineConfig c = config_from_json(read_file(path));
    const auto base = path.parent_path();
    for (auto& s : c.commodities) {
        const std::filesystem::path p(s.path);
        if (p.is_relative() && !base.empty()) {
            s.path = (base / p).lexically_normal().string();
        }
    }
    return c;
}

}  // namespace cpf::cli
