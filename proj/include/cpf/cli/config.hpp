#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cpf::cli {

struct CommoditySource {
    std::string name;
    std::string path;
    std::string column;

    bool operator==(const CommoditySource&) const = default;
};

struct NeuralSettings {
    std::string cell = "lstm";
    std::size_t units = 170;
    std::size_t lookback = 2;
    std::size_t epochs = 100;
    double dropout = 0.001;
    std::size_t batch_size = 32;
    bool shuffle = true;
    double clip_norm = 5.0;
    double weight_decay = 0.0;
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    /// train reads the grid search winner instead of the values above.
    bool use_grid_best = false;

    bool operator==(const NeuralSettings&) const = default;
};

struct GridSettings {
    std::vector<double> dropout{0.001, 0.01, 0.03, 0.1, 0.3};
    std::vector<std::size_t> units{10, 50, 90, 130, 170};
    std::vector<std::size_t> epochs{20, 40, 60, 80, 100};
    std::vector<std::size_t> lookback{2, 4, 6, 8, 10};

    bool operator==(const GridSettings&) const = default;
};

struct ArimaSettings {
    std::size_t p_max = 6;
    std::size_t q_max = 6;
    std::optional<std::size_t> d;  ///< unset: 0 if the unit-root test rejects, else 1
    std::size_t max_iterations = 500;
    double gradient_tolerance = 1e-8;
    bool refit = false;
    std::size_t correlogram_lags = 30;

    bool operator==(const ArimaSettings&) const = default;
};

struct UnitRootSettings {
    std::string variant = "both_breaks";
    double trimming = 0.15;
    std::string lag_rule = "sic";
    std::optional<std::size_t> lag_max;
    std::size_t reps = 5000;
    double significance = 0.05;

    bool operator==(const UnitRootSettings&) const = default;
};

struct CombineSettings {
    std::vector<std::string> schemes{"simple_mean", "least_squares", "inverse_mse", "mse_ranks"};
    std::string rank_weighting = "inverse";  ///< or "proportional"
    std::string fit_window = "evaluation";   ///< or "holdout"
    double holdout_fraction = 0.5;           ///< leading share of the comparison window used to fit weights

    bool operator==(const CombineSettings&) const = default;
};

struct PipelineConfig {
    std::vector<CommoditySource> commodities{{"cotton", "data/cotton.csv", "cotton"}, {"oil", "data/oil.csv", "oil"}};
    double split_ratio = 0.7;
    std::string scaler = "minmax_train";
    NeuralSettings neural;
    GridSettings grid;
    ArimaSettings arima;
    UnitRootSettings unitroot;
    CombineSettings combine;
    std::uint64_t seed = 3;
    std::size_t parallel = 1;
    std::string output_dir = "out";

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;
    bool operator==(const PipelineConfig&) const = default;
};

[[nodiscard]] std::string config_to_json(const PipelineConfig& cfg);

/// Parses a config document; missing keys keep their defaults, unknown keys are errors.
[[nodiscard]] PipelineConfig config_from_json(const std::string& text);

/// Reads a config file; relative data paths are resolved against the file's directory.
[[nodiscard]] PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace cpf::cli
