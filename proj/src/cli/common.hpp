#pragma once

#include "cpf/cli/config.hpp"
#include "cpf/data/price_series.hpp"
#include "cpf/util/text_io.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace cpf::cli::detail {

namespace fs = std::filesystem;

inline fs::path commodity_dir(const PipelineConfig& cfg, const std::string& name) {
    const fs::path dir = fs::path(cfg.output_dir) / name;
    fs::create_directories(dir);
    return dir;
}

inline data::PriceSeries load_commodity(const CommoditySource& src) {
    return data::load_series(src.path, src.column);
}

inline nlohmann::ordered_json read_json(const fs::path& path, const std::string& hint) {
    if (!fs::exists(path)) {
        throw std::runtime_error("missing " + path.string() + ": " + hint);
    }
    return nlohmann::ordered_json::parse(read_file(path));
}

inline void write_json(const fs::path& path, const nlohmann::ordered_json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

inline std::vector<std::string> date_labels(const std::vector<data::YearMonth>& dates) {
    std::vector<std::string> out;
    out.reserve(dates.size());
    for (const auto& d : dates) {
        out.push_back(d.str());
    }
    return out;
}

struct DatedValues {
    std::vector<data::YearMonth> dates;
    std::vector<double> values;
};

/// Reads the date column and one numeric column of a pipeline CSV.
DatedValues read_dated_column(const fs::path& path, const std::string& column, const std::string& hint);

}  // namespace cpf::cli::detail
