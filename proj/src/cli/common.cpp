#include "common.hpp"

namespace cpf::cli::detail {

DatedValues read_dated_column(const fs::path& path, const std::string& column, const std::string& hint) {
    if (!fs::exists(path)) {
        throw std::runtime_error("missing " + path.string() + ": " + hint);
    }
    const CsvTable table = read_csv(path);
    const std::size_t dc = table.column("date");
    const std::size_t vc = table.column(column);
    DatedValues out;
    for (const auto& row : table.rows) {
        out.dates.push_back(data::YearMonth::parse(row.at(dc)));
        out.values.push_back(std::stod(row.at(vc)));
    }
    return out;
}

}  // namespace cpf::cli::detail
