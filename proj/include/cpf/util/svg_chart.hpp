#pragma once

#include <string>
#include <vector>

namespace cpf {

struct ChartSeries {
    std::string name;
    std::vector<double> values;  ///< NaN entries are drawn as gaps.
};

/// Renders a self-contained SVG line chart. x_labels has one entry per point;
/// roughly eight of them are printed along the axis.
[[nodiscard]] std::string render_line_chart(const std::string& title, const std::vector<std::string>& x_labels,
                                            const std::vector<ChartSeries>& series, const std::string& y_label);

}  // namespace cpf
