#pragma once

#include "pinnlab/field.hpp"
#include "pinnlab/report.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace pinnlab {

struct Curve {
    std::string label;
    std::vector<double> x, y;
};

// Self-contained SVG documents; output depends only on the inputs.
std::string svg_heatmap(const SolutionField& field, const std::string& title);
std::string svg_plot(const std::vector<Curve>& curves, const PlotSpec& spec);

// One heatmap per stored field and one file per plot spec. Plots whose series
// are missing are skipped with a message on `warnings`. Returns files written.
std::vector<std::filesystem::path> emit_plots(const ExperimentReport& report, const std::filesystem::path& dir,
                                              std::vector<std::string>* warnings = nullptr);

}  // namespace pinnlab
