#pragma once

#include "pinnlab/field.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pinnlab {

struct Verdict {
    std::string claim;
    double predicted = 0.0;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;

    bool operator==(const Verdict&) const = default;
};

// Line or scatter plot assembled from named series at render time.
struct PlotSpec {
    std::string name;  // file stem
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::string x_series;
    std::vector<std::string> y_series;
    bool log_x = false;
    bool log_y = false;
    bool scatter = false;  // markers plus a least-squares line in the displayed axes

    bool operator==(const PlotSpec&) const = default;
};

enum class Outcome { pass, fail, inconclusive };

std::string to_string(Outcome o);

struct ExperimentReport {
    std::string id;
    std::map<std::string, double> metrics;
    std::map<std::string, std::vector<double>> series;
    std::map<std::string, SolutionField> fields;  // rendered as heatmaps
    std::vector<PlotSpec> plots;
    std::map<std::string, std::vector<std::string>> tables;  // csv stem -> equal-length series
    std::vector<Verdict> verdicts;
    bool inconclusive = false;
    std::string note;

    // provenance
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<std::string> cache_keys;

    Verdict& check(std::string claim, double predicted, double measured, double tolerance, bool pass,
                   std::string detail = {});
    Outcome outcome() const;
    // Throws when a verdict or metric is not finite.
    void validate() const;

    bool operator==(const ExperimentReport&) const = default;
};

std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(std::string_view text);

// CSV of equal-length series: one column per name.
std::string series_to_csv(const ExperimentReport& report, const std::vector<std::string>& names);

}  // namespace pinnlab
