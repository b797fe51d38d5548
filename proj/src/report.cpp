#include "pinnlab/report.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pinnlab {

using nlohmann::json;

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::pass:
            return "pass";
        case Outcome::fail:
            return "fail";
        case Outcome::inconclusive:
            return "inconclusive";
    }
    return "unknown";
}

Verdict& ExperimentReport::check(std::string claim, double predicted, double measured, double tolerance, bool pass,
                                 std::string detail) {
    verdicts.push_back({std::move(claim), predicted, measured, tolerance, pass, std::move(detail)});
    return verdicts.back();
}

Outcome ExperimentReport::outcome() const {
    if (inconclusive) return Outcome::inconclusive;
    for (const auto& v : verdicts)
        if (!v.pass) return Outcome::fail;
    return Outcome::pass;
}

void ExperimentReport::validate() const {
    for (const auto& v : verdicts)
        if (!std::isfinite(v.measured) || !std::isfinite(v.predicted) || !std::isfinite(v.tolerance))
            throw std::domain_error("report " + id + ": verdict '" + v.claim + "' is not finite");
    for (const auto& [k, v] : metrics)
        if (!std::isfinite(v)) throw std::domain_error("report " + id + ": metric '" + k + "' is not finite");
    for (const auto& [k, s] : series)
        for (double v : s)
            if (!std::isfinite(v)) throw std::domain_error("report " + id + ": series '" + k + "' is not finite");
}

namespace {

json field_json(const SolutionField& f) {
    const Grid& g = f.grid;
    json j;
    j["grid"] = {{"x_lo", g.x_lo}, {"x_hi", g.x_hi}, {"nx", g.nx}, {"t_lo", g.t_lo}, {"t_hi", g.t_hi}, {"nt", g.nt}};
    j["metadata"] = f.metadata;
    j["values"] = std::vector<double>(f.values.data(), f.values.data() + f.values.size());
    return j;
}

SolutionField field_from(const json& j) {
    const json& jg = j.at("grid");
    Grid g;
    g.x_lo = jg.at("x_lo").get<double>();
    g.x_hi = jg.at("x_hi").get<double>();
    g.nx = jg.at("nx").get<Eigen::Index>();
    g.t_lo = jg.at("t_lo").get<double>();
    g.t_hi = jg.at("t_hi").get<double>();
    g.nt = jg.at("nt").get<Eigen::Index>();
    g.validate();
    const auto v = j.at("values").get<std::vector<double>>();
    if (Eigen::Index(v.size()) != g.nx * g.nt) throw std::runtime_error("field values do not match grid");
    Eigen::MatrixXd values = Eigen::Map<const Eigen::MatrixXd>(v.data(), g.nx, g.nt);
    return SolutionField(g, std::move(values), j.at("metadata").get<std::map<std::string, std::string>>());
}

}  // namespace

std::string report_to_json(const ExperimentReport& r) {
    r.validate();
    json j;
    j["format"] = "pinnlab-report";
    j["version"] = 1;
    j["id"] = r.id;
    j["outcome"] = to_string(r.outcome());
    j["inconclusive"] = r.inconclusive;
    j["note"] = r.note;
    j["provenance"] = {{"config_hash", r.config_hash}, {"seed", r.seed}, {"cache_keys", r.cache_keys}};
    j["metrics"] = r.metrics;
    j["series"] = r.series;
    json fields = json::object();
    for (const auto& [name, f] : r.fields) fields[name] = field_json(f);
    j["fields"] = std::move(fields);
    json plots = json::array();
    for (const auto& p : r.plots)
        plots.push_back({{"name", p.name},
                         {"title", p.title},
                         {"xlabel", p.xlabel},
                         {"ylabel", p.ylabel},
                         {"x", p.x_series},
                         {"y", p.y_series},
                         {"log_x", p.log_x},
                         {"log_y", p.log_y},
                         {"scatter", p.scatter}});
    j["plots"] = std::move(plots);
    j["tables"] = r.tables;
    json verdicts = json::array();
    for (const auto& v : r.verdicts)
        verdicts.push_back({{"claim", v.claim},
                            {"predicted", v.predicted},
                            {"measured", v.measured},
                            {"tolerance", v.tolerance},
                            {"pass", v.pass},
                            {"detail", v.detail}});
    j["verdicts"] = std::move(verdicts);
    return j.dump(1);
}

ExperimentReport report_from_json(std::string_view text) {
    const json j = json::parse(text);
    if (j.value("format", "") != "pinnlab-report") throw std::runtime_error("not a pinnlab report");
    ExperimentReport r;
    r.id = j.at("id").get<std::string>();
    r.inconclusive = j.at("inconclusive").get<bool>();
    r.note = j.at("note").get<std::string>();
    const json& prov = j.at("provenance");
    r.config_hash = prov.at("config_hash").get<std::string>();
    r.seed = prov.at("seed").get<std::uint64_t>();
    r.cache_keys = prov.at("cache_keys").get<std::vector<std::string>>();
    r.metrics = j.at("metrics").get<std::map<std::string, double>>();
    r.series = j.at("series").get<std::map<std::string, std::vector<double>>>();
    for (const auto& [name, f] : j.at("fields").items()) r.fields.emplace(name, field_from(f));
    for (const auto& p : j.at("plots"))
        r.plots.push_back({p.at("name").get<std::string>(), p.at("title").get<std::string>(),
                           p.at("xlabel").get<std::string>(), p.at("ylabel").get<std::string>(),
                           p.at("x").get<std::string>(), p.at("y").get<std::vector<std::string>>(),
                           p.at("log_x").get<bool>(), p.at("log_y").get<bool>(), p.at("scatter").get<bool>()});
    r.tables = j.at("tables").get<std::map<std::string, std::vector<std::string>>>();
    for (const auto& v : j.at("verdicts"))
        r.verdicts.push_back({v.at("claim").get<std::string>(), v.at("predicted").get<double>(),
                              v.at("measured").get<double>(), v.at("tolerance").get<double>(),
                              v.at("pass").get<bool>(), v.at("detail").get<std::string>()});
    r.validate();
    return r;
}

std::string series_to_csv(const ExperimentReport& r, const std::vector<std::string>& names) {
    std::size_t n = 0;
    for (const auto& name : names) {
        const auto it = r.series.find(name);
        if (it == r.series.end()) throw std::out_of_range("no series '" + name + "'");
        if (&name != &names.front() && it->second.size() != n)
            throw std::invalid_argument("series '" + name + "' has a different length");
        n = it->second.size();
    }
    std::ostringstream os;
    os.precision(17);
    for (std::size_t k = 0; k < names.size(); ++k) os << (k ? "," : "") << names[k];
    os << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < names.size(); ++k) os << (k ? "," : "") << r.series.at(names[k])[i];
        os << '\n';
    }
    return os.str();
}

}  // namespace pinnlab
