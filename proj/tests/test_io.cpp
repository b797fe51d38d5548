#include "pinnlab/io.hpp"
#include "pinnlab/plot.hpp"
#include "pinnlab/report.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace pinnlab;
namespace fs = std::filesystem;

namespace {

ExperimentReport sample_report() {
    ExperimentReport r;
    r.id = "T";
    r.metrics["alpha"] = 0.1 + 0.2;  // not representable exactly; must survive the round trip
    r.metrics["beta"] = -1e-300;
    r.series["x"] = {1.0, 2.0, 4.0, 8.0};
    r.series["y"] = {1.0, 0.5, 0.25, 0.125};
    r.tables["xy"] = {"x", "y"};
    r.plots.push_back({"decay", "decay", "x", "y", "x", {"y"}, true, true, true});
    r.fields["f"] = SolutionField::tabulate({-1.0, 1.0, 9, 0.0, 1.0, 5}, [](double x, double t) { return x * t; },
                                            {{"source", "test"}});
    r.check("halving", 0.5, 0.5, 1e-12, true, "ratio");
    r.config_hash = "abc";
    r.seed = 77;
    r.cache_keys = {"k1"};
    return r;
}

}  // namespace

TEST_CASE("checkpoint round trip is exact") {
    const MlpParams net = init_mlp(std::vector<Eigen::Index>{2, 7, 3, 1}, Activation::relu, 12, true);
    const MlpParams back = checkpoint_from_json(checkpoint_to_json(net));
    CHECK(back == net);
    testutil::TempDir tmp;
    save_checkpoint(net, tmp.path / "c" / "net.json");
    CHECK(load_checkpoint(tmp.path / "c" / "net.json") == net);
    CHECK_THROWS(checkpoint_from_json(R"({"format": "other", "version": 1})"));
    CHECK_THROWS(checkpoint_from_json(
        R"({"format": "pinnlab-mlp", "version": 1, "architecture": [2, 1], "activation": "tanh",
            "activate_output": false, "params": [1, 2]})"));
    CHECK_THROWS(load_checkpoint(tmp.path / "missing.json"));
}

TEST_CASE("field CSV and binary") {
    const Grid g{-1.0, 1.0, 3, 0.0, 1.0, 2};
    const SolutionField f = SolutionField::tabulate(g, [](double x, double t) { return x + 10 * t; }, {{"k", "v"}});
    const std::string csv = field_to_csv(f);
    CHECK(csv.rfind("x,t,u\n-1,0,-1\n0,0,0\n1,0,1\n", 0) == 0);
    testutil::TempDir tmp;
    save_field_binary(f, tmp.path / "f.bin");
    CHECK(load_field_binary(tmp.path / "f.bin") == f);
    {
        std::ofstream bad(tmp.path / "bad.bin", std::ios::binary);
        bad << "NOTAFIELD";
    }
    CHECK_THROWS(load_field_binary(tmp.path / "bad.bin"));
}

TEST_CASE("hashing") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
    CHECK(hex64(0xabcull) == "0000000000000abc");
    BurgersSettings s;
    const Grid g{};
    const std::string k = burgers_cache_key(s, g);
    CHECK(k == burgers_cache_key(s, g));
    BurgersSettings s2 = s;
    s2.modes = 8000;
    CHECK(k != burgers_cache_key(s2, g));
    Grid g2 = g;
    g2.nt = 51;
    CHECK(k != burgers_cache_key(s, g2));
}

TEST_CASE("Burgers reference cache") {
    testutil::TempDir tmp;
    BurgersSettings s;
    s.nu = 0.05;
    s.modes = 256;
    s.dt = 1e-3;
    const Grid g{-1.0, 1.0, 21, 0.0, 1.0, 3};
    bool cached = true;
    const SolutionField a = cached_burgers_reference(s, g, tmp.path, &cached);
    CHECK_FALSE(cached);
    const SolutionField b = cached_burgers_reference(s, g, tmp.path, &cached);
    CHECK(cached);
    CHECK(a == b);
    CHECK(fs::exists(tmp.path / ("burgers-" + burgers_cache_key(s, g) + ".bin")));
}

TEST_CASE("report JSON round trip is lossless") {
    const ExperimentReport r = sample_report();
    const ExperimentReport back = report_from_json(report_to_json(r));
    CHECK(back == r);
    CHECK(back.metrics.at("alpha") == 0.1 + 0.2);
    CHECK(report_to_json(back) == report_to_json(r));
}

TEST_CASE("report outcome and validation") {
    ExperimentReport r = sample_report();
    CHECK(r.outcome() == Outcome::pass);
    r.check("broken", 1.0, 2.0, 0.1, false);
    CHECK(r.outcome() == Outcome::fail);
    r.inconclusive = true;
    CHECK(r.outcome() == Outcome::inconclusive);
    r.metrics["nan"] = std::nan("");
    CHECK_THROWS_AS(r.validate(), std::domain_error);
    CHECK_THROWS(report_to_json(r));
    CHECK_THROWS(report_from_json(R"({"format": "nope"})"));
}

TEST_CASE("series CSV") {
    const ExperimentReport r = sample_report();
    CHECK(series_to_csv(r, {"x", "y"}) == "x,y\n1,1\n2,0.5\n4,0.25\n8,0.125\n");
    CHECK_THROWS(series_to_csv(r, {"x", "missing"}));
    ExperimentReport bad = r;
    bad.series["z"] = {1.0};
    CHECK_THROWS(series_to_csv(bad, {"x", "z"}));
}

TEST_CASE("SVG output is deterministic") {
    const ExperimentReport r = sample_report();
    const std::string h1 = svg_heatmap(r.fields.at("f"), "f"), h2 = svg_heatmap(r.fields.at("f"), "f");
    CHECK(h1 == h2);
    CHECK(h1.rfind("<svg", 0) == 0);
    const std::vector<Curve> c{{"y", r.series.at("x"), r.series.at("y")}};
    const std::string p = svg_plot(c, r.plots[0]);
    CHECK(p == svg_plot(c, r.plots[0]));
    // least-squares slope in log-log axes is -1
    CHECK(p.find("slope -1<") != std::string::npos);
}

TEST_CASE("emit_plots") {
    testutil::TempDir tmp;
    ExperimentReport empty;
    empty.id = "empty";
    CHECK(emit_plots(empty, tmp.path / "e").empty());

    const ExperimentReport r = sample_report();
    const auto files = emit_plots(r, tmp.path / "r");
    CHECK(files.size() == 2);  // one heatmap, one plot
    CHECK(fs::exists(tmp.path / "r" / "decay.svg"));
    CHECK(fs::exists(tmp.path / "r" / "f.svg"));

    ExperimentReport missing = r;
    missing.plots.push_back({"ghost", "ghost", "x", "y", "x", {"nowhere"}, false, false, false});
    std::vector<std::string> warnings;
    const auto files2 = emit_plots(missing, tmp.path / "m", &warnings);
    CHECK(files2.size() == 2);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("ghost") != std::string::npos);

    const std::string first = read_text(tmp.path / "r" / "decay.svg");
    emit_plots(report_from_json(report_to_json(r)), tmp.path / "r2");
    CHECK(read_text(tmp.path / "r2" / "decay.svg") == first);
}

TEST_CASE("text helpers") {
    testutil::TempDir tmp;
    write_text(tmp.path / "a" / "b" / "c.txt", "hello\n");
    CHECK(read_text(tmp.path / "a" / "b" / "c.txt") == "hello\n");
    CHECK_THROWS(read_text(tmp.path / "nope.txt"));
}
