#include "lab_cli.hpp"

#include "pinnlab/io.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sstream>

using namespace pinnlab;
using namespace pinnlab::cli;
namespace fs = std::filesystem;

namespace {

int run_args(std::vector<std::string> args) {
    args.insert(args.begin(), "pinnlab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(int(argv.size()), argv.data());
}

// The single run directory created under root/name.
fs::path only_run(const fs::path& root, const std::string& name) {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(root / name)) dirs.push_back(e.path());
    REQUIRE(dirs.size() == 1);
    return dirs.front();
}

std::size_t count_lines(const std::string& s) { return std::size_t(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("config round trip") {
    LabConfig c;
    c.seed = 17;
    c.b_lr = 0.00123456789012345;
    c.ps = {12, 24};
    c.out = "runs \"quoted\"";
    c.plots = false;
    const std::string text = serialize_config(c);
    std::istringstream in(text);
    const LabConfig back = parse_config(in);
    CHECK(back.seed == 17);
    CHECK(back.b_lr == c.b_lr);
    CHECK(back.ps == c.ps);
    CHECK(back.out == c.out);
    CHECK_FALSE(back.plots);
    CHECK(serialize_config(back) == text);

    std::istringstream described(serialize_config(LabConfig{}, true));
    CHECK(serialize_config(parse_config(described)) == serialize_config(LabConfig{}));
}

TEST_CASE("config parsing is strict") {
    std::istringstream unknown("seed = 3\nlearning_rate = 0.1\n");
    CHECK_THROWS_AS(parse_config(unknown), CLI::ConfigError);
    std::istringstream bad("seed = \"many\"\n");
    CHECK_THROWS(parse_config(bad));
    std::istringstream partial("b-steps = 12\n");
    const LabConfig c = parse_config(partial);
    CHECK(c.b_steps == 12);
    CHECK(c.e_steps == LabConfig{}.e_steps);
}

TEST_CASE("shipped config schema matches the defaults") {
    const char* src = std::getenv("PINNLAB_SOURCE_DIR");
    REQUIRE(src != nullptr);
    CHECK(read_text(fs::path(src) / "docs" / "lab-config.toml") == serialize_config(LabConfig{}, true));
}

TEST_CASE("exp A writes a report and exits 0") {
    testutil::TempDir tmp;
    const fs::path out = tmp.path / "out";
    CHECK(run_args({"-q", "exp", "A", "--out", out.string(), "--cache", (tmp.path / "c").string()}) == 0);
    const fs::path dir = only_run(out, "A");
    const ExperimentReport r = report_from_json(read_text(dir / "report.json"));
    std::size_t zero = 0;
    for (const auto& v : r.verdicts) zero += v.claim.rfind("zero loss", 0) == 0 && v.pass;
    CHECK(zero == 4);
    CHECK(fs::exists(dir / "metrics.csv"));
    CHECK(read_text(dir / "verdicts.csv").rfind("claim,predicted,measured,tolerance,pass,detail\n", 0) == 0);
    CHECK(fs::exists(dir / "distances.csv"));

    SUBCASE("report re-render is byte-identical") {
        std::vector<std::pair<fs::path, std::string>> before;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".svg" || e.path().extension() == ".csv")
                before.emplace_back(e.path(), read_text(e.path()));
        REQUIRE_FALSE(before.empty());
        for (const auto& [p, _] : before) fs::remove(p);
        CHECK(run_args({"-q", "report", dir.string()}) == 0);
        for (const auto& [p, text] : before) CHECK(read_text(p) == text);
    }
}

TEST_CASE("exp D2 sweep from the command line") {
    testutil::TempDir tmp;
    const fs::path out = tmp.path / "out";
    const int code = run_args({"-q", "exp", "D2", "--ps", "10,20,30", "--dxs", "0.1,0.01", "--out", out.string(),
                               "--plots=false"});
    CHECK((code == 0 || code == 1));
    const fs::path dir = only_run(out, "D2");
    CHECK(count_lines(read_text(dir / "sweep.csv")) == 7);
    CHECK_FALSE(fs::exists(dir / "scaling_10.svg"));
}

TEST_CASE("config file drives a run; malformed files fail") {
    testutil::TempDir tmp;
    const fs::path out = tmp.path / "out";
    write_text(tmp.path / "good.toml", "ns = [100, 1000]\nout = \"" + out.generic_string() + "\"\n");
    CHECK(run_args({"-q", "--config", (tmp.path / "good.toml").string(), "exp", "D1"}) == 0);
    const ExperimentReport r = report_from_json(read_text(only_run(out, "D1") / "report.json"));
    CHECK(r.metrics.count("sigmoid error n=100") == 1);
    CHECK(r.metrics.count("sigmoid error n=10") == 0);

    write_text(tmp.path / "bad.toml", "nss = [10, 20]\n");
    CHECK(run_args({"-q", "--config", (tmp.path / "bad.toml").string(), "exp", "D1"}) == 1);
}

TEST_CASE("usage errors") {
    CHECK(run_args({"frobnicate"}) == 1);
    CHECK(run_args({}) == 1);
    CHECK(run_args({"exp", "Z"}) == 1);
    CHECK(run_args({"--jobs", "0", "exp", "A"}) == 1);
    CHECK(run_args({"--help"}) == 0);
}

TEST_CASE("gradcheck subcommand") { CHECK(run_args({"gradcheck", "--configs", "3"}) == 0); }

TEST_CASE("solve-ref and train") {
    testutil::TempDir tmp;
    const fs::path out = tmp.path / "out";
    CHECK(run_args({"-q", "solve-ref", "transport", "--nx", "11", "--nt", "5", "--out", out.string()}) == 0);
    const fs::path ref = only_run(out, "solve-ref-transport");
    CHECK(load_field_binary(ref / "field.bin").values.rows() == 11);
    CHECK(count_lines(read_text(ref / "field.csv")) == 1 + 55);

    CHECK(run_args({"-q", "train", "heat", "--train-arch", "2,6,1", "--train-steps", "20", "--nx", "6", "--nt", "4",
                    "--n-initial", "8", "--out", out.string()}) == 0);
    const fs::path tr = only_run(out, "train-heat");
    CHECK(load_checkpoint(tr / "checkpoint.json").architecture() == std::vector<Eigen::Index>{2, 6, 1});
    CHECK(fs::exists(tr / "train_log.csv"));
    CHECK(run_args({"-q", "train", "wave", "--out", out.string()}) == 1);
}
