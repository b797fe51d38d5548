#include "lab_cli.hpp"

#include "pinnlab/io.hpp"
#include "pinnlab/plot.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>
#include <type_traits>

namespace pinnlab::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSchemaPointer = "docs/lab-config.toml (or `pinnlab config`)";

Activation activation_or_throw(const std::string& name) {
    if (auto a = parse_activation(name)) return *a;
    throw std::invalid_argument("unknown activation '" + name + "' (sigmoid | tanh | relu)");
}

Optimizer optimizer_or_throw(const std::string& name) {
    if (auto o = parse_optimizer(name)) return *o;
    throw std::invalid_argument("unknown optimizer '" + name + "' (sgd | adam)");
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::string metrics_csv(const ExperimentReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "metric,value\n";
    for (const auto& [k, v] : r.metrics) os << csv_cell(k) << ',' << v << '\n';
    return os.str();
}

std::string verdicts_csv(const ExperimentReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "claim,predicted,measured,tolerance,pass,detail\n";
    for (const auto& v : r.verdicts)
        os << csv_cell(v.claim) << ',' << v.predicted << ',' << v.measured << ',' << v.tolerance << ','
           << (v.pass ? "true" : "false") << ',' << csv_cell(v.detail) << '\n';
    return os.str();
}

// out/<name>/<UTC timestamp>, suffixed when two runs land in the same millisecond.
fs::path fresh_run_dir(const fs::path& root, const std::string& name) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%S", &tm);
    char stamp[48];
    std::snprintf(stamp, sizeof stamp, "%s.%03dZ", buf, int(ms));
    fs::path dir = root / name / stamp;
    for (int k = 2; fs::exists(dir); ++k) dir = root / name / (std::string(stamp) + "-" + std::to_string(k));
    fs::create_directories(dir);
    return dir;
}

// Everything derived from report.json; `report` re-runs exactly this.
void render(const ExperimentReport& r, const fs::path& dir, bool plots) {
    write_text(dir / "metrics.csv", metrics_csv(r));
    write_text(dir / "verdicts.csv", verdicts_csv(r));
    for (const auto& [stem, names] : r.tables) write_text(dir / (stem + ".csv"), series_to_csv(r, names));
    if (!plots) return;
    std::vector<std::string> warnings;
    emit_plots(r, dir, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void write_report(const ExperimentReport& r, const fs::path& dir, bool plots) {
    write_text(dir / "report.json", report_to_json(r));
    render(r, dir, plots);
}

int exit_code(Outcome o) {
    switch (o) {
        case Outcome::pass:
            return 0;
        case Outcome::inconclusive:
            return 2;
        case Outcome::fail:
            break;
    }
    return 1;
}

// A failed verdict outranks an inconclusive run.
int combine(int a, int b) {
    if (a == 1 || b == 1) return 1;
    return std::max(a, b);
}

void print_summary(const ExperimentReport& r, const fs::path& dir) {
    for (const auto& v : r.verdicts)
        std::cout << "  " << (v.pass ? "PASS " : "FAIL ") << v.claim << "  (measured " << v.measured << ")\n";
    std::cout << r.id << ": " << to_string(r.outcome());
    if (!r.note.empty()) std::cout << "  [" << r.note << "]";
    std::cout << "  -> " << dir.string() << '\n';
}

ExperimentReport run_experiment(const std::string& id, const LabConfig& cfg, const RunContext& ctx) {
    if (id == "A") return exp_A_nonuniqueness(to_config_A(cfg));
    if (id == "B") return exp_B_characteristics(to_config_B(cfg), ctx);
    if (id == "C") return exp_C_nonlocality(to_config_C(cfg));
    if (id == "D1") return exp_D1_step_limits(to_config_D1(cfg));
    if (id == "D2") return exp_D2_precision_floor(to_config_D2(cfg), ctx);
    if (id == "E") return exp_E_burgers(to_config_E(cfg), ctx);
    throw std::invalid_argument("unknown experiment '" + id + "'");
}

LossWeights weights_of(const LabConfig& c) { return {c.lambda_res, c.lambda_ic, 1.0}; }

SolutionField reference_field(const std::string& problem, const CauchyProblem& p, const Grid& g, const LabConfig& cfg,
                              std::vector<std::string>& notes) {
    if (problem == "transport") return solve_transport_exact(1.0, 0.0, p.initial, g);
    if (problem == "hamilton-jacobi") return hj_family(0.0, g);
    if (problem == "heat") {
        // Gaussian tails past |x| = 12 are below 1e-31.
        return solve_heat_kernel({p.initial, -12.0, 12.0, 1.0}, g);
    }
    BurgersSettings s;
    s.modes = cfg.e_modes;
    s.dt = cfg.e_dt;
    bool cached = false;
    SolutionField f = cached_burgers_reference(s, g, cfg.cache, &cached);
    notes.push_back(std::string(cached ? "loaded " : "stored ") + "cache key burgers-" + burgers_cache_key(s, g));
    return f;
}

}  // namespace

namespace {

// Single list of fields shared by option binding and TOML rendering.
template <class V>
void visit_fields(LabConfig& c, V&& v) {
    v("out", c.out, "root directory for run artifacts");
    v("cache", c.cache, "reference-solution cache directory");
    v("seed", c.seed, "master seed; sweep cells derive their own");
    v("jobs", c.jobs, "concurrent experiment cells");
    v("plots", c.plots, "write SVG plots");

    v("a-values", c.a_values, "A: slopes a of the zero-loss family");

    v("b-arch", c.b_arch, "B: layer sizes, input 2 and output 1");
    v("b-activation", c.b_activation, "B: sigmoid | tanh | relu");
    v("b-optimizer", c.b_optimizer, "B: sgd | adam");
    v("b-lr", c.b_lr, "B: learning rate");
    v("b-steps", c.b_steps, "B: training steps");
    v("b-nx", c.b_nx, "B: collocation grid columns");
    v("b-nt", c.b_nt, "B: collocation grid rows");
    v("b-initial", c.b_initial, "B: initial-condition points");

    v("amplitudes", c.amplitudes, "C: far-bump amplitudes, ascending");
    v("bump-scale", c.bump_scale, "C: far bump is A * scale * bump(x - 3)");

    v("ns", c.ns, "D1: construction indices n");

    v("ps", c.ps, "D2: mantissa bits");
    v("dxs", c.dxs, "D2: data spacings");
    v("d2-optimizer", c.d2_optimizer, "D2: sgd | adam");
    v("d2-lr-dx", c.d2_lr_dx, "D2: learning rate times dx");
    v("d2-max-steps", c.d2_max_steps, "D2: step cap per cell");

    v("e-width", c.e_width, "E: hidden width of the main runs");
    v("e-hidden", c.e_hidden, "E: hidden layers of the main runs");
    v("e-steps", c.e_steps, "E: steps of the main runs");
    v("e-sweep-steps", c.e_sweep_steps, "E: steps per sweep cell");
    v("e-adam-lr", c.e_adam_lr, "E: PINN Adam learning rate");
    v("e-sgd-lr", c.e_sgd_lr, "E: PINN SGD learning rate");
    v("e-data-lr", c.e_data_lr, "E: data-fit Adam learning rate");
    v("e-batch", c.e_batch, "E: minibatch per loss term; 0 = full batch");
    v("e-collocation", c.e_collocation, "E: interior collocation points");
    v("e-samples", c.e_samples, "E: reference samples for the data fit");
    v("e-widths", c.e_widths, "E: width sweep");
    v("e-depths", c.e_depths, "E: depth sweep");
    v("e-modes", c.e_modes, "E: spectral collocation points");
    v("e-dt", c.e_dt, "E: spectral time step bound");

    v("train-arch", c.train_arch, "train: layer sizes");
    v("train-activation", c.train_activation, "train: sigmoid | tanh | relu");
    v("train-optimizer", c.train_optimizer, "train: sgd | adam");
    v("train-lr", c.train_lr, "train: learning rate");
    v("train-steps", c.train_steps, "train: steps");
    v("train-batch", c.train_batch, "train: minibatch per term; 0 = full batch");
    v("train-bits", c.train_bits, "train: simulated mantissa bits, 0 = off");
    v("lambda-res", c.lambda_res, "residual loss weight (B, E, train)");
    v("lambda-ic", c.lambda_ic, "initial-condition loss weight (B, E, train)");
}

std::string toml_value(const std::string& s) {
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') q += '\\';
        q += ch;
    }
    return q + "\"";
}
std::string toml_value(bool b) { return b ? "true" : "false"; }
std::string toml_value(double d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}
template <class T>
    requires std::is_integral_v<T>
std::string toml_value(T v) {
    return std::to_string(v);
}
template <class T>
std::string toml_value(const std::vector<T>& v) {
    std::string s = "[";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + toml_value(v[k]);
    return s + "]";
}

}  // namespace

void add_lab_options(CLI::App& app, LabConfig& c) {
    visit_fields(c, [&app](const char* key, auto& field, const char* desc) {
        CLI::Option* o = app.add_option(std::string("--") + key, field, desc)->capture_default_str();
        if constexpr (requires { field.push_back(field.front()); }) o->delimiter(',');
    });
    app.get_option("--jobs")->check(CLI::PositiveNumber);
}

LabConfig parse_config(std::istream& in) {
    LabConfig cfg;
    CLI::App app;
    add_lab_options(app, cfg);
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.parse_from_stream(in);
    return cfg;
}

std::string serialize_config(const LabConfig& cfg, bool descriptions) {
    LabConfig copy = cfg;
    std::ostringstream os;
    visit_fields(copy, [&](const char* key, const auto& field, const char* desc) {
        if (descriptions) os << "# " << desc << '\n';
        os << key << " = " << toml_value(field) << '\n';
        if (descriptions) os << '\n';
    });
    return os.str();
}

ConfigA to_config_A(const LabConfig& c) {
    ConfigA a;
    a.as = c.a_values;
    return a;
}

ConfigB to_config_B(const LabConfig& c) {
    ConfigB b;
    b.architecture = c.b_arch;
    b.activation = activation_or_throw(c.b_activation);
    b.train.optimizer = optimizer_or_throw(c.b_optimizer);
    b.train.learning_rate = c.b_lr;
    b.train.steps = c.b_steps;
    b.train.weights = weights_of(c);
    b.counts = {c.b_nx, c.b_nt, c.b_initial};
    return b;
}

ConfigC to_config_C(const LabConfig& c) {
    ConfigC cc;
    cc.amplitudes = c.amplitudes;
    cc.bump_scale = c.bump_scale;
    return cc;
}

ConfigD1 to_config_D1(const LabConfig& c) {
    ConfigD1 d;
    d.ns = c.ns;
    return d;
}

ConfigD2 to_config_D2(const LabConfig& c) {
    ConfigD2 d;
    d.ps = c.ps;
    d.dxs = c.dxs;
    d.optimizer = optimizer_or_throw(c.d2_optimizer);
    d.lr_times_dx = c.d2_lr_dx;
    d.max_steps = c.d2_max_steps;
    return d;
}

ConfigE to_config_E(const LabConfig& c) {
    ConfigE e;
    e.reference.modes = c.e_modes;
    e.reference.dt = c.e_dt;
    e.width = c.e_width;
    e.hidden_layers = c.e_hidden;
    for (TrainConfig* t : {&e.pinn_adam, &e.pinn_sgd, &e.data}) {
        t->steps = c.e_steps;
        t->batch_size = c.e_batch;
        t->weights = weights_of(c);
    }
    e.pinn_adam.learning_rate = c.e_adam_lr;
    e.pinn_sgd.learning_rate = c.e_sgd_lr;
    e.data.learning_rate = c.e_data_lr;
    e.sweep_steps = c.e_sweep_steps;
    e.collocation = c.e_collocation;
    e.data_samples = c.e_samples;
    e.widths = c.e_widths;
    e.depths = c.e_depths;
    return e;
}

int run(int argc, const char* const* argv) {
    LabConfig cfg;
    CLI::App app{"pinnlab: PINN failure-mode laboratory"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML file of option values (keys are option names without dashes)");
    app.allow_config_extras(CLI::config_extras_mode::error);
    bool quiet = false;
    app.add_flag("--quiet,-q", quiet, "suppress progress lines")->configurable(false);
    add_lab_options(app, cfg);

    std::string exp_id;
    auto* exp = app.add_subcommand("exp", "run an experiment and write out/<exp>/<timestamp>/")->fallthrough();
    exp->add_option("id", exp_id, "A | B | C | D1 | D2 | E | all")
        ->required()
        ->check(CLI::IsMember({"A", "B", "C", "D1", "D2", "E", "all"}));

    std::string ref_problem;
    Eigen::Index ref_nx = 201, ref_nt = 101;
    auto* solve_ref = app.add_subcommand("solve-ref", "tabulate a reference solution on a grid")->fallthrough();
    solve_ref->add_option("problem", ref_problem, "transport | hamilton-jacobi | heat | burgers")
        ->required()
        ->check(CLI::IsMember({"transport", "hamilton-jacobi", "heat", "burgers"}));
    solve_ref->add_option("--nx", ref_nx, "grid columns")->capture_default_str();
    solve_ref->add_option("--nt", ref_nt, "grid rows")->capture_default_str();

    std::string train_problem;
    CollocationCounts train_counts;
    auto* train_cmd = app.add_subcommand("train", "train a PINN on a named problem")->fallthrough();
    train_cmd->add_option("problem", train_problem, "transport | hamilton-jacobi | heat | burgers")
        ->required()
        ->check(CLI::IsMember({"transport", "hamilton-jacobi", "heat", "burgers"}));
    train_cmd->add_option("--nx", train_counts.nx, "collocation grid columns")->capture_default_str();
    train_cmd->add_option("--nt", train_counts.nt, "collocation grid rows")->capture_default_str();
    train_cmd->add_option("--n-initial", train_counts.n_initial, "initial-condition points")->capture_default_str();

    int gc_configs = 100;
    auto* gradcheck = app.add_subcommand("gradcheck", "parameter gradients against central differences")->fallthrough();
    gradcheck->add_option("--configs", gc_configs, "random configurations per activation")->capture_default_str();

    std::string report_dir;
    auto* report = app.add_subcommand("report", "re-render CSV tables and plots from <dir>/report.json")->fallthrough();
    report->add_option("dir", report_dir, "run directory")->required()->check(CLI::ExistingDirectory);

    bool config_descriptions = true;
    auto* config = app.add_subcommand("config", "print the effective configuration as TOML")->fallthrough();
    config->add_flag("!--bare", config_descriptions, "omit descriptions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ConfigError& e) {
        std::cerr << app.get_formatter()->make_help(&app, "pinnlab", CLI::AppFormatMode::Normal)
                  << "\nconfig error (unknown or malformed key): " << e.what() << "\nschema: " << kSchemaPointer << '\n';
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    RunContext ctx;
    ctx.seed = cfg.seed;
    ctx.jobs = cfg.jobs;
    ctx.cache_dir = cfg.cache;
    if (!quiet) ctx.progress = [](const std::string& s) { std::cerr << s << std::endl; };

    try {
        if (*exp) {
            std::vector<std::string> ids = {exp_id};
            if (exp_id == "all") ids = {"A", "B", "C", "D1", "D2", "E"};
            int code = 0;
            for (const auto& id : ids) {
                ctx.say("running " + id);
                ExperimentReport r = run_experiment(id, cfg, ctx);
                if (r.seed == 0) r.seed = cfg.seed;
                const fs::path dir = fresh_run_dir(cfg.out, id);
                write_report(r, dir, cfg.plots);
                print_summary(r, dir);
                code = combine(code, exit_code(r.outcome()));
            }
            return code;
        }

        if (*report) {
            const fs::path dir = report_dir;
            const ExperimentReport r = report_from_json(read_text(dir / "report.json"));
            render(r, dir, true);
            print_summary(r, dir);
            return exit_code(r.outcome());
        }

        if (*config) {
            std::cout << serialize_config(cfg, config_descriptions);
            return 0;
        }

        if (*gradcheck) {
            const GradcheckSummary s = gradient_check(gc_configs, cfg.seed);
            std::cout << "configurations " << s.configurations << ", components " << s.components
                      << ", skipped at ReLU kinks " << s.skipped_kinks << '\n';
            std::cout << "max relative deviation " << s.max_deviation << '\n';
            if (!s.worst.empty()) std::cout << "worst: " << s.worst << '\n';
            return s.max_deviation < 1e-4 ? 0 : 1;
        }

        if (*solve_ref) {
            const CauchyProblem p = *make_problem(ref_problem);
            const Grid g{p.domain.x_lo, p.domain.x_hi, ref_nx, 0.0, p.domain.t_hi, ref_nt};
            g.validate();
            std::vector<std::string> notes;
            const SolutionField f = reference_field(ref_problem, p, g, cfg, notes);
            const fs::path dir = fresh_run_dir(cfg.out, "solve-ref-" + ref_problem);
            save_field_csv(f, dir / "field.csv");
            save_field_binary(f, dir / "field.bin");
            if (cfg.plots) write_text(dir / "field.svg", svg_heatmap(f, ref_problem + " reference"));
            for (const auto& n : notes) std::cout << n << '\n';
            std::cout << ref_problem << ": " << g.nx << " x " << g.nt << " -> " << dir.string() << '\n';
            return 0;
        }

        if (*train_cmd) {
            const CauchyProblem p = *make_problem(train_problem);
            TrainConfig tc;
            tc.optimizer = optimizer_or_throw(cfg.train_optimizer);
            tc.learning_rate = cfg.train_lr;
            tc.steps = cfg.train_steps;
            tc.batch_size = cfg.train_batch;
            tc.weights = weights_of(cfg);
            tc.seed = derive_seed(cfg.seed, 1);
            tc.log_every = std::max(1L, cfg.train_steps / 100);
            if (cfg.train_bits > 0) tc.precision = PrecisionSimulation{cfg.train_bits, 1.0, true};
            tc.validate();
            const CollocationSet colloc = sample_collocation(p.domain, train_counts, Sampler::grid, cfg.seed);
            MlpParams net =
                init_mlp(cfg.train_arch, activation_or_throw(cfg.train_activation), derive_seed(cfg.seed, 0));
            ctx.say("training " + train_problem + " for " + std::to_string(tc.steps) + " steps");
            const TrainResult res = train(std::move(net), p, colloc, tc);

            const fs::path dir = fresh_run_dir(cfg.out, "train-" + train_problem);
            save_checkpoint(res.params, dir / "checkpoint.json");
            write_text(dir / "train_log.csv", res.log.to_csv());
            const Grid g{p.domain.x_lo, p.domain.x_hi, 201, 0.0, p.domain.t_hi, 101};
            const SolutionField pred =
                SolutionField::tabulate(g, [&](double x, double t) { const double in[2] = {x, t};
                    return eval(res.params, in);
                });
            save_field_csv(pred, dir / "prediction.csv");
            if (cfg.plots) write_text(dir / "prediction.svg", svg_heatmap(pred, train_problem + " PINN"));

            const PinnLoss loss = pinn_loss(res.params, p, colloc, tc.weights);
            std::cout << "status " << to_string(res.status) << " after " << res.steps_taken << " steps\n";
            std::cout << "loss " << loss.total << " (residual " << loss.residual_part << ", initial " << loss.ic_part
                      << ")\n";
            if (train_problem != "burgers" && train_problem != "hamilton-jacobi") {
                std::vector<std::string> notes;
                const SolutionField ref = reference_field(train_problem, p, g, cfg, notes);
                std::cout << "L2 error vs reference " << l2_field_error(pred, ref) << '\n';
            }
            std::cout << "-> " << dir.string() << '\n';
            if (!res.diagnostic.empty()) std::cerr << res.diagnostic << '\n';
            return res.status == TrainStatus::completed || res.status == TrainStatus::converged ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace pinnlab::cli
