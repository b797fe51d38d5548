#include "pinnlab/io.hpp"

#include "pinnlab/errors.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pinnlab {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

std::string checkpoint_to_json(const MlpParams& net) {
    net.validate();
    const Eigen::VectorXd theta = flatten(net);
    json j;
    j["format"] = "pinnlab-mlp";
    j["version"] = 1;
    j["architecture"] = net.architecture();
    j["activation"] = to_string(net.activation);
    j["activate_output"] = net.activate_output;
    j["params"] = std::vector<double>(theta.data(), theta.data() + theta.size());
    return j.dump(1);
}

MlpParams checkpoint_from_json(std::string_view text) {
    const json j = json::parse(text);
    if (j.value("format", "") != "pinnlab-mlp") throw std::runtime_error("not a pinnlab checkpoint");
    if (j.value("version", 0) != 1) throw std::runtime_error("unsupported checkpoint version");
    const auto arch = j.at("architecture").get<std::vector<Eigen::Index>>();
    const auto act = parse_activation(j.at("activation").get<std::string>());
    if (!act) throw std::runtime_error("checkpoint: unknown activation");
    MlpParams net = init_mlp(arch, *act, 0, j.at("activate_output").get<bool>());
    const auto params = j.at("params").get<std::vector<double>>();
    if (Eigen::Index(params.size()) != net.parameter_count())
        throw StructureError("checkpoint: parameter count does not match architecture");
    unflatten(net, Eigen::Map<const Eigen::VectorXd>(params.data(), Eigen::Index(params.size())));
    net.validate();
    return net;
}

void save_checkpoint(const MlpParams& net, const fs::path& file) { write_text(file, checkpoint_to_json(net)); }

MlpParams load_checkpoint(const fs::path& file) { return checkpoint_from_json(read_text(file)); }

std::string field_to_csv(const SolutionField& field) {
    std::ostringstream os;
    os.precision(17);
    os << "x,t,u\n";
    for (Eigen::Index j = 0; j < field.grid.nt; ++j)
        for (Eigen::Index i = 0; i < field.grid.nx; ++i)
            os << field.grid.x(i) << ',' << field.grid.t(j) << ',' << field.values(i, j) << '\n';
    return os.str();
}

void save_field_csv(const SolutionField& field, const fs::path& file) { write_text(file, field_to_csv(field)); }

namespace {

constexpr char kFieldMagic[8] = {'P', 'L', 'F', 'I', 'E', 'L', 'D', '1'};

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("truncated field file");
    return v;
}

void put_string(std::ostream& os, const std::string& s) {
    put<std::uint64_t>(os, s.size());
    os.write(s.data(), std::streamsize(s.size()));
}

std::string get_string(std::istream& is) {
    const auto n = get<std::uint64_t>(is);
    if (n > (1u << 20)) throw std::runtime_error("corrupt field file");
    std::string s(n, '\0');
    is.read(s.data(), std::streamsize(n));
    if (!is) throw std::runtime_error("truncated field file");
    return s;
}

}  // namespace

void save_field_binary(const SolutionField& field, const fs::path& file) {
    field.validate();
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    const fs::path tmp = file.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
        os.write(kFieldMagic, sizeof kFieldMagic);
        const Grid& g = field.grid;
        put(os, g.x_lo);
        put(os, g.x_hi);
        put<std::int64_t>(os, g.nx);
        put(os, g.t_lo);
        put(os, g.t_hi);
        put<std::int64_t>(os, g.nt);
        put<std::uint64_t>(os, field.metadata.size());
        for (const auto& [k, v] : field.metadata) {
            put_string(os, k);
            put_string(os, v);
        }
        os.write(reinterpret_cast<const char*>(field.values.data()),
                 std::streamsize(sizeof(double) * std::size_t(field.values.size())));
        if (!os) throw std::runtime_error("failed writing " + tmp.string());
    }
    fs::rename(tmp, file);
}

SolutionField load_field_binary(const fs::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + file.string());
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kFieldMagic, sizeof magic) != 0)
        throw std::runtime_error(file.string() + ": not a field file");
    Grid g;
    g.x_lo = get<double>(is);
    g.x_hi = get<double>(is);
    g.nx = get<std::int64_t>(is);
    g.t_lo = get<double>(is);
    g.t_hi = get<double>(is);
    g.nt = get<std::int64_t>(is);
    g.validate();
    std::map<std::string, std::string> meta;
    const auto n_meta = get<std::uint64_t>(is);
    for (std::uint64_t k = 0; k < n_meta; ++k) {
        std::string key = get_string(is);
        meta[key] = get_string(is);
    }
    Eigen::MatrixXd values(g.nx, g.nt);
    is.read(reinterpret_cast<char*>(values.data()), std::streamsize(sizeof(double) * std::size_t(values.size())));
    if (!is) throw std::runtime_error(file.string() + ": truncated values");
    SolutionField f(g, std::move(values), std::move(meta));
    f.validate();
    return f;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << v;
    return os.str();
}

std::string burgers_cache_key(const BurgersSettings& s, const Grid& g) {
    std::ostringstream os;
    os.precision(17);
    os << "burgers-etdrk4-v1|" << s.mu << '|' << s.nu << '|' << s.modes << '|' << s.dt << '|' << s.period_lo << '|'
       << s.period << '|' << g.x_lo << '|' << g.x_hi << '|' << g.nx << '|' << g.t_lo << '|' << g.t_hi << '|'
       << g.nt;
    return hex64(fnv1a(os.str()));
}

SolutionField cached_burgers_reference(const BurgersSettings& settings, const Grid& grid, const fs::path& cache_dir,
                                       bool* was_cached) {
    const fs::path file = cache_dir / ("burgers-" + burgers_cache_key(settings, grid) + ".bin");
    if (fs::exists(file)) {
        try {
            SolutionField f = load_field_binary(file);
            if (f.grid == grid) {
                if (was_cached) *was_cached = true;
                return f;
            }
        } catch (const std::exception&) {
            // stale or corrupt entry; recompute below
        }
    }
    if (was_cached) *was_cached = false;
    SolutionField f = solve_burgers_spectral(settings, grid).field;
    save_field_binary(f, file);
    return f;
}

void write_text(const fs::path& file, std::string_view text) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    os.write(text.data(), std::streamsize(text.size()));
}

std::string read_text(const fs::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + file.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace pinnlab
