#include "config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "perpetuity/io.hpp"

namespace perpetuity::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    while (!s.empty()) {
        const auto comma = s.find(',');
        const auto item = trim(s.substr(0, comma));
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

// Typed reads with the origin of the key in every message.
class Reader {
public:
    Reader(std::map<std::string, std::string> values, std::map<std::string, std::string> origin)
        : values_(std::move(values)), origin_(std::move(origin)) {}

    const std::string& text(const std::string& key) const { return values_.at(key); }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        const auto it = origin_.find(key);
        const std::string where = it == origin_.end() ? "default" : it->second;
        throw ConfigError(where + ": field '" + key + "': " + what);
    }

    double real(const std::string& key) const { return parse_real(key, text(key)); }

    double parse_real(const std::string& key, std::string_view v) const {
        double x = 0.0;
        v = trim(v);
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
            fail(key, "expected a number, got '" + std::string(v) + "'");
        return x;
    }

    double positive(const std::string& key) const {
        const double x = real(key);
        if (!(x > 0.0) || !std::isfinite(x)) fail(key, "must be positive");
        return x;
    }

    std::uint64_t unsigned_int(const std::string& key) const {
        const std::string_view v = trim(text(key));
        std::uint64_t x = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
            fail(key, "expected a non-negative integer, got '" + std::string(v) + "'");
        return x;
    }

    std::size_t count(const std::string& key) const {
        const auto x = unsigned_int(key);
        if (x == 0) fail(key, "must be at least 1");
        return static_cast<std::size_t>(x);
    }

    std::vector<double> reals(const std::string& key) const {
        std::vector<double> out;
        for (const auto& item : split_list(text(key))) out.push_back(parse_real(key, item));
        return out;
    }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, std::string> origin_;
};

RhoSpec read_rho(const Reader& r, const std::filesystem::path& base_dir) {
    const bool has_atoms = !r.text("rho.atoms").empty();
    const bool has_family = !r.text("rho.family").empty();
    const bool has_csv = !r.text("rho.csv").empty();
    const int sources = int{has_atoms} + int{has_family} + int{has_csv};
    if (sources != 1) r.fail("rho.atoms", "exactly one of rho.atoms, rho.family, rho.csv must be set");

    RhoSpec spec;
    try {
        if (has_atoms) {
            std::vector<Atom> atoms;
            for (const auto& item : split_list(r.text("rho.atoms"))) {
                const auto colon = item.find(':');
                if (colon == std::string::npos) r.fail("rho.atoms", "expected location:weight, got '" + item + "'");
                atoms.push_back({r.parse_real("rho.atoms", item.substr(0, colon)),
                                 r.parse_real("rho.atoms", item.substr(colon + 1))});
            }
            spec.atoms = validate(std::move(atoms));
            spec.description = "atoms";
        } else if (has_family) {
            const std::string& name = r.text("rho.family");
            const std::size_t n = r.count("rho.n");
            if (name == "uniform01") {
                spec.family = Family::uniform01;
                spec.atoms = quantize_family(Family::uniform01, n);
            } else if (name == "quantile_table") {
                spec.family = Family::user_quantile_table;
                const auto table = r.reals("rho.quantiles");
                spec.atoms = quantize_family(Family::user_quantile_table, table.size(), table);
            } else {
                r.fail("rho.family", "unknown family '" + name + "' (uniform01, quantile_table)");
            }
            spec.description = name;
        } else {
            std::filesystem::path path = r.text("rho.csv");
            if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
            spec.atoms = io::atomic_from_csv(io::read_text(path), path.string());
            spec.description = "csv";
        }
    } catch (const std::invalid_argument& e) {
        r.fail(has_atoms ? "rho.atoms" : has_family ? "rho.family" : "rho.csv", e.what());
    }
    return spec;
}

}  // namespace

const std::map<std::string, std::string>& default_values() {
    static const std::map<std::string, std::string> defaults{
        {"rho.atoms", ""},
        {"rho.family", ""},
        {"rho.n", "512"},
        {"rho.quantiles", ""},
        {"rho.csv", ""},
        {"model.m", "1"},
        {"model.lambda", "1"},
        {"solver.s_min", "1e-3"},
        {"solver.s_max", "1e3"},
        {"solver.grid", "256"},
        {"solver.tol", "1e-13"},
        {"solver.max_iter", "100000"},
        {"mc.n", "200000"},
        {"mc.iterations", "40"},
        {"mc.seed", ""},
        {"mc.chunk_size", "8192"},
        {"mc.threads", "1"},
        {"metric.q", "1.5"},
        {"metric.s_lo", "1e-4"},
        {"metric.s_hi", "1e4"},
        {"metric.quad_points", "2048"},
        {"metric.pairs", "20"},
        {"metric.samples", "5000"},
        {"moments.order", "6"},
        {"levy.n", "0"},
        {"levy.probes", "0.5,1,2,4"},
        {"verify.ks_factor", "1.5"},
        {"verify.steutel_tol", "3e-3"},
        {"verify.contraction_slack", "0.05"},
        {"output.dir", "runs"},
    };
    return defaults;
}

Entries parse_config_text(std::string_view text, const std::string& source) {
    Entries out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const std::string_view line = trim(text.substr(0, nl));
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key=value");
        std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
        out.push_back({std::move(key), std::string(trim(line.substr(eq + 1))), source + ":" + std::to_string(line_no)});
    }
    return out;
}

RunConfig build_config(const Entries& file_entries, const Entries& overrides,
                       const std::filesystem::path& base_dir) {
    auto values = default_values();
    std::map<std::string, std::string> origin;
    for (const Entries* entries : {&file_entries, &overrides}) {
        for (const Entry& e : *entries) {
            if (!values.contains(e.key)) throw ConfigError(e.origin + ": unknown key '" + e.key + "'");
            values[e.key] = e.value;
            origin[e.key] = e.origin;
        }
    }

    const Reader r(values, origin);
    RunConfig cfg;
    cfg.rho = read_rho(r, base_dir);
    cfg.m = r.positive("model.m");
    cfg.lambda = r.positive("model.lambda");

    cfg.solver.s_min = r.positive("solver.s_min");
    cfg.solver.s_max = r.positive("solver.s_max");
    if (!(cfg.solver.s_max > cfg.solver.s_min)) r.fail("solver.s_max", "must exceed solver.s_min");
    cfg.solver.grid_size = r.count("solver.grid");
    if (cfg.solver.grid_size < 16) r.fail("solver.grid", "must be at least 16");
    cfg.solver.tol = r.positive("solver.tol");
    cfg.solver.max_iter = r.count("solver.max_iter");

    cfg.mc.n_samples = r.count("mc.n");
    if (cfg.mc.n_samples < 2) r.fail("mc.n", "must be at least 2");
    cfg.mc.n_transform_iterations = r.count("mc.iterations");
    cfg.mc.chunk_size = r.count("mc.chunk_size");
    cfg.mc.threads = static_cast<unsigned>(r.count("mc.threads"));
    cfg.has_seed = !trim(r.text("mc.seed")).empty();
    if (cfg.has_seed) cfg.mc.master_seed = r.unsigned_int("mc.seed");

    cfg.q = r.real("metric.q");
    if (!(cfg.q > 1.0 && cfg.q < 2.0)) r.fail("metric.q", "must lie in (1, 2)");
    cfg.metric.delta = cfg.q;
    cfg.metric.s_lo = r.positive("metric.s_lo");
    cfg.metric.s_hi = r.positive("metric.s_hi");
    if (!(cfg.metric.s_hi > cfg.metric.s_lo)) r.fail("metric.s_hi", "must exceed metric.s_lo");
    cfg.metric.quad_points = r.count("metric.quad_points");
    cfg.metric.threads = cfg.mc.threads;
    cfg.contraction_pairs = r.count("metric.pairs");
    cfg.contraction_samples = r.count("metric.samples");

    cfg.moment_order = r.count("moments.order");
    cfg.levy_samples = static_cast<std::size_t>(r.unsigned_int("levy.n"));
    cfg.steutel_probes = r.reals("levy.probes");
    for (double x : cfg.steutel_probes)
        if (!(x > 0.0)) r.fail("levy.probes", "probes must be positive");

    cfg.ks_factor = r.positive("verify.ks_factor");
    cfg.steutel_tol = r.positive("verify.steutel_tol");
    cfg.contraction_slack = r.real("verify.contraction_slack");
    cfg.output_root = r.text("output.dir");
    if (cfg.output_root.empty()) r.fail("output.dir", "must not be empty");

    cfg.effective = std::move(values);
    return cfg;
}

std::string RunConfig::canonical_text() const {
    // rho enters through its validated atoms so that equal laws share a run
    std::ostringstream os;
    os << "rho.sha256=" << io::sha256_hex(io::atomic_to_csv(rho.atoms)) << '\n';
    for (const auto& [key, value] : effective) {
        if (key.starts_with("rho.") || key.starts_with("output.") || key == "mc.threads") continue;
        os << key << '=' << value << '\n';
    }
    return os.str();
}

std::string RunConfig::hash() const { return io::sha256_hex(canonical_text()).substr(0, 16); }

std::filesystem::path RunConfig::run_directory() const { return output_root / ("run-" + hash()); }

void RunConfig::require_seed(std::string_view command) const {
    if (!has_seed) throw ConfigError("field 'mc.seed': command '" + std::string(command) + "' samples and needs an explicit seed");
}

}  // namespace perpetuity::cli
