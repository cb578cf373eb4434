#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "perpetuity/distributions.hpp"
#include "perpetuity/lst_solver.hpp"
#include "perpetuity/metrics.hpp"
#include "perpetuity/montecarlo.hpp"

namespace perpetuity::cli {

// Malformed configuration; the message names the file, line and key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RhoSpec {
    AtomicDistribution atoms = point_mass(1.0);
    std::optional<Family> family;  // set when atoms came from quantize_family
    std::string description;
};

struct RunConfig {
    RhoSpec rho;
    double m = 1.0;
    double lambda = 1.0;
    SolverOptions solver;
    McConfig mc;
    bool has_seed = false;  // mc.seed given explicitly
    RDeltaConfig metric;
    double q = 1.5;
    std::size_t contraction_pairs = 20;
    std::size_t contraction_samples = 10000;
    std::size_t moment_order = 6;
    std::size_t levy_samples = 0;  // 0: same as mc.n
    std::vector<double> steutel_probes{0.5, 1.0, 2.0, 4.0};
    double ks_factor = 1.5;
    double steutel_tol = 3e-3;
    double contraction_slack = 0.05;
    std::filesystem::path output_root = "runs";

    // effective key=value pairs (defaults included), sorted by key
    std::map<std::string, std::string> effective;

    // sha256 prefix of the canonical text, excluding output.*
    [[nodiscard]] std::string hash() const;
    [[nodiscard]] std::string canonical_text() const;
    [[nodiscard]] std::filesystem::path run_directory() const;
    // Throws ConfigError when a sampling command runs without mc.seed.
    void require_seed(std::string_view command) const;
};

struct Entry {
    std::string key;
    std::string value;
    std::string origin;  // "file:line" or "command line"
};
using Entries = std::vector<Entry>;

// Parses `key=value` lines; blank lines and lines starting with '#' are
// skipped. Throws ConfigError naming the source and line.
Entries parse_config_text(std::string_view text, const std::string& source);

// Builds the typed config from file entries then overrides (overrides win).
RunConfig build_config(const Entries& file_entries, const Entries& overrides,
                       const std::filesystem::path& base_dir = {});

// All recognized keys with their defaults.
const std::map<std::string, std::string>& default_values();

}  // namespace perpetuity::cli
