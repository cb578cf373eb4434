#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "perpetuity/diagnostics.hpp"
#include "perpetuity/distributions.hpp"
#include "perpetuity/levy.hpp"
#include "perpetuity/lst_solver.hpp"
#include "perpetuity/metrics.hpp"
#include "perpetuity/montecarlo.hpp"
#include "perpetuity/response.hpp"

namespace perpetuity::io {

namespace fs = std::filesystem;
using nlohmann::json;

// Malformed input; line is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what);
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// A file does not match the checksum or row count in its sidecar.
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest text that reads back to the same double.
std::string format_double(double x);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const fs::path& path);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, std::string_view text);
void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

// Numeric CSV with a fixed header; returns the rows and, on request, the
// 1-based file line of each row.
std::vector<std::vector<double>> parse_csv(std::string_view text, const std::vector<std::string>& header,
                                           const std::string& source,
                                           std::vector<std::size_t>* line_numbers = nullptr);

// location,weight
std::string atomic_to_csv(const AtomicDistribution& d);
AtomicDistribution atomic_from_csv(std::string_view text, const std::string& source = "<csv>");
json atomic_to_json(const AtomicDistribution& d);
AtomicDistribution atomic_from_json(const json& j);

// Single-column `value` CSV plus <path>.json sidecar {seed, provenance, n, sha256}.
void write_sample(const fs::path& csv_path, const EmpiricalSample& sample);
EmpiricalSample read_sample(const fs::path& csv_path);
fs::path sidecar_path(const fs::path& path);

// value,duration plus sidecar {lambda}.
void write_response(const fs::path& csv_path, const ResponseFunction& h);
ResponseFunction read_response(const fs::path& csv_path);
// u,h pairs at the step boundaries, ready for plotting.
std::string response_curve_csv(const ResponseFunction& h);

// s,psi,phi
std::string grid_to_csv(const LstGrid& grid);
json grid_report(const LstGrid& grid);

// order,value plus sidecar {m, max_order, marginal_flag}
std::string moments_to_csv(const MomentVector& mv);
json moments_sidecar(const MomentVector& mv);

// x,cdf
std::string levy_to_csv(const LevyEstimate& est);
json steutel_to_json(const SteutelReport& r);

json diagnostics_to_json(const DiagnosticsReport& r);
// aligned two-column text table
std::string diagnostics_table(const DiagnosticsReport& r);

json perpetuity_to_json(const PerpetuityReport& r);
json contraction_to_json(const ContractionReport& r);

}  // namespace perpetuity::io
