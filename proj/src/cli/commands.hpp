#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "config.hpp"
#include "perpetuity/distributions.hpp"

namespace perpetuity::cli {

// Exit codes. Each is a function of the written report:
//   0  all requested work done and every check passed
//   1  malformed config, unreadable or missing input, checksum mismatch
//   2  existence gate failed (E log A >= 0)
//   3  LST solver hit max_iter; artifacts carry converged=false
//   4  a verification check failed (report lists which)
enum ExitCode : int { kOk = 0, kInputError = 1, kNoSolution = 2, kNotConverged = 3, kCheckFailed = 4 };

enum class SolveMethod { lst, mc, both };

// Artifacts land in cfg.run_directory(); manifest.json lists {path, sha256}
// for every file written there, sorted by path.
class RunDirectory {
public:
    explicit RunDirectory(const RunConfig& cfg);

    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }
    [[nodiscard]] std::filesystem::path path(std::string_view name) const { return root_ / name; }

    void write_text(std::string_view name, std::string_view text);
    void write_json(std::string_view name, const nlohmann::json& j);
    void write_sample(std::string_view name, const EmpiricalSample& sample);
    void write_response(std::string_view name, const ResponseFunction& h);

private:
    void record(const std::string& name);
    void flush_manifest() const;

    std::filesystem::path root_;
    std::map<std::string, std::string> manifest_;
};

int cmd_diagnose(const RunConfig& cfg, std::ostream& out);
int cmd_response(const RunConfig& cfg, std::ostream& out);
int cmd_solve(const RunConfig& cfg, SolveMethod method, std::ostream& out);
int cmd_moments(const RunConfig& cfg, std::ostream& out);
int cmd_levy(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, bool negative_control, bool from_artifacts, std::ostream& out);
int cmd_metric(const RunConfig& cfg, std::ostream& out);

// Full command line entry point; never throws.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace perpetuity::cli
