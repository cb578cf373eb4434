#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <CLI11.hpp>

#include "perpetuity/diagnostics.hpp"
#include "perpetuity/io.hpp"
#include "perpetuity/levy.hpp"
#include "perpetuity/lst_solver.hpp"
#include "perpetuity/metrics.hpp"
#include "perpetuity/moments.hpp"
#include "perpetuity/montecarlo.hpp"
#include "perpetuity/random.hpp"
#include "perpetuity/response.hpp"

namespace perpetuity::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kSampleFile = "mc_sample.csv";

json atoms_json(const RunConfig& cfg) {
    json j = io::atomic_to_json(cfg.rho.atoms);
    return {{"source", cfg.rho.description}, {"atoms", j}};
}

json moment_json(const MomentVector& mv) {
    json j = io::moments_sidecar(mv);
    j["moments"] = mv.moments;
    return j;
}

EmpiricalSample solve_mc(const RunConfig& cfg, RunDirectory& dir, json& report) {
    const auto fp = mc_fixed_point(cfg.rho.atoms, cfg.m, cfg.mc);
    double worst = 0.0;
    for (const auto& it : fp.iterations)
        worst = std::max(worst, std::abs(it.raw_mean - cfg.m) / it.standard_error);
    const auto& v = fp.sample.values();
    const auto zeros = std::count_if(v.begin(), v.end(), [](double x) { return x < 1e-9; });
    report = {{"n", fp.sample.size()},
              {"iterations", cfg.mc.n_transform_iterations},
              {"seed", cfg.mc.master_seed},
              {"chunk_size", cfg.mc.chunk_size},
              {"zero_fraction", static_cast<double>(zeros) / static_cast<double>(v.size())},
              {"max_mean_deviation_in_se", worst},
              {"sample", kSampleFile}};
    dir.write_sample(kSampleFile, fp.sample);
    return fp.sample;
}

// Loads the run's sample, or solves inline when there is none.
EmpiricalSample obtain_sample(const RunConfig& cfg, RunDirectory& dir, bool from_artifacts, std::ostream& out) {
    const fs::path path = dir.path(kSampleFile);
    if (fs::exists(path) || from_artifacts) {
        if (!fs::exists(path)) throw io::IntegrityError("missing artifact " + path.string() + "; run `solve --method mc` first");
        return io::read_sample(path);
    }
    out << "no sample in " << dir.root().string() << ", solving inline\n";
    json ignored;
    return solve_mc(cfg, dir, ignored);
}

struct SweepResult {
    json report;
    bool pass = true;
};

SweepResult contraction_sweep(const RunConfig& cfg) {
    SweepResult res;
    const double bound = mellin(cfg.rho.atoms, cfg.q - 1.0);
    res.report = {{"q", cfg.q}, {"bound_g", bound}, {"bound_is_derived", true}, {"slack", cfg.contraction_slack}};
    if (!(bound < 1.0)) {
        res.pass = false;
        res.report["error"] = "E A^(q-1) >= 1: no contraction in r_q";
        res.report["pass"] = false;
        return res;
    }
    Rng rng(derive_seed(cfg.mc.master_seed, 0, 0, "contraction_pairs"));
    json pairs = json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < cfg.contraction_pairs; ++i) {
        const auto t1 = random_atomic_with_mean(rng, cfg.m);
        const auto t2 = random_atomic_with_mean(rng, cfg.m);
        McConfig mc = cfg.mc;
        mc.n_samples = cfg.contraction_samples;
        mc.master_seed = derive_seed(cfg.mc.master_seed, i, 0, "contraction_pair");
        const auto r = contraction_ratio(cfg.rho.atoms, t1, t2, cfg.q, cfg.metric, mc);
        worst = std::max({worst, r.ratio, r.ratio_exact});
        json entry = io::contraction_to_json(r);
        entry["theta1"] = io::atomic_to_json(t1);
        entry["theta2"] = io::atomic_to_json(t2);
        pairs.push_back(std::move(entry));
    }
    res.pass = worst <= bound + cfg.contraction_slack;
    res.report["pairs"] = std::move(pairs);
    res.report["max_ratio"] = worst;
    res.report["pass"] = res.pass;
    return res;
}

void require_gate(const RunConfig& cfg) { require_existence(cfg.rho.atoms); }

}  // namespace

RunDirectory::RunDirectory(const RunConfig& cfg) : root_(cfg.run_directory()) {
    fs::create_directories(root_);
    const fs::path manifest = root_ / "manifest.json";
    if (fs::exists(manifest)) {
        try {
            for (const auto& e : io::read_json(manifest)) manifest_[e.at("path")] = e.at("sha256");
        } catch (const std::exception& e) {
            throw io::IntegrityError("unreadable manifest " + manifest.string() + ": " + e.what());
        }
    }
    write_text("config.txt", cfg.canonical_text());
    write_text("rho.csv", io::atomic_to_csv(cfg.rho.atoms));
}

void RunDirectory::record(const std::string& name) {
    manifest_[name] = io::sha256_file(root_ / name);
    flush_manifest();
}

void RunDirectory::flush_manifest() const {
    json list = json::array();
    for (const auto& [p, sha] : manifest_) list.push_back({{"path", p}, {"sha256", sha}});
    io::write_json(root_ / "manifest.json", list);
}

void RunDirectory::write_text(std::string_view name, std::string_view text) {
    io::write_text(path(name), text);
    record(std::string(name));
}

void RunDirectory::write_json(std::string_view name, const json& j) {
    io::write_json(path(name), j);
    record(std::string(name));
}

void RunDirectory::write_sample(std::string_view name, const EmpiricalSample& sample) {
    io::write_sample(path(name), sample);
    record(std::string(name));
    record(io::sidecar_path(name).string());
}

void RunDirectory::write_response(std::string_view name, const ResponseFunction& h) {
    io::write_response(path(name), h);
    record(std::string(name));
    record(io::sidecar_path(name).string());
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& out) {
    RunDirectory dir(cfg);
    const auto report = diagnose(cfg.rho.atoms, 64, cfg.rho.family);
    json j = io::diagnostics_to_json(report);
    j["rho"] = atoms_json(cfg);
    dir.write_json("diagnostics.json", j);
    const std::string table = io::diagnostics_table(report);
    dir.write_text("diagnostics.txt", table);
    out << table << "run directory: " << dir.root().string() << '\n';
    return report.exists ? kOk : kNoSolution;
}

int cmd_response(const RunConfig& cfg, std::ostream& out) {
    RunDirectory dir(cfg);
    const auto h = response_from_rho(cfg.rho.atoms, cfg.lambda);
    dir.write_response("response.csv", h);
    dir.write_text("response_curve.csv", io::response_curve_csv(h));
    out << "steps: " << h.steps().size() << "  support end: " << h.support_end()
        << "\nrun directory: " << dir.root().string() << '\n';
    return kOk;
}

int cmd_solve(const RunConfig& cfg, SolveMethod method, std::ostream& out) {
    require_gate(cfg);
    if (method != SolveMethod::lst) cfg.require_seed("solve");
    RunDirectory dir(cfg);
    json report = {{"method", method == SolveMethod::lst ? "lst" : method == SolveMethod::mc ? "mc" : "both"},
                   {"rho", atoms_json(cfg)},
                   {"m", cfg.m}};
    int code = kOk;

    std::optional<LstGrid> grid;
    if (method != SolveMethod::mc) {
        grid = solve(cfg.rho.atoms, cfg.m, cfg.solver);
        dir.write_text("lst_grid.csv", io::grid_to_csv(*grid));
        report["lst"] = io::grid_report(*grid);
        report["lst"]["grid"] = "lst_grid.csv";
        if (!grid->converged) code = kNotConverged;
    }

    const auto mv = eta_moments(cfg.rho.atoms, cfg.m, cfg.moment_order);
    report["moments"] = moment_json(mv);

    if (method != SolveMethod::lst) {
        json mc_report;
        const auto sample = solve_mc(cfg, dir, mc_report);
        report["mc"] = mc_report;
        if (grid && code == kOk) {
            SolverOptions coarse_opts = cfg.solver;
            coarse_opts.grid_size = std::max<std::size_t>(16, cfg.solver.grid_size / 2);
            const auto coarse = solve(cfg.rho.atoms, cfg.m, coarse_opts);
            const auto cc = cross_check(sample, *grid, coarse);
            report["cross_check"] = {{"sup_distance", cc.sup_distance},
                                     {"mc_std_error", cc.mc_std_error},
                                     {"grid_error", cc.grid_error},
                                     {"tolerance", cc.tolerance},
                                     {"pass", cc.pass}};
            if (!cc.pass) code = kCheckFailed;
        }
    }
    report["exit_code"] = code;
    dir.write_json("solve_report.json", report);

    if (grid)
        out << "lst: iterations " << grid->iteration_count << "  residual " << grid->residual << "  converged "
            << (grid->converged ? "yes" : "NO") << "  atom at zero " << grid->atom_at_zero << '\n';
    if (report.contains("mc")) out << "mc: zero fraction " << report["mc"]["zero_fraction"].get<double>() << '\n';
    if (report.contains("cross_check"))
        out << "cross check: sup distance " << report["cross_check"]["sup_distance"].get<double>() << " tolerance "
            << report["cross_check"]["tolerance"].get<double>() << '\n';
    out << "run directory: " << dir.root().string() << '\n';
    return code;
}

int cmd_moments(const RunConfig& cfg, std::ostream& out) {
    require_gate(cfg);
    RunDirectory dir(cfg);
    const auto mv = eta_moments(cfg.rho.atoms, cfg.m, cfg.moment_order);
    const auto sb = sb_moments(mv);
    dir.write_text("moments.csv", io::moments_to_csv(mv));
    dir.write_json("moments.csv.json", io::moments_sidecar(mv));
    dir.write_text("moments_sb.csv", io::moments_to_csv(sb));
    dir.write_json("moments_sb.csv.json", io::moments_sidecar(sb));
    if (cfg.rho.family == Family::uniform01) {
        const auto exact = eta_moments_uniform01_exact(cfg.m, cfg.moment_order);
        dir.write_text("moments_family.csv", io::moments_to_csv(exact));
        dir.write_json("moments_family.csv.json", io::moments_sidecar(exact));
    }
    for (std::size_t n = 0; n < mv.moments.size(); ++n) out << n << "  " << io::format_double(mv.moments[n]) << '\n';
    if (mv.truncated) out << "moments above order " << mv.max_order << " are infinite\n";
    out << "run directory: " << dir.root().string() << '\n';
    return kOk;
}

int cmd_levy(const RunConfig& cfg, std::ostream& out) {
    require_gate(cfg);
    cfg.require_seed("levy");
    RunDirectory dir(cfg);
    const auto sample = obtain_sample(cfg, dir, false, out);
    const auto est = levy_from_solution(cfg.rho.atoms, sample, derive_seed(cfg.mc.master_seed, 0, 0, "levy"),
                                        cfg.levy_samples);
    dir.write_text("levy.csv", io::levy_to_csv(est));
    json report = {{"n", est.sample.size()}, {"total_mass_of_M", est.total_mass_of_M}, {"m", est.mean_target}};
    std::vector<double> probes;
    for (double x : cfg.steutel_probes)
        if (x <= est.sample.back()) probes.push_back(x);
    if (!probes.empty())
        report["steutel"] = io::steutel_to_json(steutel_residual(SolutionLaw::from_sample(sample), est, probes));
    dir.write_json("levy_report.json", report);
    out << "total mass of M: " << est.total_mass_of_M << "\nrun directory: " << dir.root().string() << '\n';
    return kOk;
}

int cmd_verify(const RunConfig& cfg, bool negative_control, bool from_artifacts, std::ostream& out) {
    require_gate(cfg);
    cfg.require_seed("verify");
    if (cfg.mc.n_samples < kMinSamplesForVerdict)
        throw ConfigError("field 'mc.n': verify needs at least " + std::to_string(kMinSamplesForVerdict) + " samples");
    RunDirectory dir(cfg);
    const auto sample = obtain_sample(cfg, dir, from_artifacts, out);

    json checks;
    bool all = true;

    const AtomicDistribution tested = negative_control ? point_mass(1.0) : cfg.rho.atoms;
    const auto pr = perpetuity_residual(sample, tested, derive_seed(cfg.mc.master_seed, 0, 0, "verify_perpetuity"));
    const bool p_pass = pr.ks_stat <= cfg.ks_factor * pr.ks_critical_1pct;
    checks["perpetuity"] = io::perpetuity_to_json(pr);
    checks["perpetuity"]["threshold"] = cfg.ks_factor * pr.ks_critical_1pct;
    checks["perpetuity"]["pass"] = p_pass;
    all = all && p_pass;

    const auto est = levy_from_solution(cfg.rho.atoms, sample, derive_seed(cfg.mc.master_seed, 0, 0, "levy"),
                                        cfg.levy_samples);
    try {
        const auto st = steutel_residual(SolutionLaw::from_sample(sample), est, cfg.steutel_probes);
        checks["steutel"] = io::steutel_to_json(st);
        checks["steutel"]["threshold"] = cfg.steutel_tol;
        checks["steutel"]["pass"] = st.residual < cfg.steutel_tol;
        all = all && st.residual < cfg.steutel_tol;
    } catch (const std::domain_error& e) {
        checks["steutel"] = {{"error", e.what()}, {"pass", false}};
        all = false;
    }

    const auto sweep = contraction_sweep(cfg);
    checks["contraction"] = sweep.report;
    all = all && sweep.pass;

    const int code = all ? kOk : kCheckFailed;
    json report = {{"negative_control", negative_control},
                   {"rho", atoms_json(cfg)},
                   {"checks", checks},
                   {"all_pass", all},
                   {"exit_code", code}};
    const std::string stem = negative_control ? "verify_negative_control" : "verify";
    dir.write_json(stem + ".json", report);
    std::string matrix = "check,pass\n";
    for (const char* name : {"perpetuity", "steutel", "contraction"}) {
        const bool pass = checks[name]["pass"].get<bool>();
        matrix += std::string(name) + "," + (pass ? "1" : "0") + "\n";
        out << name << (std::string(12 - std::string_view(name).size(), ' ')) << (pass ? "PASS" : "FAIL") << '\n';
    }
    dir.write_text(stem + "_matrix.csv", matrix);
    out << "run directory: " << dir.root().string() << '\n';
    return code;
}

int cmd_metric(const RunConfig& cfg, std::ostream& out) {
    cfg.require_seed("metric");
    RunDirectory dir(cfg);
    const auto sweep = contraction_sweep(cfg);
    json report = sweep.report;
    report["rho"] = atoms_json(cfg);
    report["exit_code"] = sweep.pass ? kOk : kCheckFailed;
    dir.write_json("metric_report.json", report);
    if (report.contains("max_ratio"))
        out << "max ratio " << report["max_ratio"].get<double>() << "  bound " << report["bound_g"].get<double>()
            << " + " << cfg.contraction_slack << '\n';
    else
        out << report["error"].get<std::string>() << '\n';
    out << "run directory: " << dir.root().string() << '\n';
    return sweep.pass ? kOk : kCheckFailed;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Size-biased perpetuity solver"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    app.add_option("-c,--config", config_path, "key=value config file");
    app.add_option("-s,--set", sets, "override key=value (repeatable, wins over the file)");
    app.add_option("-o,--out", out_dir, "output root directory (output.dir)");
    app.add_option("--seed", seed, "master seed (mc.seed)");

    std::string method = "lst";
    std::size_t order = 0;
    double q = 0.0;
    bool negative = false, from_artifacts = false;

    auto* diag = app.add_subcommand("diagnose", "existence, tail class, moment order, determinacy");
    auto* resp = app.add_subcommand("response", "response function h and its step curve");
    auto* slv = app.add_subcommand("solve", "solve for the law of eta");
    slv->add_option("--method", method, "lst, mc or both")->check(CLI::IsMember({"lst", "mc", "both"}));
    auto* mom = app.add_subcommand("moments", "integer moments of eta and eta_sb");
    mom->add_option("--order", order, "highest order (moments.order)");
    auto* lev = app.add_subcommand("levy", "Levy measure estimate and Steutel check");
    auto* ver = app.add_subcommand("verify", "perpetuity, Steutel and contraction checks");
    ver->add_flag("--negative-control", negative, "test the perpetuity identity with A = 1");
    ver->add_flag("--from-artifacts", from_artifacts, "fail instead of solving when no sample exists");
    auto* met = app.add_subcommand("metric", "contraction sweep in r_q");
    met->add_option("--q", q, "metric exponent in (1,2) (metric.q)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kInputError;
    }

    try {
        Entries file_entries;
        fs::path base_dir;
        if (!config_path.empty()) {
            file_entries = parse_config_text(io::read_text(config_path), config_path);
            base_dir = fs::path(config_path).parent_path();
        }
        Entries overrides;
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError("--set " + s + ": expected key=value");
            overrides.push_back({s.substr(0, eq), s.substr(eq + 1), "--set " + s});
        }
        if (!out_dir.empty()) overrides.push_back({"output.dir", out_dir, "--out"});
        if (seed) overrides.push_back({"mc.seed", std::to_string(*seed), "--seed"});
        if (order > 0) overrides.push_back({"moments.order", std::to_string(order), "--order"});
        if (*met && q != 0.0) overrides.push_back({"metric.q", io::format_double(q), "--q"});
        const RunConfig cfg = build_config(file_entries, overrides, base_dir);

        if (*diag) return cmd_diagnose(cfg, out);
        if (*resp) return cmd_response(cfg, out);
        if (*slv)
            return cmd_solve(cfg, method == "lst" ? SolveMethod::lst : method == "mc" ? SolveMethod::mc : SolveMethod::both,
                             out);
        if (*mom) return cmd_moments(cfg, out);
        if (*lev) return cmd_levy(cfg, out);
        if (*ver) return cmd_verify(cfg, negative, from_artifacts, out);
        if (*met) return cmd_metric(cfg, out);
    } catch (const ExistenceError& e) {
        err << "error: " << e.what() << '\n';
        return kNoSolution;
    } catch (const io::IntegrityError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

}  // namespace perpetuity::cli
