#include "perpetuity/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace perpetuity::io {

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + what : source + ": " + what),
      line_(line) {}

std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text(path)); }

void write_text(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string(), 0, e.what());
    }
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view field, const std::string& source, std::size_t line) {
    field = trim(field);
    double value = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw ParseError(source, line, "not a number: '" + std::string(field) + "'");
    return value;
}

}  // namespace

std::vector<std::vector<double>> parse_csv(std::string_view text, const std::vector<std::string>& header,
                                           const std::string& source, std::vector<std::size_t>* line_numbers) {
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    bool seen_header = false;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = trim(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split(line, ',');
        if (!seen_header) {
            if (fields.size() != header.size()) throw ParseError(source, line_no, "unexpected header");
            for (std::size_t i = 0; i < header.size(); ++i)
                if (trim(fields[i]) != header[i])
                    throw ParseError(source, line_no, "expected column '" + header[i] + "'");
            seen_header = true;
            continue;
        }
        if (fields.size() != header.size())
            throw ParseError(source, line_no,
                             "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        std::vector<double> row;
        for (auto f : fields) row.push_back(parse_number(f, source, line_no));
        rows.push_back(std::move(row));
        if (line_numbers) line_numbers->push_back(line_no);
    }
    if (!seen_header) throw ParseError(source, 0, "missing header");
    return rows;
}

std::string atomic_to_csv(const AtomicDistribution& d) {
    std::string out = "location,weight\n";
    for (const Atom& a : d.atoms()) out += format_double(a.location) + "," + format_double(a.weight) + "\n";
    return out;
}

AtomicDistribution atomic_from_csv(std::string_view text, const std::string& source) {
    std::vector<std::size_t> lines;
    const auto rows = parse_csv(text, {"location", "weight"}, source, &lines);
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (!(r[0] > 0.0)) throw ParseError(source, lines[i], "field 'location' must be positive");
        if (!(r[1] > 0.0)) throw ParseError(source, lines[i], "field 'weight' must be positive");
        atoms.push_back({r[0], r[1]});
    }
    try {
        return validate(std::move(atoms));
    } catch (const std::invalid_argument& e) {
        throw ParseError(source, 0, e.what());
    }
}

json atomic_to_json(const AtomicDistribution& d) {
    json arr = json::array();
    for (const Atom& a : d.atoms()) arr.push_back({{"location", a.location}, {"weight", a.weight}});
    return arr;
}

AtomicDistribution atomic_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("<json>", 0, "expected an array of {location, weight}");
    std::vector<Atom> atoms;
    for (const auto& e : j) atoms.push_back({e.at("location").get<double>(), e.at("weight").get<double>()});
    return validate(std::move(atoms));
}

fs::path sidecar_path(const fs::path& path) {
    fs::path p = path;
    p += ".json";
    return p;
}

void write_sample(const fs::path& csv_path, const EmpiricalSample& sample) {
    std::string text = "value\n";
    text.reserve(sample.size() * 20);
    for (double v : sample.values()) {
        text += format_double(v);
        text += '\n';
    }
    write_text(csv_path, text);
    write_json(sidecar_path(csv_path), {{"seed", sample.seed()},
                                        {"provenance", sample.provenance()},
                                        {"n", sample.size()},
                                        {"sha256", sha256_hex(text)}});
}

EmpiricalSample read_sample(const fs::path& csv_path) {
    const json meta = read_json(sidecar_path(csv_path));
    const std::string text = read_text(csv_path);
    if (sha256_hex(text) != meta.at("sha256").get<std::string>())
        throw IntegrityError(csv_path.string() + ": checksum mismatch with sidecar");
    const auto rows = parse_csv(text, {"value"}, csv_path.string());
    if (rows.size() != meta.at("n").get<std::size_t>())
        throw IntegrityError(csv_path.string() + ": row count does not match sidecar");
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto& r : rows) values.push_back(r[0]);
    return EmpiricalSample(std::move(values), meta.at("seed").get<std::uint64_t>(),
                           meta.at("provenance").get<std::string>());
}

void write_response(const fs::path& csv_path, const ResponseFunction& h) {
    std::string text = "value,duration\n";
    for (const Step& s : h.steps()) text += format_double(s.value) + "," + format_double(s.duration) + "\n";
    write_text(csv_path, text);
    write_json(sidecar_path(csv_path), {{"lambda", h.lambda()}});
}

ResponseFunction read_response(const fs::path& csv_path) {
    const auto rows = parse_csv(read_text(csv_path), {"value", "duration"}, csv_path.string());
    std::vector<Step> steps;
    for (const auto& r : rows) steps.push_back({r[0], r[1]});
    const json meta = read_json(sidecar_path(csv_path));
    return ResponseFunction(std::move(steps), meta.at("lambda").get<double>());
}

std::string response_curve_csv(const ResponseFunction& h) {
    std::string out = "u,h\n";
    double start = 0.0;
    for (const Step& s : h.steps()) {
        const double stop = start + s.duration;
        out += format_double(start) + "," + format_double(s.value) + "\n";
        out += format_double(stop) + "," + format_double(s.value) + "\n";
        start = stop;
    }
    out += format_double(start) + ",0\n";
    return out;
}

std::string grid_to_csv(const LstGrid& grid) {
    std::string out = "s,psi,phi\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        out += format_double(grid.s_points[i]) + "," + format_double(grid.psi[i]) + "," +
               format_double(std::exp(-grid.psi[i])) + "\n";
    return out;
}

json grid_report(const LstGrid& grid) {
    return {{"m", grid.mean_target},
            {"residual", grid.residual},
            {"iterations", grid.iteration_count},
            {"converged", grid.converged},
            {"observed_rate", grid.observed_rate},
            {"atom_at_zero", grid.atom_at_zero},
            {"extrapolation_flag", grid.extrapolated}};
}

std::string moments_to_csv(const MomentVector& mv) {
    std::string out = "order,value\n";
    for (std::size_t n = 0; n < mv.moments.size(); ++n)
        out += std::to_string(n) + "," + format_double(mv.moments[n]) + "\n";
    return out;
}

json moments_sidecar(const MomentVector& mv) {
    return {{"m", mv.mean}, {"max_order", mv.max_order}, {"marginal_flag", mv.marginal}, {"truncated", mv.truncated}};
}

std::string levy_to_csv(const LevyEstimate& est) {
    std::string out = "x,cdf\n";
    for (std::size_t i = 0; i < est.grid_x.size(); ++i)
        out += format_double(est.grid_x[i]) + "," + format_double(est.cdf[i]) + "\n";
    return out;
}

json steutel_to_json(const SteutelReport& r) {
    return {{"probes", r.probes}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"residual", r.residual}};
}

json diagnostics_to_json(const DiagnosticsReport& r) {
    json j = {{"exists", r.exists},
              {"e_log_a", r.e_log_a},
              {"ess_sup", r.ess_sup},
              {"min_location", r.min_location},
              {"inverse_mean", r.inverse_mean},
              {"tail_class", std::string(to_string(r.tail_class))},
              {"determinate", r.determinate},
              {"moment_order_cap", r.moment_order_cap},
              {"compound_poisson", r.compound_poisson}};
    if (!r.exists)
        j["max_integer_moment_order"] = nullptr;
    else if (r.max_integer_moment_order)
        j["max_integer_moment_order"] = *r.max_integer_moment_order;
    else
        j["max_integer_moment_order"] = "unbounded";
    if (r.family) {
        j["family"] = *r.family;
        j["family_tail_class"] = std::string(to_string(*r.family_tail_class));
        j["family_determinate"] = *r.family_determinate;
        j["family_compound_poisson"] = *r.family_compound_poisson;
    }
    return j;
}

std::string diagnostics_table(const DiagnosticsReport& r) {
    const json j = diagnostics_to_json(r);
    std::size_t width = 0;
    for (const auto& [key, _] : j.items()) width = std::max(width, key.size());
    std::string out;
    for (const auto& [key, value] : j.items()) {
        out += key;
        out.append(width - key.size() + 2, ' ');
        out += value.is_string() ? value.get<std::string>() : value.dump();
        out += '\n';
    }
    return out;
}

json perpetuity_to_json(const PerpetuityReport& r) {
    return {{"ks_stat", r.ks_stat},
            {"p_value", r.p_value},
            {"ks_critical_1pct", r.ks_critical_1pct},
            {"ecf_distance", r.ecf_distance},
            {"n", r.n}};
}

json contraction_to_json(const ContractionReport& r) {
    return {{"r_before", r.r_before},
            {"r_after", r.r_after},
            {"ratio", r.ratio},
            {"r_after_exact", r.r_after_exact},
            {"ratio_exact", r.ratio_exact},
            {"bound_g", r.bound_g},
            {"bound_is_derived", true},
            {"q", r.q},
            {"doubling_error", r.doubling_error},
            {"zero_distance", r.zero_distance}};
}

}  // namespace perpetuity::io
