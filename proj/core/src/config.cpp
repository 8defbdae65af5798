#include "pseudotor/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pseudotor/errors.hpp"

namespace pseudotor {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_reals(const std::string& v) {
    std::istringstream in(v);
    std::vector<double> out;
    double d;
    while (in >> d) out.push_back(d);
    if (!in.eof()) throw UsageError("malformed numeric list: '" + v + "'");
    return out;
}

std::array<double, 3> parse_triple(const std::string& key, const std::string& v) {
    const auto r = parse_reals(v);
    if (r.size() != 3) throw UsageError(key + " expects 3 values");
    return {r[0], r[1], r[2]};
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_triple(const std::array<double, 3>& t) {
    return fmt(t[0]) + " " + fmt(t[1]) + " " + fmt(t[2]);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "f1.lambda_x") f1_lambda_x = parse_triple(key, value);
    else if (key == "f1.lambda_y") f1_lambda_y = parse_triple(key, value);
    else if (key == "f2.lambda_x") f2_lambda_x = parse_triple(key, value);
    else if (key == "f2.lambda_y") f2_lambda_y = parse_triple(key, value);
    else if (key == "h.mode") h_mode = value;
    else if (key == "h.max_point") h_max_point = parse_triple(key, value);
    else if (key == "h.min_point") h_min_point = parse_triple(key, value);
    else if (key == "fiber.loop_levels") loop_levels = parse_reals(value);
    else if (key == "fiber.c_levels") {
        const auto r = parse_reals(value);
        if (r.size() % 2 != 0 || r.empty())
            throw UsageError("fiber.c_levels expects an even-length list");
        c_levels.clear();
        for (std::size_t i = 0; i + 1 < r.size(); i += 2)
            c_levels.emplace_back(r[i], r[i + 1]);
    } else if (key == "fiber.n_gamma") n_gamma = static_cast<int>(parse_reals(value).at(0));
    else if (key == "fiber.n_angle") n_angle = static_cast<int>(parse_reals(value).at(0));
    else if (key == "tol.flag") flag_tol = parse_reals(value).at(0);
    else if (key == "tol.rank") rank_tol = parse_reals(value).at(0);
    else if (key == "tol.phase") phase_tol = parse_reals(value).at(0);
    else if (key == "tol.exclusion_radius") exclusion_radius = parse_reals(value).at(0);
    else if (key == "tol.collapse_exclusion") collapse_exclusion = parse_reals(value).at(0);
    else if (key == "cutoff.r1") r1 = parse_reals(value).at(0);
    else if (key == "cutoff.r2") r2 = parse_reals(value).at(0);
    else if (key == "seed") seed = static_cast<std::uint64_t>(parse_reals(value).at(0));
    else if (key == "out_dir") out_dir = value;
    else throw UsageError("unknown config key '" + key + "'");
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

void RunConfig::dump(std::ostream& os) const {
    os << "f1.lambda_x = " << fmt_triple(f1_lambda_x) << "\n";
    os << "f1.lambda_y = " << fmt_triple(f1_lambda_y) << "\n";
    os << "f2.lambda_x = " << fmt_triple(f2_lambda_x) << "\n";
    os << "f2.lambda_y = " << fmt_triple(f2_lambda_y) << "\n";
    os << "h.mode = " << h_mode << "\n";
    os << "h.max_point = " << fmt_triple(h_max_point) << "\n";
    os << "h.min_point = " << fmt_triple(h_min_point) << "\n";
    os << "fiber.loop_levels =";
    for (double v : loop_levels) os << " " << fmt(v);
    os << "\n";
    os << "fiber.c_levels =";
    for (const auto& [a, b] : c_levels) os << " " << fmt(a) << " " << fmt(b);
    os << "\n";
    os << "fiber.n_gamma = " << n_gamma << "\n";
    os << "fiber.n_angle = " << n_angle << "\n";
    os << "tol.flag = " << fmt(flag_tol) << "\n";
    os << "tol.rank = " << fmt(rank_tol) << "\n";
    os << "tol.phase = " << fmt(phase_tol) << "\n";
    os << "tol.exclusion_radius = " << fmt(exclusion_radius) << "\n";
    os << "tol.collapse_exclusion = " << fmt(collapse_exclusion) << "\n";
    os << "cutoff.r1 = " << fmt(r1) << "\n";
    os << "cutoff.r2 = " << fmt(r2) << "\n";
    os << "seed = " << seed << "\n";
    os << "out_dir = " << out_dir << "\n";
}

void RunConfig::validate() const {
    auto balanced = [](const std::array<double, 3>& lx, const std::array<double, 3>& ly) {
        const double s0 = lx[0] + ly[0];
        return lx[1] + ly[1] == s0 && lx[2] + ly[2] == s0;
    };
    if (!balanced(f1_lambda_x, f1_lambda_y))
        throw UsageError("f1 eigenvalues violate the balance condition");
    if (!balanced(f2_lambda_x, f2_lambda_y))
        throw UsageError("f2 eigenvalues violate the balance condition");
    if (h_mode != "mobius" && h_mode != "symbol")
        throw UsageError("h.mode must be 'mobius' or 'symbol'");
    for (double t : {flag_tol, rank_tol, phase_tol, exclusion_radius, collapse_exclusion})
        if (!(t > 0.0)) throw UsageError("tolerances must be positive");
    if (!(r1 > r2 && r2 > 0.0)) throw UsageError("cutoff radii must satisfy r1 > r2 > 0");
    if (n_gamma < 4 || n_angle < 2) throw UsageError("resolutions too small");
}

}  // namespace pseudotor
