#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pseudotor/degeneration.hpp"
#include "pseudotor/errors.hpp"
#include "pseudotor/fibration.hpp"
#include "pseudotor/flagconn.hpp"
#include "pseudotor/jsonout.hpp"
#include "pseudotor/special.hpp"
#include "pseudotor/verify.hpp"

namespace {

using namespace pseudotor;

constexpr int kSchemaVersion = 1;

struct CommonOpts {
    std::string config_file;
    std::int64_t seed = -1;
    std::string out_dir;
};

RunConfig load_config(const CommonOpts& c) {
    RunConfig cfg = c.config_file.empty() ? RunConfig::defaults() : RunConfig::load(c.config_file);
    if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
    if (!c.out_dir.empty()) cfg.out_dir = c.out_dir;
    cfg.validate();
    return cfg;
}

void write_file(const RunConfig& cfg, const std::string& name, const std::string& body) {
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = std::filesystem::path(cfg.out_dir) / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("cannot open output file " + path.string());
    os << body;
    std::cout << "wrote " << path.string() << "\n";
}

void emit_vec3(JsonWriter& j, const Vec3c& v) {
    j.begin_array();
    for (int i = 0; i < 3; ++i)
        j.begin_array().value(v(i).real()).value(v(i).imag()).end_array();
    j.end_array();
}

int cmd_verify(const CommonOpts& common) {
    const RunConfig cfg = load_config(common);
    const VerificationReport rep = run_verification(cfg);

    JsonWriter j;
    j.begin_object();
    j.key("schema_version").value(kSchemaVersion);
    j.key("seed").value(cfg.seed);
    j.key("checks").begin_array();
    for (const auto& c : rep.checks) {
        j.begin_object();
        j.key("name").value(c.name);
        j.key("claim").value(c.claim);
        j.key("statistic").value(c.statistic);
        j.key("op").value(c.op);
        j.key("threshold").value(c.threshold);
        j.key("pass").value(c.pass);
        j.end_object();
    }
    j.end_array();
    j.key("all_pass").value(rep.all_pass());
    j.end_object();
    write_file(cfg, "report.json", j.str());

    for (const auto& c : rep.checks)
        std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  stat=" << c.statistic
                  << " " << c.op << " " << c.threshold << "\n";
    std::cout << (rep.all_pass() ? "ALL CHECKS PASSED" : "CHECK FAILURES PRESENT") << "\n";
    return rep.all_pass() ? 0 : 1;
}

int cmd_fiber(const CommonOpts& common, double level, double c1, double c2) {
    const RunConfig cfg = load_config(common);
    Rng rng(cfg.seed);
    const IntegralPair integrals = integrals_from(cfg);
    const BaseMorseFunction h = height_from(cfg);
    const LevelLoop loop = trace_loop(h, level, cfg.n_gamma);
    const TorusFiber t = sample_torus(h, loop, c1, c2, cfg.n_angle, integrals, rng,
                                      cfg.collapse_exclusion);

    JsonWriter j;
    j.begin_object();
    j.key("schema_version").value(kSchemaVersion);
    j.key("level").value(level);
    j.key("c1").value(c1);
    j.key("c2").value(c2);
    j.key("type").value(t.fiber_type == TorusFiber::Type::Smooth ? "Smooth" : "Collapsed");
    j.key("n_loop").value(t.n_loop);
    j.key("res").value(t.res);
    j.key("collapse_exclusion").value(cfg.collapse_exclusion);
    j.key("period1").value(t.period1);
    j.key("period2").value(t.period2);
    j.key("loop_period").value(t.loop_period);
    j.key("max_f_residual").value(t.max_f_residual);
    j.key("max_flag_residual").value(t.max_flag_residual);
    j.key("max_loop_residual").value(t.max_loop_residual);
    j.key("holonomy_distance").value(t.holonomy_distance);
    j.key("lagrangian_residual").value(lagrangian_residual(t));
    j.key("samples").begin_array();
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
        if (!t.valid[i]) continue;
        j.begin_object();
        j.key("x");
        emit_vec3(j, t.samples[i].x);
        j.key("y");
        emit_vec3(j, t.samples[i].y);
        j.end_object();
    }
    j.end_array();
    j.end_object();
    write_file(cfg, "torus.json", j.str());

    std::string csv = "re_x0,im_x0,re_x1,im_x1,re_x2,im_x2,re_y0,im_y0,re_y1,im_y1,re_y2,im_y2\n";
    char buf[64];
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
        if (!t.valid[i]) continue;
        std::string row;
        for (const Vec3c* v : {&t.samples[i].x, &t.samples[i].y})
            for (int c = 0; c < 3; ++c) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,", (*v)(c).real(), (*v)(c).imag());
                row += buf;
            }
        row.back() = '\n';
        csv += row;
    }
    write_file(cfg, "torus.csv", csv);
    return 0;
}

int cmd_moment(const CommonOpts& common, int n) {
    const RunConfig cfg = load_config(common);
    Rng rng(cfg.seed);
    const IntegralPair integrals = integrals_from(cfg);
    if (n < 1) throw UsageError("sample count must be positive");
    std::vector<FlagPoint> samples;
    samples.reserve(n);
    for (int i = 0; i < n; ++i) samples.push_back(random_flag(rng));
    const MomentImage img = moment_image(samples, integrals);

    JsonWriter j;
    j.begin_object();
    j.key("schema_version").value(kSchemaVersion);
    j.key("n").value(n);
    j.key("hull").begin_array();
    for (const auto& p : img.hull)
        j.begin_array().value(p[0]).value(p[1]).end_array();
    j.end_array();
    j.key("vertices").begin_array();
    for (const auto& v : img.vertices) {
        j.begin_object();
        j.key("x_axis").value(v.i);
        j.key("y_axis").value(v.k);
        j.key("f1").value(v.f1);
        j.key("f2").value(v.f2);
        j.end_object();
    }
    j.end_array();
    j.key("diagonal_segments").begin_array();
    for (int i = 0; i < 3; ++i) {
        const auto seg = diagonal_segment(i, integrals);
        j.begin_object();
        j.key("line").value(i);
        j.key("from").begin_array().value(seg[0][0]).value(seg[0][1]).end_array();
        j.key("to").begin_array().value(seg[1][0]).value(seg[1][1]).end_array();
        j.end_object();
    }
    j.end_array();
    j.key("values").begin_array();
    for (const auto& p : img.values)
        j.begin_array().value(p[0]).value(p[1]).end_array();
    j.end_array();
    j.end_object();
    write_file(cfg, "polygon.json", j.str());
    return 0;
}

int cmd_specialty(const CommonOpts& common, double level, double c1, double c2) {
    const RunConfig cfg = load_config(common);
    Rng rng(cfg.seed);
    const IntegralPair integrals = integrals_from(cfg);
    const BaseMorseFunction h = height_from(cfg);
    const BoundaryDivisor div = divisor_from(h);
    const LevelLoop loop = trace_loop(h, level, 8);
    const TorusFiber t =
        sample_torus(h, loop, c1, c2, 6, integrals, rng, cfg.collapse_exclusion);
    const SpecialtyReport rep = specialty_report(t, div);

    JsonWriter j;
    j.begin_object();
    j.key("schema_version").value(kSchemaVersion);
    j.key("level").value(level);
    j.key("c1").value(c1);
    j.key("c2").value(c2);
    j.key("mode").value(cfg.h_mode);
    j.key("n").value(rep.n);
    j.key("mean_phase").value(rep.mean_phase);
    j.key("max_deviation").value(rep.max_deviation);
    j.key("dispersion").value(rep.dispersion);
    j.end_object();
    write_file(cfg, "specialty.json", j.str());
    std::cout << "mean phase " << rep.mean_phase << " rad, max deviation " << rep.max_deviation
              << " rad over " << rep.n << " samples\n";
    return rep.max_deviation < cfg.phase_tol ? 0 : 1;
}

int cmd_isotopy(const CommonOpts& common, double level, double c1, double c2, double r1,
                double r2) {
    const RunConfig cfg = load_config(common);
    Rng rng(cfg.seed);
    const IntegralPair integrals = integrals_from(cfg);
    const BaseMorseFunction h = height_from(cfg);
    const RotationPlan plan = make_g();
    const LevelLoop loop = trace_loop(h, level, 12);
    const TorusFiber t = sample_torus(h, loop, c1, c2, 4, integrals, rng,
                                      cfg.collapse_exclusion);
    std::vector<FlagPoint> cloud;
    for (std::size_t i = 0; i < t.samples.size() && cloud.size() < 16; i += 11)
        if (t.valid[i]) cloud.push_back(t.samples[i]);
    const CutoffHamiltonian cut(plan.g, r1 > 0 ? r1 : cfg.r1, r2 > 0 ? r2 : cfg.r2);
    const IsotopyReport rep = isotopy_transport(cut, plan.T, cloud, integrals);

    JsonWriter j;
    j.begin_object();
    j.key("schema_version").value(kSchemaVersion);
    j.key("level").value(level);
    j.key("c1").value(c1);
    j.key("c2").value(c2);
    j.key("T").value(plan.T);
    j.key("r1").value(cut.r1());
    j.key("r2").value(cut.r2());
    j.key("points").begin_array();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto& pr = rep.points[i];
        j.begin_object();
        j.key("before_x");
        emit_vec3(j, cloud[i].x);
        j.key("before_y");
        emit_vec3(j, cloud[i].y);
        j.key("after_x");
        emit_vec3(j, pr.end.x);
        j.key("after_y");
        emit_vec3(j, pr.end.y);
        j.key("f0_residual").value(pr.f0_residual);
        j.key("f1_drift").value(pr.f1_drift);
        j.key("f2_drift").value(pr.f2_drift);
        j.key("line_residual").value(pr.line_residual);
        j.key("omega_drift").value(pr.omega_drift);
        j.end_object();
    }
    j.end_array();
    j.key("max_f0_residual").value(rep.max_f0_residual);
    j.key("max_value_drift").value(rep.max_value_drift);
    j.key("max_line_residual").value(rep.max_line_residual);
    j.key("max_omega_drift").value(rep.max_omega_drift);
    j.end_object();
    write_file(cfg, "isotopy.json", j.str());
    return 0;
}

int cmd_section(const CommonOpts& common, int grid) {
    const RunConfig cfg = load_config(common);
    Rng rng(cfg.seed);
    FlagPoint seed_flag = random_flag(rng);
    while (distance_to_delta(AmbientPoint(seed_flag)) < 5e-2) seed_flag = random_flag(rng);
    const FlagAsPair seed = as_pair(seed_flag);
    const double coverage = orbit_coverage(seed, rng, grid);

    JsonWriter j;
    j.begin_object();
    j.key("schema_version").value(kSchemaVersion);
    j.key("grid").value(grid);
    j.key("coverage").value(coverage);
    j.key("seed_p");
    emit_vec3(j, seed.p);
    j.key("seed_l");
    emit_vec3(j, seed.l);
    j.key("orbit").begin_array();
    for (int a = 0; a < grid; ++a)
        for (int b = 0; b < grid; ++b) {
            const double us = -2.0 + 4.0 * a / std::max(grid - 1, 1);
            const double ut = -2.0 + 4.0 * b / std::max(grid - 1, 1);
            const FlagAsPair o =
                torus_orbit_sample(seed, std::exp(cplx(us, 0.0)), std::exp(cplx(ut, 0.0)));
            const FlagClass fc = classify_flag(o);
            j.begin_object();
            j.key("p");
            emit_vec3(j, o.p);
            j.key("l");
            emit_vec3(j, o.l);
            j.key("class").value(fc.tag == FlagClass::Tag::Generic ? "Generic" : "ThroughVertex");
            j.key("vertex").value(fc.vertex);
            j.end_object();
        }
    j.end_array();
    j.end_object();
    write_file(cfg, "section.json", j.str());
    return 0;
}

int cmd_config(const CommonOpts& common, bool print_defaults) {
    if (print_defaults) {
        RunConfig::defaults().dump(std::cout);
        return 0;
    }
    const RunConfig cfg = load_config(common);
    cfg.dump(std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit for the pseudotoric structure on the flag threefold"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts common;
    app.add_option("--config", common.config_file, "key = value config file");
    app.add_option("--seed", common.seed, "RNG seed override");
    app.add_option("--out", common.out_dir, "output directory");

    auto* verify = app.add_subcommand("verify", "run the full verification suite");

    double level = 0.5, c1 = 2.0, c2 = 2.6, r1 = 0.0, r2 = 0.0;
    auto* fiber = app.add_subcommand("fiber", "sample one fiber torus");
    fiber->add_option("--level", level, "base loop level");
    fiber->add_option("--c1", c1, "first integral value");
    fiber->add_option("--c2", c2, "second integral value");

    int n_moment = 2000;
    auto* moment = app.add_subcommand("moment", "emit the moment polygon data");
    moment->add_option("--n", n_moment, "number of random samples");

    auto* specialty = app.add_subcommand("specialty", "specialty phase report for one fiber");
    specialty->add_option("--level", level, "base loop level");
    specialty->add_option("--c1", c1, "first integral value");
    specialty->add_option("--c2", c2, "second integral value");

    auto* isotopy = app.add_subcommand("isotopy", "transport a torus to the degenerate fibration");
    isotopy->add_option("--level", level, "base loop level");
    isotopy->add_option("--c1", c1, "first integral value");
    isotopy->add_option("--c2", c2, "second integral value");
    isotopy->add_option("--r1", r1, "outer cutoff radius (0 = config default)");
    isotopy->add_option("--r2", r2, "inner cutoff radius (0 = config default)");

    int grid = 12;
    auto* section = app.add_subcommand("section", "emit a horizontal-section orbit sample");
    section->add_option("--grid", grid, "orbit grid resolution");

    bool print_defaults = false;
    auto* config = app.add_subcommand("config", "print the effective configuration");
    config->add_flag("--print-defaults", print_defaults, "dump built-in defaults");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (verify->parsed()) return cmd_verify(common);
        if (fiber->parsed()) return cmd_fiber(common, level, c1, c2);
        if (moment->parsed()) return cmd_moment(common, n_moment);
        if (specialty->parsed()) return cmd_specialty(common, level, c1, c2);
        if (isotopy->parsed()) return cmd_isotopy(common, level, c1, c2, r1, r2);
        if (section->parsed()) return cmd_section(common, grid);
        if (config->parsed()) return cmd_config(common, print_defaults);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "check failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
