#include "pseudotor/verify.hpp"

#include <cmath>
#include <functional>

#include "pseudotor/degeneration.hpp"
#include "pseudotor/errors.hpp"
#include "pseudotor/fibration.hpp"
#include "pseudotor/flagconn.hpp"
#include "pseudotor/special.hpp"

namespace pseudotor {

namespace {

double wrap_pi(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

double circ_std(const SpecialtyReport& rep) {
    const double r = std::max(1e-300, 1.0 - rep.dispersion);
    return std::sqrt(std::max(0.0, -2.0 * std::log(r)));
}

FlagPoint random_clear_flag(Rng& rng, double clearance = 5e-2) {
    for (int i = 0; i < 200; ++i) {
        const FlagPoint p = random_flag(rng);
        if (distance_to_delta(AmbientPoint(p)) > clearance) return p;
    }
    throw NoConvergence("could not draw a flag away from the degeneration simplex");
}

struct Suite {
    VerificationReport report;

    void add(const std::string& name, const std::string& claim, double stat, double thr,
             bool ge = false) {
        CheckResult c;
        c.name = name;
        c.claim = claim;
        c.statistic = stat;
        c.threshold = thr;
        c.op = ge ? ">=" : "<=";
        c.pass = ge ? stat >= thr : stat <= thr;
        report.checks.push_back(c);
    }

    void guarded(const std::string& area, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            add(area + "-error", std::string("check aborted: ") + e.what(), 1.0, 0.0);
        }
    }
};

std::vector<TorusFiber> collect_tori(const BaseMorseFunction& h, const std::vector<double>& levels,
                                     const std::vector<std::pair<double, double>>& cs, int n_loop,
                                     int res, const IntegralPair& integrals, Rng& rng,
                                     const Vec3c& cvec = Vec3c::Ones()) {
    std::vector<TorusFiber> tori;
    for (double level : levels)
        for (const auto& [c1, c2] : cs) {
            try {
                const LevelLoop loop = trace_loop(h, level, n_loop);
                tori.push_back(sample_torus(h, loop, c1, c2, res, integrals, rng, 1e-3, cvec));
            } catch (const NoSolution&) {
                // label outside the attainable moment range for this loop
            }
        }
    return tori;
}

}  // namespace

VerificationReport run_verification(const RunConfig& cfg) {
    cfg.validate();
    Suite s;
    Rng rng(cfg.seed);
    const IntegralPair integrals = integrals_from(cfg);
    const BaseMorseFunction h = height_from(cfg);

    // ---- A1 involution, A2 fiber preservation, A3 image on line ----
    s.guarded("A1", [&] {
        double worst_poisson = 0.0, worst_dpsi = 0.0, worst_line = 0.0;
        const SymbolFunction unbalanced =
            SymbolFunction::diag_pair({0.0, 1.0, 2.0}, {2.0, 1.0, 1.0});
        int control_hits = 0;
        const int n = 1000;
        for (int i = 0; i < n; ++i) {
            const FlagPoint p = random_flag(rng);
            worst_poisson =
                std::max(worst_poisson, std::abs(poisson(integrals.F1, integrals.F2, p)));
            const AmbientPoint ap(p);
            for (const SymbolFunction* f : {&integrals.F1, &integrals.F2})
                worst_dpsi = std::max(worst_dpsi, d_psi(ap, ham_field(*f, p)).norm());
            const Vec3c w = psi_raw(ap);
            if (w.norm() > 1e-6) {
                worst_line = std::max(worst_line, std::abs(w.sum()) / w.norm());
                if (d_psi(ap, ham_field(unbalanced, p)).norm() > 1e-3) ++control_hits;
            }
        }
        s.add("A1-involution", "the two integrals Poisson-commute on the hypersurface",
              worst_poisson, 1e-8);
        s.add("A2-fiber-preservation",
              "balanced integral flows fix every fibration fiber: dpsi(X_F) = 0", worst_dpsi,
              1e-8);
        s.add("A2-unbalance-control",
              "breaking the eigenvalue balance moves fibers at >= 90% of flags",
              static_cast<double>(control_hits) / n, 0.9, true);
        s.add("A3-image-on-line", "the fibration image lies on the line {w0 + w1 + w2 = 0}",
              worst_line, 1e-10);
    });

    // ---- A4 compatibility of the connection with base Hamiltonians ----
    s.guarded("A4", [&] {
        std::vector<const LineFunction*> symbols;
        const LineSymbol s1((Mat2c() << 0.7, cplx(0.2, 0.1), cplx(0.2, -0.1), -0.4).finished(),
                            flag_line());
        const LineSymbol s2((Mat2c() << -0.3, cplx(-0.1, 0.4), cplx(-0.1, -0.4), 0.9).finished(),
                            flag_line());
        symbols = {&h, &s1, &s2};
        double worst_res = 0.0, min_tau = 1e18;
        for (int i = 0; i < 100; ++i) {
            const FlagPoint p = random_clear_flag(rng);
            for (const LineFunction* lf : symbols) {
                const CompatibilityResult c = compatibility_check(p, *lf);
                if (c.tau == 0.0 && c.collinearity_residual == 0.0) continue;  // critical point
                worst_res = std::max(worst_res, c.collinearity_residual);
                min_tau = std::min(min_tau, c.tau);
            }
        }
        s.add("A4-compatibility",
              "horizontal lifts of base Hamiltonian fields are collinear with the pulled-back "
              "Hamiltonian fields",
              worst_res, 1e-6);
        s.add("A4-tau-positive", "the compatibility factor tau is positive", min_tau, 0.0, true);
    });

    // ---- A5 Lagrangian fibers ----
    s.guarded("A5", [&] {
        auto cs = cfg.c_levels;
        cs.push_back({1.7, 2.8});
        cs.push_back({1.9, 3.1});
        const auto tori = collect_tori(h, cfg.loop_levels, cs, 10, 5, integrals, rng);
        double worst = 0.0, control = 1e18;
        for (const auto& t : tori) {
            worst = std::max(worst, lagrangian_residual(t));
            for (std::size_t i = 0; i < t.samples.size(); i += 37) {
                if (!t.valid[i]) continue;
                AmbientTangent e1 = t.frames[i].xf1;
                const double n1 = e1.norm();
                if (n1 < 1e-9) continue;
                e1 = e1 * (1.0 / n1);
                control = std::min(control, std::abs(omega_pair(AmbientPoint(t.samples[i]), e1,
                                                                e1.rotated())));
            }
        }
        s.add("A5-torus-count", "at least 10 fiber tori sampled across levels and labels",
              static_cast<double>(tori.size()), 10.0, true);
        s.add("A5-lagrangian", "the fiber tori are Lagrangian: omega vanishes on frame pairs",
              worst, 1e-6);
        s.add("A5-control-plane",
              "a complex 2-plane (X, IX) is NOT Lagrangian: omega stays above 1e-2", control,
              1e-2, true);
    });

    // ---- A6 singular census and the three-case classification ----
    s.guarded("A6", [&] {
        const auto sing = singular_base_points(h.line());
        s.add("A6-singular-count", "the base line meets the coordinate lines in 3 points",
              static_cast<double>(sing.size()), 3.0, true);
        int interior = -1;
        for (int i = 0; i < 3; ++i) {
            const double v = h.value(sing[i].normalized());
            if (v > h.hmin() + 1e-6 && v < h.hmax() - 1e-6) interior = i;
        }
        s.add("A6-collapsed-levels",
              "the minimal fibration has exactly one interior collapsed level",
              static_cast<double>(collapsed_level_count(h)), 1.0, true);
        int mismatches = 0;
        if (interior >= 0) {
            const double level = h.value(sing[interior].normalized());
            const auto seg = diagonal_segment(interior, integrals);
            const double m1 = 0.5 * (seg[0][0] + seg[1][0]);
            const double m2 = 0.5 * (seg[0][1] + seg[1][1]);
            const double other = level + (level < 0.4 ? 0.4 : -0.4);
            if (classify_torus(h, level, m1, m2, integrals) != TorusFiber::Type::Collapsed)
                ++mismatches;
            if (classify_torus(h, level, m1 + 0.2, m2 - 0.2, integrals) !=
                TorusFiber::Type::Smooth)
                ++mismatches;
            if (classify_torus(h, other, m1, m2, integrals) != TorusFiber::Type::Smooth)
                ++mismatches;
        } else {
            mismatches = 3;
        }
        s.add("A6-three-case-table",
              "collapsed exactly when the level meets the interior singular point AND the label "
              "lies on its diagonal segment",
              static_cast<double>(mismatches), 0.0);
    });

    // ---- A7 specialty ----
    s.guarded("A7", [&] {
        Vec3c a;
        for (int i = 0; i < 3; ++i) a(i) = cfg.h_max_point[i];
        const BaseMorseFunction hs =
            make_height(a, Vec3c(1.0, 0.0, -1.0), BaseMorseFunction::Mode::Symbol, flag_line());
        const BoundaryDivisor div = divisor_from(hs);
        const std::vector<double> levels{-0.2, 0.1, 0.4, 0.7};
        const std::vector<std::pair<double, double>> cs{{2.0, 2.6}, {1.8, 2.9}, {2.1, 2.7}};
        const auto tori = collect_tori(hs, levels, cs, 8, 4, integrals, rng);
        s.add("A7-fiber-count", "at least 10 fiber tori available for the specialty statistics",
              static_cast<double>(tori.size()), 10.0, true);

        std::vector<SpecialtyReport> reports;
        double worst_std = 0.0;
        for (const auto& t : tori) {
            const SpecialtyReport rep = specialty_report(t, div);
            worst_std = std::max(worst_std, circ_std(rep));
            reports.push_back(rep);
        }
        const SpecialtyReport all = merge_reports(reports);
        double cross = 0.0;
        for (const auto& rep : reports)
            cross = std::max(cross, std::abs(wrap_pi(rep.mean_phase - all.mean_phase)));
        s.add("A7-per-fiber-specialty",
              "arg theta_D is constant on each fiber torus (circular std < 1e-3 rad)", worst_std,
              cfg.phase_tol);
        s.add("A7-cross-fiber-specialty",
              "the specialty phase is the same constant across fibers", cross, cfg.phase_tol);

        // wrong-divisor control: factors not adapted to the critical fibers
        if (!tori.empty()) {
            BoundaryDivisor wrong;
            wrong.c1 = Vec3c(1.0, 1.0, -2.0).cross(Vec3c::Ones());
            wrong.c2 = Vec3c(1.0, -2.0, 1.0).cross(Vec3c::Ones());
            const SpecialtyReport rep = specialty_report(tori.front(), wrong);
            s.add("A7-wrong-divisor-control",
                  "a divisor not adapted to the fibration spreads the phase by > 0.1 rad",
                  rep.max_deviation, 0.1, true);
        }

        // chart-consistency oracle for the residue form
        double chart_dev = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const FlagPoint p = random_clear_flag(rng);
            const Vec3c w_unit = psi_raw(AmbientPoint(p)).normalized();
            FrameTriple fr;
            fr.e1 = ham_field(integrals.F1, p);
            fr.e2 = ham_field(integrals.F2, p);
            fr.e3 = horizontal_lift(p, hs.field(w_unit), hs.line()).lifted;
            const cplx base = theta_D(p, fr, div);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k) {
                        if (k == j) continue;
                        if (std::abs(p.x(i)) < 0.25 || std::abs(p.y(j)) < 0.25 ||
                            std::abs(p.x(k)) < 0.25)
                            continue;
                        const cplx alt = theta_D_chart(p, fr, div, i, j, k);
                        chart_dev = std::max(chart_dev, std::abs(alt - base) / std::abs(base));
                    }
        }
        s.add("A7-chart-consistency",
              "the residue form is independent of the affine chart used to evaluate it",
              chart_dev, 1e-7);
    });

    // ---- A8 anticanonical scaling law ----
    s.guarded("A8", [&] {
        const BoundaryDivisor div = divisor_from(h);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const FlagPoint p = random_flag(rng);
            const cplx lam = rng.cnormal(), mu = rng.cnormal();
            const cplx lhs = div.section(AmbientPoint(lam * p.x, mu * p.y));
            const cplx rhs = lam * lam * mu * mu * div.section(AmbientPoint(p));
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
        }
        s.add("A8-section-degree",
              "the divisor section is bihomogeneous of degree (2, 2): s(lam x, mu y) = "
              "lam^2 mu^2 s(x, y)",
              worst, 1e-12);
    });

    // ---- A9 isotopy onto the degenerate fibration ----
    s.guarded("A9", [&] {
        const RotationPlan plan = make_g();

        // base-line rotation oracle
        double line_err = 0.0;
        for (int k = 0; k < 16; ++k) {
            const double ang = 2.0 * M_PI * k / 16;
            const Vec2c zeta(std::cos(ang), cplx(0, 1) * std::sin(ang));
            const Vec3c w0 = plan.from.from_line(zeta);
            line_err = std::max(line_err, plan.to.off_line_residual(plan.transport(w0, plan.T)));
        }
        s.add("A9-base-rotation",
              "the base rotation carries the image line to the limit line in time T", line_err,
              1e-6);

        // cutoff C1 smoothness across the collar: walk a segment from a
        // generic flag toward a base-set line and compare first derivatives
        // at two finite-difference resolutions (Richardson consistency)
        const SymbolFunction g = plan.g;
        const CutoffHamiltonian cut(g, cfg.r1, cfg.r2);
        double jump = 0.0;
        for (int trial = 0; trial < 4; ++trial) {
            const FlagPoint p0 = random_clear_flag(rng);
            const FlagPoint pb = base_line_sample(BaseSetLine{BaseSetLine::Kind::XXY, 0, 1, 2}, rng);
            for (double tmix = 0.02; tmix < 1.0; tmix += 0.02) {
                const Vec3c x = ((1.0 - tmix) * p0.x + tmix * pb.x).normalized();
                const Vec3c y = ((1.0 - tmix) * p0.y + tmix * pb.y).normalized();
                const AmbientPoint ap(x, y);
                const double d = distance_to_delta(ap);
                if (d < 0.5 * cfg.r2 || d > 1.5 * cfg.r1) continue;
                const AmbientTangent v(pb.x - p0.x, pb.y - p0.y);
                const double eps = 1e-5;
                const auto at = [&](double e) {
                    return cut.value(AmbientPoint(x + e * v.dx, y + e * v.dy));
                };
                const double fd = (at(eps) - at(-eps)) / (2.0 * eps);
                const double fd2 = (at(2.0 * eps) - at(-2.0 * eps)) / (4.0 * eps);
                jump = std::max(jump, std::abs(fd - fd2));
            }
        }
        s.add("A9-cutoff-smooth", "the cutoff Hamiltonian is C1 across the collar", jump, 1e-4);

        // the Prop 3.3 transport run
        const LevelLoop loop = trace_loop(h, cfg.loop_levels.front(), 12);
        const auto& [c1, c2] = cfg.c_levels.front();
        const TorusFiber torus = sample_torus(h, loop, c1, c2, 4, integrals, rng);
        std::vector<FlagPoint> cloud;
        double clearance = 1e18;
        for (std::size_t i = 0; i < torus.samples.size() && cloud.size() < 10; i += 19) {
            if (!torus.valid[i]) continue;
            cloud.push_back(torus.samples[i]);
            clearance = std::min(clearance, distance_to_delta(AmbientPoint(torus.samples[i])));
        }
        const double r1 = std::min(cfg.r1, 0.5 * clearance);
        const double r2 = 0.5 * r1;
        const CutoffHamiltonian cut2(g, r1, r2);
        const IsotopyReport rep = isotopy_transport(cut2, plan.T, cloud, integrals);
        s.add("A9a-f0-residual",
              "transported torus satisfies the degenerate hypersurface equation (t = 0)",
              rep.max_f0_residual, 1e-5);
        s.add("A9b-integral-preservation",
              "the cutoff flow preserves both integrals outside the collar", rep.max_value_drift,
              1e-6);
        s.add("A9c-image-on-l0", "the transported torus maps onto the limit line",
              rep.max_line_residual, 1e-6);
        s.add("A9d-symplectomorphism", "the transport preserves symplectic pairings of frames",
              rep.max_omega_drift, 1e-6);

        // clearance-violating control
        bool control_failed = false;
        try {
            const CutoffHamiltonian bad(g, std::max(4.0 * clearance, cfg.r1), 2.0 * clearance);
            const IsotopyReport brep = isotopy_transport(bad, plan.T, cloud, integrals);
            control_failed = brep.max_value_drift > 1e-6;
        } catch (const EnteredCollar&) {
            control_failed = true;
        }
        s.add("A9-clearance-control",
              "violating the clearance precondition breaks the transport (collar entry or "
              "integral drift)",
              control_failed ? 1.0 : 0.0, 0.5, true);
    });

    // ---- A10 the degenerate toric fibration ----
    s.guarded("A10", [&] {
        const BaseMorseFunction h0 = toric_h0();
        s.add("A10-critical-orthogonal",
              "the degenerate-fibration height has orthogonal critical points (Symbol mode "
              "exact)",
              h0.orthogonality_warning() ? 1.0 : 0.0, 0.0);
        const std::vector<std::pair<double, double>> cs{{2.0, 2.5}, {1.8, 2.9}, {2.0, 2.6}};
        const auto tori =
            collect_tori(h0, {-0.3, 0.3}, cs, 8, 4, integrals, rng, ft_cvec(0.0));
        double worst = 0.0;
        for (const auto& t : tori) worst = std::max(worst, lagrangian_residual(t));
        s.add("A10-f0-torus-count", "fiber tori of the degenerate fibration sampled",
              static_cast<double>(tori.size()), 2.0, true);
        s.add("A10-f0-lagrangian", "smooth fibers of the degenerate fibration are Lagrangian",
              worst, 1e-6);
        const auto [h1, h2] = default_diagonal_moments();
        const DiagonalMomentReport dm = diagonal_moment_check(h1, h2, rng, 10000);
        s.add("A10-diagonal-degeneracy",
              "the diagonal moment pair drops rank only on the coordinate lines",
              dm.no_false_positives ? 0.0 : 1.0, 0.0);
        s.add("A10-boundary-components",
              "the degenerate fibration boundary has six coordinate components",
              f0_boundary_components_ok(rng, 50) ? 1.0 : 0.0, 1.0, true);
    });

    // ---- A11 the flag connection ----
    s.guarded("A11", [&] {
        Mat3c a1 = Mat3c::Zero();
        a1.diagonal() << 0.0, 1.0, 2.0;
        Mat3c a2;
        a2 << 1.0, cplx(0.3, 0.2), cplx(-0.1, 0.4), cplx(0.3, -0.2), -0.5, cplx(0.2, -0.3),
            cplx(-0.1, -0.4), cplx(0.2, 0.3), 0.7;
        double worst_dpi = 0.0;
        for (int i = 0; i < 100; ++i) {
            const FlagAsPair f = as_pair(random_clear_flag(rng));
            for (const Mat3c* a : {&a1, &a2})
                worst_dpi =
                    std::max(worst_dpi, dpi_relation_check(*a, f, integrals).residual);
        }
        s.add("A11-dpi-relation",
              "the forgetful projection intertwines the flag and base Hamiltonian fields",
              worst_dpi, 1e-6);

        double worst_frob = 0.0;
        for (int i = 0; i < 20; ++i) {
            const FlagAsPair f = as_pair(random_clear_flag(rng));
            for (double step : {1e-2, 1e-3})
                worst_frob = std::max(worst_frob, frobenius_residual(f, step, integrals));
        }
        s.add("A11-frobenius", "the connection distribution is integrable (brackets stay inside)",
              worst_frob, 1e-4);
        const FlagAsPair fc = as_pair(random_clear_flag(rng));
        const double control = std::min(frobenius_control_residual(fc, 1e-2, integrals, rng),
                                        frobenius_control_residual(fc, 1e-3, integrals, rng));
        s.add("A11-frobenius-control",
              "a non-invariant generator breaks integrability (residual does not vanish)",
              control, 1e-3, true);

        double worst_orbit = 0.0;
        const FlagAsPair seed = as_pair(random_clear_flag(rng));
        const ProjectivePoint w0 = psi(as_flag(seed));
        for (int i = 0; i < 50; ++i) {
            const cplx sv = std::exp(cplx(rng.uniform(-1.5, 1.5), rng.uniform(0.0, 2 * M_PI)));
            const cplx tv = std::exp(cplx(rng.uniform(-1.5, 1.5), rng.uniform(0.0, 2 * M_PI)));
            const FlagAsPair o = torus_orbit_sample(seed, sv, tv);
            worst_orbit =
                std::max(worst_orbit, proj_distance(psi(as_flag(o)).coords, w0.coords));
        }
        s.add("A11-orbit-fiber", "the diagonal torus orbit stays inside one fibration fiber",
              worst_orbit, 1e-8);
    });

    // ---- A12 moment geometry ----
    s.guarded("A12", [&] {
        const MomentImage img = moment_image({random_flag(rng)}, integrals);
        const std::array<std::array<double, 2>, 6> expected{
            {{0.0, 0.0}, {1.0, 1.0}, {1.0, 2.0}, {3.0, 4.0}, {3.0, 5.0}, {4.0, 6.0}}};
        double vertex_err = 1e18;
        double worst_vertex = 0.0;
        for (const auto& e : expected) {
            vertex_err = 1e18;
            for (const auto& v : img.vertices)
                vertex_err = std::min(vertex_err, std::hypot(v.f1 - e[0], v.f2 - e[1]));
            worst_vertex = std::max(worst_vertex, vertex_err);
        }
        s.add("A12-hexagon-vertices",
              "the six torus-fixed flags map to the derived hexagon vertex list", worst_vertex,
              1e-9);

        double worst_b = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            for (int k = 0; k < 3; ++k) {
                const int i = (k + 1) % 3, j = (k + 2) % 3;
                for (const auto kind : {BaseSetLine::Kind::XXY, BaseSetLine::Kind::XYY}) {
                    const FlagPoint p = base_line_sample(BaseSetLine{kind, i, j, k}, rng);
                    const std::array<double, 2> q{eval_symbol(integrals.F1, AmbientPoint(p)),
                                                  eval_symbol(integrals.F2, AmbientPoint(p))};
                    worst_b = std::max(worst_b, std::abs(hull_signed_distance(img.hull, q)));
                }
            }
        }
        s.add("A12-base-on-boundary", "base-set lines map onto the hexagon boundary", worst_b,
              1e-9);

        double worst_sing = -1e18;
        for (int i = 0; i < 3; ++i)
            for (double mu : {0.25, 0.5, 0.75}) {
                const FlagPoint p = diagonal_line_sample(i, mu, rng.uniform(0.0, 2 * M_PI));
                const std::array<double, 2> q{eval_symbol(integrals.F1, AmbientPoint(p)),
                                              eval_symbol(integrals.F2, AmbientPoint(p))};
                worst_sing = std::max(worst_sing, hull_signed_distance(img.hull, q));
            }
        s.add("A12-sing-inside", "diagonal (singular) lines map strictly inside the hexagon",
              worst_sing, -1e-6);
    });

    return s.report;
}

}  // namespace pseudotor
