#include <cmath>
#include <complex>

#include "doctest.h"
#include "pseudotor/degeneration.hpp"
#include "pseudotor/errors.hpp"

using namespace pseudotor;

namespace {
const cplx w3 = std::exp(cplx(0.0, 2.0 * M_PI / 3.0));
}

TEST_CASE("ft_residual reference values") {
    CHECK(ft_residual(Vec3c(1, 1, 1), Vec3c(1.0, w3, w3 * w3), 1.0) < 1e-15);
    CHECK(ft_residual(Vec3c(1, 0, 0), Vec3c(1, 0, 0), 0.0) == doctest::Approx(0.0));
    CHECK(ft_residual(Vec3c(1, 1, 1), Vec3c(1, 1, 1), 0.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("psi0 classification on the limit line") {
    using Tag = FiberClass::Tag;
    CHECK(psi0_classify(normalize(Vec3c(1, 0, 0))).tag == Tag::TwoZero);
    CHECK(psi0_classify(normalize(Vec3c(0, 1, -1))).tag == Tag::OneZero);
    CHECK(psi0_classify(normalize(Vec3c(1, 1, -1))).tag == Tag::Generic);
}

TEST_CASE("toric h0 has exactly the two orthogonal critical points") {
    const BaseMorseFunction h0 = toric_h0();
    CHECK_FALSE(h0.orthogonality_warning());
    CHECK(proj_distance(h0.max_point(), canonicalize3(Vec3c(1, 0, 0))) < 1e-12);
    CHECK(proj_distance(h0.min_point(), canonicalize3(Vec3c(0, 1, -1))) < 1e-12);
    CHECK(std::abs(Vec3c(1, 0, 0).dot(Vec3c(0, 1, -1))) == doctest::Approx(0.0));
    CHECK(h0.value(h0.max_point()) == doctest::Approx(1.0));
    CHECK(h0.value(h0.min_point()) == doctest::Approx(-1.0));
}

TEST_CASE("F0 fibers of the toric fibration are Lagrangian") {
    const IntegralPair d = make_default_integrals();
    const BaseMorseFunction h0 = toric_h0();
    Rng rng(101);
    const LevelLoop loop = trace_loop(h0, 0.3, 10);
    const TorusFiber t = sample_torus(h0, loop, 2.0, 2.6, 4, d, rng, 1e-3, ft_cvec(0.0));
    CHECK(t.max_flag_residual < 1e-9);  // deformed constraint at t = 0
    CHECK(lagrangian_residual(t) < 1e-6);
}

TEST_CASE("diagonal moment maps: rank stratification and degeneracy locus") {
    const auto [h1, h2] = default_diagonal_moments();
    CHECK(cp2_rank(h1, h2, canonicalize3(Vec3c(1, 1, 1))) == 2);
    CHECK(cp2_rank(h1, h2, canonicalize3(Vec3c(0, 1, 2))) == 1);
    CHECK(cp2_rank(h1, h2, canonicalize3(Vec3c(1, 0, 0))) == 0);

    Rng rng(103);
    const DiagonalMomentReport rep = diagonal_moment_check(h1, h2, rng, 4000);
    CHECK(rep.no_false_positives);
    CHECK(rep.rank_drops > 0);  // the on-line probes must be detected
}

TEST_CASE("the six boundary components of F0 all occur") {
    Rng rng(105);
    CHECK(f0_boundary_components_ok(rng, 600));
}

TEST_CASE("base rotation carries the flag line to the limit line") {
    const RotationPlan plan = make_g();
    CHECK(plan.T == doctest::Approx(std::acos(2.0 / std::sqrt(6.0)) / 2.0).epsilon(1e-12));
    Rng rng(107);
    for (int i = 0; i < 16; ++i) {
        // random point of the flag image line
        const Vec2c zeta(rng.cnormal(), rng.cnormal());
        const Vec3c w = flag_line().from_line(zeta).normalized();
        const Vec3c moved = plan.transport(w, plan.T);
        CHECK(limit_line().off_line_residual(moved) < 1e-6);
        // time zero is the identity
        CHECK(proj_distance(plan.transport(w, 0.0), w) < 1e-7);
    }
    // the direction orthogonal to both normals is fixed
    const Vec3c fixed = canonicalize3(Vec3c(0, 1, -1));
    CHECK(proj_distance(canonicalize3(plan.transport(fixed, plan.T)), fixed) < 1e-10);
}

TEST_CASE("cutoff Hamiltonian: exact outside, zero inside, C1 across the collar") {
    const RotationPlan plan = make_g();
    const CutoffHamiltonian cut(plan.g, 0.2, 0.1);
    Rng rng(109);
    int outer = 0, inner = 0;
    while (outer < 20 || inner < 5) {
        const FlagPoint f = random_flag(rng);
        const AmbientPoint p(f);
        const double dist = distance_to_delta(p);
        if (dist > 0.2 && outer < 20) {
            const double g_of_psi =
                eval_symbol(plan.g, normalize(psi_raw(p)));
            CHECK(cut.value(p) == doctest::Approx(g_of_psi).epsilon(1e-12));
            ++outer;
        }
        if (dist < 0.1 && inner < 5) {
            CHECK(cut.value(p) == doctest::Approx(0.0));
            ++inner;
        }
    }
}

TEST_CASE("isotopy transport at T = 0 is the identity") {
    const RotationPlan plan = make_g();
    const CutoffHamiltonian cut(plan.g, 0.2, 0.1);
    const IntegralPair d = make_default_integrals();
    Rng rng(111);
    std::vector<FlagPoint> cloud;
    while (cloud.size() < 4) {
        const FlagPoint p = random_flag(rng);
        if (distance_to_delta(AmbientPoint(p)) > 0.25) cloud.push_back(p);
    }
    const IsotopyReport rep = isotopy_transport(cut, 0.0, cloud, d);
    CHECK(rep.max_value_drift < 1e-12);
    CHECK(rep.max_omega_drift < 1e-10);
    for (std::size_t i = 0; i < cloud.size(); ++i)
        CHECK(proj_distance(rep.points[i].end.x, cloud[i].x) < 1e-12);
}

TEST_CASE("isotopy transport preserves the integrals and the symplectic pairing") {
    const RunConfig cfg = RunConfig::defaults();
    const IntegralPair d = integrals_from(cfg);
    const BaseMorseFunction h = height_from(cfg);
    const RotationPlan plan = make_g();
    Rng rng(cfg.seed);
    const LevelLoop loop = trace_loop(h, -0.5, 10);
    const TorusFiber t = sample_torus(h, loop, 2.0, 2.6, 4, d, rng);
    std::vector<FlagPoint> cloud;
    double clearance = 1e18;
    for (std::size_t i = 0; i < t.samples.size() && cloud.size() < 8; i += 19)
        if (t.valid[i]) {
            cloud.push_back(t.samples[i]);
            clearance = std::min(clearance, distance_to_delta(AmbientPoint(t.samples[i])));
        }
    const double r1 = std::min(0.2, clearance / 2.0);
    const CutoffHamiltonian cut(plan.g, r1, r1 / 2.0);
    const IsotopyReport rep = isotopy_transport(cut, plan.T, cloud, d);
    CHECK(rep.max_value_drift < 1e-6);
    CHECK(rep.max_omega_drift < 1e-6);
}

TEST_CASE("family continuity: projection onto F_t varies continuously in t") {
    const Vec3c x = canonicalize3(Vec3c(1.0, 0.8, cplx(0.6, 0.3)));
    const Vec3c y0 = canonicalize3(Vec3c(0.9, cplx(-0.7, 0.2), 1.0));
    FlagPoint prev;
    bool first = true;
    double prev_t = 1.0;
    for (double t : {1.0, 0.5, 0.1, 0.0}) {
        const FlagPoint p = ft_project(x, y0, t);
        CHECK(ft_residual(p.x, p.y, t) < 1e-10);
        if (!first) {
            const double step = prev_t - t;
            CHECK(proj_distance(p.x, prev.x) + proj_distance(p.y, prev.y) < 2.0 * step + 1e-6);
        }
        prev = p;
        prev_t = t;
        first = false;
    }
}

TEST_CASE("the integral flows preserve every family member exactly") {
    // exact symbol transport acts diagonally, so <c, x.*y> is preserved for
    // every constraint vector c: Prop 3.1's mechanism
    const IntegralPair d = make_default_integrals();
    Rng rng(115);
    for (double t : {0.5, 0.0}) {
        const Vec3c cvec = ft_cvec(t);
        for (int i = 0; i < 20; ++i) {
            Vec3c x = rng.cnormal3(), y = rng.cnormal3();
            // solve the deformed constraint by adjusting y along one slot
            const Vec3c w = x.cwiseProduct(y);
            const cplx target = cvec.dot(w) - cvec(2) * w(2);
            y(2) = -target / (cvec(2) * x(2));
            CHECK(constraint_residual(x, y, cvec) < 1e-12);
            const AmbientPoint moved =
                symbol_transport(d.F1, AmbientPoint(x.normalized(), y.normalized()), 0.7);
            CHECK(constraint_residual(moved.x, moved.y, cvec) < 1e-8);
        }
    }
}

TEST_CASE("clearance violation is detected") {
    const RotationPlan plan = make_g();
    const IntegralPair d = make_default_integrals();
    Rng rng(117);
    // a point close to the degeneration simplex with a huge collar
    FlagPoint near;
    for (;;) {
        const FlagPoint p = random_flag(rng);
        const double dist = distance_to_delta(AmbientPoint(p));
        if (dist > 0.02 && dist < 0.15) {
            near = p;
            break;
        }
    }
    const CutoffHamiltonian cut(plan.g, 0.8, 0.4);
    bool flagged = false;
    try {
        const IsotopyReport rep = isotopy_transport(cut, plan.T, {near}, d);
        flagged = rep.max_value_drift > 1e-6;
    } catch (const EnteredCollar&) {
        flagged = true;
    }
    CHECK(flagged);
}
