#include <cmath>
#include <complex>

#include "doctest.h"
#include "pseudotor/errors.hpp"
#include "pseudotor/fibration.hpp"
#include "pseudotor/pseudotoric.hpp"

using namespace pseudotor;

namespace {
const cplx w3 = std::exp(cplx(0.0, 2.0 * M_PI / 3.0));
}

TEST_CASE("psi on reference flags and the base-set guard") {
    const FlagPoint p{canonicalize3(Vec3c(1, 1, 1)), canonicalize3(Vec3c(1.0, w3, w3 * w3))};
    const ProjectivePoint w = psi(p);
    CHECK(proj_distance(w.coords, canonicalize(Vec3c(1.0, w3, w3 * w3))) < 1e-12);
    CHECK(std::abs(w.coords.sum()) < 1e-10);

    const FlagPoint vertex{Vec3c(1, 0, 0), Vec3c(0, 0, 1)};
    CHECK_THROWS_AS(psi(vertex), OnBaseSet);

    const FlagPoint sing{canonicalize3(Vec3c(1, 1, 0)), canonicalize3(Vec3c(1, -1, 1))};
    CHECK(proj_distance(psi(sing).coords, canonicalize(Vec3c(1, -1, 0))) < 1e-12);
}

TEST_CASE("image of psi lies on the line sum w = 0") {
    Rng rng(41);
    for (int i = 0; i < 1000; ++i) {
        const Vec3c w = psi(random_flag(rng)).coords;
        CHECK(std::abs(w.sum()) / w.norm() < 1e-10);
    }
}

TEST_CASE("base set membership patterns") {
    const FlagPoint a{Vec3c(1, 0, 0), Vec3c(0, 1, 0)};
    CHECK(in_base_set(a).has_value());
    const FlagPoint b{canonicalize3(Vec3c(1, 1, 1)), canonicalize3(Vec3c(1.0, w3, w3 * w3))};
    CHECK(!in_base_set(b).has_value());
    const FlagPoint c{Vec3c(0, 1, 0), Vec3c(0, 0, 1)};
    CHECK(in_base_set(c).has_value());
}

TEST_CASE("fiber point classification") {
    using Tag = FiberClass::Tag;
    CHECK(classify_fiber_point(normalize(Vec3c(1.0, w3, w3 * w3))).tag == Tag::Generic);
    const FiberClass one = classify_fiber_point(normalize(Vec3c(0, 1, -1)));
    CHECK(one.tag == Tag::OneZero);
    CHECK(one.index == 0);
    const FiberClass two = classify_fiber_point(normalize(Vec3c(1, 0, 0)));
    CHECK(two.tag == Tag::TwoZero);
    CHECK(two.index == 0);
}

TEST_CASE("d_psi kills the integral fields and matches finite differences") {
    Rng rng(43);
    const IntegralPair d = make_default_integrals();
    for (int i = 0; i < 30; ++i) {
        const FlagPoint p = random_flag(rng);
        CHECK(d_psi(AmbientPoint(p), ham_field(d.F1, p)).norm() < 1e-8);
        CHECK(d_psi(AmbientPoint(p), ham_field(d.F2, p)).norm() < 1e-8);

        // finite-difference oracle along a curve x + eps u, y + eps v
        const AmbientTangent t = flag_tangent_basis(p)[1];
        const double eps = 1e-6;
        const Vec3c wp = psi_raw(AmbientPoint(p.x + eps * t.dx, p.y + eps * t.dy)).normalized();
        const Vec3c wm = psi_raw(AmbientPoint(p.x - eps * t.dx, p.y - eps * t.dy)).normalized();
        // projective speed: component of wm orthogonal to wp, free of the
        // cancellation that limits proj_distance at small separations
        const double fd = herm_project(wp, wm).norm() / (2 * eps);
        const double an = d_psi(AmbientPoint(p), t).norm();
        if (fd > 1e-3)  // compare magnitudes where the FD signal is clean
            CHECK(an == doctest::Approx(fd).epsilon(1e-3));
    }
}

TEST_CASE("horizontal lift: projection residual and symplectic orthogonality") {
    Rng rng(45);
    const IntegralPair d = make_default_integrals();
    int tested = 0;
    while (tested < 50) {
        const FlagPoint p = random_flag(rng);
        if (distance_to_delta(AmbientPoint(p)) < 5e-2) continue;
        const Vec3c w = psi_raw(AmbientPoint(p)).normalized();
        Vec3c u = flag_line().from_line(Vec2c(0.3, -0.7));
        u = (u - w * w.dot(u)).eval();  // horizontal at w
        const HorizontalLift lift = horizontal_lift(p, u);
        CHECK((d_psi(AmbientPoint(p), lift.lifted) - u).norm() < 1e-8);
        CHECK(std::abs(omega_pair(AmbientPoint(p), lift.lifted, ham_field(d.F1, p))) < 1e-8);
        CHECK(std::abs(omega_pair(AmbientPoint(p), lift.lifted, ham_field(d.F2, p))) < 1e-8);
        // zero lifts to zero
        CHECK(horizontal_lift(p, Vec3c::Zero()).lifted.norm() < 1e-12);
        ++tested;
    }
}

TEST_CASE("compatibility of the connection with base Hamiltonians") {
    Rng rng(47);
    const RunConfig cfg = RunConfig::defaults();
    const BaseMorseFunction h = height_from(cfg);
    int tested = 0;
    while (tested < 60) {
        const FlagPoint p = random_flag(rng);
        if (distance_to_delta(AmbientPoint(p)) < 5e-2) continue;
        const CompatibilityResult r = compatibility_check(p, h);
        CHECK(r.collinearity_residual < 1e-6);
        CHECK(r.tau > 0.0);
        ++tested;
    }
}

TEST_CASE("simplex rank stratification") {
    Rng rng(49);
    const IntegralPair d = make_default_integrals();
    for (int i = 0; i < 20; ++i) CHECK(simplex_rank(random_flag(rng), d) == 2);

    const FlagPoint vertex{Vec3c(1, 0, 0), Vec3c(0, 0, 1)};
    CHECK(simplex_rank(vertex, d) == 0);

    // point of a diagonal line: x on an edge, y through the opposite vertex
    const FlagPoint diag = diagonal_line_sample(0, 0.4, 0.9);
    CHECK(simplex_rank(diag, d) == 1);
}

TEST_CASE("distance helpers vanish exactly on their loci") {
    const FlagPoint online{Vec3c(1, 0, 0), Vec3c(0, 1, 0)};
    CHECK(distance_to_base_set(AmbientPoint(online)) < 1e-12);
    const FlagPoint diag = diagonal_line_sample(1, 0.3, 0.2);
    CHECK(distance_to_sing(AmbientPoint(diag)) < 1e-10);
    CHECK(distance_to_delta(AmbientPoint(diag)) < 1e-10);
}

TEST_CASE("horizontal lift is reproducible") {
    Rng rng(51);
    int tested = 0;
    while (tested < 10) {
        const FlagPoint p = random_flag(rng);
        if (distance_to_delta(AmbientPoint(p)) < 5e-2) continue;
        const Vec3c w = psi_raw(AmbientPoint(p)).normalized();
        Vec3c u = flag_line().from_line(Vec2c(-0.2, 0.5));
        u = (u - w * w.dot(u)).eval();
        const AmbientTangent l1 = horizontal_lift(p, u).lifted;
        const AmbientTangent l2 = horizontal_lift(p, u).lifted;
        CHECK((l1 - l2).norm() < 1e-12);
        ++tested;
    }
}
