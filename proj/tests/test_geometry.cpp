#include <complex>

#include "doctest.h"
#include "pseudotor/errors.hpp"
#include "pseudotor/geometry.hpp"

using namespace pseudotor;

namespace {
const cplx omega_root = std::exp(cplx(0.0, 2.0 * M_PI / 3.0));
}

TEST_CASE("canonicalize is scale and phase invariant") {
    const Vec3c a(cplx(0, 0), cplx(0, 2), cplx(0, -2));
    const Vec3c b(0.0, 1.0, -1.0);
    CHECK(proj_distance(canonicalize3(a), canonicalize3(b)) < 1e-12);
    // canonical form: first nonzero entry real positive, unit norm
    const Vec3c c = canonicalize3(a);
    CHECK(c(1).imag() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(c(1).real() > 0.0);
    CHECK(c.norm() == doctest::Approx(1.0).epsilon(1e-14));

    CHECK((canonicalize3(Vec3c(1, 0, 0)) - Vec3c(1, 0, 0)).norm() < 1e-15);
    const Vec3c d = canonicalize3(Vec3c(3, 4, 0));
    CHECK((d - Vec3c(0.6, 0.8, 0.0)).norm() < 1e-14);

    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        const Vec3c v = rng.cnormal3();
        const cplx lambda = 0.3 * rng.cnormal() + cplx(1.0, 0.0);
        CHECK((canonicalize3(v) - canonicalize3(lambda * v)).norm() < 1e-12);
    }
    CHECK_THROWS_AS(canonicalize3(Vec3c::Zero()), ZeroVector);
}

TEST_CASE("flag residual on reference pairs") {
    CHECK(flag_residual(Vec3c(1, 0, 0), Vec3c(0, 1, 0)) == doctest::Approx(0.0));
    CHECK(flag_residual(Vec3c(1, 1, 1), Vec3c(1, 1, 1)) == doctest::Approx(1.0));
    const Vec3c y(1.0, omega_root, omega_root * omega_root);
    CHECK(flag_residual(Vec3c(1, 1, 1), y) < 1e-15);
}

TEST_CASE("project_to_flag: fixed point, contraction, idempotence") {
    const Vec3c x = canonicalize3(Vec3c(1, 1, 1));
    const Vec3c y = canonicalize3(Vec3c(1.0, omega_root, omega_root * omega_root));
    const FlagPoint exact = project_to_flag(x, y);
    CHECK(proj_distance(exact.x, x) < 1e-13);
    CHECK(proj_distance(exact.y, y) < 1e-13);

    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        const Vec3c dy = 1e-6 * rng.cnormal3();
        const FlagPoint p = project_to_flag(x, y + dy);
        CHECK(flag_residual(p) < 1e-10);
        CHECK(proj_distance(p.y, y) < 1e-5);
        // idempotence
        const FlagPoint q = project_to_flag(p.x, p.y);
        CHECK(proj_distance(q.x, p.x) < 1e-12);
        CHECK(proj_distance(q.y, p.y) < 1e-12);
    }

    const Vec3c y2 = Vec3c(1.0, omega_root, omega_root * omega_root) + Vec3c(1e-4, 0, 0);
    CHECK(flag_residual(project_to_flag(Vec3c(1, 1, 1), y2)) < 1e-10);
}

TEST_CASE("chart frame: dominance rule and exact antisymmetry") {
    Rng rng(5);
    const FlagPoint p =
        project_to_flag(canonicalize3(Vec3c(1.0, 0.1, 0.05)), canonicalize3(Vec3c(0.02, 1.0, -0.1)));
    const ChartFrame c = chart_frame(p);
    CHECK(c.xi == 0);
    CHECK(c.yj == 1);
    for (int i = 0; i < 20; ++i) {
        const ChartFrame f = chart_frame(random_flag(rng));
        CHECK((f.omega + f.omega.transpose()).norm() == doctest::Approx(0.0));
        CHECK(std::abs(f.omega.determinant()) > 1e-12);
    }
}

TEST_CASE("chart omega agrees with the ambient Fubini-Study pairing") {
    // oracle: omega in chart components must reproduce omega_pair on the
    // corresponding ambient tangents through the chart jacobian
    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        const FlagPoint p = random_flag(rng);
        const ChartFrame c = chart_frame(p);
        const FlagPoint rep = chart_point(c);  // chart representative scaling
        const auto basis = flag_tangent_basis(p);
        const AmbientTangent u = basis[0], v = basis[3];
        const TangentVector cu = to_chart(p, c, u), cv = to_chart(p, c, v);
        const double chart_val = cu.comps.dot(c.omega * cv.comps);
        const double ambient_val = omega_pair(AmbientPoint(p), u, v);
        CHECK(chart_val == doctest::Approx(ambient_val).epsilon(1e-8));
        (void)rep;
    }
}

TEST_CASE("chart round trip and overlap consistency") {
    Rng rng(9);
    int overlaps = 0;
    for (int i = 0; i < 100; ++i) {
        const FlagPoint p = random_flag(rng);
        const ChartFrame c = chart_frame(p);
        // round trip through local coordinates
        const FlagPoint back = chart_point(c);
        // proj_distance resolves at the sqrt(machine-eps) scale, ~1.5e-8
        CHECK(proj_distance(back.x, p.x) < 1e-7);
        CHECK(proj_distance(back.y, p.y) < 1e-7);

        // pick a second valid chart and compare omega on the same tangents
        for (int xi = 0; xi < 3 && overlaps < 40; ++xi) {
            if (xi == c.xi || std::abs(p.x(xi)) < 0.3) continue;
            ChartFrame c2;
            try {
                c2 = chart_frame_at(p, xi, c.yj, c.yk);
            } catch (const DegenerateChart&) {
                continue;
            }
            const auto basis = flag_tangent_basis(p);
            const TangentVector u1 = to_chart(p, c, basis[1]), v1 = to_chart(p, c, basis[4]);
            const TangentVector u2 = to_chart(p, c2, basis[1]), v2 = to_chart(p, c2, basis[4]);
            const double w1 = u1.comps.dot(c.omega * v1.comps);
            const double w2 = u2.comps.dot(c2.omega * v2.comps);
            CHECK(std::abs(w1 - w2) < 1e-8);
            ++overlaps;
        }
    }
    CHECK(overlaps >= 20);
}

TEST_CASE("fs_pair is scale invariant and antisymmetric") {
    Rng rng(13);
    for (int i = 0; i < 30; ++i) {
        const Vec3c z = rng.cnormal3(), u = rng.cnormal3(), v = rng.cnormal3();
        const cplx s = 2.0 + 0.5 * rng.cnormal();
        CHECK(fs_pair(z, u, v) == doctest::Approx(-fs_pair(z, v, u)).epsilon(1e-12));
        // scaling the representative and velocities together leaves the
        // projective pairing unchanged
        CHECK(fs_pair(s * z, s * u, s * v) == doctest::Approx(fs_pair(z, u, v)).epsilon(1e-10));
    }
}

TEST_CASE("flag tangent basis spans the constraint kernel") {
    Rng rng(17);
    for (int i = 0; i < 20; ++i) {
        const FlagPoint p = random_flag(rng);
        for (const auto& t : flag_tangent_basis(p)) {
            // tangency to the hypersurface: d<1, x.*y>(t) = 0
            const cplx d = (t.dx.cwiseProduct(p.y) + p.x.cwiseProduct(t.dy)).sum();
            CHECK(std::abs(d) < 1e-10);
            // horizontal representation
            CHECK(std::abs(p.x.dot(t.dx)) < 1e-10);
            CHECK(std::abs(p.y.dot(t.dy)) < 1e-10);
        }
    }
}
