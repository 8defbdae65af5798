#include <cmath>

#include "doctest.h"
#include "pseudotor/dynamics.hpp"
#include "pseudotor/errors.hpp"

using namespace pseudotor;

TEST_CASE("symbol evaluation on eigenvectors and reference points") {
    const Mat3c a = Eigen::Vector3cd(0.0, 1.0, 2.0).asDiagonal();
    CHECK(sym_value(a, Vec3c(1, 0, 0)) == doctest::Approx(0.0));
    CHECK(sym_value(a, Vec3c(1, 1, 1)) == doctest::Approx(1.0));

    const IntegralPair d = make_default_integrals();
    const FlagPoint fixed{Vec3c(1, 0, 0), Vec3c(0, 0, 1)};
    CHECK(eval_symbol(d.F1, fixed) == doctest::Approx(0.0));
}

TEST_CASE("default integrals: balance and affine independence") {
    const IntegralPair d = make_default_integrals();
    for (int i = 0; i < 3; ++i) {
        CHECK((d.F1.mx(i, i) + d.F1.my(i, i)).real() == doctest::Approx(2.0));
        CHECK((d.F2.mx(i, i) + d.F2.my(i, i)).real() == doctest::Approx(3.0));
    }
    CHECK(d.F1.balanced());
    CHECK(d.F2.balanced());
    Eigen::Matrix3d m;
    m << 0, 1, 2, 0, 1, 3, 1, 1, 1;
    CHECK(std::abs(m.determinant()) > 0.5);
}

TEST_CASE("sym_diff matches finite differences of sym_value") {
    Rng rng(21);
    const Mat3c a = Eigen::Vector3cd(0.3, -1.0, 2.0).asDiagonal();
    for (int i = 0; i < 50; ++i) {
        Vec3c z = rng.cnormal3();
        z.normalize();
        Vec3c u = rng.cnormal3();
        u = herm_project(z, u);
        const double eps = 1e-6;
        const double fd =
            (sym_value(a, (z + eps * u).eval()) - sym_value(a, (z - eps * u).eval())) / (2 * eps);
        CHECK(sym_diff(a, z, u) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("ham_field satisfies omega(X_f, v) = df(v) against the differential") {
    Rng rng(23);
    const IntegralPair d = make_default_integrals();
    for (int i = 0; i < 30; ++i) {
        const FlagPoint p = random_flag(rng);
        const AmbientTangent xf = ham_field(d.F1, p);
        for (const auto& v : flag_tangent_basis(p)) {
            const double lhs = omega_pair(AmbientPoint(p), xf, v);
            const double rhs = symbol_differential(d.F1, AmbientPoint(p), v);
            CHECK(std::abs(lhs - rhs) < 1e-9);
        }
    }
}

TEST_CASE("ham_field vanishes at the torus-fixed flag") {
    const IntegralPair d = make_default_integrals();
    const FlagPoint fixed{Vec3c(1, 0, 0), Vec3c(0, 0, 1)};
    CHECK(ham_field(d.F1, fixed).norm() < 1e-10);
    CHECK(ham_field(d.F2, fixed).norm() < 1e-10);
}

TEST_CASE("poisson bracket: antisymmetry and involution of the default pair") {
    Rng rng(25);
    const IntegralPair d = make_default_integrals();
    for (int i = 0; i < 100; ++i) {
        const FlagPoint p = random_flag(rng);
        CHECK(std::abs(poisson(d.F1, d.F1, p)) < 1e-10);
        CHECK(std::abs(poisson(d.F1, d.F2, p) + poisson(d.F2, d.F1, p)) < 1e-12);
        CHECK(std::abs(poisson(d.F1, d.F2, p)) < 1e-8);
    }
}

TEST_CASE("adaptive flow matches the exact symbol transport") {
    // oracle: the integrator against the closed-form flow exp(-2 i M t)
    Rng rng(27);
    const IntegralPair d = make_default_integrals();
    for (int i = 0; i < 10; ++i) {
        const FlagPoint p = random_flag(rng);
        const double t = 0.7;
        const FlagPoint numeric = flow(d.F1, p, t, 1e-11).end;
        const AmbientPoint exact = symbol_transport(d.F1, AmbientPoint(p), t);
        CHECK(proj_distance(numeric.x, exact.x) < 1e-7);
        CHECK(proj_distance(numeric.y, exact.y) < 1e-7);
    }
}

TEST_CASE("flow basics: identity at t=0, stationary at fixed flags, commutation") {
    const IntegralPair d = make_default_integrals();
    Rng rng(29);
    const FlagPoint p = random_flag(rng);
    const FlagPoint same = flow(d.F1, p, 0.0).end;
    CHECK(proj_distance(same.x, p.x) < 1e-12);

    const FlagPoint fixed{Vec3c(1, 0, 0), Vec3c(0, 0, 1)};
    const FlagPoint still = flow(d.F1, fixed, 0.5).end;
    CHECK(proj_distance(still.x, fixed.x) < 1e-9);
    CHECK(proj_distance(still.y, fixed.y) < 1e-9);

    for (int i = 0; i < 5; ++i) {
        const FlagPoint q = random_flag(rng);
        const FlagPoint ab = flow(d.F2, flow(d.F1, q, 0.6).end, 0.9).end;
        const FlagPoint ba = flow(d.F1, flow(d.F2, q, 0.9).end, 0.6).end;
        CHECK(chart_distance(ab, ba) < 1e-6);
    }
}

TEST_CASE("flow of a balanced symbol keeps the constraint; unbalanced control leaks") {
    Rng rng(31);
    const IntegralPair d = make_default_integrals();
    double worst_balanced = 0.0, worst_unbalanced = 0.0;
    const SymbolFunction bad = SymbolFunction::diag_pair({0.0, 1.0, 2.0}, {0.0, 0.0, 0.0});
    for (int i = 0; i < 10; ++i) {
        const FlagPoint p = random_flag(rng);
        const SymbolFlowResult ok = flow(d.F1, p, 1.0, 1e-10);
        worst_balanced = std::max(worst_balanced, ok.monitor.max_constraint_residual);
        const SymbolFlowResult leak = flow(bad, p, 0.1, 1e-10);
        worst_unbalanced = std::max(worst_unbalanced, flag_residual(leak.end));
    }
    CHECK(worst_balanced < 1e-9);
    CHECK(worst_unbalanced > 1e-4);
}

TEST_CASE("flow conserves both commuting integrals") {
    Rng rng(33);
    const IntegralPair d = make_default_integrals();
    for (int i = 0; i < 10; ++i) {
        const FlagPoint p = random_flag(rng);
        const double f2_before = eval_symbol(d.F2, p);
        const FlagPoint q = flow(d.F1, p, 1.3, 1e-11).end;
        CHECK(std::abs(eval_symbol(d.F2, q) - f2_before) < 1e-8);
    }
}

TEST_CASE("Kahler preservation: symbol flow commutes with the complex structure") {
    // push a holomorphic pair (v, Iv) through the exact flow: it stays a
    // holomorphic pair because the flow is a unitary matrix action
    Rng rng(35);
    const IntegralPair d = make_default_integrals();
    for (int i = 0; i < 10; ++i) {
        const FlagPoint p = random_flag(rng);
        const AmbientTangent v = flag_tangent_basis(p)[0];
        const double t = 0.8;
        const Mat3c ux = herm_exp(d.F1.mx, cplx(0, -2.0 * t));
        const Mat3c uy = herm_exp(d.F1.my, cplx(0, -2.0 * t));
        const AmbientTangent pushed_iv(ux * v.rotated().dx, uy * v.rotated().dy);
        const AmbientTangent i_pushed(cplx(0, 1) * (ux * v.dx), cplx(0, 1) * (uy * v.dy));
        CHECK((pushed_iv - i_pushed).norm() < 1e-12);
    }
}

TEST_CASE("herm_exp reproduces the scalar exponential on eigenvectors") {
    const Mat3c a = Eigen::Vector3cd(0.0, 1.0, 2.0).asDiagonal();
    const Mat3c e = herm_exp(a, cplx(0.0, -2.0));
    CHECK(std::abs(e(1, 1) - std::exp(cplx(0.0, -2.0))) < 1e-14);
    CHECK(std::abs(e(0, 0) - 1.0) < 1e-14);
}

TEST_CASE("domain markers are enforced") {
    const SymbolFunction base =
        SymbolFunction::diag_pair({0.0, 1.0, 2.0}, {0.0, 0.0, 0.0}, Domain::BaseCP2w);
    const FlagPoint p{Vec3c(1, 0, 0), Vec3c(0, 0, 1)};
    CHECK_THROWS_AS(eval_symbol(base, p), DomainMismatch);
}
