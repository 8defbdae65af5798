#include <cmath>
#include <set>
#include <string>

#include "doctest.h"
#include "pseudotor/errors.hpp"
#include "pseudotor/fibration.hpp"

using namespace pseudotor;

namespace {
BaseMorseFunction default_h() { return height_from(RunConfig::defaults()); }
}

TEST_CASE("make_height pins the critical values and rejects equal points") {
    const BaseMorseFunction h = default_h();
    CHECK(h.value(h.max_point()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h.value(h.min_point()) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS(make_height(canonicalize3(Vec3c(0, 1, -1)), canonicalize3(Vec3c(0, 1, -1)),
                                BaseMorseFunction::Mode::Mobius),
                    DegeneratePair);
}

TEST_CASE("symbol mode forces the orthogonal complement and warns") {
    const Vec3c a = canonicalize3(Vec3c(0, 1, -1));
    const BaseMorseFunction hs = make_height(a, canonicalize3(Vec3c(1, 0, -1)),
                                             BaseMorseFunction::Mode::Symbol);
    CHECK(hs.orthogonality_warning());
    // second critical point is the complement of a inside the line: [2:-1:-1]
    CHECK(proj_distance(hs.min_point(), canonicalize3(Vec3c(2, -1, -1))) < 1e-12);
    CHECK(hs.value(hs.min_point()) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("trace_loop: residual, closure and range guard") {
    const BaseMorseFunction h = default_h();
    for (double level : {-0.7, 0.0, 0.4}) {
        const LevelLoop loop = trace_loop(h, level, 64);
        CHECK(loop.closed);
        for (const auto& w : loop.samples) CHECK(std::abs(h.value(w) - level) < 1e-9);
        // consecutive samples stay close and the loop closes
        for (std::size_t i = 0; i < loop.samples.size(); ++i) {
            const auto& a = loop.samples[i];
            const auto& b = loop.samples[(i + 1) % loop.samples.size()];
            CHECK(proj_distance(a, b) < 0.5);
        }
    }
    CHECK_THROWS_AS(trace_loop(h, 1.5, 16), LevelOutOfRange);
    CHECK_THROWS_AS(trace_loop(h, -1.0, 16), LevelOutOfRange);
}

TEST_CASE("loop circumference shrinks toward the maximum") {
    const BaseMorseFunction h = default_h();
    auto circumference = [&](double level) {
        const LevelLoop loop = trace_loop(h, level, 64);
        double c = 0.0;
        for (std::size_t i = 0; i < loop.samples.size(); ++i)
            c += proj_distance(loop.samples[i], loop.samples[(i + 1) % loop.samples.size()]);
        return c;
    };
    CHECK(circumference(0.999) < 0.2 * circumference(0.5));
}

TEST_CASE("the level of the third singular point carries a loop through it") {
    const BaseMorseFunction h = default_h();
    const Vec3c s3 = canonicalize3(Vec3c(1, -1, 0));
    const double level = h.value(s3);
    const LevelLoop loop = trace_loop(h, level, 256);
    double dmin = 1e18;
    for (const auto& w : loop.samples) dmin = std::min(dmin, proj_distance(w, s3));
    CHECK(dmin < 2e-2);
    // and for the default Mobius pair that level is exactly 0
    CHECK(level == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("seed_point: residuals, restart consistency and NoSolution report") {
    const IntegralPair d = make_default_integrals();
    const BaseMorseFunction h = default_h();
    const LevelLoop loop = trace_loop(h, 0.4, 8);
    Rng rng(61);
    const FlagPoint p0 = seed_point(loop.samples[2], 2.0, 2.6, d, rng);
    CHECK(std::abs(eval_symbol(d.F1, p0) - 2.0) < 1e-9);
    CHECK(std::abs(eval_symbol(d.F2, p0) - 2.6) < 1e-9);
    CHECK(flag_residual(p0) < 1e-9);
    CHECK(proj_distance(canonicalize3(psi_raw(AmbientPoint(p0))), loop.samples[2]) < 1e-9);

    for (int i = 0; i < 10; ++i) {
        Rng other(100 + i);
        const FlagPoint q = seed_point(loop.samples[2], 2.0, 2.6, d, other);
        CHECK(std::abs(eval_symbol(d.F1, q) - 2.0) < 1e-9);
        CHECK(std::abs(eval_symbol(d.F2, q) - 2.6) < 1e-9);
        CHECK(proj_distance(canonicalize3(psi_raw(AmbientPoint(q))), loop.samples[2]) < 1e-9);
    }

    // hexagon-vertex values occur only on the base set
    CHECK_THROWS_AS(seed_point(loop.samples[0], 0.0, 0.0, d, rng), NoSolution);
}

TEST_CASE("first return period of the diagonal integrals is pi") {
    // exp(-2 i diag t) returns projectively when the eigenvalue gaps (all
    // integers here) complete a full 2 pi phase: t = pi
    const IntegralPair d = make_default_integrals();
    const BaseMorseFunction h = default_h();
    const LevelLoop loop = trace_loop(h, 0.4, 8);
    Rng rng(63);
    const FlagPoint p = seed_point(loop.samples[0], 2.0, 2.6, d, rng);
    CHECK(first_return_period(d.F1, p) == doctest::Approx(M_PI).epsilon(1e-6));
    CHECK(first_return_period(d.F2, p) == doctest::Approx(M_PI).epsilon(1e-6));
}

TEST_CASE("sample_torus: residuals, holonomy closure and Lagrangian check") {
    const IntegralPair d = make_default_integrals();
    const BaseMorseFunction h = default_h();
    Rng rng(65);
    const LevelLoop loop = trace_loop(h, 0.5, 12);
    const TorusFiber t = sample_torus(h, loop, 2.0, 2.6, 5, d, rng);
    CHECK(t.fiber_type == TorusFiber::Type::Smooth);
    CHECK(t.max_f_residual < 1e-8);
    CHECK(t.max_flag_residual < 1e-9);
    CHECK(t.max_loop_residual < 1e-7);
    CHECK(t.holonomy_distance < 1e-5);
    CHECK(lagrangian_residual(t) < 1e-6);

    // control 2-plane (X, IX) is NOT Lagrangian
    double control = 1e18;
    for (std::size_t i = 0; i < t.samples.size(); i += 17) {
        AmbientTangent e = t.frames[i].xf1;
        const double n = e.norm();
        if (n < 1e-9) continue;
        e = e * (1.0 / n);
        control = std::min(control,
                           std::abs(omega_pair(AmbientPoint(t.samples[i]), e, e.rotated())));
    }
    CHECK(control > 1e-2);
}

TEST_CASE("lagrangian residual is stable under mesh refinement") {
    const IntegralPair d = make_default_integrals();
    const BaseMorseFunction h = default_h();
    Rng rng(67);
    const LevelLoop loop = trace_loop(h, 0.5, 10);
    const double r1 = lagrangian_residual(sample_torus(h, loop, 2.0, 2.6, 4, d, rng));
    const double r2 = lagrangian_residual(sample_torus(h, loop, 2.0, 2.6, 8, d, rng));
    CHECK(r2 < 2.0 * std::max(r1, 1e-12));
}

TEST_CASE("three-case torus classification") {
    const IntegralPair d = make_default_integrals();
    const BaseMorseFunction h = default_h();
    // interior singular level of the default h is exactly 0 (third marked point)
    const auto seg = diagonal_segment(2, d);
    const double m1 = 0.5 * (seg[0][0] + seg[1][0]);
    const double m2 = 0.5 * (seg[0][1] + seg[1][1]);
    CHECK(classify_torus(h, 0.5, m1, m2, d) == TorusFiber::Type::Smooth);
    CHECK(classify_torus(h, 0.0, m1 + 0.2, m2 - 0.2, d) == TorusFiber::Type::Smooth);
    CHECK(classify_torus(h, 0.0, m1, m2, d) == TorusFiber::Type::Collapsed);
}

TEST_CASE("the minimal fibration has exactly one collapsed level") {
    const BaseMorseFunction h = default_h();
    CHECK(collapsed_level_count(h) == 1);
    // control: a height with generic critical points meets all three
    // singular base points at interior levels
    const BaseMorseFunction hc =
        make_height(canonicalize3(Vec3c(1.0, cplx(0.3, 0.2), cplx(-1.3, -0.2))),
                    canonicalize3(Vec3c(0.2, 1.0, -1.2)), BaseMorseFunction::Mode::Mobius);
    CHECK(collapsed_level_count(hc) >= collapsed_level_count(h));
}

TEST_CASE("collapsed torus sampling excludes the collapse circle but fills the rest") {
    const IntegralPair d = make_default_integrals();
    const BaseMorseFunction h = default_h();
    Rng rng(69);
    const auto seg = diagonal_segment(2, d);
    const double m1 = 0.5 * (seg[0][0] + seg[1][0]);
    const double m2 = 0.5 * (seg[0][1] + seg[1][1]);
    const LevelLoop loop = trace_loop(h, 0.0, 12);
    const TorusFiber t = sample_torus(h, loop, m1, m2, 4, d, rng, 1e-3);
    CHECK(t.fiber_type == TorusFiber::Type::Collapsed);
    std::size_t valid = 0;
    for (char v : t.valid) valid += v;
    CHECK(valid > 0);
    CHECK(valid < t.samples.size());
    CHECK(t.max_f_residual < 1e-8);
}

TEST_CASE("moment image: hexagon vertices, hull membership, boundary census") {
    const IntegralPair d = make_default_integrals();
    Rng rng(71);
    std::vector<FlagPoint> samples;
    for (int i = 0; i < 1000; ++i) samples.push_back(random_flag(rng));
    const MomentImage img = moment_image(samples, d);

    const std::array<std::array<double, 2>, 6> expected{
        {{0, 0}, {1, 1}, {1, 2}, {3, 4}, {3, 5}, {4, 6}}};
    for (const auto& e : expected) {
        double best = 1e18;
        for (const auto& v : img.vertices)
            best = std::min(best, std::hypot(v.f1 - e[0], v.f2 - e[1]));
        CHECK(best < 1e-9);
    }
    for (const auto& q : img.values) CHECK(hull_signed_distance(img.hull, q) < 1e-9);

    // B-line samples on the hull boundary, diagonal samples strictly inside
    for (const BaseSetLine::Kind kind : {BaseSetLine::Kind::XXY, BaseSetLine::Kind::XYY}) {
        const BaseSetLine line{kind, 0, 1, 2};
        for (int i = 0; i < 10; ++i) {
            const FlagPoint b = base_line_sample(line, rng);
            const std::array<double, 2> q{eval_symbol(d.F1, b), eval_symbol(d.F2, b)};
            CHECK(std::abs(hull_signed_distance(img.hull, q)) < 1e-9);
        }
    }
    for (int i = 0; i < 3; ++i)
        for (double mu : {0.2, 0.5, 0.8}) {
            const FlagPoint s = diagonal_line_sample(i, mu, 0.4);
            const std::array<double, 2> q{eval_symbol(d.F1, s), eval_symbol(d.F2, s)};
            CHECK(hull_signed_distance(img.hull, q) < -1e-6);
        }
}

TEST_CASE("boundary divisor has four labeled local branches") {
    const BaseMorseFunction h = default_h();
    Rng rng(73);
    const auto branches = divisor_branch_samples(h, 5, rng);
    CHECK(branches.size() == 20);  // 4 branches x 5 samples
    std::set<std::string> labels;
    for (const auto& [label, p] : branches) {
        labels.insert(label);
        CHECK(flag_residual(p) < 1e-9);
    }
    CHECK(labels.size() == 4);
}

TEST_CASE("triple involution on torus samples") {
    const IntegralPair d = make_default_integrals();
    const BaseMorseFunction h = default_h();
    Rng rng(75);
    const LevelLoop loop = trace_loop(h, -0.4, 8);
    const TorusFiber t = sample_torus(h, loop, 2.0, 2.6, 4, d, rng);
    for (std::size_t i = 0; i < t.samples.size(); i += 23) {
        if (!t.valid[i]) continue;
        const FlagPoint& p = t.samples[i];
        CHECK(std::abs(poisson(d.F1, d.F2, p)) < 1e-8);
        // {f_i, h o psi} = 0: omega(X_fi, X_{h o psi}) on the sample
        const AmbientTangent xh = pullback_ham_field(h, p);
        CHECK(std::abs(omega_pair(AmbientPoint(p), ham_field(d.F1, p), xh)) < 1e-8);
        CHECK(std::abs(omega_pair(AmbientPoint(p), ham_field(d.F2, p), xh)) < 1e-8);
    }
}
