#include <benchmark/benchmark.h>

#include "pseudotor/dynamics.hpp"
#include "pseudotor/fibration.hpp"
#include "pseudotor/special.hpp"

using namespace pseudotor;

namespace {

FlagPoint fixture_flag() {
    Rng rng(7);
    return random_flag(rng);
}

void bm_ham_field(benchmark::State& state) {
    const IntegralPair d = make_default_integrals();
    const FlagPoint p = fixture_flag();
    for (auto _ : state) benchmark::DoNotOptimize(ham_field(d.F1, p));
}
BENCHMARK(bm_ham_field);

void bm_flow_unit_time(benchmark::State& state) {
    const IntegralPair d = make_default_integrals();
    const FlagPoint p = fixture_flag();
    for (auto _ : state) benchmark::DoNotOptimize(flow(d.F1, p, 1.0, 1e-10).end);
}
BENCHMARK(bm_flow_unit_time);

void bm_horizontal_lift(benchmark::State& state) {
    const FlagPoint p = fixture_flag();
    const Vec3c w = psi_raw(AmbientPoint(p)).normalized();
    Vec3c u = flag_line().from_line(Vec2c(0.4, -0.2));
    u = (u - w * w.dot(u)).eval();
    for (auto _ : state) benchmark::DoNotOptimize(horizontal_lift(p, u).lifted);
}
BENCHMARK(bm_horizontal_lift);

void bm_theta_D(benchmark::State& state) {
    const BaseMorseFunction h = height_from(RunConfig::defaults());
    const BoundaryDivisor d = divisor_from(h);
    const FlagPoint p = fixture_flag();
    const auto b = flag_tangent_basis(p);
    const FrameTriple fr{b[0], b[1], b[2]};
    for (auto _ : state) benchmark::DoNotOptimize(theta_D(p, fr, d));
}
BENCHMARK(bm_theta_D);

void bm_seed_point(benchmark::State& state) {
    const IntegralPair d = make_default_integrals();
    const BaseMorseFunction h = height_from(RunConfig::defaults());
    const LevelLoop loop = trace_loop(h, 0.4, 8);
    for (auto _ : state) {
        Rng rng(7);
        benchmark::DoNotOptimize(seed_point(loop.samples[0], 2.0, 2.6, d, rng));
    }
}
BENCHMARK(bm_seed_point);

void bm_sample_torus(benchmark::State& state) {
    const IntegralPair d = make_default_integrals();
    const BaseMorseFunction h = height_from(RunConfig::defaults());
    const LevelLoop loop = trace_loop(h, 0.4, 16);
    for (auto _ : state) {
        Rng rng(7);
        benchmark::DoNotOptimize(sample_torus(h, loop, 2.0, 2.6, 8, d, rng));
    }
}
BENCHMARK(bm_sample_torus);

}  // namespace

BENCHMARK_MAIN();
