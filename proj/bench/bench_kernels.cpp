#include <benchmark/benchmark.h>

#include "wavecrit/dns.hpp"

using namespace wavecrit;

namespace {

const W0Assembly& packet() {
    static const W0Assembly a = [] {
        PhysParams p{0.65, 1.0, 1.0, 0.2, 0.008};
        Envelope env{critical_carrier(0.65, snapped_k0(0.5, 0.2, 5), Branch::Plus), 0.2};
        return assemble_W0(p, env, {5, 9});
    }();
    return a;
}

Grid field_grid() {
    Grid g = default_grid(packet(), Family::Sum);
    g.x = periodic_axis(packet().period_x(), 256);
    return g;
}

void BM_field_parallel(benchmark::State& st) {
    const auto g = field_grid();
    const auto lists = family_lists(packet(), Family::Sum);
    for (auto _ : st) benchmark::DoNotOptimize(evaluate_field(lists, 0.0, g));
}

void BM_field_serial(benchmark::State& st) {
    const auto g = field_grid();
    const auto lists = family_lists(packet(), Family::Sum);
    for (auto _ : st) benchmark::DoNotOptimize(evaluate_field_serial(lists, 0.0, g));
}

void dns_step(benchmark::State& st, bool parallel) {
    auto cfg = default_sim_config(packet(), 256, 384);
    cfg.parallel = parallel;
    Solver sol(cfg);
    State s = init_from_Wapp(sol, packet(), nullptr);
    const State init = s;
    int n = 0;
    for (auto _ : st) {
        if (++n % 50 == 0) {
            st.PauseTiming();
            s = init;
            sol.reset();
            st.ResumeTiming();
        }
        sol.step(s);
    }
}

void BM_dns_step_parallel(benchmark::State& st) { dns_step(st, true); }
void BM_dns_step_serial(benchmark::State& st) { dns_step(st, false); }

void BM_dns_nonlinear(benchmark::State& st) {
    Solver sol(default_sim_config(packet(), 256, 384));
    const State s = init_from_Wapp(sol, packet(), nullptr);
    for (auto _ : st) benchmark::DoNotOptimize(sol.nonlinear(s));
}

}  // namespace

BENCHMARK(BM_field_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_field_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_dns_step_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_dns_step_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_dns_nonlinear)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
