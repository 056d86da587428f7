// Serial reference vs OpenMP kernel timings. Run with OMP_NUM_THREADS set to
// compare thread counts; the serial variants ignore it.
#include <benchmark/benchmark.h>

#include <filesystem>

#include "oamsec/ber.hpp"
#include "oamsec/channel.hpp"
#include "oamsec/scenario.hpp"
#include "oamsec/schemes.hpp"
#include "oamsec/sweep.hpp"
#include "oamsec/validate.hpp"

using namespace oamsec;

namespace {

struct RisPair {
    Positions tx, rx;
    double wavelength;
};

RisPair ris_pair(int q) {
    Scenario s = paper_default();
    s.set_ris_elements(q, q);
    const Deployment d = s.deployment();
    return {ris_element_positions(d.ris1), ris_element_positions(d.ris2), d.links.wavelength};
}

void BM_LosChannelSerial(benchmark::State& state) {
    const RisPair p = ris_pair(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(los_channel_serial(p.tx, p.rx, 1.0, p.wavelength));
}

void BM_LosChannelParallel(benchmark::State& state) {
    const RisPair p = ris_pair(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(los_channel(p.tx, p.rx, 1.0, p.wavelength));
}

const SchemeSetup& ber_setup() {
    static const SchemeSetup s = setup_scheme(Scheme::proposed, desk_scenario(), 0);
    return s;
}

void BM_BerSerial(benchmark::State& state) {
    const SchemeSetup& s = ber_setup();
    for (auto _ : state)
        benchmark::DoNotOptimize(ber_monte_carlo_serial(s.model, s.start, {10.0}, static_cast<int>(state.range(0)), 1));
}

void BM_BerParallel(benchmark::State& state) {
    const SchemeSetup& s = ber_setup();
    for (auto _ : state)
        benchmark::DoNotOptimize(ber_monte_carlo(s.model, s.start, {10.0}, static_cast<int>(state.range(0)), 1));
}

struct MiInputs {
    SystemModel model;
    DesignPoint design;
};

const MiInputs& mi_inputs() {
    static const MiInputs in = [] {
        RandomModelOptions opt;
        opt.n = 6;
        opt.n_e = 6;
        opt.n_a = 3;
        opt.n_s = 2;
        opt.n_zz = 1;
        MiInputs r{random_model(opt, 1), {}};
        r.design = random_design(r.model, 2);
        return r;
    }();
    return in;
}

void BM_MutualInfoSerial(benchmark::State& state) {
    const MiInputs& in = mi_inputs();
    const TransmitState st = in.model.transmit_state(in.design.p);
    for (auto _ : state)
        benchmark::DoNotOptimize(index_mutual_info_mc_serial(in.model.channels, in.design.ris, st, in.model.codebook,
                                                             in.model.basis, in.model.noise,
                                                             static_cast<int>(state.range(0)), 3));
}

void BM_MutualInfoParallel(benchmark::State& state) {
    const MiInputs& in = mi_inputs();
    const TransmitState st = in.model.transmit_state(in.design.p);
    for (auto _ : state)
        benchmark::DoNotOptimize(index_mutual_info_mc(in.model.channels, in.design.ris, st, in.model.codebook,
                                                      in.model.basis, in.model.noise, static_cast<int>(state.range(0)),
                                                      3));
}

SweepSpec small_sweep() {
    SweepSpec spec;
    spec.parameter = "Q";
    spec.values = {4, 8};
    spec.seeds = {0, 1};
    spec.schemes = {Scheme::proposed, Scheme::sa};
    spec.ao.max_outer_iters = 5;
    return spec;
}

void run_sweep_bench(benchmark::State& state, bool parallel) {
    const SweepSpec spec = small_sweep();
    const Scenario sc = desk_scenario();
    const auto path = (std::filesystem::temp_directory_path() / "oamsec_bench_sweep.csv").string();
    for (auto _ : state) benchmark::DoNotOptimize(run_sweep(spec, sc, path, "", parallel));
    std::filesystem::remove(path);
}

void BM_SweepSerial(benchmark::State& state) { run_sweep_bench(state, false); }
void BM_SweepParallel(benchmark::State& state) { run_sweep_bench(state, true); }

}  // namespace

BENCHMARK(BM_LosChannelSerial)->Arg(40)->Arg(160)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LosChannelParallel)->Arg(40)->Arg(160)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BerSerial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BerParallel)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MutualInfoSerial)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MutualInfoParallel)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
