#include <benchmark/benchmark.h>

#include "watched/discretize.hpp"
#include "watched/dynamics.hpp"
#include "watched/kernels.hpp"

using namespace watched;

namespace {

DiscreteModel full3d_model(int n_radial) {
  PhysicalSystem s;
  s.dos.omega_cut_c = 1.7;
  DetectorAtom d;
  d.position = Vec3(1.5707963267948966, 0.0, 0.0);
  s.detector_atoms = {d};
  GridSpec g;
  g.n_modes = n_radial;
  g.omega_cut = 2.0;
  g.t_max = 0.0;
  return build_full_3d(s, g);
}

template <bool Parallel>
void BM_Generator(benchmark::State& state) {
  const auto m = full3d_model(static_cast<int>(state.range(0)));
  ode::State y = ode::State::Constant(m.state_size(), cplx(1e-3, 2e-3));
  ode::State dy(y.size());
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::apply_generator_parallel(m, 1.0, y.data(), dy.data());
    else
      kernels::apply_generator_serial(m, 1.0, y.data(), dy.data());
    benchmark::DoNotOptimize(dy.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(m.n_modes()));
}

template <bool Parallel>
void BM_DiscreteSums(benchmark::State& state) {
  const auto m = full3d_model(static_cast<int>(state.range(0)));
  const cplx s(0.01, -1.0);
  for (auto _ : state) {
    auto sums = Parallel ? kernels::discrete_sums_parallel(m, s) : kernels::discrete_sums_serial(m, s);
    benchmark::DoNotOptimize(sums.k);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(m.n_modes()));
}

template <bool Parallel>
void BM_L2Average(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    double v = Parallel ? kernels::l2_average_parallel(order) : kernels::l2_average_serial(order);
    benchmark::DoNotOptimize(v);
  }
}

void BM_Integrate(benchmark::State& state) {
  const auto m = full3d_model(80);
  dynamics::SolverSpec spec;
  spec.parallel = state.range(0) != 0;
  spec.n_samples = 11;
  for (auto _ : state) {
    auto traj = dynamics::integrate(m, 20.0, spec);
    benchmark::DoNotOptimize(traj.survival.back());
  }
}

}  // namespace

BENCHMARK(BM_Generator<false>)->Name("generator/serial")->Arg(80)->Arg(160);
BENCHMARK(BM_Generator<true>)->Name("generator/parallel")->Arg(80)->Arg(160);
BENCHMARK(BM_DiscreteSums<false>)->Name("discrete_sums/serial")->Arg(80)->Arg(160);
BENCHMARK(BM_DiscreteSums<true>)->Name("discrete_sums/parallel")->Arg(80)->Arg(160);
BENCHMARK(BM_L2Average<false>)->Name("l2_average/serial")->Arg(8);
BENCHMARK(BM_L2Average<true>)->Name("l2_average/parallel")->Arg(8);
BENCHMARK(BM_Integrate)->Name("integrate")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
