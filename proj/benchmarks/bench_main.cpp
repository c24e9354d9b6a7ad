#include <benchmark/benchmark.h>

#include "cotrans/payload_fbl.hpp"
#include "cotrans/payload_system.hpp"
#include "cotrans/reference.hpp"
#include "cotrans/uav_fbl.hpp"

using namespace cotrans;

namespace {

SystemState tilted_state(int n) {
  SystemState s;
  s.position = Vec3(0.1, -0.2, -5.0);
  s.velocity = Vec3(0.4, 0.1, 0.0);
  s.attitude = {0.01, 0.02, -0.015};
  s.rates = Vec3(0.05, -0.02, 0.01);
  for (int i = 0; i < n; ++i) s.uavs.push_back({{0.0, 0.05, -0.03}, Vec3(0.1, 0.0, 0.0)});
  return s;
}

void BM_PayloadRhs(benchmark::State& state) {
  const PayloadDynamics dyn(RigParams::table_one());
  const VecX x = tilted_state(4).pack();
  const SystemInput u(4, UavCommand{22.0, Vec3(0.01, 0.0, -0.01)});
  for (auto _ : state) benchmark::DoNotOptimize(dyn.rhs(x, u));
}
BENCHMARK(BM_PayloadRhs);

void BM_UavControllerStep(benchmark::State& state) {
  const UavParams p;
  const UavFblController c(p, UavGains{});
  UavVector14 x = ExtendedUavState::hover(Vec3(0.1, 0.9, -5.1), p).pack();
  x(uav_index::kPitch) = 0.02;
  const auto ref = CircularReference{}.sample(1.3).as_uav();
  for (auto _ : state) benchmark::DoNotOptimize(c.compute(x, ref));
}
BENCHMARK(BM_UavControllerStep);

void BM_PayloadControllerStep(benchmark::State& state) {
  const PayloadFblController c(RigParams::table_one(), PayloadGains{});
  const SystemState s = tilted_state(4);
  const auto ref = CircularReference{}.sample(1.3).as_payload();
  PayloadControllerMemory mem;
  for (auto _ : state) benchmark::DoNotOptimize(c.compute(s, ref, mem));
}
BENCHMARK(BM_PayloadControllerStep);

void BM_RightPinv(benchmark::State& state) {
  const auto lin = payload_delta_b(tilted_state(4), RigParams::table_one());
  for (auto _ : state) benchmark::DoNotOptimize(right_pinv(lin.delta));
}
BENCHMARK(BM_RightPinv);

}  // namespace

BENCHMARK_MAIN();
