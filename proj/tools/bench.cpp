// Benchmark: OpenMP-parallel per-face kernels against the serial reference
// implementation, checking that both reductions agree bit-for-bit.
#include <chrono>
#include <cstdio>

#include "rigidlab/killing.hpp"
#include "rigidlab/parallel.hpp"

namespace rl = rigidlab;

namespace {

template <class F>
double time_ms(F&& body, int reps) {
  body();  // warm up
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) body();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void bench_instance(rl::ManifoldKind kind, int resolution, int reps) {
  const rl::Manifold& man = rl::Manifold::get(kind);
  const rl::SurfaceMesh mesh = rl::build_mesh(man, resolution);
  const rl::TangentField x = rl::random_smooth_field(mesh, 7);
  rl::DiscreteMap f = rl::exp_field(rl::scale_field(x, 0.05));

  double ep_serial = 0.0, ep_parallel = 0.0;
  const double t_serial =
      time_ms([&] { ep_serial = rl::energy(f, 2.0, false).Ep; }, reps);
  const double t_parallel =
      time_ms([&] { ep_parallel = rl::energy(f, 2.0, true).Ep; }, reps);

  std::printf("%-11s res=%-3d faces=%-6d serial %8.2f ms   parallel %8.2f ms"
              "   speedup %.2fx   bitwise-equal %s\n",
              man.name(), resolution, mesh.face_count(), t_serial, t_parallel,
              t_serial / t_parallel,
              ep_serial == ep_parallel ? "yes" : "NO");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", rl::max_threads());
  bench_instance(rl::ManifoldKind::Sphere, 5, 5);
  bench_instance(rl::ManifoldKind::Sphere, 6, 3);
  bench_instance(rl::ManifoldKind::FlatTorus, 96, 5);
  bench_instance(rl::ManifoldKind::FlatTorus, 192, 3);
  return 0;
}
