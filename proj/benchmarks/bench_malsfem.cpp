#include <benchmark/benchmark.h>

#include "malsfem/gradsolve.hpp"
#include "malsfem/primsolve.hpp"

using namespace malsfem;

namespace {

// Arguments: m, n.
void BM_BuildReconOp(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const Mesh mesh = Mesh::structured(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    ReconOp op = build_recon_op(mesh, m, default_patch_size(m));
    benchmark::DoNotOptimize(op);
  }
  state.counters["elements"] = mesh.num_elements();
}
BENCHMARK(BM_BuildReconOp)->ArgsProduct({{1, 2, 3}, {20, 40}})->Unit(benchmark::kMillisecond);

void BM_AssembleNewton(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const Mesh mesh = Mesh::structured(static_cast<int>(state.range(1)));
  const ReconOp op = build_recon_op(mesh, m, default_patch_size(m));
  const TrialSpace space = TrialSpace::reconstructed(op);
  const ExampleDef& ex = example("ex1");
  const NewtonAssembler assembler(space, ex.data, NewtonConfig{});
  const PiecewiseField w = space.field(space.interpolate(ex.data.exact_grad));
  for (auto _ : state) {
    LinearSystem sys = assembler.assemble(w);
    benchmark::DoNotOptimize(sys);
  }
  state.counters["dofs"] = space.num_dofs();
}
BENCHMARK(BM_AssembleNewton)->ArgsProduct({{1, 2, 3}, {20, 40}})->Unit(benchmark::kMillisecond);

void BM_LinearSolve(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const Mesh mesh = Mesh::structured(static_cast<int>(state.range(1)));
  const ReconOp op = build_recon_op(mesh, m, default_patch_size(m));
  const TrialSpace space = TrialSpace::reconstructed(op);
  const ExampleDef& ex = example("ex1");
  const LinearSystem sys =
      assemble_newton_system(space, ex.data, space.field(space.interpolate(ex.data.exact_grad)), NewtonConfig{});
  for (auto _ : state) {
    // A fresh solver includes the symbolic analysis, as in the first Newton step.
    SpdSolver solver;
    auto x = solver.solve(sys.matrix, sys.rhs);
    benchmark::DoNotOptimize(x);
  }
  state.counters["nnz"] = static_cast<double>(sys.matrix.nonZeros());
}
BENCHMARK(BM_LinearSolve)->ArgsProduct({{1, 2, 3}, {20, 40}})->Unit(benchmark::kMillisecond);

void BM_NewtonSolve(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const Mesh mesh = Mesh::structured(20);
  const ReconOp op = build_recon_op(mesh, m, default_patch_size(m));
  const TrialSpace space = TrialSpace::reconstructed(op);
  const ExampleDef& ex = example("ex1");
  const Eigen::VectorXd init = poisson_initializer(space, ex.data);
  int iterations = 0;
  for (auto _ : state) {
    NewtonReport r = newton_solve(space, ex.data, init, NewtonConfig{});
    iterations = r.iterations();
    benchmark::DoNotOptimize(r);
  }
  state.counters["iterations"] = iterations;
}
BENCHMARK(BM_NewtonSolve)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_SolvePrimitive(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const Mesh mesh = Mesh::structured(40);
  const LagrangeSpace lag(mesh, m);
  const ExampleDef& ex = example("ex1");
  const ElementVectorFn p = [&ex](int, const Point& x) { return ex.data.exact_grad(x); };
  for (auto _ : state) {
    ScalarField u = solve_primitive(lag, p, ex.data);
    benchmark::DoNotOptimize(u);
  }
  state.counters["nodes"] = lag.num_nodes();
}
BENCHMARK(BM_SolvePrimitive)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
