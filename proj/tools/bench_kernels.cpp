// Times the grid-sweep kernels serially and with OpenMP worker threads.
// The parallel reductions are blockwise-deterministic, so the outputs must
// agree bitwise; this harness reports the speedups and checks that.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <thread>

#include "higgs/analyticity.hpp"
#include "higgs/local_model.hpp"
#include "higgs/parallel.hpp"

using namespace higgs;
using Clock = std::chrono::steady_clock;

namespace {

template <class F>
double time_ms(F&& fn, int reps) {
  fn();  // warm up
  const auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-34s %10.2f ms %10.2f ms   %5.2fx   %s\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int threads = std::max(2u, std::thread::hardware_concurrency());
  if (argc > 1) threads = std::max(1, std::atoi(argv[1]));
  std::printf("kernel benchmark: serial vs %d OpenMP threads\n", threads);
  std::printf("%-34s %13s %13s %8s\n", "kernel", "serial", "parallel", "speedup");

  // 1. closed-form Hermitian-Einstein residual sweep
  {
    const local_model::LocalModelParams p{0.4, 0.0};
    const RadialGrid grid(0.7, 13.8, 2000000);
    double a = 0.0, b = 0.0;
    const double ts = time_ms([&] {
      par::set_jobs(1);
      a = local_model::check_hermitian_einstein(p, grid).max_closed_form;
    }, 3);
    const double tp = time_ms([&] {
      par::set_jobs(threads);
      b = local_model::check_hermitian_einstein(p, grid).max_closed_form;
    }, 3);
    report("he_residual_sweep (2e6 nodes)", ts, tp, std::memcmp(&a, &b, sizeof a) == 0);
  }

  // 2. flat-frame residual sweep
  {
    const auto grid = AnnulusGrid::branch_sector(1.0, 2.5, 512, 256);
    double a = 0.0, b = 0.0;
    const double ts = time_ms([&] {
      par::set_jobs(1);
      a = local_model::check_flatness({0.3, 0.0}, grid, local_model::FrameBasis::u_frame).max_residual;
    }, 3);
    const double tp = time_ms([&] {
      par::set_jobs(threads);
      b = local_model::check_flatness({0.3, 0.0}, grid, local_model::FrameBasis::u_frame).max_residual;
    }, 3);
    report("flatness_sweep (512x256)", ts, tp, std::memcmp(&a, &b, sizeof a) == 0);
  }

  // 3. theta-family radial solves (one independent Newton solve per member)
  {
    analyticity::FamilyConfig cfg;
    cfg.mode = analyticity::FamilyMode::radial_solver;
    cfg.grid = RadialGrid(1.0, 8.0, 2801);
    std::vector<double> thetas(24);
    for (std::size_t i = 0; i < thetas.size(); ++i) thetas[i] = 0.1 + 0.6 * i / 23.0;
    analyticity::FamilyTable a, b;
    const double ts = time_ms([&] {
      par::set_jobs(1);
      a = analyticity::solve_family(thetas, cfg);
    }, 3);
    const double tp = time_ms([&] {
      par::set_jobs(threads);
      b = analyticity::solve_family(thetas, cfg);
    }, 3);
    bool same = true;
    for (std::size_t k = 0; k < thetas.size(); ++k)
      for (std::size_t q = 0; q < a.probes.size(); ++q) {
        const double x = a.value(k, q), y = b.value(k, q);
        same = same && std::memcmp(&x, &y, sizeof x) == 0;
      }
    report("family_solves (24 members)", ts, tp, same);
  }

  // 4. deterministic block sum
  {
    const std::size_t n = 1 << 24;
    auto term = [](std::size_t i) { return std::sin(1e-3 * static_cast<double>(i)); };
    double a = 0.0, b = 0.0;
    const double ts = time_ms([&] {
      par::set_jobs(1);
      a = par::block_sum(n, term);
    }, 3);
    const double tp = time_ms([&] {
      par::set_jobs(threads);
      b = par::block_sum(n, term);
    }, 3);
    report("block_sum (2^24 terms)", ts, tp, std::memcmp(&a, &b, sizeof a) == 0);
  }

  par::set_jobs(1);
  return 0;
}
