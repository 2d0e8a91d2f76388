#include "higgs/parallel.hpp"

#include <atomic>

namespace higgs::par {

namespace {
std::atomic<int> g_jobs{1};  // default 1 keeps CLI output deterministic by construction
}

int jobs() { return g_jobs.load(std::memory_order_relaxed); }

void set_jobs(int n) { g_jobs.store(n < 1 ? 1 : n, std::memory_order_relaxed); }

}  // namespace higgs::par
