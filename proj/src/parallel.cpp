#include "pw/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace pw {

namespace {

std::atomic<int> g_jobs{0};

int default_jobs() {
  if (const char* env = std::getenv("PW_JOBS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

int jobs() {
  int n = g_jobs.load(std::memory_order_relaxed);
  return n >= 1 ? n : default_jobs();
}

void set_jobs(int n) { g_jobs.store(n, std::memory_order_relaxed); }

bool log_enabled() {
  static const bool on = std::getenv("PW_LOG") != nullptr;
  return on;
}

}  // namespace pw
