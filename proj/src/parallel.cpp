#include "lbpforge/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

namespace lbpforge {

namespace {

int env_cap() {
  const char* raw = std::getenv("LBPFORGE_WORKERS");
  if (raw == nullptr || *raw == '\0') return 0;
  try {
    return std::max(1, std::stoi(raw));
  } catch (...) {
    return 0;
  }
}

}  // namespace

int default_workers() {
  const int cap = env_cap();
  const int omp = std::max(1, omp_get_max_threads());
  return cap > 0 ? std::min(cap, omp) : omp;
}

int resolve_workers(int requested) {
  if (requested <= 0) return default_workers();
  const int cap = env_cap();
  return cap > 0 ? std::min(cap, requested) : requested;
}

}  // namespace lbpforge
