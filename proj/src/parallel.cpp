#include "rabi/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <exception>
#include <string>

#include "rabi/errors.hpp"

namespace rabi {

int worker_count() {
  if (const char* env = std::getenv("RABI_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 0)
      throw ConfigError(std::string("RABI_THREADS must be a non-negative integer, got '") +
                        env + "'");
    if (n > 0) return static_cast<int>(n);
  }
  return omp_get_max_threads();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  Execution exec) {
  if (exec == Execution::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const int workers = worker_count();
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<GSample> sample_g_grid(const ModelParams& params,
                                   const std::vector<double>& energies,
                                   Execution exec, const GOptions& opts) {
  const ChainModel cm(params, bogolubov_frame(params));
  return parallel_map<GSample>(
      energies.size(), [&](std::size_t i) { return g_value(cm, energies[i], opts); },
      exec);
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> x(n);
  if (n == 1) {
    x[0] = lo;
    return x;
  }
  for (int i = 0; i < n; ++i) x[i] = lo + (hi - lo) * i / (n - 1);
  return x;
}

}  // namespace rabi
