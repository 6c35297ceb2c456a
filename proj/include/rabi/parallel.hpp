#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rabi/gfunction.hpp"

namespace rabi {

// Serial is the reference path; Parallel must reproduce it bit for bit.
enum class Execution { Serial, Parallel };

// Worker count from RABI_THREADS (unset or 0 means the OpenMP default).
int worker_count();

// Runs body(i) for i in [0, n). Exceptions are collected and the one from the
// lowest index is rethrown, so failures do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  Execution exec);

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& fn, Execution exec) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); }, exec);
  return out;
}

// G on an energy grid; one chain per point.
std::vector<GSample> sample_g_grid(const ModelParams& params,
                                   const std::vector<double>& energies,
                                   Execution exec, const GOptions& opts = {});

std::vector<double> linspace(double lo, double hi, int n);

}  // namespace rabi
