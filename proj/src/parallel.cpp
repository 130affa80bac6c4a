#include "idpflow/parallel.hpp"

#include <omp.h>

#include <algorithm>

#include "idpflow/errors.hpp"

namespace idpflow {

namespace {
constexpr std::size_t block = 4096;
}

int thread_count() { return omp_get_max_threads(); }

void set_thread_count(int n) {
  if (n < 1) throw ConfigError("thread count must be >= 1");
  omp_set_num_threads(n);
}

double deterministic_sum(const double* x, std::size_t n) {
  const std::size_t nb = (n + block - 1) / block;
  std::vector<double> part(nb, 0.);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < nb; ++b) {
    double s = 0.;
    const std::size_t e = std::min(n, (b + 1) * block);
    for (std::size_t i = b * block; i < e; ++i) s += x[i];
    part[b] = s;
  }
  double s = 0.;
  for (double p : part) s += p;
  return s;
}

double deterministic_dot(const double* x, const double* y, std::size_t n) {
  const std::size_t nb = (n + block - 1) / block;
  std::vector<double> part(nb, 0.);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < nb; ++b) {
    double s = 0.;
    const std::size_t e = std::min(n, (b + 1) * block);
    for (std::size_t i = b * block; i < e; ++i) s += x[i] * y[i];
    part[b] = s;
  }
  double s = 0.;
  for (double p : part) s += p;
  return s;
}

}  // namespace idpflow
