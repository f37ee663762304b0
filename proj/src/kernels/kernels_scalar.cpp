#include "seedstm/kernels.hpp"

#include <cmath>

namespace seedstm::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double max_value(const double* a, std::size_t n) {
  double m = a[0];
  for (std::size_t i = 1; i < n; ++i)
    if (a[i] > m) m = a[i];
  return m;
}

void axpy(double* y, double alpha, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double* x, double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= c;
}

void add4(double* dst, const double* a, const double* b, const double* c,
          const double* d, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] + b[i] + c[i] + d[i];
}

void average(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = 0.5 * (a[i] + b[i]);
}

double exp_offset(double* dst, const double* x, double offset, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dst[i] = std::exp(x[i] - offset);
    acc += dst[i];
  }
  return acc;
}

double xlogx_sum(const double* p, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] > 0.0) acc += p[i] * std::log(p[i]);
  }
  return acc;
}

}  // namespace seedstm::kernels::scalar
