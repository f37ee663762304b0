// Runtime backend selection. The AVX2 path is used when the CPU supports
// AVX2+FMA; SEEDSTM_KERNELS=scalar|avx2 overrides the choice.

#include "seedstm/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace seedstm::kernels {

namespace {

struct Backend {
  std::string name;
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*max_value)(const double*, std::size_t);
  void (*axpy)(double*, double, const double*, std::size_t);
  void (*scale)(double*, double, std::size_t);
  void (*add4)(double*, const double*, const double*, const double*,
               const double*, std::size_t);
  void (*average)(double*, const double*, const double*, std::size_t);
  double (*exp_offset)(double*, const double*, double, std::size_t);
  double (*xlogx_sum)(const double*, std::size_t);
};

const Backend kScalar = {
    "scalar",     scalar::dot,     scalar::sum,        scalar::max_value,
    scalar::axpy, scalar::scale,   scalar::add4,       scalar::average,
    scalar::exp_offset,            scalar::xlogx_sum,
};

#if defined(__x86_64__) || defined(_M_X64)
const Backend kAvx2 = {
    "avx2",     avx2::dot,     avx2::sum,        avx2::max_value,
    avx2::axpy, avx2::scale,   avx2::add4,       avx2::average,
    avx2::exp_offset,          avx2::xlogx_sum,
};

bool cpu_has_avx2_fma() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const Backend& select_backend() {
  const char* env = std::getenv("SEEDSTM_KERNELS");
#if defined(__x86_64__) || defined(_M_X64)
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return kScalar;
    if (std::strcmp(env, "avx2") == 0) {
      if (!cpu_has_avx2_fma())
        throw std::runtime_error("SEEDSTM_KERNELS=avx2 but CPU lacks AVX2/FMA");
      return kAvx2;
    }
    throw std::runtime_error(std::string("unknown SEEDSTM_KERNELS value: ") +
                             env);
  }
  if (cpu_has_avx2_fma()) return kAvx2;
#else
  if (env != nullptr && std::strcmp(env, "scalar") != 0)
    throw std::runtime_error(std::string("unsupported SEEDSTM_KERNELS value: ") +
                             env);
#endif
  return kScalar;
}

const Backend& backend() {
  static const Backend& b = select_backend();
  return b;
}

}  // namespace

const std::string& active_backend() { return backend().name; }

double dot(const double* a, const double* b, std::size_t n) {
  return backend().dot(a, b, n);
}

double sum(const double* a, std::size_t n) { return backend().sum(a, n); }

double max_value(const double* a, std::size_t n) {
  return backend().max_value(a, n);
}

void axpy(double* y, double alpha, const double* x, std::size_t n) {
  backend().axpy(y, alpha, x, n);
}

void scale(double* x, double c, std::size_t n) { backend().scale(x, c, n); }

void add4(double* dst, const double* a, const double* b, const double* c,
          const double* d, std::size_t n) {
  backend().add4(dst, a, b, c, d, n);
}

void average(double* dst, const double* a, const double* b, std::size_t n) {
  backend().average(dst, a, b, n);
}

double exp_offset(double* dst, const double* x, double offset, std::size_t n) {
  return backend().exp_offset(dst, x, offset, n);
}

double xlogx_sum(const double* p, std::size_t n) {
  return backend().xlogx_sum(p, n);
}

void softmax_inplace(double* x, std::size_t n) {
  double m = max_value(x, n);
  double z = exp_offset(x, x, m, n);
  scale(x, 1.0 / z, n);
}

}  // namespace seedstm::kernels
