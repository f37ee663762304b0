#pragma once

#include <cstddef>
#include <string>

// Dense double-precision array kernels used by the model and analytics
// inner loops. Every kernel has a scalar reference implementation and,
// on x86-64, an AVX2+FMA variant selected once at startup. Set
// SEEDSTM_KERNELS=scalar in the environment to force the reference path.

namespace seedstm::kernels {

// Reference implementations. Plain loops over std:: math; these define
// the semantics the vector variants are tested against.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double max_value(const double* a, std::size_t n);  // n >= 1
void axpy(double* y, double alpha, const double* x, std::size_t n);
void scale(double* x, double c, std::size_t n);
void add4(double* dst, const double* a, const double* b, const double* c,
          const double* d, std::size_t n);
void average(double* dst, const double* a, const double* b, std::size_t n);
// dst[i] = exp(x[i] - offset); returns the sum of dst.
double exp_offset(double* dst, const double* x, double offset, std::size_t n);
// Sum of p[i]*ln(p[i]) with the 0*ln(0) = 0 convention; p[i] >= 0.
double xlogx_sum(const double* p, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double max_value(const double* a, std::size_t n);
void axpy(double* y, double alpha, const double* x, std::size_t n);
void scale(double* x, double c, std::size_t n);
void add4(double* dst, const double* a, const double* b, const double* c,
          const double* d, std::size_t n);
void average(double* dst, const double* a, const double* b, std::size_t n);
double exp_offset(double* dst, const double* x, double offset, std::size_t n);
double xlogx_sum(const double* p, std::size_t n);
}  // namespace avx2
#endif

// Dispatched entry points.
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double max_value(const double* a, std::size_t n);
void axpy(double* y, double alpha, const double* x, std::size_t n);
void scale(double* x, double c, std::size_t n);
void add4(double* dst, const double* a, const double* b, const double* c,
          const double* d, std::size_t n);
void average(double* dst, const double* a, const double* b, std::size_t n);
double exp_offset(double* dst, const double* x, double offset, std::size_t n);
double xlogx_sum(const double* p, std::size_t n);

// Name of the backend the dispatcher picked ("scalar" or "avx2").
const std::string& active_backend();

// In-place softmax over x[0..n): subtract max, exponentiate, normalize.
// Composed from the kernels above so it follows the active backend.
void softmax_inplace(double* x, std::size_t n);

}  // namespace seedstm::kernels
