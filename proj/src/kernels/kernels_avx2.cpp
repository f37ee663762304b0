// AVX2+FMA kernel variants. Compiled with -mavx2 -mfma on x86-64 only;
// the dispatcher checks CPU support at startup before selecting these.
//
// exp and log are evaluated in-register: exp by Cody-Waite range
// reduction and a degree-14 Taylor polynomial, log by exponent/mantissa
// split and the atanh series 2s(1 + s^2/3 + ...) with s = (m-1)/(m+1).
// Both stay within a few ulp of libm over the kernels' stated domains.

#include "seedstm/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace seedstm::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

// Signed int64 lanes (|v| < 2^51) to double lanes.
inline __m256d i64_to_pd(__m256i v) {
  const __m256i magic = _mm256_set1_epi64x(0x4338000000000000LL);
  __m256d d = _mm256_castsi256_pd(_mm256_add_epi64(v, magic));
  return _mm256_sub_pd(d, _mm256_set1_pd(6755399441055744.0));  // 2^52 + 2^51
}

inline __m256d exp4(__m256d x) {
  const __m256d kLog2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d kLn2Hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d kLn2Lo = _mm256_set1_pd(1.42860682030941723212e-6);

  __m256d overflow = _mm256_cmp_pd(x, _mm256_set1_pd(709.0), _CMP_GT_OQ);
  __m256d underflow = _mm256_cmp_pd(x, _mm256_set1_pd(-708.0), _CMP_LT_OQ);
  __m256d xc = _mm256_min_pd(_mm256_max_pd(x, _mm256_set1_pd(-708.0)),
                             _mm256_set1_pd(709.0));

  __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, kLog2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, kLn2Hi, xc);
  r = _mm256_fnmadd_pd(n, kLn2Lo, r);

  // Taylor series for exp(r), |r| <= ln2/2.
  __m256d p = _mm256_set1_pd(1.1470745597729725e-11);  // 1/14!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.6059043836821613e-10));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.0876756987868099e-9));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.5052108385441720e-8));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985888e-7));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985893e-6));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.4801587301587302e-5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.9841269841269841e-4));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.3888888888888889e-3));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(8.3333333333333333e-3));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(4.1666666666666664e-2));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.6666666666666666e-1));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // Scale by 2^n through the exponent bits.
  __m128i n32 = _mm256_cvttpd_epi32(n);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  __m256i bits = _mm256_slli_epi64(
      _mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  __m256d pow2n = _mm256_castsi256_pd(bits);
  __m256d res = _mm256_mul_pd(p, pow2n);

  res = _mm256_blendv_pd(res, _mm256_setzero_pd(), underflow);
  res = _mm256_blendv_pd(
      res, _mm256_set1_pd(std::numeric_limits<double>::infinity()), overflow);
  return res;
}

// Natural log of positive lanes; lanes <= 0 are the caller's problem.
inline __m256d log4(__m256d x) {
  const __m256i kMantMask = _mm256_set1_epi64x(0x000fffffffffffffLL);
  const __m256i kOneBits = _mm256_set1_epi64x(0x3ff0000000000000LL);
  const __m256d kLn2Hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d kLn2Lo = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d kSqrt2 = _mm256_set1_pd(1.4142135623730951);

  // Promote subnormals so the exponent field is usable.
  __m256d tiny = _mm256_cmp_pd(x, _mm256_set1_pd(2.2250738585072014e-308),
                               _CMP_LT_OQ);
  __m256d xs = _mm256_blendv_pd(
      x, _mm256_mul_pd(x, _mm256_set1_pd(18014398509481984.0)), tiny);  // 2^54
  __m256d ebias = _mm256_and_pd(tiny, _mm256_set1_pd(54.0));

  __m256i bits = _mm256_castpd_si256(xs);
  __m256i expi = _mm256_sub_epi64(
      _mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(1023));
  __m256d e = _mm256_sub_pd(i64_to_pd(expi), ebias);
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, kMantMask), kOneBits));

  // Keep the mantissa in (sqrt(2)/2, sqrt(2)].
  __m256d big = _mm256_cmp_pd(m, kSqrt2, _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  __m256d one = _mm256_set1_pd(1.0);
  __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  __m256d u = _mm256_mul_pd(s, s);

  __m256d p = _mm256_set1_pd(1.0 / 21.0);
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 19.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 17.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 15.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 3.0));
  p = _mm256_fmadd_pd(p, u, one);

  __m256d lnm = _mm256_mul_pd(s, p);
  lnm = _mm256_add_pd(lnm, lnm);

  __m256d res = _mm256_fmadd_pd(e, kLn2Lo, lnm);
  return _mm256_fmadd_pd(e, kLn2Hi, res);
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i];
  return acc;
}

double max_value(const double* a, std::size_t n) {
  std::size_t i = 0;
  double m = a[0];
  if (n >= 4) {
    __m256d vm = _mm256_loadu_pd(a);
    for (i = 4; i + 4 <= n; i += 4)
      vm = _mm256_max_pd(vm, _mm256_loadu_pd(a + i));
    m = hmax(vm);
  }
  for (; i < n; ++i)
    if (a[i] > m) m = a[i];
  return m;
}

void axpy(double* y, double alpha, const double* x, std::size_t n) {
  __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                 _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double* x, double c, std::size_t n) {
  __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(vc, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= c;
}

void add4(double* dst, const double* a, const double* b, const double* c,
          const double* d, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    v = _mm256_add_pd(v, _mm256_loadu_pd(c + i));
    v = _mm256_add_pd(v, _mm256_loadu_pd(d + i));
    _mm256_storeu_pd(dst + i, v);
  }
  for (; i < n; ++i) dst[i] = a[i] + b[i] + c[i] + d[i];
}

void average(double* dst, const double* a, const double* b, std::size_t n) {
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(v, half));
  }
  for (; i < n; ++i) dst[i] = 0.5 * (a[i] + b[i]);
}

double exp_offset(double* dst, const double* x, double offset, std::size_t n) {
  const __m256d voff = _mm256_set1_pd(offset);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = exp4(_mm256_sub_pd(_mm256_loadu_pd(x + i), voff));
    _mm256_storeu_pd(dst + i, v);
    acc = _mm256_add_pd(acc, v);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    dst[i] = std::exp(x[i] - offset);
    total += dst[i];
  }
  return total;
}

double xlogx_sum(const double* p, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(p + i);
    __m256d pos = _mm256_cmp_pd(v, zero, _CMP_GT_OQ);
    __m256d safe = _mm256_blendv_pd(one, v, pos);
    __m256d term = _mm256_mul_pd(v, log4(safe));
    acc = _mm256_add_pd(acc, _mm256_and_pd(term, pos));
  }
  double total = hsum(acc);
  for (; i < n; ++i)
    if (p[i] > 0.0) total += p[i] * std::log(p[i]);
  return total;
}

}  // namespace seedstm::kernels::avx2

#endif  // x86-64
