#include "corrsurf/kernels/kernels.hpp"

#include "exp_erfc_coeffs.hpp"

#include <immintrin.h>

#include <cmath>

// Lane-wise mirror of kernels_scalar.cpp. Every arithmetic step matches the
// scalar code so the two agree bit for bit; branches become blends.
namespace corrsurf::kernels::avx2 {

namespace {

using namespace detail;

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

inline __m256d pow2(__m256d n)
{
    const __m128i k32 = _mm_add_epi32(_mm256_cvtpd_epi32(n), _mm_set1_epi32(1023));
    const __m256i k64 = _mm256_slli_epi64(_mm256_cvtepi32_epi64(k32), 52);
    return _mm256_castsi256_pd(k64);
}

inline __m256d exp_nonpos(__m256d x)
{
    x = _mm256_max_pd(x, set1(kExpMin));
    const __m256d n = _mm256_floor_pd(_mm256_add_pd(_mm256_mul_pd(set1(kLog2e), x), set1(0.5)));
    __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(n, set1(kExpC1)));
    r = _mm256_sub_pd(r, _mm256_mul_pd(n, set1(kExpC2)));
    const __m256d rr = _mm256_mul_pd(r, r);
    __m256d p = _mm256_add_pd(_mm256_mul_pd(set1(kExpP[0]), rr), set1(kExpP[1]));
    p = _mm256_add_pd(_mm256_mul_pd(p, rr), set1(kExpP[2]));
    const __m256d px = _mm256_mul_pd(r, p);
    __m256d q = _mm256_add_pd(_mm256_mul_pd(set1(kExpQ[0]), rr), set1(kExpQ[1]));
    q = _mm256_add_pd(_mm256_mul_pd(q, rr), set1(kExpQ[2]));
    q = _mm256_add_pd(_mm256_mul_pd(q, rr), set1(kExpQ[3]));
    __m256d e = _mm256_div_pd(px, _mm256_sub_pd(q, px));
    e = _mm256_add_pd(set1(1.0), _mm256_mul_pd(set1(2.0), e));
    const __m256d n1 = _mm256_floor_pd(_mm256_mul_pd(n, set1(0.5)));
    const __m256d n2 = _mm256_sub_pd(n, n1);
    return _mm256_mul_pd(_mm256_mul_pd(e, pow2(n1)), pow2(n2));
}

inline __m256d erfc_cody(__m256d x)
{
    const __m256d sign = set1(-0.0);
    const __m256d y = _mm256_andnot_pd(sign, x);

    // |x| <= 0.46875
    const __m256d small = _mm256_cmp_pd(y, set1(kErfXsmall), _CMP_GT_OQ);
    const __m256d ysqa = _mm256_and_pd(small, _mm256_mul_pd(y, y));
    __m256d xnum = _mm256_mul_pd(set1(kErfA[4]), ysqa);
    __m256d xden = ysqa;
    for (int i = 0; i < 3; ++i) {
        xnum = _mm256_mul_pd(_mm256_add_pd(xnum, set1(kErfA[i])), ysqa);
        xden = _mm256_mul_pd(_mm256_add_pd(xden, set1(kErfB[i])), ysqa);
    }
    __m256d res_a = _mm256_div_pd(_mm256_mul_pd(x, _mm256_add_pd(xnum, set1(kErfA[3]))),
                                  _mm256_add_pd(xden, set1(kErfB[3])));
    res_a = _mm256_sub_pd(set1(1.0), res_a);

    // 0.46875 < |x| <= 4
    xnum = _mm256_mul_pd(set1(kErfC[8]), y);
    xden = y;
    for (int i = 0; i < 7; ++i) {
        xnum = _mm256_mul_pd(_mm256_add_pd(xnum, set1(kErfC[i])), y);
        xden = _mm256_mul_pd(_mm256_add_pd(xden, set1(kErfD[i])), y);
    }
    const __m256d res_b = _mm256_div_pd(_mm256_add_pd(xnum, set1(kErfC[7])), _mm256_add_pd(xden, set1(kErfD[7])));

    // |x| > 4
    const __m256d yc = _mm256_max_pd(y, set1(4.0));
    const __m256d ysqc = _mm256_div_pd(set1(1.0), _mm256_mul_pd(yc, yc));
    xnum = _mm256_mul_pd(set1(kErfP[5]), ysqc);
    xden = ysqc;
    for (int i = 0; i < 4; ++i) {
        xnum = _mm256_mul_pd(_mm256_add_pd(xnum, set1(kErfP[i])), ysqc);
        xden = _mm256_mul_pd(_mm256_add_pd(xden, set1(kErfQ[i])), ysqc);
    }
    __m256d res_c = _mm256_div_pd(_mm256_mul_pd(ysqc, _mm256_add_pd(xnum, set1(kErfP[4]))),
                                  _mm256_add_pd(xden, set1(kErfQ[4])));
    res_c = _mm256_div_pd(_mm256_sub_pd(set1(kSqrtPiInv), res_c), yc);

    const __m256d in_b = _mm256_cmp_pd(y, set1(4.0), _CMP_LE_OQ);
    __m256d res = _mm256_blendv_pd(res_c, res_b, in_b);

    const __m256d ye = _mm256_min_pd(y, set1(kErfXbig));
    const __m256d ysq = _mm256_div_pd(_mm256_round_pd(_mm256_mul_pd(ye, set1(16.0)), _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC),
                                      set1(16.0));
    const __m256d del = _mm256_mul_pd(_mm256_sub_pd(ye, ysq), _mm256_add_pd(ye, ysq));
    const __m256d e1 = exp_nonpos(_mm256_xor_pd(sign, _mm256_mul_pd(ysq, ysq)));
    const __m256d e2 = exp_nonpos(_mm256_xor_pd(sign, del));
    res = _mm256_mul_pd(_mm256_mul_pd(e1, e2), res);

    const __m256d big = _mm256_cmp_pd(y, set1(kErfXbig), _CMP_GE_OQ);
    res = _mm256_andnot_pd(_mm256_andnot_pd(in_b, big), res);

    const __m256d neg = _mm256_cmp_pd(x, set1(-kErfThresh), _CMP_LT_OQ);
    res = _mm256_blendv_pd(res, _mm256_sub_pd(set1(2.0), res), neg);

    const __m256d in_a = _mm256_cmp_pd(y, set1(kErfThresh), _CMP_LE_OQ);
    return _mm256_blendv_pd(res, res_a, in_a);
}

inline __m256d norm_cdf4(__m256d x)
{
    const __m256d arg = _mm256_mul_pd(_mm256_xor_pd(set1(-0.0), x), set1(kSqrtHalf));
    return _mm256_mul_pd(set1(0.5), erfc_cody(arg));
}

inline double hsum_fixed(__m256d acc)
{
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    return (s[0] + s[1]) + (s[2] + s[3]);
}

} // namespace

bool supported() noexcept
{
    return __builtin_cpu_supports("avx2");
}

void norm_cdf(const double* x, double* out, std::size_t n)
{
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, norm_cdf4(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i)
        out[i] = scalar::norm_cdf_one(x[i]);
}

void tarch_step(const TarchStepCoeffs& c, const double* eps, double* sigma2, double* agg, std::size_t n)
{
    const __m256d omega = set1(c.omega), alpha = set1(c.alpha), alpha_d = set1(c.alpha_d), beta = set1(c.beta);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d s2 = _mm256_loadu_pd(sigma2 + i);
        const __m256d r = _mm256_mul_pd(_mm256_sqrt_pd(s2), _mm256_loadu_pd(eps + i));
        _mm256_storeu_pd(agg + i, _mm256_add_pd(_mm256_loadu_pd(agg + i), r));
        const __m256d down = _mm256_cmp_pd(r, zero, _CMP_LE_OQ);
        const __m256d a = _mm256_add_pd(alpha, _mm256_and_pd(down, alpha_d));
        const __m256d next = _mm256_add_pd(_mm256_add_pd(omega, _mm256_mul_pd(a, _mm256_mul_pd(r, r))),
                                           _mm256_mul_pd(beta, s2));
        _mm256_storeu_pd(sigma2 + i, next);
    }
    if (i < n)
        scalar::tarch_step(c, eps + i, sigma2 + i, agg + i, n - i);
}

void conditional_default_prob(const double* factor, const double* scale, double threshold, double loading,
                              double* out, std::size_t n)
{
    const double s = std::sqrt(1.0 - loading * loading);
    const __m256d vs = set1(s), vd = set1(threshold), vb = set1(loading);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = scale ? _mm256_loadu_pd(scale + i) : set1(1.0);
        const __m256d z = _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(a, vd), _mm256_mul_pd(vb, _mm256_loadu_pd(factor + i))), vs);
        _mm256_storeu_pd(out + i, norm_cdf4(z));
    }
    if (i < n)
        scalar::conditional_default_prob(factor + i, scale ? scale + i : nullptr, threshold, loading, out + i, n - i);
}

double strided_sum(const double* x, std::size_t n) noexcept
{
    __m256d acc = _mm256_setzero_pd();
    const std::size_t n4 = n - n % 4;
    for (std::size_t i = 0; i < n4; i += 4)
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum_fixed(acc);
    for (std::size_t i = n4; i < n; ++i)
        s += x[i];
    return s;
}

double capped_sum(const double* x, std::size_t n, double cap) noexcept
{
    __m256d acc = _mm256_setzero_pd();
    const __m256d vcap = set1(cap);
    const std::size_t n4 = n - n % 4;
    for (std::size_t i = 0; i < n4; i += 4)
        acc = _mm256_add_pd(acc, _mm256_min_pd(_mm256_loadu_pd(x + i), vcap));
    double s = hsum_fixed(acc);
    for (std::size_t i = n4; i < n; ++i)
        s += x[i] < cap ? x[i] : cap;
    return s;
}

} // namespace corrsurf::kernels::avx2
