#include "corrsurf/kernels/kernels.hpp"

#include "exp_erfc_coeffs.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

namespace corrsurf::kernels::scalar {

namespace {

using namespace detail;

double pow2(double n) noexcept
{
    const auto k = static_cast<std::int64_t>(n) + 1023;
    return std::bit_cast<double>(static_cast<std::uint64_t>(k) << 52);
}

// exp(x) for x <= 0.
double exp_nonpos(double x) noexcept
{
    if (x < kExpMin)
        x = kExpMin;
    const double n = std::floor(kLog2e * x + 0.5);
    double r = x - n * kExpC1;
    r = r - n * kExpC2;
    const double rr = r * r;
    const double px = r * ((kExpP[0] * rr + kExpP[1]) * rr + kExpP[2]);
    const double qx = ((kExpQ[0] * rr + kExpQ[1]) * rr + kExpQ[2]) * rr + kExpQ[3];
    double e = px / (qx - px);
    e = 1.0 + 2.0 * e;
    const double n1 = std::floor(n * 0.5);
    const double n2 = n - n1;
    return (e * pow2(n1)) * pow2(n2);
}

double erfc_cody(double x) noexcept
{
    const double y = std::fabs(x);
    double res;
    if (y <= kErfThresh) {
        const double ysq = y > kErfXsmall ? y * y : 0.0;
        double xnum = kErfA[4] * ysq;
        double xden = ysq;
        for (int i = 0; i < 3; ++i) {
            xnum = (xnum + kErfA[i]) * ysq;
            xden = (xden + kErfB[i]) * ysq;
        }
        res = x * (xnum + kErfA[3]) / (xden + kErfB[3]);
        return 1.0 - res;
    }
    if (y <= 4.0) {
        double xnum = kErfC[8] * y;
        double xden = y;
        for (int i = 0; i < 7; ++i) {
            xnum = (xnum + kErfC[i]) * y;
            xden = (xden + kErfD[i]) * y;
        }
        res = (xnum + kErfC[7]) / (xden + kErfD[7]);
    } else if (y >= kErfXbig) {
        res = 0.0;
    } else {
        const double ysq = 1.0 / (y * y);
        double xnum = kErfP[5] * ysq;
        double xden = ysq;
        for (int i = 0; i < 4; ++i) {
            xnum = (xnum + kErfP[i]) * ysq;
            xden = (xden + kErfQ[i]) * ysq;
        }
        res = ysq * (xnum + kErfP[4]) / (xden + kErfQ[4]);
        res = (kSqrtPiInv - res) / y;
    }
    if (y <= kErfXbig) {
        // Split exp(-y^2) so the rounding error of y*y does not leak in.
        const double ysq = std::trunc(y * 16.0) / 16.0;
        const double del = (y - ysq) * (y + ysq);
        res = (exp_nonpos(-ysq * ysq) * exp_nonpos(-del)) * res;
    }
    if (x < -kErfThresh)
        res = 2.0 - res;
    return res;
}

} // namespace

double norm_cdf_one(double x) noexcept
{
    return 0.5 * erfc_cody((-x) * kSqrtHalf);
}

void norm_cdf(const double* x, double* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        out[i] = norm_cdf_one(x[i]);
}

void tarch_step(const TarchStepCoeffs& c, const double* eps, double* sigma2, double* agg, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::sqrt(sigma2[i]) * eps[i];
        agg[i] = agg[i] + r;
        const double a = c.alpha + (r <= 0.0 ? c.alpha_d : 0.0);
        sigma2[i] = (c.omega + a * (r * r)) + c.beta * sigma2[i];
    }
}

void conditional_default_prob(const double* factor, const double* scale, double threshold, double loading,
                              double* out, std::size_t n)
{
    const double s = std::sqrt(1.0 - loading * loading);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = scale ? scale[i] : 1.0;
        out[i] = norm_cdf_one((a * threshold - loading * factor[i]) / s);
    }
}

double strided_sum(const double* x, std::size_t n) noexcept
{
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    const std::size_t n4 = n - n % 4;
    for (std::size_t i = 0; i < n4; i += 4) {
        s0 += x[i];
        s1 += x[i + 1];
        s2 += x[i + 2];
        s3 += x[i + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
    for (std::size_t i = n4; i < n; ++i)
        s += x[i];
    return s;
}

double capped_sum(const double* x, std::size_t n, double cap) noexcept
{
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    const std::size_t n4 = n - n % 4;
    for (std::size_t i = 0; i < n4; i += 4) {
        s0 += (x[i] < cap ? x[i] : cap);
        s1 += (x[i + 1] < cap ? x[i + 1] : cap);
        s2 += (x[i + 2] < cap ? x[i + 2] : cap);
        s3 += (x[i + 3] < cap ? x[i + 3] : cap);
    }
    double s = (s0 + s1) + (s2 + s3);
    for (std::size_t i = n4; i < n; ++i)
        s += (x[i] < cap ? x[i] : cap);
    return s;
}

} // namespace corrsurf::kernels::scalar
