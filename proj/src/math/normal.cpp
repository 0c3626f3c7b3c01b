#include "corrsurf/math/normal.hpp"

#include "corrsurf/errors.hpp"
#include "corrsurf/kernels/kernels.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace corrsurf::math {

namespace {

struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
};

// Nodes on [-1, 1] by Newton iteration on P_n; only the negative half is
// kept since the bivariate integrand is evaluated at +-x.
GaussLegendre gauss_legendre_half(int n)
{
    GaussLegendre g;
    const int m = n / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-16)
                break;
        }
        g.x.push_back(-z);
        g.w.push_back(2.0 / ((1.0 - z * z) * pp * pp));
    }
    return g;
}

const std::array<GaussLegendre, 3>& rules()
{
    static const std::array<GaussLegendre, 3> r{gauss_legendre_half(6), gauss_legendre_half(12),
                                                gauss_legendre_half(20)};
    return r;
}

void check_rho(double rho)
{
    if (!(std::fabs(rho) < 1.0))
        throw DomainError("bivariate normal: |rho| must be < 1, got " + std::to_string(rho));
}

// Upper orthant probability P(X > h, Y > k) following Genz's BVND.
double bvnd(double h, double k, double r)
{
    constexpr double twopi = 2.0 * kPi;
    const auto& rs = rules();
    const GaussLegendre& g = std::fabs(r) < 0.3 ? rs[0] : (std::fabs(r) < 0.75 ? rs[1] : rs[2]);
    double hk = h * k;
    double bvn = 0.0;
    if (std::fabs(r) < 0.925) {
        const double hs = (h * h + k * k) / 2.0;
        const double asr = std::asin(r);
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            double sn = std::sin(asr * (g.x[i] + 1.0) / 2.0);
            bvn += g.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            sn = std::sin(asr * (-g.x[i] + 1.0) / 2.0);
            bvn += g.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
        return bvn * asr / (2.0 * twopi) + norm_cdf(-h) * norm_cdf(-k);
    }
    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    if (std::fabs(r) < 1.0) {
        const double as = (1.0 - r) * (1.0 + r);
        double a = std::sqrt(as);
        const double bs = (h - k) * (h - k);
        const double c = (4.0 - hk) / 8.0;
        const double d = (12.0 - hk) / 16.0;
        bvn = a * std::exp(-(bs / as + hk) / 2.0) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
        if (hk > -160.0) {
            const double b = std::sqrt(bs);
            bvn -= std::exp(-hk / 2.0) * std::sqrt(twopi) * norm_cdf(-b / a) * b *
                   (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            for (double sgn : {-1.0, 1.0}) {
                double xs = a * (sgn * g.x[i] + 1.0);
                xs *= xs;
                const double rs1 = std::sqrt(1.0 - xs);
                const double asr = -(bs / xs + hk) / 2.0;
                if (asr > -100.0) {
                    bvn += a * g.w[i] * std::exp(asr) *
                           (std::exp(-hk * (1.0 - rs1) / (2.0 * (1.0 + rs1))) / rs1 -
                            (1.0 + c * xs * (1.0 + d * xs)));
                }
            }
        }
        bvn = -bvn / twopi;
    }
    if (r > 0.0)
        return bvn + norm_cdf(-std::max(h, k));
    return -bvn + std::max(0.0, norm_cdf(-h) - norm_cdf(-k));
}

} // namespace

double norm_pdf(double x) noexcept
{
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) noexcept
{
    return kernels::scalar::norm_cdf_one(x);
}

double norm_inv_cdf(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("norm_inv_cdf: p must lie in (0,1), got " + std::to_string(p));
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double binorm_pdf(double x, double y, double rho)
{
    check_rho(rho);
    const double om = 1.0 - rho * rho;
    return std::exp(-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * om)) / (2.0 * kPi * std::sqrt(om));
}

double binorm_cdf(double x, double y, double rho)
{
    check_rho(rho);
    const double v = bvnd(-x, -y, rho);
    return std::min(1.0, std::max(0.0, v));
}

double binorm_cdf_d2(double x, double y, double rho)
{
    check_rho(rho);
    return norm_pdf(y) * norm_cdf((x - rho * y) / std::sqrt(1.0 - rho * rho));
}

double binorm_cdf_d3(double x, double y, double rho)
{
    return binorm_pdf(x, y, rho);
}

} // namespace corrsurf::math
