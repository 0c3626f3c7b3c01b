#include <doctest.h>

#include "corrsurf/errors.hpp"
#include "corrsurf/gaussian_analytics.hpp"
#include "corrsurf/math/normal.hpp"
#include "corrsurf/rng.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace corrsurf;
using namespace corrsurf::gauss;

namespace {

const std::vector<double> kK = {0.01, 0.03, 0.07, 0.15, 0.3};
const std::vector<double> kP = {0.01, 0.05, 0.0961, 0.2, 0.4};
const std::vector<double> kRho = {0.05, 0.15, 0.3, 0.6, 0.9};
constexpr double kR = 0.4;

double boost_quantile(double p)
{
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

} // namespace

TEST_CASE("tranche payoff")
{
    CHECK(tranche_payoff(0.0, {0.03, 0.07}) == 0.0);
    CHECK(tranche_payoff(1.0, {0.03, 0.07}) == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(tranche_payoff(0.05, {0.03, 0.07}) == doctest::Approx(0.02).epsilon(1e-15));
    for (double l : {0.0, 0.02, 0.05, 0.2})
        CHECK(tranche_payoff(l, {0.03, 0.07}) ==
              doctest::Approx(tranche_payoff(l, {0, 0.07}) - tranche_payoff(l, {0, 0.03})).epsilon(1e-15));
}

TEST_CASE("vasicek d1")
{
    CHECK(std::fabs(vasicek_d1(0.3, 0.5, 0.4, 0.5)) < 1e-15);
    CHECK(vasicek_d1(0.6 - 1e-12, 0.1, 0.4, 0.3) < -8.0);
    const double ref = boost_quantile(0.0961) / std::sqrt(0.3) - std::sqrt(0.7 / 0.3) * boost_quantile(0.03 / 0.6);
    CHECK(std::fabs(vasicek_d1(0.03, 0.0961, 0.4, 0.3) - ref) < 1e-13);
    CHECK_THROWS_AS(vasicek_d1(0.6, 0.1, 0.4, 0.3), DomainError);
    CHECK_THROWS_AS(vasicek_d1(0.1, 0.1, 0.4, 1.0), DomainError);
    CHECK_THROWS_AS(vasicek_d1(0.0, 0.1, 0.4, 0.3), DomainError);
}

TEST_CASE("vasicek loss cdf")
{
    const double p = 0.0961, rho = 0.3;
    const double med = (1 - kR) * math::norm_cdf(math::norm_inv_cdf(p) / std::sqrt(1 - rho));
    CHECK(std::fabs(vasicek_loss_cdf(med, p, kR, rho) - 0.5) < 1e-12);
    const double mean = (1 - kR) * p;
    CHECK(vasicek_loss_cdf(0.9 * mean, p, kR, 1e-6) < 1e-6);
    CHECK(vasicek_loss_cdf(1.1 * mean, p, kR, 1e-6) > 1 - 1e-6);
    double prev = 0.0;
    for (double l = 0.001; l < 0.6; l += 0.001) {
        const double c = vasicek_loss_cdf(l, p, kR, rho);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("vasicek loss cdf against simulated losses (KS 99%)")
{
    const double p = 0.0961, rho = 0.3;
    const int n = 100000;
    PathRng rng(2024, 0);
    const double c = math::norm_inv_cdf(p);
    std::vector<double> L(n);
    for (auto& l : L)
        l = (1 - kR) * math::norm_cdf((c - std::sqrt(rho) * rng.normal()) / std::sqrt(1 - rho));
    std::sort(L.begin(), L.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        if (L[i] <= 0.0 || L[i] >= 1 - kR)
            continue;
        const double F = vasicek_loss_cdf(L[i], p, kR, rho);
        ks = std::max({ks, std::fabs(F - double(i) / n), std::fabs(F - double(i + 1) / n)});
    }
    CHECK(ks < 1.628 / std::sqrt(n));
}

TEST_CASE("expected equity loss: limits and branches")
{
    CHECK(expected_equity_loss_gauss(0.6, 0.1, kR, 0.3) == doctest::Approx(0.06).epsilon(1e-15));
    CHECK(expected_equity_loss_gauss(0.9, 0.1, kR, 0.3) == doctest::Approx(0.06).epsilon(1e-15));
    for (double K : kK)
        for (double p : kP) {
            CAPTURE(K);
            CAPTURE(p);
            CHECK(std::fabs(expected_equity_loss_gauss(K, p, kR, 1e-9) - equity_loss_upper_bound(K, p, kR)) < 1e-6);
            CHECK(std::fabs(expected_equity_loss_gauss(K, p, kR, 1 - 1e-12) - equity_loss_lower_bound(K, p, kR)) < 1e-6);
            CHECK(std::fabs(expected_equity_loss_gauss(1.0, p, kR, 0.4) - (1 - kR) * p) < 1e-12);
        }
}

TEST_CASE("expected equity loss against Monte Carlo")
{
    const double p = 0.0961, rho = 0.3, K = 0.03;
    const int n = 1000000;
    PathRng rng(77, 1);
    const double c = math::norm_inv_cdf(p);
    double s = 0, s2 = 0, sl = 0, sl2 = 0;
    for (int i = 0; i < n; ++i) {
        const double l = (1 - kR) * math::norm_cdf((c - std::sqrt(rho) * rng.normal()) / std::sqrt(1 - rho));
        const double x = std::min(l, K);
        s += x;
        s2 += x * x;
        sl += l;
        sl2 += l * l;
    }
    const double m = s / n, se = std::sqrt((s2 / n - m * m) / n);
    CHECK(std::fabs(m - expected_equity_loss_gauss(K, p, kR, rho)) < 3 * se);

    const double ml = sl / n, vl = sl2 / n - ml * ml;
    const double v = loss_variance(p, kR, gaussian_default_corr(p, rho));
    // Standard error of a sample variance, from the fourth moment bound (L <= 0.6).
    CHECK(std::fabs(vl - v) < 3 * 0.6 * 0.6 * std::sqrt(v / n) + 3 * std::sqrt(v) * 0.6 / std::sqrt(n));
}

TEST_CASE("closed-form derivatives match finite differences")
{
    const double h = 1e-5;
    double worst_rho = 0, worst_k = 0, worst_h = 0;
    for (double K : kK)
        for (double p : kP)
            for (double rho : kRho) {
                const double fr = (expected_equity_loss_gauss(K, p, kR, rho + h) -
                                   expected_equity_loss_gauss(K, p, kR, rho - h)) / (2 * h);
                worst_rho = std::max(worst_rho, std::fabs(fr - d_expected_loss_d_rho(K, p, kR, rho)));
                const double fk = (expected_equity_loss_gauss(K + h, p, kR, rho) -
                                   expected_equity_loss_gauss(K - h, p, kR, rho)) / (2 * h);
                worst_k = std::max(worst_k, std::fabs(fk - d_expected_loss_d_K(K, p, kR, rho)));
                // Grid probabilities are one-year probabilities; the 5y point is checked separately.
                const double t = 1.0;
                const double hz = -std::log1p(-p) / t;
                auto el_h = [&](double hh) { return expected_equity_loss_gauss(K, hazard_to_p(hh, t), kR, rho); };
                const double fh = (el_h(hz + h) - el_h(hz - h)) / (2 * h);
                const double an = d_expected_loss_d_h(K, p, kR, rho, t, hz);
                worst_h = std::max(worst_h, std::fabs(fh - an));
                CHECK(d_expected_loss_d_rho(K, p, kR, rho) < 0.0);
            }
    CHECK(worst_rho <= 1e-6);
    CHECK(worst_k <= 1e-6);
    CHECK(worst_h <= 1e-6);
}

TEST_CASE("derivative special cases")
{
    const double p = 0.0961, rho = 0.3;
    CHECK(d_expected_loss_d_rho(0.7, p, kR, rho) == 0.0);
    CHECK(d_expected_loss_d_K(0.7, p, kR, rho) == 0.0);
    const double med = (1 - kR) * math::norm_cdf(math::norm_inv_cdf(p) / std::sqrt(1 - rho));
    CHECK(std::fabs(d_expected_loss_d_K(med, p, kR, rho) - 0.5) < 1e-12);
    CHECK(d_expected_loss_d_K(0.01, p, kR, 1e-8) == doctest::Approx(1.0).epsilon(1e-9));
    const double t = 5, hz = 0.02, pt = hazard_to_p(hz, t);
    CHECK(d_expected_loss_d_h(0.7, pt, kR, rho, t, hz) == doctest::Approx((1 - pt) * t * (1 - kR)).epsilon(1e-14));
    const double tiny = 1e-9;
    const double v = d_expected_loss_d_h(0.03, hazard_to_p(tiny, t), kR, rho, t, tiny);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
    CHECK(v <= t * (1 - kR));
    // Finite difference in h at the documented point.
    const double K = 0.03, h0 = 0.01, step = 1e-5;
    auto el_h = [&](double hh) { return expected_equity_loss_gauss(K, hazard_to_p(hh, t), kR, rho); };
    const double fd = (el_h(h0 + step) - el_h(h0 - step)) / (2 * step);
    const double an = d_expected_loss_d_h(K, hazard_to_p(h0, t), kR, rho, t, h0);
    CHECK(std::fabs(fd / an - 1) <= 1e-6);
    // Discrete compounding.
    const double pd = hazard_to_p(h0, t, Compounding::discrete);
    auto el_d = [&](double hh) { return expected_equity_loss_gauss(K, hazard_to_p(hh, t, Compounding::discrete), kR, rho); };
    const double fdd = (el_d(h0 + step) - el_d(h0 - step)) / (2 * step);
    CHECK(std::fabs(fdd / d_expected_loss_d_h(K, pd, kR, rho, t, h0, Compounding::discrete) - 1) <= 1e-6);
}

TEST_CASE("monotone in rho, additive across tranches, mean conserving")
{
    for (double K : kK)
        for (double p : kP) {
            double prev = 1e300;
            for (int i = 1; i <= 99; ++i) {
                const double rho = i / 100.0;
                const double v = expected_equity_loss_gauss(K, p, kR, rho);
                // Where the slope is below double resolution of EL only weak decrease is observable.
                if (std::fabs(d_expected_loss_d_rho(K, p, kR, rho)) * 0.01 > 1e-15 * K)
                    CHECK(v < prev);
                else
                    CHECK(v <= prev * (1 + 1e-14));
                prev = v;
            }
            CHECK(std::fabs(expected_equity_loss_gauss(1.0, p, kR, 0.37) - (1 - kR) * p) <= 1e-12);
            const TrancheSpec tr{K, 0.35};
            CHECK(expected_tranche_loss_gauss(tr, p, kR, 0.3) ==
                  expected_equity_loss_gauss(0.35, p, kR, 0.3) - expected_equity_loss_gauss(K, p, kR, 0.3));
        }
}

TEST_CASE("default correlation and hazard conversion")
{
    CHECK(gaussian_default_corr(0.05, 0.0) == 0.0);
    CHECK(gaussian_default_corr(0.05, 1 - 1e-12) > 0.99);
    CHECK(loss_variance(0.3, 0.4, 0.0) == 0.0);
    CHECK(loss_variance(0.5, 0.0, 1.0) == 0.25);
    CHECK(std::fabs(hazard_to_p(0.02, 5) - 0.09516258196404048) < 1e-15);
    CHECK(std::fabs(hazard_to_p(0.02, 5, Compounding::discrete) - 0.0960792032) < 1e-10);

    // Bivariate normal simulation at rho = 0.3, p = 0.05.
    const double p = 0.05, rho = 0.3, c = math::norm_inv_cdf(p);
    PathRng rng(11, 2);
    const int n = 1000000;
    int both = 0;
    for (int i = 0; i < n; ++i) {
        const double z1 = rng.normal(), z2 = rng.normal();
        const double x = z1, y = rho * z1 + std::sqrt(1 - rho * rho) * z2;
        both += (x <= c && y <= c);
    }
    const double p12 = double(both) / n;
    const double est = (p12 - p * p) / (p * (1 - p));
    const double se = std::sqrt(p12 * (1 - p12) / n) / (p * (1 - p));
    CHECK(std::fabs(est - gaussian_default_corr(p, rho)) < 3 * se);
}
