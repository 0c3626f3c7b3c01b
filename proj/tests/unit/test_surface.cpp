#include <doctest.h>

#include "corrsurf/errors.hpp"
#include "corrsurf/gaussian_analytics.hpp"
#include "corrsurf/math/normal.hpp"
#include "corrsurf/surface.hpp"

#include <cmath>
#include <vector>

using namespace corrsurf;
using namespace corrsurf::surface;
using corrsurf::gauss::Compounding;

namespace {

const std::vector<double> kK = {0.01, 0.03, 0.07, 0.15, 0.3};
const std::vector<double> kP = {0.01, 0.05, 0.0961, 0.2, 0.4};
constexpr double kR = 0.4;

factor::McConfig mc(std::size_t n, std::uint64_t seed = 17)
{
    factor::McConfig c;
    c.n_paths = n;
    c.seed = seed;
    c.threads = 1;
    return c;
}

tarch::TarchParams tarch_fitted()
{
    return tarch::TarchParams::unit_variance(0.004, 0.094, 0.927);
}

std::vector<double> k_grid(double lo, double hi, double step)
{
    std::vector<double> g;
    for (int i = 0;; ++i) {
        const double k = lo + step * i;
        if (k > hi + 1e-12)
            break;
        g.push_back(k);
    }
    return g;
}

} // namespace

TEST_CASE("implied correlation round trip")
{
    for (double K : kK)
        for (double p : kP)
            for (double rho0 = 0.05; rho0 < 0.91; rho0 += 0.05) {
                const double el = gauss::expected_equity_loss_gauss(K, p, kR, rho0);
                const ImpliedCorr ic = implied_corr(el, K, p, kR);
                if (gauss::equity_loss_upper_bound(K, p, kR) - el <= 1e-12) {
                    // Tranche practically never hit: EL equals the independence
                    // bound to double precision and rho is not recoverable.
                    CHECK(ic.flag == CorrFlag::rho_zero);
                    continue;
                }
                REQUIRE(ic.flag == CorrFlag::ok);
                CHECK(std::abs(gauss::expected_equity_loss_gauss(K, p, kR, ic.rho) - el) <= 1e-10);
                CHECK(std::abs(ic.rho - rho0) <= 1e-8);
            }
}

TEST_CASE("implied correlation bounds")
{
    const double K = 0.03, p = 0.0961;
    const double lo = gauss::equity_loss_lower_bound(K, p, kR);
    const double hi = gauss::equity_loss_upper_bound(K, p, kR);
    CHECK(implied_corr(hi, K, p, kR).flag == CorrFlag::rho_zero);
    CHECK(implied_corr(hi + 5e-13, K, p, kR).flag == CorrFlag::rho_zero);
    CHECK(implied_corr(lo, K, p, kR).flag == CorrFlag::rho_one);
    CHECK(implied_corr(lo, K, p, kR).rho == 1.0);
    try {
        implied_corr(hi + 1e-6, K, p, kR);
        FAIL("expected OutOfRangeError");
    } catch (const OutOfRangeError& e) {
        CHECK(e.bound() == OutOfRangeError::Bound::upper);
    }
    try {
        implied_corr(lo - 1e-6, K, p, kR);
        FAIL("expected OutOfRangeError");
    } catch (const OutOfRangeError& e) {
        CHECK(e.bound() == OutOfRangeError::Bound::lower);
    }
    CHECK_THROWS_AS(implied_corr(0.01, 0.6, p, kR), DomainError);
    CHECK_THROWS_AS(implied_corr(0.01, K, 0.0, kR), DomainError);
}

TEST_CASE("gaussian static surface is flat")
{
    const auto spec = factor::FactorModelSpec::with_rho(factor::GaussianStatic{}, 0.3);
    const std::vector<double> T = {1, 5};
    const auto K = k_grid(0.01, 0.3, 0.01);
    const CorrSurface s = build_surface(spec, K, T, 0.02, mc(100000));
    CHECK(s.model_id.find("gaussian_static") != std::string::npos);
    for (std::size_t it = 0; it < T.size(); ++it)
        for (std::size_t ik = 0; ik < K.size(); ++ik) {
            if (s.k_grid[ik] >= (1 - kR) * 1.0)
                continue;
            // Cells where the tranche is essentially never hit may sit on a bound.
            if (!s.valid(ik, it))
                continue;
            // Senior 1y cells rest on a handful of extreme paths.
            const double tol = s.k_grid[ik] <= 0.15 ? 0.01 : 0.03;
            CHECK(std::abs(s.at(ik, it) - 0.3) <= tol);
        }
    // Same seed, same surface.
    const CorrSurface s2 = build_surface(spec, K, T, 0.02, mc(100000));
    CHECK(s.values.size() == s2.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i)
        CHECK((s.values[i] == s2.values[i] || (std::isnan(s.values[i]) && std::isnan(s2.values[i]))));
}

TEST_CASE("slope along K on a synthetic surface")
{
    CorrSurface s;
    s.k_grid = {0.01, 0.02, 0.04, 0.05};
    s.t_grid = {1.0};
    s.p = {0.02};
    for (double k : s.k_grid)
        s.values.push_back(0.2 + 3.0 * k * k);
    s.flags.assign(4, CorrFlag::ok);
    // Central difference of a quadratic is exact at the midpoint of the stencil.
    CHECK(surface_slope_k(s, 1, 0) == doctest::Approx(3.0 * (0.04 * 0.04 - 0.01 * 0.01) / 0.03).epsilon(1e-12));
    CHECK(surface_slope_k_at(s, 0.01, 1.0) == doctest::Approx(3.0 * (0.02 * 0.02 - 0.01 * 0.01) / 0.01).epsilon(1e-12));
    CHECK(surface_slope_k(s, 3, 0) == doctest::Approx(3.0 * (0.05 * 0.05 - 0.04 * 0.04) / 0.01).epsilon(1e-12));
    s.flags[2] = CorrFlag::out_of_range;
    CHECK(surface_slope_k(s, 1, 0) == doctest::Approx(3.0 * (0.02 * 0.02 - 0.01 * 0.01) / 0.01).epsilon(1e-12));
    CHECK_THROWS_AS(surface_slope_k(s, 3, 0), DegenerateError);
    CHECK_THROWS_AS(surface_slope_k(s, 2, 0), DegenerateError);
    CHECK_THROWS_AS(surface_slope_k_at(s, 0.033, 1.0), DomainError);
}

TEST_CASE("loss cdf from the surface")
{
    SUBCASE("flat surface gives the Vasicek cdf")
    {
        for (double K : {0.01, 0.03, 0.15})
            for (double p : kP)
                for (double rho : {0.1, 0.3, 0.7}) {
                    const auto v = loss_cdf_from_surface(rho, 0.0, K, p, kR);
                    CHECK(v.consistent);
                    CHECK(std::abs(v.value - gauss::vasicek_loss_cdf(K, p, kR, rho)) <= 1e-15);
                }
    }
    SUBCASE("skewed surface matches the derivative of its tranche losses")
    {
        // Market EL_(0,K] = E^G(K, rho(K)); its K-derivative is P(L > K).
        const double p = 0.0961;
        auto rho = [](double K) { return 0.2 + 1.5 * K; };
        auto el = [&](double K) { return gauss::expected_equity_loss_gauss(K, p, kR, rho(K)); };
        for (double K : {0.02, 0.05, 0.1, 0.2}) {
            const double h = 1e-5;
            const double fd = 1.0 - (el(K + h) - el(K - h)) / (2 * h);
            const auto v = loss_cdf_from_surface(rho(K), 1.5, K, p, kR);
            CHECK(std::abs(v.value - fd) <= 1e-7);
            CHECK(v.consistent);
        }
    }
    SUBCASE("inconsistent surfaces are flagged, not clamped")
    {
        const auto v = loss_cdf_from_surface(0.3, 200.0, 0.03, 0.0961, kR);
        CHECK(v.value > 1.0);
        CHECK_FALSE(v.consistent);
    }
}

TEST_CASE("tranche loss sensitivity ratio")
{
    for (double K : kK)
        for (double t : {1.0, 5.0})
            for (double h : {0.005, 0.02, 0.05})
                for (double rho : {0.1, 0.3, 0.6})
                    for (auto conv : {Compounding::continuous, Compounding::discrete}) {
                        const double p = gauss::hazard_to_p(h, t, conv);
                        const double psi = tranche_sensitivity_ratio(K, p, kR, rho, t, h, conv);
                        const double ratio = gauss::d_expected_loss_d_rho(K, p, kR, rho) /
                                             gauss::d_expected_loss_d_h(K, p, kR, rho, t, h, conv);
                        CHECK(psi < 0.0);
                        CHECK(std::abs(psi - ratio) <= 1e-10 * std::max(1.0, std::abs(ratio)));
                    }
    CHECK(tranche_sensitivity_ratio(0.6, 0.05, kR, 0.3, 5.0, 0.01) == 0.0);
    CHECK(tranche_sensitivity_ratio(0.8, 0.05, kR, 0.3, 5.0, 0.01) == 0.0);
    CHECK_THROWS_AS(tranche_sensitivity_ratio(0.03, 0.05, kR, 0.0, 5.0, 0.01), DomainError);
}

TEST_CASE("delta adjustment vanishes for the Gaussian model")
{
    const auto spec = factor::FactorModelSpec::with_rho(factor::GaussianStatic{}, 0.3);
    const ModelPricer pr(spec, {5.0}, mc(100000));
    for (double K : {0.03, 0.07}) {
        const DeltaReport r = delta_adjustment(pr, K, 5.0, 0.01);
        CHECK(std::abs(r.delta_adj) < 0.02);
        CHECK(r.delta_adj == r.rho_h * r.psi);
    }
}

TEST_CASE("TARCH surface skew")
{
    const auto spec = factor::FactorModelSpec::with_rho(factor::TarchFactor{tarch_fitted()}, 0.3);
    const ModelPricer pr(spec, {1.0, 5.0, 10.0}, mc(50000));
    const auto K = k_grid(0.01, 0.3, 0.01);
    const CorrSurface s = build_surface(pr, K, 0.01);

    // Upward sloping at 5y over the equity to mezzanine range.
    for (std::size_t ik = s.k_index(0.03); ik <= s.k_index(0.15); ++ik)
        CHECK(surface_slope_k(s, ik, 1) > 0.0);

    // Flattening with maturity.
    auto mean_abs_slope = [&](std::size_t it) {
        const auto sl = surface_slope_k_slice(s, it);
        double a = 0;
        for (double v : sl)
            a += std::abs(v);
        return a / static_cast<double>(sl.size());
    };
    CHECK(mean_abs_slope(2) < mean_abs_slope(0));

    // Hazard sensitivity: negative level shift, positive adjustment, largest at low K.
    double prev = 1e300;
    for (double k : {0.03, 0.05, 0.07, 0.1}) {
        const DeltaReport r = delta_adjustment(pr, k, 5.0, 0.01);
        CHECK(r.rho_h < 0.0);
        CHECK(r.psi < 0.0);
        CHECK(r.delta_adj > 0.0);
        CHECK(r.delta_adj < prev);
        prev = r.delta_adj;
    }

    // Reconstructed cdf is a cdf on the 5y slice.
    const auto cdf = reconstruct_loss_cdf(s, 1);
    double last = 0.0;
    for (std::size_t ik = s.k_index(0.02); ik <= s.k_index(0.3); ++ik) {
        CHECK(cdf[ik].consistent);
        CHECK(cdf[ik].value >= last);
        last = cdf[ik].value;
    }
}

TEST_CASE("pricer argument checks")
{
    const auto spec = factor::FactorModelSpec::with_rho(factor::GaussianStatic{}, 0.3);
    CHECK_THROWS_AS(ModelPricer(spec, {5.0, 1.0}, mc(100)), DomainError);
    CHECK_THROWS_AS(ModelPricer(spec, {1.0, 1.001}, mc(100)), DomainError);
    const ModelPricer pr(spec, {1.0}, mc(1000));
    CHECK_THROWS_AS(pr.t_index(2.0), DomainError);
    CHECK_THROWS_AS(surface_slope_h(pr, 0.03, 1.0, 0.01, 0.0), DomainError);
}
