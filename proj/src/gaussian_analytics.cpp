#include "corrsurf/gaussian_analytics.hpp"

#include "corrsurf/errors.hpp"
#include "corrsurf/math/normal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace corrsurf::gauss {

using math::binorm_cdf;
using math::binorm_pdf;
using math::norm_cdf;
using math::norm_inv_cdf;

namespace {

void check_p(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("default probability must lie in (0,1), got " + std::to_string(p));
}

void check_rho(double rho)
{
    if (!(rho > 0.0 && rho < 1.0))
        throw DomainError("correlation must lie in (0,1), got " + std::to_string(rho));
}

void check_recovery(double r)
{
    if (!(r >= 0.0 && r < 1.0))
        throw DomainError("recovery must lie in [0,1), got " + std::to_string(r));
}

void check_common(double K, double p, double recovery, double rho)
{
    check_p(p);
    check_rho(rho);
    check_recovery(recovery);
    if (!(K > 0.0))
        throw DomainError("detachment K must be > 0, got " + std::to_string(K));
}

bool linear_branch(double K, double recovery)
{
    return K >= 1.0 - recovery;
}

} // namespace

double tranche_payoff(double loss, const TrancheSpec& tr)
{
    return std::max(loss - tr.k_down, 0.0) - std::max(loss - tr.k_up, 0.0);
}

double equity_payoff(double loss, double K)
{
    return std::min(std::max(loss, 0.0), K);
}

double vasicek_d1(double K, double p, double recovery, double rho)
{
    check_common(K, p, recovery, rho);
    if (!(K < 1.0 - recovery))
        throw DomainError("vasicek_d1: K must lie in (0, 1 - recovery)");
    const double sr = std::sqrt(rho);
    return norm_inv_cdf(p) / sr - std::sqrt(1.0 - rho) / sr * norm_inv_cdf(K / (1.0 - recovery));
}

double vasicek_loss_cdf(double l, double p, double recovery, double rho)
{
    return 1.0 - norm_cdf(vasicek_d1(l, p, recovery, rho));
}

double expected_equity_loss_gauss(double K, double p, double recovery, double rho)
{
    check_common(K, p, recovery, rho);
    if (linear_branch(K, recovery))
        return (1.0 - recovery) * p;
    const double d1 = vasicek_d1(K, p, recovery, rho);
    return (1.0 - recovery) * binorm_cdf(norm_inv_cdf(p), -d1, -std::sqrt(rho)) + K * norm_cdf(d1);
}

double expected_tranche_loss_gauss(const TrancheSpec& tr, double p, double recovery, double rho)
{
    const double up = expected_equity_loss_gauss(tr.k_up, p, recovery, rho);
    if (tr.k_down <= 0.0)
        return up;
    return up - expected_equity_loss_gauss(tr.k_down, p, recovery, rho);
}

double d_expected_loss_d_rho(double K, double p, double recovery, double rho)
{
    check_common(K, p, recovery, rho);
    if (linear_branch(K, recovery))
        return 0.0;
    const double d1 = vasicek_d1(K, p, recovery, rho);
    const double sr = std::sqrt(rho);
    return -(1.0 - recovery) / (2.0 * sr) * binorm_pdf(norm_inv_cdf(p), -d1, -sr);
}

double d_expected_loss_d_K(double K, double p, double recovery, double rho)
{
    check_common(K, p, recovery, rho);
    if (linear_branch(K, recovery))
        return 0.0;
    return norm_cdf(vasicek_d1(K, p, recovery, rho));
}

double d_expected_loss_d_p(double K, double p, double recovery, double rho)
{
    check_common(K, p, recovery, rho);
    if (linear_branch(K, recovery))
        return 1.0 - recovery;
    const double d1 = vasicek_d1(K, p, recovery, rho);
    const double sr = std::sqrt(rho);
    return (1.0 - recovery) * norm_cdf((-d1 + sr * norm_inv_cdf(p)) / std::sqrt(1.0 - rho));
}

double d_expected_loss_d_h(double K, double p_t, double recovery, double rho, double t, double h, Compounding conv)
{
    return dp_dh(h, t, conv) * d_expected_loss_d_p(K, p_t, recovery, rho);
}

double equity_loss_lower_bound(double K, double p, double recovery)
{
    return p * std::min(K, 1.0 - recovery);
}

double equity_loss_upper_bound(double K, double p, double recovery)
{
    return std::min(K, (1.0 - recovery) * p);
}

double loss_variance(double p, double recovery, double rho_d)
{
    return (1.0 - recovery) * (1.0 - recovery) * p * (1.0 - p) * rho_d;
}

double gaussian_default_corr(double p, double rho)
{
    check_p(p);
    if (rho == 0.0)
        return 0.0;
    const double c = norm_inv_cdf(p);
    return (binorm_cdf(c, c, rho) - p * p) / (p * (1.0 - p));
}

double hazard_to_p(double h, double t, Compounding conv)
{
    if (!(h >= 0.0) || !(t > 0.0))
        throw DomainError("hazard_to_p: need h >= 0 and t > 0");
    if (conv == Compounding::discrete) {
        if (!(h < 1.0))
            throw DomainError("hazard_to_p: discrete convention needs h < 1");
        return 1.0 - std::pow(1.0 - h, t);
    }
    return -std::expm1(-h * t);
}

double dp_dh(double h, double t, Compounding conv)
{
    if (conv == Compounding::discrete)
        return t * std::pow(1.0 - h, t - 1.0);
    return t * std::exp(-h * t);
}

} // namespace corrsurf::gauss
