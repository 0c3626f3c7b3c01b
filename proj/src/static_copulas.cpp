#include "corrsurf/static_copulas.hpp"

#include "corrsurf/errors.hpp"
#include "corrsurf/math/student_t.hpp"
#include "corrsurf/parallel.hpp"
#include "corrsurf/rng.hpp"

#include <cmath>
#include <string>

namespace corrsurf::copulas {

namespace {

void check_nu(double nu)
{
    if (!(nu > 2.0))
        throw DomainError("degrees of freedom must exceed 2, got " + std::to_string(nu));
}

} // namespace

MixingSample sample_mixing(double nu, const factor::McConfig& cfg)
{
    check_nu(nu);
    MixingSample out;
    out.market.resize(cfg.n_paths);
    out.mixing.resize(cfg.n_paths);
    parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            PathRng rng(cfg.seed, i);
            out.market[i] = rng.normal();
            out.mixing[i] = std::sqrt(nu / rng.chi_square(nu));
        }
    });
    return out;
}

factor::FactorSample t_mixing_factor_sample(double nu, const factor::McConfig& cfg)
{
    MixingSample m = sample_mixing(nu, cfg);
    factor::FactorSample s;
    s.values = std::move(m.market);
    factor::normalize_unit_variance(s.values);
    s.threshold_scale.resize(m.mixing.size());
    for (std::size_t i = 0; i < m.mixing.size(); ++i)
        s.threshold_scale[i] = 1.0 / m.mixing[i];
    s.exact_threshold = true;
    s.nu_mixing = nu;
    return s;
}

// W (b Z + sqrt(1 - b^2) E) with W = sqrt(nu / chi2) is a standard t(nu)
// variable, so the default threshold is its quantile. Working with the
// standard rather than the unit-variance t leaves the copula unchanged.
double t_copula_threshold(double p, double nu)
{
    check_nu(nu);
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("default probability must lie in (0, 1)");
    return math::student_t_inv(p, nu);
}

factor::LossDistribution t_copula_conditional_loss(const TCopulaSpec& spec, double p, const factor::McConfig& cfg)
{
    const factor::FactorSample s = t_mixing_factor_sample(spec.nu, cfg);
    const double d = t_copula_threshold(p, spec.nu);
    return factor::lhp_losses(s, spec.loading, factor::GaussianIdio{}, d, spec.recovery);
}

factor::FactorSample double_t_factor_sample(double nu_m, const factor::McConfig& cfg)
{
    check_nu(nu_m);
    factor::FactorSample s;
    s.values.resize(cfg.n_paths);
    parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            PathRng rng(cfg.seed, i);
            s.values[i] = math::scaled_t_sample(nu_m, rng);
        }
    });
    factor::normalize_unit_variance(s.values);
    return s;
}

} // namespace corrsurf::copulas
