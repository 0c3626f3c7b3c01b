#pragma once

#include "corrsurf/factor_mc.hpp"

#include <cstdint>
#include <vector>

// Single-period comparison copulas expressed as factor samplers.
namespace corrsurf::copulas {

// market: standard normal Z_m; mixing: W = sqrt(nu / chi2_nu) per path.
struct MixingSample {
    std::vector<double> market;
    std::vector<double> mixing;
};

struct TCopulaSpec {
    double nu = 12.0;
    double loading = 0.0;
    double recovery = 0.4;
};

MixingSample sample_mixing(double nu, const factor::McConfig& cfg);

// Latent R_i = W (b Z_m + sqrt(1 - b^2) E_i): Student-t marginals, so the
// threshold is the t quantile of p and path losses are
// (1 - R) Phi((d / W - b Z_m) / sqrt(1 - b^2)).
factor::FactorSample t_mixing_factor_sample(double nu, const factor::McConfig& cfg);
double t_copula_threshold(double p, double nu);
factor::LossDistribution t_copula_conditional_loss(const TCopulaSpec& spec, double p, const factor::McConfig& cfg);

// Unit-variance Student-t market factor draws, normalized to unit sample variance.
factor::FactorSample double_t_factor_sample(double nu_m, const factor::McConfig& cfg);

} // namespace corrsurf::copulas
