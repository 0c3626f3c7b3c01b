#pragma once

#include "corrsurf/tarch.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

// One-factor large-homogeneous-portfolio Monte Carlo: latent returns
// R_i = b R_m + sqrt(1 - b^2) E_i, default when R_i crosses d_T.
namespace corrsurf::factor {

struct GaussianStatic {};
struct TarchFactor {
    tarch::TarchParams params;
};
// Student-t copula through a common mixing variable.
struct StudentTMixing {
    double nu = 12.0;
};
// Unit-variance Student-t market factor; idiosyncratic law chosen separately.
struct DoubleT {
    double nu_m = 12.0;
};
using FactorModel = std::variant<GaussianStatic, TarchFactor, StudentTMixing, DoubleT>;

struct GaussianIdio {};
struct StudentTIdio {
    double nu = 12.0;
};
using Idiosyncratic = std::variant<GaussianIdio, StudentTIdio>;

struct FactorModelSpec {
    FactorModel factor = GaussianStatic{};
    double loading = 0.0; // b, rho = b^2
    Idiosyncratic idiosyncratic = GaussianIdio{};
    std::size_t steps_per_year = 52;
    double recovery = 0.4;

    double rho() const { return loading * loading; }
    static FactorModelSpec with_rho(FactorModel f, double rho, Idiosyncratic idio = GaussianIdio{}, double recovery = 0.4);
};

struct McConfig {
    std::size_t n_paths = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

// Factor draws scaled to unit sample variance. threshold_scale is empty
// except for the mixing copula, where path i defaults below
// threshold_scale[i] * d rather than d.
struct FactorSample {
    std::vector<double> values;
    std::vector<double> threshold_scale;
    // Set when the marginal is known in closed form (mixing copula).
    bool exact_threshold = false;
    double nu_mixing = 0.0;
};

struct LossDistribution {
    std::vector<double> losses;
    double recovery = 0.4;

    double mean() const;
    double std_error() const;
};

using Estimate = tarch::Estimate;

struct DefaultCorrPoint {
    double p;
    double estimate;
    double lower;
    double upper;
};

std::size_t horizon_steps(const FactorModelSpec& spec, double years);

// The mixing copula always uses Gaussian E_i inside the mixture; other
// models use spec.idiosyncratic.
Idiosyncratic effective_idiosyncratic(const FactorModelSpec& spec);

// Divides by the sample standard deviation (n - 1 denominator).
void normalize_unit_variance(std::vector<double>& values);

FactorSample sample_factor(const FactorModelSpec& spec, std::size_t horizon_steps, const McConfig& cfg);
// Several horizons from the same simulated paths (common random numbers).
std::vector<FactorSample> sample_factor_horizons(const FactorModelSpec& spec, std::span<const std::size_t> horizon_steps,
                                                 const McConfig& cfg);

// Mean over paths of G((a_i d - b x_i) / sqrt(1 - b^2)), G the idiosyncratic cdf.
double mixture_default_prob(const FactorSample& s, double b, const Idiosyncratic& idio, double d);
// Solves mixture_default_prob(d) = p. Mixing samples use the exact marginal quantile.
double calibrate_threshold(const FactorSample& s, double b, const Idiosyncratic& idio, double p);

// Per-path conditional default probabilities G((a_i d - b x_i) / sqrt(1 - b^2)).
std::vector<double> conditional_default_probs(const FactorSample& s, double b, const Idiosyncratic& idio, double d);

LossDistribution lhp_losses(const FactorSample& s, double b, const Idiosyncratic& idio, double d, double recovery);
// Calibrates d to p and maps through lhp_losses.
LossDistribution model_losses(const FactorModelSpec& spec, const FactorSample& s, double p);

double expected_tranche_loss_mc(const LossDistribution& dist, double K);
Estimate expected_tranche_loss_stats(const LossDistribution& dist, double K);

// Fraction of simulated losses <= l at each grid point.
std::vector<double> empirical_loss_cdf(const LossDistribution& dist, std::span<const double> l_grid);

// Default correlation (p12 - p^2) / (p (1 - p)) with p12 the mean squared
// conditional default probability. Each repetition uses an independent seed
// derived from cfg.seed; bounds are the 2.5% / 97.5% percentiles across reps.
std::vector<DefaultCorrPoint> default_corr_mc(const FactorModelSpec& spec, std::span<const double> p_grid,
                                              std::size_t horizon_steps, const McConfig& cfg, std::size_t n_reps);

} // namespace corrsurf::factor
