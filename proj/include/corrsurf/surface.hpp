#pragma once

#include "corrsurf/factor_mc.hpp"
#include "corrsurf/gaussian_analytics.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

// Gaussian-copula implied correlation of model tranche losses, viewed as a
// surface over detachment K and maturity T.
namespace corrsurf::surface {

enum class CorrFlag {
    ok,
    rho_zero,     // target at the independence bound
    rho_one,      // target at the comonotone bound
    out_of_range, // target outside the attainable range (surface cells only)
};

const char* flag_name(CorrFlag f) noexcept;

struct ImpliedCorr {
    double rho;
    CorrFlag flag;
};

// Solves E^G L_(0,K](rho) = target_el. Targets within 1e-12 of the
// attainable range [p min(K, 1-R), min(K, (1-R) p)] come back flagged with
// rho = 0 or 1; anything further out throws OutOfRangeError naming the bound.
ImpliedCorr implied_corr(double target_el, double K, double p, double recovery);

struct CorrSurface {
    std::vector<double> k_grid;
    std::vector<double> t_grid; // years
    std::vector<double> p;      // default probability per T
    double recovery = 0.4;
    double hazard = 0.0;
    std::string model_id;
    // K-major: index ik * t_grid.size() + it.
    std::vector<double> values;
    std::vector<CorrFlag> flags;

    std::size_t index(std::size_t ik, std::size_t it) const { return ik * t_grid.size() + it; }
    double at(std::size_t ik, std::size_t it) const { return values[index(ik, it)]; }
    bool valid(std::size_t ik, std::size_t it) const { return flags[index(ik, it)] == CorrFlag::ok; }
    std::size_t k_index(double K) const;
    std::size_t t_index(double T) const;
};

std::string model_id(const factor::FactorModelSpec& spec);

// Factor samples for every maturity drawn once from common paths; repricing
// at another hazard rate reuses them, so bumps see common random numbers.
class ModelPricer {
public:
    ModelPricer(factor::FactorModelSpec spec, std::vector<double> t_grid, const factor::McConfig& mc);

    const factor::FactorModelSpec& spec() const { return spec_; }
    const std::vector<double>& t_grid() const { return t_grid_; }
    std::size_t t_index(double T) const;
    const factor::FactorSample& sample(std::size_t it) const { return samples_.at(it); }

    factor::LossDistribution losses(std::size_t it, double p) const;
    std::vector<double> expected_losses(std::size_t it, double p, std::span<const double> k_grid) const;
    ImpliedCorr implied(std::size_t it, double K, double hazard, gauss::Compounding conv) const;

private:
    factor::FactorModelSpec spec_;
    std::vector<double> t_grid_;
    std::vector<factor::FactorSample> samples_;
};

// Cells whose inversion fails are flagged, not fatal.
CorrSurface build_surface(const ModelPricer& pricer, std::span<const double> k_grid, double hazard,
                          gauss::Compounding conv = gauss::Compounding::continuous);
CorrSurface build_surface(const factor::FactorModelSpec& spec, std::span<const double> k_grid,
                          std::span<const double> t_grid, double hazard, const factor::McConfig& mc,
                          gauss::Compounding conv = gauss::Compounding::continuous);

// Central difference along K, one-sided at the grid edges or next to a
// flagged cell. Throws DegenerateError when no valid neighbour exists.
double surface_slope_k(const CorrSurface& s, std::size_t ik, std::size_t it);
double surface_slope_k_at(const CorrSurface& s, double K, double T);
std::vector<double> surface_slope_k_slice(const CorrSurface& s, std::size_t it);

// d rho / d h by repricing the same factor paths at h +/- bump (forward
// difference when h <= bump).
double surface_slope_h(const ModelPricer& pricer, double K, double T, double hazard, double bump = 0.0025,
                       gauss::Compounding conv = gauss::Compounding::continuous);

struct LossCdfValue {
    double value;
    bool consistent; // value inside [0, 1]
};

// P(L <= K) = 1 - Phi(d1) + (1-R) / (2 sqrt(rho)) phi2(Phi^-1(p), -d1; -sqrt(rho)) rho_K.
LossCdfValue loss_cdf_from_surface(double rho, double rho_k, double K, double p, double recovery);
// Reconstructed cdf at every valid K of one maturity slice; NaN where the
// cell or its slope is unavailable.
std::vector<LossCdfValue> reconstruct_loss_cdf(const CorrSurface& s, std::size_t it);

// Psi = E_rho / E_h for the Gaussian equity tranche.
double tranche_sensitivity_ratio(double K, double p_t, double recovery, double rho, double t, double hazard,
                                 gauss::Compounding conv = gauss::Compounding::continuous);

struct DeltaReport {
    double K;
    double t;
    double hazard;
    double rho;
    double psi;
    double rho_h;
    double delta_adj;            // rho_h * psi
    double gaussian_delta_proxy; // E^G_h L_(0,K] at the surface correlation
};

DeltaReport delta_adjustment(const ModelPricer& pricer, double K, double T, double hazard, double bump = 0.0025,
                             gauss::Compounding conv = gauss::Compounding::continuous);

} // namespace corrsurf::surface
