#include "corrsurf/surface.hpp"

#include "corrsurf/errors.hpp"
#include "corrsurf/math/normal.hpp"
#include "corrsurf/math/roots.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace corrsurf::surface {

namespace {

constexpr double kBoundaryTol = 1e-12;
constexpr double kRhoLo = 1e-14;
constexpr double kRhoHi = 1.0 - 1e-14;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t find_index(const std::vector<double>& grid, double x, const char* what)
{
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid[i] - x) <= 1e-9 * std::max(1.0, std::abs(x)))
            return i;
    std::ostringstream os;
    os << what << " " << x << " is not on the grid";
    throw DomainError(os.str());
}

void check_increasing(std::span<const double> g, const char* what)
{
    if (g.empty())
        throw DomainError(std::string(what) + " grid is empty");
    for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1]))
            throw DomainError(std::string(what) + " grid must be strictly increasing");
}

} // namespace

const char* flag_name(CorrFlag f) noexcept
{
    switch (f) {
    case CorrFlag::ok:
        return "ok";
    case CorrFlag::rho_zero:
        return "rho_zero";
    case CorrFlag::rho_one:
        return "rho_one";
    case CorrFlag::out_of_range:
        return "out_of_range";
    }
    return "?";
}

ImpliedCorr implied_corr(double target_el, double K, double p, double recovery)
{
    if (!(recovery >= 0.0 && recovery < 1.0))
        throw DomainError("implied_corr: recovery must lie in [0, 1)");
    if (!(K > 0.0 && K < 1.0 - recovery))
        throw DomainError("implied_corr: K must lie in (0, 1 - recovery); the loss is rho-independent above");
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("implied_corr: p must lie in (0, 1)");
    if (!std::isfinite(target_el))
        throw DomainError("implied_corr: target expected loss is not finite");

    const double lower = gauss::equity_loss_lower_bound(K, p, recovery);
    const double upper = gauss::equity_loss_upper_bound(K, p, recovery);
    if (target_el < lower - kBoundaryTol) {
        std::ostringstream os;
        os << "implied_corr: target " << target_el << " is below the lower bound p*min(K,1-R) = " << lower;
        throw OutOfRangeError(OutOfRangeError::Bound::lower, os.str());
    }
    if (target_el > upper + kBoundaryTol) {
        std::ostringstream os;
        os << "implied_corr: target " << target_el << " is above the upper bound min(K,(1-R)p) = " << upper;
        throw OutOfRangeError(OutOfRangeError::Bound::upper, os.str());
    }
    if (target_el >= upper - kBoundaryTol)
        return {0.0, CorrFlag::rho_zero};
    if (target_el <= lower + kBoundaryTol)
        return {1.0, CorrFlag::rho_one};

    auto f = [&](double rho) { return gauss::expected_equity_loss_gauss(K, p, recovery, rho) - target_el; };
    // EL falls in rho; a target past the representable ends is a boundary case.
    if (f(kRhoLo) <= 0.0)
        return {0.0, CorrFlag::rho_zero};
    if (f(kRhoHi) >= 0.0)
        return {1.0, CorrFlag::rho_one};
    math::RootOptions opt;
    opt.x_tol = 1e-14;
    opt.f_tol = 0.0;
    opt.max_iter = 300;
    return {math::find_root_monotone(f, kRhoLo, kRhoHi, opt), CorrFlag::ok};
}

std::size_t CorrSurface::k_index(double K) const
{
    return find_index(k_grid, K, "K");
}

std::size_t CorrSurface::t_index(double T) const
{
    return find_index(t_grid, T, "T");
}

std::string model_id(const factor::FactorModelSpec& spec)
{
    std::ostringstream os;
    if (const auto* t = std::get_if<factor::TarchFactor>(&spec.factor)) {
        os << "tarch(" << t->params.alpha << "," << t->params.alpha_d << "," << t->params.beta;
        if (const auto* st = std::get_if<tarch::StudentTShocks>(&t->params.innovation))
            os << ",t" << st->nu;
        os << ")";
    } else if (std::holds_alternative<factor::GaussianStatic>(spec.factor)) {
        os << "gaussian_static";
    } else if (const auto* m = std::get_if<factor::StudentTMixing>(&spec.factor)) {
        os << "student_t_mixing(" << m->nu << ")";
    } else if (const auto* d = std::get_if<factor::DoubleT>(&spec.factor)) {
        os << "double_t(" << d->nu_m << ")";
    }
    if (const auto* ti = std::get_if<factor::StudentTIdio>(&spec.idiosyncratic);
        ti && !std::holds_alternative<factor::StudentTMixing>(spec.factor))
        os << "+idio_t(" << ti->nu << ")";
    os << " rho=" << spec.rho();
    return os.str();
}

ModelPricer::ModelPricer(factor::FactorModelSpec spec, std::vector<double> t_grid, const factor::McConfig& mc)
    : spec_(std::move(spec)), t_grid_(std::move(t_grid))
{
    check_increasing(t_grid_, "T");
    std::vector<std::size_t> steps;
    for (double t : t_grid_) {
        const std::size_t s = factor::horizon_steps(spec_, t);
        if (s == 0 || (!steps.empty() && s <= steps.back()))
            throw DomainError("maturities collapse onto the same number of simulation steps");
        steps.push_back(s);
    }
    samples_ = factor::sample_factor_horizons(spec_, steps, mc);
}

std::size_t ModelPricer::t_index(double T) const
{
    return find_index(t_grid_, T, "T");
}

factor::LossDistribution ModelPricer::losses(std::size_t it, double p) const
{
    return factor::model_losses(spec_, samples_.at(it), p);
}

std::vector<double> ModelPricer::expected_losses(std::size_t it, double p, std::span<const double> k_grid) const
{
    const factor::LossDistribution L = losses(it, p);
    std::vector<double> out;
    out.reserve(k_grid.size());
    for (double K : k_grid)
        out.push_back(factor::expected_tranche_loss_mc(L, K));
    return out;
}

ImpliedCorr ModelPricer::implied(std::size_t it, double K, double hazard, gauss::Compounding conv) const
{
    const double p = gauss::hazard_to_p(hazard, t_grid_.at(it), conv);
    const factor::LossDistribution L = losses(it, p);
    return implied_corr(factor::expected_tranche_loss_mc(L, K), K, p, spec_.recovery);
}

CorrSurface build_surface(const ModelPricer& pricer, std::span<const double> k_grid, double hazard,
                          gauss::Compounding conv)
{
    check_increasing(k_grid, "K");
    CorrSurface s;
    s.k_grid.assign(k_grid.begin(), k_grid.end());
    s.t_grid = pricer.t_grid();
    s.recovery = pricer.spec().recovery;
    s.hazard = hazard;
    s.model_id = model_id(pricer.spec());
    s.values.assign(s.k_grid.size() * s.t_grid.size(), kNaN);
    s.flags.assign(s.values.size(), CorrFlag::out_of_range);
    for (std::size_t it = 0; it < s.t_grid.size(); ++it) {
        const double p = gauss::hazard_to_p(hazard, s.t_grid[it], conv);
        s.p.push_back(p);
        const std::vector<double> el = pricer.expected_losses(it, p, k_grid);
        for (std::size_t ik = 0; ik < s.k_grid.size(); ++ik) {
            try {
                const ImpliedCorr ic = implied_corr(el[ik], s.k_grid[ik], p, s.recovery);
                s.values[s.index(ik, it)] = ic.rho;
                s.flags[s.index(ik, it)] = ic.flag;
            } catch (const OutOfRangeError&) {
                // left as out_of_range / NaN
            }
        }
    }
    return s;
}

CorrSurface build_surface(const factor::FactorModelSpec& spec, std::span<const double> k_grid,
                          std::span<const double> t_grid, double hazard, const factor::McConfig& mc,
                          gauss::Compounding conv)
{
    const ModelPricer pricer(spec, std::vector<double>(t_grid.begin(), t_grid.end()), mc);
    return build_surface(pricer, k_grid, hazard, conv);
}

double surface_slope_k(const CorrSurface& s, std::size_t ik, std::size_t it)
{
    if (ik >= s.k_grid.size() || it >= s.t_grid.size())
        throw DomainError("surface_slope_k: index outside the grid");
    if (!s.valid(ik, it))
        throw DegenerateError("surface_slope_k: cell is flagged " + std::string(flag_name(s.flags[s.index(ik, it)])));
    const bool left = ik > 0 && s.valid(ik - 1, it);
    const bool right = ik + 1 < s.k_grid.size() && s.valid(ik + 1, it);
    if (left && right)
        return (s.at(ik + 1, it) - s.at(ik - 1, it)) / (s.k_grid[ik + 1] - s.k_grid[ik - 1]);
    if (right)
        return (s.at(ik + 1, it) - s.at(ik, it)) / (s.k_grid[ik + 1] - s.k_grid[ik]);
    if (left)
        return (s.at(ik, it) - s.at(ik - 1, it)) / (s.k_grid[ik] - s.k_grid[ik - 1]);
    throw DegenerateError("surface_slope_k: grid too coarse, no valid neighbour in K");
}

double surface_slope_k_at(const CorrSurface& s, double K, double T)
{
    return surface_slope_k(s, s.k_index(K), s.t_index(T));
}

std::vector<double> surface_slope_k_slice(const CorrSurface& s, std::size_t it)
{
    std::vector<double> out(s.k_grid.size(), kNaN);
    for (std::size_t ik = 0; ik < s.k_grid.size(); ++ik) {
        try {
            out[ik] = surface_slope_k(s, ik, it);
        } catch (const DegenerateError&) {
        }
    }
    return out;
}

double surface_slope_h(const ModelPricer& pricer, double K, double T, double hazard, double bump,
                       gauss::Compounding conv)
{
    if (!(bump > 0.0))
        throw DomainError("surface_slope_h: bump must be positive");
    const std::size_t it = pricer.t_index(T);
    auto rho = [&](double h) {
        const ImpliedCorr ic = pricer.implied(it, K, h, conv);
        if (ic.flag != CorrFlag::ok)
            throw DegenerateError("surface_slope_h: bumped cell is flagged " + std::string(flag_name(ic.flag)));
        return ic.rho;
    };
    if (hazard > bump)
        return (rho(hazard + bump) - rho(hazard - bump)) / (2.0 * bump);
    return (rho(hazard + bump) - rho(hazard)) / bump;
}

LossCdfValue loss_cdf_from_surface(double rho, double rho_k, double K, double p, double recovery)
{
    const double d1 = gauss::vasicek_d1(K, p, recovery, rho);
    const double sr = std::sqrt(rho);
    const double v = 1.0 - math::norm_cdf(d1) +
                     (1.0 - recovery) / (2.0 * sr) * math::binorm_pdf(math::norm_inv_cdf(p), -d1, -sr) * rho_k;
    return {v, v >= 0.0 && v <= 1.0};
}

std::vector<LossCdfValue> reconstruct_loss_cdf(const CorrSurface& s, std::size_t it)
{
    std::vector<LossCdfValue> out(s.k_grid.size(), LossCdfValue{kNaN, false});
    const std::vector<double> slope = surface_slope_k_slice(s, it);
    for (std::size_t ik = 0; ik < s.k_grid.size(); ++ik) {
        if (!s.valid(ik, it) || std::isnan(slope[ik]) || !(s.k_grid[ik] < 1.0 - s.recovery))
            continue;
        out[ik] = loss_cdf_from_surface(s.at(ik, it), slope[ik], s.k_grid[ik], s.p[it], s.recovery);
    }
    return out;
}

double tranche_sensitivity_ratio(double K, double p_t, double recovery, double rho, double t, double hazard,
                                 gauss::Compounding conv)
{
    if (!(t > 0.0))
        throw DomainError("tranche_sensitivity_ratio: t must be positive");
    if (!(rho > 0.0 && rho < 1.0))
        throw DomainError("tranche_sensitivity_ratio: rho must lie in (0, 1)");
    if (!(K > 0.0))
        throw DomainError("tranche_sensitivity_ratio: K must be positive");
    if (K >= 1.0 - recovery)
        return 0.0;
    const double d1 = gauss::vasicek_d1(K, p_t, recovery, rho);
    const double c = math::norm_inv_cdf(p_t);
    const double sr = std::sqrt(rho);
    const double num = math::binorm_pdf(c, -d1, -sr);
    const double den = 2.0 * sr * gauss::dp_dh(hazard, t, conv) * math::norm_cdf((-d1 + sr * c) / std::sqrt(1.0 - rho));
    return -num / den;
}

DeltaReport delta_adjustment(const ModelPricer& pricer, double K, double T, double hazard, double bump,
                             gauss::Compounding conv)
{
    const std::size_t it = pricer.t_index(T);
    const double R = pricer.spec().recovery;
    const double p = gauss::hazard_to_p(hazard, T, conv);
    const ImpliedCorr ic = pricer.implied(it, K, hazard, conv);
    if (ic.flag != CorrFlag::ok)
        throw DegenerateError("delta_adjustment: surface cell is flagged " + std::string(flag_name(ic.flag)));
    DeltaReport r{};
    r.K = K;
    r.t = T;
    r.hazard = hazard;
    r.rho = ic.rho;
    r.psi = tranche_sensitivity_ratio(K, p, R, ic.rho, T, hazard, conv);
    r.rho_h = surface_slope_h(pricer, K, T, hazard, bump, conv);
    r.delta_adj = r.rho_h * r.psi;
    r.gaussian_delta_proxy = gauss::d_expected_loss_d_h(K, p, R, ic.rho, T, hazard, conv);
    return r;
}

} // namespace corrsurf::surface
