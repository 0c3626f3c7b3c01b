#include "corrsurf/factor_mc.hpp"

#include "corrsurf/errors.hpp"
#include "corrsurf/kernels/kernels.hpp"
#include "corrsurf/math/normal.hpp"
#include "corrsurf/math/roots.hpp"
#include "corrsurf/math/stats.hpp"
#include "corrsurf/math/student_t.hpp"
#include "corrsurf/parallel.hpp"
#include "corrsurf/rng.hpp"
#include "corrsurf/static_copulas.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace corrsurf::factor {

namespace {

constexpr std::size_t kBlock = 4096;

void check_loading(double b, bool allow_one)
{
    if (!(b >= 0.0) || b > 1.0 || (!allow_one && b >= 1.0))
        throw DomainError("factor loading b must lie in [0, 1" + std::string(allow_one ? "]" : ")") +
                          ", got " + std::to_string(b));
}

void check_p(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("default probability must lie in (0, 1), got " + std::to_string(p));
}

double idio_cdf(const Idiosyncratic& idio, double z)
{
    if (std::isinf(z))
        return z > 0 ? 1.0 : 0.0;
    if (const auto* t = std::get_if<StudentTIdio>(&idio))
        return math::scaled_t_cdf(z, t->nu);
    return math::norm_cdf(z);
}

// Writes G((a_i d - b x_i) / sqrt(1 - b^2)) for i in [begin, end).
void cond_probs_range(const FactorSample& s, double b, const Idiosyncratic& idio, double d, std::size_t begin,
                      std::size_t end, double* out)
{
    const std::size_t n = end - begin;
    const bool scaled = !s.threshold_scale.empty();
    if (std::holds_alternative<GaussianIdio>(idio)) {
        std::span<const double> x(s.values.data() + begin, n);
        std::span<const double> a = scaled ? std::span<const double>(s.threshold_scale.data() + begin, n)
                                           : std::span<const double>();
        kernels::conditional_default_prob(x, a, d, b, {out, n});
        return;
    }
    const double sd = std::sqrt(1.0 - b * b);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = scaled ? s.threshold_scale[begin + i] : 1.0;
        out[i] = idio_cdf(idio, (a * d - b * s.values[begin + i]) / sd);
    }
}

void check_sample(const FactorSample& s)
{
    if (s.values.empty())
        throw DegenerateError("empty factor sample");
    if (!s.threshold_scale.empty() && s.threshold_scale.size() != s.values.size())
        throw LengthMismatchError("threshold_scale and factor values differ in length");
}

std::vector<double> gaussian_draws(const McConfig& cfg)
{
    std::vector<double> z(cfg.n_paths);
    parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            z[i] = PathRng(cfg.seed, i).normal();
    });
    return z;
}

} // namespace

FactorModelSpec FactorModelSpec::with_rho(FactorModel f, double rho, Idiosyncratic idio, double recovery)
{
    if (!(rho >= 0.0 && rho <= 1.0))
        throw DomainError("rho must lie in [0, 1], got " + std::to_string(rho));
    FactorModelSpec s;
    s.factor = std::move(f);
    s.loading = std::sqrt(rho);
    s.idiosyncratic = idio;
    s.recovery = recovery;
    return s;
}

double LossDistribution::mean() const
{
    if (losses.empty())
        return 0.0;
    return kernels::strided_sum(losses) / static_cast<double>(losses.size());
}

double LossDistribution::std_error() const
{
    return std::sqrt(math::sample_variance(losses) / static_cast<double>(losses.size()));
}

std::size_t horizon_steps(const FactorModelSpec& spec, double years)
{
    if (!(years > 0.0))
        throw DomainError("horizon must be positive");
    return static_cast<std::size_t>(std::llround(years * static_cast<double>(spec.steps_per_year)));
}

Idiosyncratic effective_idiosyncratic(const FactorModelSpec& spec)
{
    if (std::holds_alternative<StudentTMixing>(spec.factor))
        return GaussianIdio{};
    return spec.idiosyncratic;
}

void normalize_unit_variance(std::vector<double>& values)
{
    const double var = math::sample_variance(values);
    if (!(var > 0.0) || !std::isfinite(var))
        throw DegenerateError("factor sample has zero or non-finite variance");
    const double inv = 1.0 / std::sqrt(var);
    for (double& v : values)
        v *= inv;
}

std::vector<FactorSample> sample_factor_horizons(const FactorModelSpec& spec,
                                                 std::span<const std::size_t> horizon_steps,
                                                 const McConfig& cfg)
{
    if (cfg.n_paths < 2)
        throw DomainError("need at least two paths");
    if (horizon_steps.empty())
        throw DomainError("no horizons requested");
    for (std::size_t i = 0; i < horizon_steps.size(); ++i)
        if (horizon_steps[i] == 0 || (i > 0 && horizon_steps[i] <= horizon_steps[i - 1]))
            throw DomainError("horizons must be positive and strictly increasing");

    std::vector<FactorSample> out(horizon_steps.size());

    if (const auto* tf = std::get_if<TarchFactor>(&spec.factor)) {
        tarch::PathConfig pc;
        pc.horizon_steps = horizon_steps.back();
        pc.n_paths = cfg.n_paths;
        pc.seed = cfg.seed;
        pc.threads = cfg.threads;
        const tarch::PathMatrix m = tarch::simulate_aggregated(tf->params, pc, horizon_steps);
        for (std::size_t c = 0; c < horizon_steps.size(); ++c) {
            out[c].values.resize(cfg.n_paths);
            for (std::size_t i = 0; i < cfg.n_paths; ++i)
                out[c].values[i] = m(i, c);
            normalize_unit_variance(out[c].values);
        }
        return out;
    }

    // Single-period models: the horizon only enters through p.
    FactorSample base;
    if (std::holds_alternative<GaussianStatic>(spec.factor)) {
        base.values = gaussian_draws(cfg);
        normalize_unit_variance(base.values);
    } else if (const auto* mx = std::get_if<StudentTMixing>(&spec.factor)) {
        base = copulas::t_mixing_factor_sample(mx->nu, cfg);
    } else if (const auto* dt = std::get_if<DoubleT>(&spec.factor)) {
        base = copulas::double_t_factor_sample(dt->nu_m, cfg);
    }
    for (auto& o : out)
        o = base;
    return out;
}

FactorSample sample_factor(const FactorModelSpec& spec, std::size_t horizon_steps, const McConfig& cfg)
{
    const std::size_t h[1] = {horizon_steps};
    return std::move(sample_factor_horizons(spec, h, cfg).front());
}

std::vector<double> conditional_default_probs(const FactorSample& s, double b, const Idiosyncratic& idio, double d)
{
    check_sample(s);
    check_loading(b, true);
    std::vector<double> q(s.values.size());
    cond_probs_range(s, b, idio, d, 0, q.size(), q.data());
    return q;
}

double mixture_default_prob(const FactorSample& s, double b, const Idiosyncratic& idio, double d)
{
    check_sample(s);
    check_loading(b, true);
    const std::size_t n = s.values.size();
    // Blocked so the Student-t path does not allocate n doubles per call;
    // block sums are added in order.
    std::vector<double> buf(std::min(n, kBlock));
    double total = 0.0;
    for (std::size_t b0 = 0; b0 < n; b0 += kBlock) {
        const std::size_t e = std::min(n, b0 + kBlock);
        cond_probs_range(s, b, idio, d, b0, e, buf.data());
        total += kernels::strided_sum({buf.data(), e - b0});
    }
    return total / static_cast<double>(n);
}

double calibrate_threshold(const FactorSample& s, double b, const Idiosyncratic& idio, double p)
{
    check_p(p);
    check_sample(s);
    check_loading(b, false);
    if (s.exact_threshold)
        return copulas::t_copula_threshold(p, s.nu_mixing);

    auto f = [&](double d) { return mixture_default_prob(s, b, idio, d) - p; };
    double lo = -8.0, hi = 8.0;
    for (int i = 0; i < 60 && f(lo) > 0.0; ++i) {
        hi = lo;
        lo *= 2.0;
    }
    for (int i = 0; i < 60 && f(hi) < 0.0; ++i) {
        lo = hi;
        hi *= 2.0;
    }
    math::RootOptions opt;
    opt.x_tol = 1e-14;
    opt.f_tol = 1e-12;
    opt.max_iter = 400;
    return math::find_root_monotone(f, lo, hi, opt);
}

LossDistribution lhp_losses(const FactorSample& s, double b, const Idiosyncratic& idio, double d, double recovery)
{
    if (!(recovery >= 0.0 && recovery < 1.0))
        throw DomainError("recovery must lie in [0, 1)");
    LossDistribution out;
    out.recovery = recovery;
    out.losses = conditional_default_probs(s, b, idio, d);
    const double lgd = 1.0 - recovery;
    for (double& l : out.losses)
        l *= lgd;
    return out;
}

LossDistribution model_losses(const FactorModelSpec& spec, const FactorSample& s, double p)
{
    const Idiosyncratic idio = effective_idiosyncratic(spec);
    const double d = calibrate_threshold(s, spec.loading, idio, p);
    return lhp_losses(s, spec.loading, idio, d, spec.recovery);
}

double expected_tranche_loss_mc(const LossDistribution& dist, double K)
{
    if (!(K > 0.0 && K <= 1.0))
        throw DomainError("detachment K must lie in (0, 1]");
    if (dist.losses.empty())
        throw DegenerateError("empty loss distribution");
    return kernels::capped_sum(dist.losses, K) / static_cast<double>(dist.losses.size());
}

Estimate expected_tranche_loss_stats(const LossDistribution& dist, double K)
{
    const double m = expected_tranche_loss_mc(dist, K);
    const std::size_t n = dist.losses.size();
    double ss = 0.0;
    for (double l : dist.losses) {
        const double v = std::min(l, K) - m;
        ss += v * v;
    }
    const double var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
    return {m, std::sqrt(var / static_cast<double>(n))};
}

std::vector<double> empirical_loss_cdf(const LossDistribution& dist, std::span<const double> l_grid)
{
    std::vector<double> sorted = dist.losses;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(l_grid.size());
    for (double l : l_grid) {
        const auto k = std::upper_bound(sorted.begin(), sorted.end(), l) - sorted.begin();
        out.push_back(static_cast<double>(k) / static_cast<double>(sorted.size()));
    }
    return out;
}

std::vector<DefaultCorrPoint> default_corr_mc(const FactorModelSpec& spec, std::span<const double> p_grid,
                                              std::size_t horizon_steps, const McConfig& cfg, std::size_t n_reps)
{
    if (n_reps == 0)
        throw DomainError("n_reps must be at least 1");
    for (double p : p_grid)
        check_p(p);
    check_loading(spec.loading, false);

    const Idiosyncratic idio = effective_idiosyncratic(spec);
    const std::size_t np = p_grid.size();
    std::vector<double> est(n_reps * np);
    // Repetitions are independent; each runs its own paths single-threaded
    // and writes into its own slots.
    parallel_for(n_reps, cfg.threads, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t r = r0; r < r1; ++r) {
            McConfig rc = cfg;
            rc.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
            rc.threads = 1;
            const FactorSample s = sample_factor(spec, horizon_steps, rc);
            const double n = static_cast<double>(s.values.size());
            for (std::size_t j = 0; j < np; ++j) {
                const double d = calibrate_threshold(s, spec.loading, idio, p_grid[j]);
                std::vector<double> q = conditional_default_probs(s, spec.loading, idio, d);
                // The sample mean of q is p up to solver tolerance for calibrated
                // thresholds and up to MC error for the exact mixing quantile.
                const double p1 = kernels::strided_sum(q) / n;
                for (double& v : q)
                    v *= v;
                const double p12 = kernels::strided_sum(q) / n;
                est[r * np + j] = (p12 - p1 * p1) / (p1 * (1.0 - p1));
            }
        }
    });

    std::vector<DefaultCorrPoint> out;
    std::vector<double> col(n_reps);
    for (std::size_t j = 0; j < np; ++j) {
        for (std::size_t r = 0; r < n_reps; ++r)
            col[r] = est[r * np + j];
        std::sort(col.begin(), col.end());
        out.push_back({p_grid[j], math::sample_mean(col), math::quantile_sorted(col, 0.025),
                       math::quantile_sorted(col, 0.975)});
    }
    return out;
}

} // namespace corrsurf::factor
