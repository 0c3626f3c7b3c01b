#include "corrsurf/tarch.hpp"

#include "corrsurf/errors.hpp"
#include "corrsurf/kernels/kernels.hpp"
#include "corrsurf/math/normal.hpp"
#include "corrsurf/math/student_t.hpp"
#include "corrsurf/parallel.hpp"
#include "corrsurf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace corrsurf::tarch {

namespace {

constexpr std::size_t kBlock = 256;

double draw_shock(const Innovation& innov, PathRng& rng)
{
    if (const auto* t = std::get_if<StudentTShocks>(&innov))
        return math::scaled_t_sample(t->nu, rng);
    return rng.normal();
}

void validate_for_simulation(const TarchParams& p)
{
    if (!(p.omega > 0.0))
        throw InvalidParamsError("tarch simulation needs omega > 0, got " + std::to_string(p.omega));
    if (p.alpha < 0.0 || p.alpha_d < 0.0 || p.beta < 0.0)
        throw InvalidParamsError("tarch coefficients alpha, alpha_d, beta must be non-negative");
    if (const auto* t = std::get_if<StudentTShocks>(&p.innovation); t && !(t->nu > 2.0))
        throw InvalidParamsError("student-t shocks need nu > 2, got " + std::to_string(t->nu));
}

void require_stationary(const TarchParams& p)
{
    if (!(persistence(p) < 1.0))
        throw DomainError("tarch: persistence must be < 1, got " + std::to_string(persistence(p)));
}

struct StepView {
    std::size_t first_path;
    std::size_t n;
    std::size_t step;          // 0-based index of the recorded step
    const double* returns;     // r of this step (per path) when agg is reset each step
    const double* sigma2;      // variance of this step's return
    const double* agg;         // running sum since the end of burn-in
};

// Simulates paths block by block. Each path draws from its own stream
// PathRng(seed, path index), so output is independent of the thread count.
template <class OnStep>
void run_paths(const TarchParams& p, std::uint64_t seed, std::size_t n_paths, std::size_t burn_in,
               std::size_t steps, double sigma2_init, bool per_step_returns, unsigned threads, OnStep&& on_step)
{
    validate_for_simulation(p);
    const kernels::TarchStepCoeffs c{p.omega, p.alpha, p.alpha_d, p.beta};
    const std::size_t n_blocks = (n_paths + kBlock - 1) / kBlock;
    parallel_for(n_blocks, threads, [&](std::size_t b0, std::size_t b1) {
        std::vector<PathRng> rngs;
        std::vector<double> eps(kBlock), s2(kBlock), s2_prev(kBlock), agg(kBlock);
        for (std::size_t blk = b0; blk < b1; ++blk) {
            const std::size_t first = blk * kBlock;
            const std::size_t n = std::min(kBlock, n_paths - first);
            rngs.clear();
            for (std::size_t j = 0; j < n; ++j)
                rngs.emplace_back(seed, first + j);
            std::span<double> e{eps.data(), n}, v{s2.data(), n}, a{agg.data(), n};
            std::fill(v.begin(), v.end(), sigma2_init);
            std::fill(a.begin(), a.end(), 0.0);
            for (std::size_t t = 0; t < burn_in + steps; ++t) {
                for (std::size_t j = 0; j < n; ++j)
                    e[j] = draw_shock(p.innovation, rngs[j]);
                const bool recording = t >= burn_in;
                if (recording) {
                    std::copy_n(s2.data(), n, s2_prev.data());
                    if (per_step_returns || t == burn_in)
                        std::fill(a.begin(), a.end(), 0.0);
                }
                kernels::tarch_step(c, e, v, a);
                if (recording)
                    on_step(StepView{first, n, t - burn_in, agg.data(), s2_prev.data(), agg.data()});
            }
        }
    });
}

double initial_variance(const TarchParams& p, const std::optional<double>& v)
{
    if (v) {
        if (!(*v > 0.0))
            throw InvalidParamsError("initial variance must be positive");
        return *v;
    }
    require_stationary(p);
    return unconditional_variance(p);
}

double agg_weight(double zeta, std::size_t T)
{
    const double Td = static_cast<double>(T);
    return (Td * (1.0 - zeta) - 1.0 + std::pow(zeta, Td)) / ((1.0 - zeta) * (1.0 - zeta));
}

double abs_t_moment3(double nu)
{
    // E|T|^3 for a standard Student-t with nu > 3.
    return std::exp(1.5 * std::log(nu) + std::lgamma((nu - 3.0) / 2.0) - 0.5 * std::log(math::kPi) -
                    std::lgamma(nu / 2.0));
}

} // namespace

TarchParams TarchParams::unit_variance(double alpha, double alpha_d, double beta, Innovation innov)
{
    TarchParams p{0.0, alpha, alpha_d, beta, innov};
    p.omega = 1.0 - persistence(p);
    return p;
}

bool is_symmetric(const Innovation&)
{
    return true;
}

InnovationMoments innovation_moments(const Innovation& innov)
{
    if (const auto* t = std::get_if<StudentTShocks>(&innov)) {
        const double nu = t->nu;
        if (!(nu > 4.0))
            throw InfiniteMomentError("student-t shocks need nu > 4 for finite kurtosis, got " + std::to_string(nu));
        const double c = std::sqrt((nu - 2.0) / nu);
        const double k = 3.0 * (nu - 2.0) / (nu - 4.0);
        return {0.5, 0.0, -0.5 * c * c * c * abs_t_moment3(nu), k, 0.5 * k};
    }
    return {0.5, 0.0, -std::sqrt(2.0 / math::kPi), 3.0, 1.5};
}

double persistence(const TarchParams& p)
{
    double v_d = 0.5;
    if (p.alpha_d != 0.0)
        v_d = innovation_moments(p.innovation).v_d;
    return p.beta + p.alpha + p.alpha_d * v_d;
}

double xi(const TarchParams& p)
{
    const InnovationMoments m = innovation_moments(p.innovation);
    return p.beta * p.beta + p.alpha * p.alpha * m.k + p.alpha_d * p.alpha_d * m.k_d + 2.0 * p.alpha * p.beta +
           2.0 * p.alpha_d * p.beta * m.v_d + 2.0 * p.alpha * p.alpha_d * m.k_d;
}

double unconditional_variance(const TarchParams& p)
{
    require_stationary(p);
    return p.omega / (1.0 - persistence(p));
}

double leverage_corr(const TarchParams& p)
{
    const InnovationMoments m = innovation_moments(p.innovation);
    const double z = persistence(p);
    const double var = xi(p) - z * z;
    if (!(var > 0.0))
        throw DegenerateError("leverage_corr: volatility is not random (xi <= zeta^2)");
    return (p.alpha * m.s + p.alpha_d * m.s_d) / std::sqrt(var);
}

PathMatrix simulate_paths(const TarchParams& p, const PathConfig& cfg)
{
    if (cfg.horizon_steps < 1 || cfg.n_paths < 1)
        throw InvalidParamsError("simulate_paths: horizon_steps and n_paths must be >= 1");
    const double s0 = initial_variance(p, cfg.initial_variance);
    PathMatrix out{cfg.n_paths, cfg.horizon_steps, std::vector<double>(cfg.n_paths * cfg.horizon_steps)};
    run_paths(p, cfg.seed, cfg.n_paths, cfg.burn_in, cfg.horizon_steps, s0, true, cfg.threads,
              [&](const StepView& sv) {
                  for (std::size_t j = 0; j < sv.n; ++j)
                      out.data[(sv.first_path + j) * out.cols + sv.step] = sv.returns[j];
              });
    return out;
}

PathMatrix simulate_aggregated(const TarchParams& p, const PathConfig& cfg, std::span<const std::size_t> checkpoints)
{
    if (checkpoints.empty() || cfg.n_paths < 1)
        throw InvalidParamsError("simulate_aggregated: need at least one checkpoint and one path");
    for (std::size_t i = 0; i < checkpoints.size(); ++i)
        if (checkpoints[i] < 1 || (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
            throw InvalidParamsError("simulate_aggregated: checkpoints must be positive and increasing");
    const double s0 = initial_variance(p, cfg.initial_variance);
    const std::size_t steps = checkpoints.back();
    std::vector<std::ptrdiff_t> slot(steps, -1);
    for (std::size_t i = 0; i < checkpoints.size(); ++i)
        slot[checkpoints[i] - 1] = static_cast<std::ptrdiff_t>(i);
    PathMatrix out{cfg.n_paths, checkpoints.size(), std::vector<double>(cfg.n_paths * checkpoints.size())};
    run_paths(p, cfg.seed, cfg.n_paths, cfg.burn_in, steps, s0, false, cfg.threads, [&](const StepView& sv) {
        const std::ptrdiff_t k = slot[sv.step];
        if (k < 0)
            return;
        for (std::size_t j = 0; j < sv.n; ++j)
            out.data[(sv.first_path + j) * out.cols + static_cast<std::size_t>(k)] = sv.agg[j];
    });
    return out;
}

double cond_variance_agg(const TarchParams& p, double sigma2_next, std::size_t T)
{
    require_stationary(p);
    const double z = persistence(p);
    const double s2 = unconditional_variance(p);
    const double Td = static_cast<double>(T);
    return Td * s2 + (sigma2_next - s2) * (1.0 - std::pow(z, Td)) / (1.0 - z);
}

double uncond_skewness_term(const TarchParams& p, std::size_t T, double sigma3_ratio)
{
    require_stationary(p);
    const InnovationMoments m = innovation_moments(p.innovation);
    const double z = persistence(p);
    const double Td = static_cast<double>(T);
    const double lev = p.alpha * m.s + p.alpha_d * m.s_d;
    return (m.s / std::sqrt(Td) + 3.0 * lev * agg_weight(z, T) / std::pow(Td, 1.5)) * sigma3_ratio;
}

double cond_third_moment(const TarchParams& p, std::span<const double> sigma3_forecast, std::size_t T)
{
    if (sigma3_forecast.size() != T)
        throw LengthMismatchError("cond_third_moment: forecast has " + std::to_string(sigma3_forecast.size()) +
                                  " entries, expected " + std::to_string(T));
    require_stationary(p);
    const InnovationMoments m = innovation_moments(p.innovation);
    const double z = persistence(p);
    const double lev = p.alpha * m.s + p.alpha_d * m.s_d;
    double direct = 0.0, lagged = 0.0;
    for (std::size_t u = 1; u <= T; ++u) {
        direct += sigma3_forecast[u - 1];
        lagged += (1.0 - std::pow(z, static_cast<double>(T - u))) / (1.0 - z) * sigma3_forecast[u - 1];
    }
    return m.s * direct + 3.0 * lev * lagged;
}

double cond_skewness(const TarchParams& p, double sigma2_next, std::span<const double> sigma3_forecast, std::size_t T)
{
    const double v = cond_variance_agg(p, sigma2_next, T);
    return cond_third_moment(p, sigma3_forecast, T) / std::pow(v, 1.5);
}

double uncond_kurtosis_1(const TarchParams& p)
{
    const InnovationMoments m = innovation_moments(p.innovation);
    const double x = xi(p);
    if (!(x < 1.0))
        throw InfiniteMomentError("unconditional kurtosis is infinite: xi = " + std::to_string(x) + " >= 1");
    const double z = persistence(p);
    return m.k * (1.0 - z * z) / (1.0 - x);
}

double gamma_1(const TarchParams& p, const ReturnMoments& rm)
{
    const InnovationMoments m = innovation_moments(p.innovation);
    return p.alpha * (rm.k - 1.0) + p.alpha_d * (rm.k_d - rm.v_d) + p.beta * (rm.k / m.k - 1.0);
}

ReturnMoments garch_return_moments(const TarchParams& p)
{
    if (p.alpha_d != 0.0 || !is_symmetric(p.innovation))
        throw HypothesisError("closed-form return moments need symmetric shocks and alpha_d = 0");
    const double k1 = uncond_kurtosis_1(p);
    return {0.0, std::nan(""), k1, 0.5 * k1, 0.5};
}

double agg_kurtosis(const TarchParams& p, std::size_t T)
{
    if (T < 1)
        throw InvalidParamsError("agg_kurtosis: T must be >= 1");
    const ReturnMoments rm = garch_return_moments(p);
    const double g = gamma_1(p, rm);
    const double Td = static_cast<double>(T);
    return 3.0 + (rm.k - 3.0) / Td + 6.0 * g / (Td * Td) * agg_weight(persistence(p), T);
}

Estimate stationary_sigma3_ratio(const TarchParams& p, std::size_t n_paths, std::uint64_t seed, std::size_t burn_in,
                                 std::size_t samples_per_path, unsigned threads)
{
    if (n_paths < 2 || samples_per_path < 1)
        throw InvalidParamsError("stationary_sigma3_ratio: need >= 2 paths and >= 1 sample per path");
    const double sbar2 = unconditional_variance(p);
    std::vector<double> per_path(n_paths, 0.0);
    run_paths(p, seed, n_paths, burn_in, samples_per_path, sbar2, true, threads, [&](const StepView& sv) {
        for (std::size_t j = 0; j < sv.n; ++j)
            per_path[sv.first_path + j] += std::pow(sv.sigma2[j] / sbar2, 1.5);
    });
    for (double& v : per_path)
        v /= static_cast<double>(samples_per_path);
    const double n = static_cast<double>(n_paths);
    const double mean = kernels::strided_sum(per_path) / n;
    double ss = 0.0;
    for (double v : per_path)
        ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

std::vector<double> cond_sigma3_forecast(const TarchParams& p, double sigma2_next, std::size_t T, std::size_t n_paths,
                                         std::uint64_t seed, unsigned threads)
{
    if (T < 1 || n_paths < 1)
        throw InvalidParamsError("cond_sigma3_forecast: T and n_paths must be >= 1");
    const std::size_t n_blocks = (n_paths + kBlock - 1) / kBlock;
    std::vector<double> block_sums(n_blocks * T, 0.0);
    run_paths(p, seed, n_paths, 0, T, sigma2_next, true, threads, [&](const StepView& sv) {
        double s = 0.0;
        for (std::size_t j = 0; j < sv.n; ++j)
            s += std::pow(sv.sigma2[j], 1.5);
        block_sums[(sv.first_path / kBlock) * T + sv.step] = s;
    });
    std::vector<double> out(T, 0.0);
    for (std::size_t b = 0; b < n_blocks; ++b)
        for (std::size_t t = 0; t < T; ++t)
            out[t] += block_sums[b * T + t];
    for (double& v : out)
        v /= static_cast<double>(n_paths);
    return out;
}

ReturnMoments estimate_return_moments(const TarchParams& p, std::size_t n_paths, std::size_t steps_per_path,
                                      std::uint64_t seed, std::size_t burn_in, unsigned threads)
{
    constexpr int kStats = 6; // r^2, r^2 1-, r^3, r^3 1-, r^4, r^4 1-
    std::vector<double> acc(n_paths * kStats, 0.0);
    const double s0 = unconditional_variance(p);
    run_paths(p, seed, n_paths, burn_in, steps_per_path, s0, true, threads, [&](const StepView& sv) {
        for (std::size_t j = 0; j < sv.n; ++j) {
            const double r = sv.returns[j];
            const double r2 = r * r;
            double* a = &acc[(sv.first_path + j) * kStats];
            const bool down = r <= 0.0;
            a[0] += r2;
            a[2] += r2 * r;
            a[4] += r2 * r2;
            if (down) {
                a[1] += r2;
                a[3] += r2 * r;
                a[5] += r2 * r2;
            }
        }
    });
    double tot[kStats] = {};
    for (std::size_t i = 0; i < n_paths; ++i)
        for (int k = 0; k < kStats; ++k)
            tot[k] += acc[i * kStats + k];
    const double n = static_cast<double>(n_paths * steps_per_path);
    const double m2 = tot[0] / n;
    return {tot[2] / n / std::pow(m2, 1.5), tot[3] / n / std::pow(m2, 1.5), tot[4] / n / (m2 * m2),
            tot[5] / n / (m2 * m2), tot[1] / n / m2};
}

} // namespace corrsurf::tarch
