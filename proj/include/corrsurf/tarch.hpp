#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace corrsurf::tarch {

struct GaussianShocks {};
// Student-t rescaled to unit variance; nu > 2.
struct StudentTShocks {
    double nu;
};
using Innovation = std::variant<GaussianShocks, StudentTShocks>;

// r_t = sigma_t eps_t,
// sigma_t^2 = omega + alpha r_{t-1}^2 + alpha_d r_{t-1}^2 [r_{t-1} <= 0] + beta sigma_{t-1}^2.
struct TarchParams {
    double omega = 0.0;
    double alpha = 0.0;
    double alpha_d = 0.0;
    double beta = 0.0;
    Innovation innovation = GaussianShocks{};

    // omega chosen so the unconditional variance is one.
    static TarchParams unit_variance(double alpha, double alpha_d, double beta, Innovation innov = GaussianShocks{});
};

// Central and left-truncated moments of the unit-variance shock:
// v_d = E eps^2 1{eps<=0}, s = E eps^3, s_d = E eps^3 1{eps<=0},
// k = E eps^4, k_d = E eps^4 1{eps<=0}.
struct InnovationMoments {
    double v_d;
    double s;
    double s_d;
    double k;
    double k_d;
};

// Standardized moments of the returns themselves, normalized by powers of E r^2.
struct ReturnMoments {
    double s;
    double s_d;
    double k;
    double k_d;
    double v_d;
};

struct PathConfig {
    std::size_t horizon_steps = 1;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    // Variance of the first return; the stationary level when empty.
    std::optional<double> initial_variance;
    // Steps simulated and discarded before the recorded horizon.
    std::size_t burn_in = 0;
    unsigned threads = 0;
};

// Row-major n_paths x cols.
struct PathMatrix {
    std::size_t n_paths = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double operator()(std::size_t path, std::size_t col) const { return data[path * cols + col]; }
    std::span<const double> row(std::size_t path) const { return {data.data() + path * cols, cols}; }
};

struct Estimate {
    double value;
    double std_error;
};

InnovationMoments innovation_moments(const Innovation& innov);
bool is_symmetric(const Innovation& innov);

double persistence(const TarchParams& p);
double xi(const TarchParams& p);
double unconditional_variance(const TarchParams& p);
double leverage_corr(const TarchParams& p);

PathMatrix simulate_paths(const TarchParams& p, const PathConfig& cfg);
// Cumulative return sum_{u<=c} r_u at each checkpoint c (1-based step counts,
// strictly increasing, last one <= horizon_steps).
PathMatrix simulate_aggregated(const TarchParams& p, const PathConfig& cfg, std::span<const std::size_t> checkpoints);

double cond_variance_agg(const TarchParams& p, double sigma2_next, std::size_t T);
double uncond_skewness_term(const TarchParams& p, std::size_t T, double sigma3_ratio);
// sigma3_forecast[u-1] = E_t sigma_{t+u}^3 for u = 1..T.
double cond_third_moment(const TarchParams& p, std::span<const double> sigma3_forecast, std::size_t T);
double cond_skewness(const TarchParams& p, double sigma2_next, std::span<const double> sigma3_forecast, std::size_t T);
double uncond_kurtosis_1(const TarchParams& p);

// Lag-one autocovariance of r_t^2 normalized by (E r^2)^2, the quantity the
// aggregated-kurtosis formula needs.
double gamma_1(const TarchParams& p, const ReturnMoments& rm);
// Closed form for symmetric shocks with alpha_d = 0; s_d is left NaN.
ReturnMoments garch_return_moments(const TarchParams& p);
// Requires symmetric shocks and alpha_d = 0.
double agg_kurtosis(const TarchParams& p, std::size_t T);

// E (sigma_t / sigma)^3 over the stationary distribution: n_paths independent
// paths, burn_in steps each, then the next `samples_per_path` values of sigma_t
// averaged per path. The standard error is taken across paths.
Estimate stationary_sigma3_ratio(const TarchParams& p, std::size_t n_paths, std::uint64_t seed,
                                 std::size_t burn_in = 10000, std::size_t samples_per_path = 100,
                                 unsigned threads = 0);

// E_t sigma_{t+u}^3, u = 1..T, starting from sigma_{t+1}^2 = sigma2_next.
std::vector<double> cond_sigma3_forecast(const TarchParams& p, double sigma2_next, std::size_t T,
                                         std::size_t n_paths, std::uint64_t seed, unsigned threads = 0);

// r-moments from stationary simulated returns.
ReturnMoments estimate_return_moments(const TarchParams& p, std::size_t n_paths, std::size_t steps_per_path,
                                      std::uint64_t seed, std::size_t burn_in = 10000, unsigned threads = 0);

} // namespace corrsurf::tarch
