#pragma once

#include "corrsurf/tarch.hpp"

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

// Maximum likelihood for GARCH/TARCH(1,1) with Gaussian or unit-variance
// Student-t shocks, plus the data preparation around it.
namespace corrsurf::est {

using Date = std::chrono::sys_days;

enum class Frequency { daily, weekly };

struct PriceSeries {
    std::vector<Date> dates;
    std::vector<double> levels;
};

struct ReturnSeries {
    std::vector<Date> dates;
    std::vector<double> returns;
    Frequency frequency = Frequency::daily;
};

// "YYYY-MM-DD"; throws DomainError otherwise.
Date parse_iso_date(const std::string& s);
std::string format_iso_date(Date d);

// Two columns with a header row: (date, level) or (date, return). The
// second header name decides: "return"/"ret"/"r" mean returns, anything else
// is read as a price level.
struct CsvSeries {
    bool is_returns = false;
    PriceSeries prices;
    ReturnSeries returns;
};
CsvSeries read_series_csv(const std::string& path);

// Daily log returns r_t = ln S_t - ln S_{t-1}. Weekly: daily returns summed
// over calendar weeks ending Friday (weekend days roll into the following
// week), dated at the last trading day in the week.
ReturnSeries prices_to_log_returns(const PriceSeries& prices, Frequency freq);

// Winsorizes at the type-7 empirical quantiles `fraction` and `1 - fraction`.
ReturnSeries trim_extremes(const ReturnSeries& series, double fraction = 0.001);

enum class Volatility { garch, tarch };
enum class Shocks { gaussian, student_t };

struct ModelSpec {
    Volatility volatility = Volatility::tarch;
    Shocks shocks = Shocks::gaussian;
};

std::string model_name(const ModelSpec& m);
// Free parameters in order: omega, alpha, [alpha_d], beta, [nu].
std::vector<std::string> parameter_names(const ModelSpec& m);

// sigma_1^2 is the sample variance of the series; shocks are taken from
// p.innovation. Throws InvalidParamsError for omega <= 0 or negative
// coefficients and DomainError if the recursion leaves (0, inf).
double neg_log_likelihood(const tarch::TarchParams& p, std::span<const double> returns);

struct FitOptions {
    int simplex_iterations = 4000;
    double simplex_size_tol = 1e-7;
    int quasi_newton_iterations = 500;
    double gradient_tol = 1e-6;
};

struct FitResult {
    ModelSpec model;
    tarch::TarchParams params;
    std::vector<std::string> names;
    std::vector<double> values;
    std::vector<double> std_errors; // NaN when the Hessian is not positive definite
    double loglik = 0.0;
    bool converged = false;
    std::size_t n_obs = 0;
};

tarch::TarchParams params_from_vector(const ModelSpec& m, std::span<const double> v);
std::vector<double> params_to_vector(const ModelSpec& m, const tarch::TarchParams& p);

// Requires at least 200 observations.
FitResult fit(std::span<const double> returns, const ModelSpec& model, const FitOptions& opt = {});

// Moments standardized by powers of the raw second moment:
// s = E r^3 / (E r^2)^1.5, s_d = E r^3 1{r<=0} / (E r^2)^1.5,
// k = E r^4 / (E r^2)^2, v_d = E r^2 1{r<=0} / E r^2.
struct SampleMoments {
    double s;
    double s_d;
    double k;
    double v_d;
};
SampleMoments sample_moments(std::span<const double> returns);

// Sample skewness of overlapping sums of `horizon` consecutive returns.
double aggregated_skewness(std::span<const double> returns, std::size_t horizon);

} // namespace corrsurf::est
