#include "corrsurf/estimation.hpp"

#include "corrsurf/errors.hpp"
#include "corrsurf/math/stats.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_linalg.h>
#include <gsl/gsl_matrix.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace corrsurf::est {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kPenalty = 1e300;

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\"");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\"");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s)
{
    for (char& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double parse_double(const std::string& s, std::size_t line)
{
    double v = 0.0;
    const auto t = trim(s);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw DomainError("line " + std::to_string(line) + ": cannot parse number '" + t + "'");
    return v;
}

bool has_student_t(const ModelSpec& m)
{
    return m.shocks == Shocks::student_t;
}

bool has_asym(const ModelSpec& m)
{
    return m.volatility == Volatility::tarch;
}

// Unconstrained coordinates: logs of omega, alpha, alpha_d, beta and log(nu - 2).
std::vector<double> to_theta(const ModelSpec& m, const tarch::TarchParams& p)
{
    std::vector<double> th = params_to_vector(m, p);
    for (std::size_t i = 0; i < th.size(); ++i) {
        const bool nu = has_student_t(m) && i + 1 == th.size();
        th[i] = nu ? std::log(th[i] - 2.0) : std::log(th[i]);
    }
    return th;
}

tarch::TarchParams from_theta(const ModelSpec& m, std::span<const double> th)
{
    std::vector<double> v(th.begin(), th.end());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const bool nu = has_student_t(m) && i + 1 == v.size();
        v[i] = nu ? 2.0 + std::exp(v[i]) : std::exp(v[i]);
    }
    return params_from_vector(m, v);
}

struct Objective {
    const ModelSpec* model;
    std::span<const double> returns;
    double scale;

    double operator()(std::span<const double> th) const
    {
        for (double t : th)
            if (!std::isfinite(t) || std::abs(t) > 50.0)
                return kPenalty;
        try {
            const double v = neg_log_likelihood(from_theta(*model, th), returns) * scale;
            return std::isfinite(v) ? v : kPenalty;
        } catch (const Error&) {
            return kPenalty;
        }
    }
};

double gsl_f(const gsl_vector* x, void* params)
{
    const auto* obj = static_cast<const Objective*>(params);
    return (*obj)(std::span<const double>(x->data, x->size));
}

void gsl_df(const gsl_vector* x, void* params, gsl_vector* g)
{
    const auto* obj = static_cast<const Objective*>(params);
    std::vector<double> th(x->data, x->data + x->size);
    for (std::size_t i = 0; i < th.size(); ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(th[i]));
        const double x0 = th[i];
        th[i] = x0 + h;
        const double fp = (*obj)(th);
        th[i] = x0 - h;
        const double fm = (*obj)(th);
        th[i] = x0;
        gsl_vector_set(g, i, (fp - fm) / (2.0 * h));
    }
}

void gsl_fdf(const gsl_vector* x, void* params, double* f, gsl_vector* g)
{
    *f = gsl_f(x, params);
    gsl_df(x, params, g);
}

// Central-difference Hessian of the negative log-likelihood in natural
// parameters, steps proportional to each coordinate.
std::vector<double> numerical_hessian(const ModelSpec& m, std::span<const double> x, std::span<const double> r)
{
    const std::size_t k = x.size();
    std::vector<double> h(k);
    for (std::size_t i = 0; i < k; ++i)
        h[i] = 1e-3 * std::max(std::abs(x[i]), 1e-8);
    auto f = [&](std::vector<double> v) { return neg_log_likelihood(params_from_vector(m, v), r); };
    std::vector<double> H(k * k);
    const std::vector<double> x0(x.begin(), x.end());
    const double f0 = f(x0);
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> xp = x0, xm = x0;
        xp[i] += h[i];
        xm[i] -= h[i];
        H[i * k + i] = (f(xp) - 2.0 * f0 + f(xm)) / (h[i] * h[i]);
        for (std::size_t j = 0; j < i; ++j) {
            std::vector<double> a = x0, b = x0, c = x0, d = x0;
            a[i] += h[i], a[j] += h[j];
            b[i] += h[i], b[j] -= h[j];
            c[i] -= h[i], c[j] += h[j];
            d[i] -= h[i], d[j] -= h[j];
            const double v = (f(a) - f(b) - f(c) + f(d)) / (4.0 * h[i] * h[j]);
            H[i * k + j] = v;
            H[j * k + i] = v;
        }
    }
    return H;
}

std::vector<double> inverse_diagonal(std::vector<double> H, std::size_t k)
{
    std::vector<double> out(k, std::numeric_limits<double>::quiet_NaN());
    gsl_matrix_view mv = gsl_matrix_view_array(H.data(), k, k);
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    const int status = gsl_linalg_cholesky_decomp1(&mv.matrix);
    if (status == GSL_SUCCESS && gsl_linalg_cholesky_invert(&mv.matrix) == GSL_SUCCESS) {
        for (std::size_t i = 0; i < k; ++i) {
            const double v = gsl_matrix_get(&mv.matrix, i, i);
            if (v > 0.0)
                out[i] = std::sqrt(v);
        }
    }
    gsl_set_error_handler(old);
    return out;
}

} // namespace

Date parse_iso_date(const std::string& s)
{
    const std::string t = trim(s);
    int y = 0;
    unsigned mo = 0, d = 0;
    char tail = 0;
    if (t.size() != 10 || std::sscanf(t.c_str(), "%4d-%2u-%2u%c", &y, &mo, &d, &tail) != 3)
        throw DomainError("not an ISO date (YYYY-MM-DD): '" + t + "'");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo}, std::chrono::day{d}};
    if (!ymd.ok())
        throw DomainError("invalid calendar date: '" + t + "'");
    return Date{ymd};
}

std::string format_iso_date(Date d)
{
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

CsvSeries read_series_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw DomainError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw DomainError(path + ": empty file");
    const auto comma = line.find(',');
    if (comma == std::string::npos)
        throw DomainError(path + ": header must have two columns");
    const std::string col = lower(trim(line.substr(comma + 1)));
    CsvSeries out;
    out.is_returns = col == "return" || col == "returns" || col == "ret" || col == "r" || col == "log_return";
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty())
            continue;
        const auto c = line.find(',');
        if (c == std::string::npos)
            throw DomainError(path + ": line " + std::to_string(n) + " has one column");
        const Date d = parse_iso_date(line.substr(0, c));
        const double v = parse_double(line.substr(c + 1), n);
        if (out.is_returns) {
            out.returns.dates.push_back(d);
            out.returns.returns.push_back(v);
        } else {
            out.prices.dates.push_back(d);
            out.prices.levels.push_back(v);
        }
    }
    const auto& dates = out.is_returns ? out.returns.dates : out.prices.dates;
    for (std::size_t i = 1; i < dates.size(); ++i)
        if (!(dates[i] > dates[i - 1]))
            throw DomainError(path + ": dates must be strictly increasing");
    return out;
}

ReturnSeries prices_to_log_returns(const PriceSeries& prices, Frequency freq)
{
    const auto& S = prices.levels;
    if (S.size() < 2)
        throw DomainError("need at least two price observations");
    if (prices.dates.size() != S.size())
        throw LengthMismatchError("dates and levels differ in length");
    for (double s : S)
        if (!(s > 0.0) || !std::isfinite(s))
            throw DomainError("price levels must be positive and finite");
    for (std::size_t i = 1; i < prices.dates.size(); ++i)
        if (!(prices.dates[i] > prices.dates[i - 1]))
            throw DomainError("dates must be strictly increasing");

    ReturnSeries daily;
    daily.frequency = Frequency::daily;
    for (std::size_t i = 1; i < S.size(); ++i) {
        daily.dates.push_back(prices.dates[i]);
        daily.returns.push_back(std::log(S[i]) - std::log(S[i - 1]));
    }
    if (freq == Frequency::daily)
        return daily;

    ReturnSeries weekly;
    weekly.frequency = Frequency::weekly;
    Date current_key{};
    for (std::size_t i = 0; i < daily.returns.size(); ++i) {
        const Date d = daily.dates[i];
        const unsigned wd = std::chrono::weekday{d}.c_encoding(); // 0 = Sunday
        const Date key = d + std::chrono::days{(5 + 7 - static_cast<int>(wd)) % 7};
        if (weekly.returns.empty() || key != current_key) {
            current_key = key;
            weekly.returns.push_back(0.0);
            weekly.dates.push_back(d);
        }
        weekly.returns.back() += daily.returns[i];
        weekly.dates.back() = d;
    }
    return weekly;
}

ReturnSeries trim_extremes(const ReturnSeries& series, double fraction)
{
    if (!(fraction > 0.0 && fraction < 0.05))
        throw DomainError("trim fraction must lie in (0, 0.05)");
    if (series.returns.empty())
        return series;
    std::vector<double> sorted = series.returns;
    std::sort(sorted.begin(), sorted.end());
    const double lo = math::quantile_sorted(sorted, fraction);
    const double hi = math::quantile_sorted(sorted, 1.0 - fraction);
    ReturnSeries out = series;
    for (double& r : out.returns)
        r = std::clamp(r, lo, hi);
    return out;
}

std::string model_name(const ModelSpec& m)
{
    std::string s = m.volatility == Volatility::tarch ? "TARCH" : "GARCH";
    s += m.shocks == Shocks::student_t ? "-t" : "-Gaussian";
    return s;
}

std::vector<std::string> parameter_names(const ModelSpec& m)
{
    std::vector<std::string> n{"omega", "alpha"};
    if (has_asym(m))
        n.push_back("alpha_d");
    n.push_back("beta");
    if (has_student_t(m))
        n.push_back("nu");
    return n;
}

tarch::TarchParams params_from_vector(const ModelSpec& m, std::span<const double> v)
{
    if (v.size() != parameter_names(m).size())
        throw LengthMismatchError("parameter vector has the wrong length for " + model_name(m));
    tarch::TarchParams p;
    std::size_t i = 0;
    p.omega = v[i++];
    p.alpha = v[i++];
    p.alpha_d = has_asym(m) ? v[i++] : 0.0;
    p.beta = v[i++];
    if (has_student_t(m))
        p.innovation = tarch::StudentTShocks{v[i++]};
    else
        p.innovation = tarch::GaussianShocks{};
    return p;
}

std::vector<double> params_to_vector(const ModelSpec& m, const tarch::TarchParams& p)
{
    std::vector<double> v{p.omega, p.alpha};
    if (has_asym(m))
        v.push_back(p.alpha_d);
    v.push_back(p.beta);
    if (has_student_t(m)) {
        const auto* t = std::get_if<tarch::StudentTShocks>(&p.innovation);
        v.push_back(t ? t->nu : 8.0);
    }
    return v;
}

double neg_log_likelihood(const tarch::TarchParams& p, std::span<const double> r)
{
    if (!(p.omega > 0.0) || !(p.alpha >= 0.0) || !(p.alpha_d >= 0.0) || !(p.beta >= 0.0))
        throw InvalidParamsError("likelihood needs omega > 0 and alpha, alpha_d, beta >= 0");
    if (r.size() < 2)
        throw DomainError("likelihood needs at least two returns");
    const auto* t = std::get_if<tarch::StudentTShocks>(&p.innovation);
    if (t && !(t->nu > 2.0))
        throw InvalidParamsError("Student-t shocks need nu > 2");

    double c_t = 0.0, nu = 0.0;
    if (t) {
        nu = t->nu;
        c_t = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(M_PI * (nu - 2.0));
    }
    double s2 = math::sample_variance(r);
    double nll = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i > 0) {
            const double rp = r[i - 1];
            const double a = p.alpha + (rp <= 0.0 ? p.alpha_d : 0.0);
            s2 = p.omega + a * (rp * rp) + p.beta * s2;
        }
        if (!(s2 > 0.0) || !std::isfinite(s2))
            throw DomainError("conditional variance left (0, inf)");
        const double z2 = r[i] * r[i] / s2;
        if (t)
            nll -= c_t - 0.5 * std::log(s2) - 0.5 * (nu + 1.0) * std::log1p(z2 / (nu - 2.0));
        else
            nll += 0.5 * (kLog2Pi + std::log(s2) + z2);
    }
    return nll;
}

FitResult fit(std::span<const double> returns, const ModelSpec& model, const FitOptions& opt)
{
    if (returns.size() < 200)
        throw DomainError("fit needs at least 200 observations");
    for (double r : returns)
        if (!std::isfinite(r))
            throw DomainError("returns must be finite");
    const double var = math::sample_variance(returns);
    if (!(var > 0.0))
        throw DegenerateError("returns have zero variance");

    tarch::TarchParams start;
    start.alpha = has_asym(model) ? 0.03 : 0.08;
    start.alpha_d = has_asym(model) ? 0.08 : 0.0;
    start.beta = 0.88;
    start.omega = var * 0.05;
    if (has_student_t(model))
        start.innovation = tarch::StudentTShocks{8.0};

    Objective obj{&model, returns, 1.0 / static_cast<double>(returns.size())};
    std::vector<double> th = to_theta(model, start);
    const std::size_t k = th.size();

    gsl_error_handler_t* old = gsl_set_error_handler_off();

    // Stage 1: simplex.
    bool simplex_ok = false;
    {
        gsl_multimin_function fn{&gsl_f, k, &obj};
        gsl_vector* x = gsl_vector_alloc(k);
        gsl_vector* step = gsl_vector_alloc(k);
        for (std::size_t i = 0; i < k; ++i) {
            gsl_vector_set(x, i, th[i]);
            gsl_vector_set(step, i, 0.5);
        }
        gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, k);
        gsl_multimin_fminimizer_set(s, &fn, x, step);
        for (int it = 0; it < opt.simplex_iterations; ++it) {
            if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS)
                break;
            if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), opt.simplex_size_tol) == GSL_SUCCESS) {
                simplex_ok = true;
                break;
            }
        }
        for (std::size_t i = 0; i < k; ++i)
            th[i] = gsl_vector_get(s->x, i);
        gsl_multimin_fminimizer_free(s);
        gsl_vector_free(step);
        gsl_vector_free(x);
    }

    // Stage 2: quasi-Newton polish from the simplex optimum.
    bool qn_ok = false;
    {
        gsl_multimin_function_fdf fdf{&gsl_f, &gsl_df, &gsl_fdf, k, &obj};
        gsl_vector* x = gsl_vector_alloc(k);
        for (std::size_t i = 0; i < k; ++i)
            gsl_vector_set(x, i, th[i]);
        gsl_multimin_fdfminimizer* s = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, k);
        gsl_multimin_fdfminimizer_set(s, &fdf, x, 0.01, 0.1);
        const double f_start = obj(th);
        for (int it = 0; it < opt.quasi_newton_iterations; ++it) {
            const int status = gsl_multimin_fdfminimizer_iterate(s);
            if (gsl_multimin_test_gradient(s->gradient, opt.gradient_tol) == GSL_SUCCESS) {
                qn_ok = true;
                break;
            }
            if (status != GSL_SUCCESS)
                break;
        }
        if (s->f <= f_start) {
            for (std::size_t i = 0; i < k; ++i)
                th[i] = gsl_vector_get(s->x, i);
        }
        // A stalled line search right at the optimum still counts.
        if (!qn_ok && gsl_multimin_test_gradient(s->gradient, 100.0 * opt.gradient_tol) == GSL_SUCCESS)
            qn_ok = true;
        gsl_multimin_fdfminimizer_free(s);
        gsl_vector_free(x);
    }
    gsl_set_error_handler(old);

    FitResult res;
    res.model = model;
    res.params = from_theta(model, th);
    res.names = parameter_names(model);
    res.values = params_to_vector(model, res.params);
    res.n_obs = returns.size();
    res.loglik = -neg_log_likelihood(res.params, returns);
    res.converged = (simplex_ok || qn_ok) && std::isfinite(res.loglik);
    try {
        res.std_errors = inverse_diagonal(numerical_hessian(model, res.values, returns), k);
    } catch (const Error&) {
        res.std_errors.assign(k, std::numeric_limits<double>::quiet_NaN());
    }
    return res;
}

SampleMoments sample_moments(std::span<const double> r)
{
    if (r.size() < 2)
        throw DomainError("sample moments need at least two observations");
    double m2 = 0, m3 = 0, m3d = 0, m4 = 0, m2d = 0;
    for (double x : r) {
        const double x2 = x * x;
        m2 += x2;
        m3 += x2 * x;
        m4 += x2 * x2;
        if (x <= 0.0) {
            m2d += x2;
            m3d += x2 * x;
        }
    }
    if (!(m2 > 0.0))
        throw DegenerateError("sample moments: zero second moment");
    const double n = static_cast<double>(r.size());
    m2 /= n;
    const double s15 = std::pow(m2, 1.5);
    return {m3 / n / s15, m3d / n / s15, m4 / n / (m2 * m2), m2d / n / m2};
}

double aggregated_skewness(std::span<const double> r, std::size_t horizon)
{
    if (horizon == 0 || horizon >= r.size())
        throw DomainError("aggregation horizon must lie in [1, n)");
    std::vector<double> agg;
    agg.reserve(r.size() - horizon + 1);
    double s = 0.0;
    for (std::size_t i = 0; i < horizon; ++i)
        s += r[i];
    agg.push_back(s);
    for (std::size_t i = horizon; i < r.size(); ++i) {
        s += r[i] - r[i - horizon];
        agg.push_back(s);
    }
    const double m = math::sample_mean(agg);
    double c2 = 0, c3 = 0;
    for (double v : agg) {
        c2 += (v - m) * (v - m);
        c3 += (v - m) * (v - m) * (v - m);
    }
    const double n = static_cast<double>(agg.size());
    if (!(c2 > 0.0))
        throw DegenerateError("aggregated returns have zero variance");
    return (c3 / n) / std::pow(c2 / n, 1.5);
}

} // namespace corrsurf::est
