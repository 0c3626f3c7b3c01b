#include <doctest.h>

#include "corrsurf/errors.hpp"
#include "corrsurf/estimation.hpp"
#include "corrsurf/math/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

using namespace corrsurf;
using namespace corrsurf::est;

namespace {

std::vector<double> simulate(const tarch::TarchParams& p, std::size_t n, std::uint64_t seed)
{
    tarch::PathConfig cfg;
    cfg.horizon_steps = n;
    cfg.n_paths = 1;
    cfg.seed = seed;
    cfg.burn_in = 500;
    cfg.threads = 1;
    return tarch::simulate_paths(p, cfg).data;
}

std::filesystem::path temp_file(const char* name, const std::string& body)
{
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << body;
    return path;
}

} // namespace

TEST_CASE("likelihood of a constant-variance model")
{
    // omega = var, alpha = beta = 0 and unit returns: every term is ln(2 pi)/2 + 1/2.
    std::vector<double> r(50);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = i % 2 ? 1.0 : -1.0;
    const double var = math::sample_variance(r);
    tarch::TarchParams p;
    p.omega = var;
    const double expect = 50 * 0.5 * (std::log(2 * std::numbers::pi) + std::log(var) + 1.0 / var);
    CHECK(neg_log_likelihood(p, r) == doctest::Approx(expect).epsilon(1e-14));

    // Large nu approaches the Gaussian value.
    p.innovation = tarch::StudentTShocks{1e7};
    CHECK(neg_log_likelihood(p, r) == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("likelihood argument checks")
{
    const std::vector<double> r = {0.1, -0.2, 0.05};
    tarch::TarchParams p = tarch::TarchParams::unit_variance(0.05, 0.1, 0.8);
    CHECK_NOTHROW(neg_log_likelihood(p, r));
    p.omega = 0.0;
    CHECK_THROWS_AS(neg_log_likelihood(p, r), InvalidParamsError);
    p = tarch::TarchParams::unit_variance(0.05, 0.1, 0.8);
    p.alpha = -0.01;
    CHECK_THROWS_AS(neg_log_likelihood(p, r), InvalidParamsError);
    p = tarch::TarchParams::unit_variance(0.05, 0.1, 0.8);
    p.innovation = tarch::StudentTShocks{2.0};
    CHECK_THROWS_AS(neg_log_likelihood(p, r), InvalidParamsError);
}

TEST_CASE("simulated TARCH-t parameters are recovered")
{
    const auto truth = tarch::TarchParams::unit_variance(0.05, 0.10, 0.85, tarch::StudentTShocks{8.0});
    const auto r = simulate(truth, 5000, 11);
    const ModelSpec m{Volatility::tarch, Shocks::student_t};
    const FitResult f = fit(r, m);
    REQUIRE(f.converged);
    const auto tv = params_to_vector(m, truth);
    REQUIRE(f.values.size() == tv.size());
    for (std::size_t i = 0; i < tv.size(); ++i) {
        INFO(f.names[i], " = ", f.values[i], " +/- ", f.std_errors[i], " truth ", tv[i]);
        REQUIRE(std::isfinite(f.std_errors[i]));
        CHECK(std::abs(f.values[i] - tv[i]) <= 3.0 * f.std_errors[i]);
    }
    // The optimum beats the truth.
    CHECK(f.loglik >= -neg_log_likelihood(truth, r));

    // Gradient of the likelihood vanishes at the optimum (in natural units).
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        auto v = f.values;
        const double h = 1e-5 * v[i];
        v[i] += h;
        const double fp = neg_log_likelihood(params_from_vector(m, v), r);
        v[i] -= 2 * h;
        const double fm = neg_log_likelihood(params_from_vector(m, v), r);
        CHECK(std::abs((fp - fm) / (2 * h)) * std::abs(f.values[i]) < 0.05);
    }
}

TEST_CASE("nested models")
{
    const auto truth = tarch::TarchParams::unit_variance(0.05, 0.10, 0.85, tarch::StudentTShocks{8.0});
    const auto r = simulate(truth, 3000, 5);
    const FitResult g = fit(r, {Volatility::garch, Shocks::gaussian});
    const FitResult tg = fit(r, {Volatility::tarch, Shocks::gaussian});
    const FitResult gt = fit(r, {Volatility::garch, Shocks::student_t});
    const FitResult tt = fit(r, {Volatility::tarch, Shocks::student_t});
    CHECK(g.values.size() == 3);
    CHECK(tt.values.size() == 5);
    CHECK(tg.names[2] == "alpha_d");
    CHECK(gt.names.back() == "nu");
    // A larger model never fits worse.
    CHECK(tg.loglik >= g.loglik - 1e-6);
    CHECK(gt.loglik >= g.loglik - 1e-6);
    CHECK(tt.loglik >= tg.loglik - 1e-6);
    CHECK(tt.loglik >= gt.loglik - 1e-6);
    CHECK(model_name(tt.model) == "TARCH-t");
    CHECK_THROWS_AS(fit(std::span<const double>(r).first(100), {}), DomainError);
}

TEST_CASE("parameter vectors")
{
    const ModelSpec m{Volatility::tarch, Shocks::student_t};
    const std::vector<double> v = {0.01, 0.05, 0.1, 0.85, 7.0};
    CHECK(params_to_vector(m, params_from_vector(m, v)) == v);
    CHECK_THROWS_AS(params_from_vector(m, std::vector<double>{1, 2, 3}), LengthMismatchError);
    const auto g = params_from_vector({Volatility::garch, Shocks::gaussian}, std::vector<double>{0.01, 0.05, 0.9});
    CHECK(g.alpha_d == 0.0);
}

TEST_CASE("log returns and weekly aggregation")
{
    PriceSeries ps;
    ps.dates = {parse_iso_date("2004-01-01"), parse_iso_date("2004-01-02")};
    ps.levels = {100.0, 110.0};
    const auto d = prices_to_log_returns(ps, Frequency::daily);
    REQUIRE(d.returns.size() == 1);
    CHECK(d.returns[0] == std::log(110.0) - std::log(100.0));
    CHECK(std::abs(d.returns[0] - std::log(1.1)) < 1e-15);

    // Thu 2004-01-08 .. Tue 2004-01-20, with a Saturday observation.
    PriceSeries w;
    for (const char* s : {"2004-01-08", "2004-01-09", "2004-01-12", "2004-01-16", "2004-01-17", "2004-01-19",
                          "2004-01-20"})
        w.dates.push_back(parse_iso_date(s));
    w.levels = {100, 101, 99, 102, 103, 104, 100};
    const auto wk = prices_to_log_returns(w, Frequency::weekly);
    REQUIRE(wk.returns.size() == 3);
    CHECK(format_iso_date(wk.dates[0]) == "2004-01-09");
    CHECK(format_iso_date(wk.dates[1]) == "2004-01-16");
    CHECK(format_iso_date(wk.dates[2]) == "2004-01-20");
    CHECK(wk.returns[0] == doctest::Approx(std::log(101.0 / 100.0)).epsilon(1e-14));
    CHECK(wk.returns[1] == doctest::Approx(std::log(102.0 / 101.0)).epsilon(1e-14));
    CHECK(wk.returns[2] == doctest::Approx(std::log(100.0 / 102.0)).epsilon(1e-14));

    ps.levels[1] = -1.0;
    CHECK_THROWS_AS(prices_to_log_returns(ps, Frequency::daily), DomainError);
}

TEST_CASE("winsorizing")
{
    ReturnSeries s;
    for (int i = 0; i < 1001; ++i)
        s.returns.push_back(static_cast<double>(i));
    s.returns[0] = -1e6;
    s.returns[1000] = 1e6;
    const auto t = trim_extremes(s, 0.001);
    std::vector<double> sorted = s.returns;
    std::sort(sorted.begin(), sorted.end());
    CHECK(t.returns[0] == math::quantile_sorted(sorted, 0.001));
    CHECK(t.returns[1000] == math::quantile_sorted(sorted, 0.999));
    CHECK(t.returns[500] == 500.0);
    CHECK(t.returns.size() == s.returns.size());
    CHECK_THROWS_AS(trim_extremes(s, 0.0), DomainError);
}

TEST_CASE("csv input")
{
    const auto prices = temp_file("corrsurf_prices.csv", "date,level\n2004-01-02,100\n2004-01-05,101.5\n");
    const CsvSeries a = read_series_csv(prices.string());
    CHECK_FALSE(a.is_returns);
    CHECK(a.prices.levels == std::vector<double>{100.0, 101.5});

    const auto rets = temp_file("corrsurf_returns.csv", "date,return\n2004-01-02,0.01\n2004-01-05,-0.02\n");
    const CsvSeries b = read_series_csv(rets.string());
    CHECK(b.is_returns);
    CHECK(b.returns.returns == std::vector<double>{0.01, -0.02});

    const auto bad = temp_file("corrsurf_bad.csv", "date,level\n2004-01-05,100\n2004-01-02,101\n");
    CHECK_THROWS_AS(read_series_csv(bad.string()), DomainError);
    const auto junk = temp_file("corrsurf_junk.csv", "date,level\n2004-13-05,100\n");
    CHECK_THROWS_AS(read_series_csv(junk.string()), DomainError);
    CHECK_THROWS_AS(read_series_csv("/nonexistent/file.csv"), DomainError);
}

TEST_CASE("sample moments")
{
    const std::vector<double> r = {1.0, -1.0, 2.0, -2.0};
    const auto m = sample_moments(r);
    CHECK(m.s == doctest::Approx(0.0));
    CHECK(m.v_d == doctest::Approx(0.5));
    CHECK(m.k == doctest::Approx((1 + 1 + 16 + 16) / 4.0 / (2.5 * 2.5)));
    CHECK(m.s_d == doctest::Approx(-(1 + 8) / 4.0 / std::pow(2.5, 1.5)));

    const std::vector<double> x = {0.0, 1.0, 0.0, 0.0, 5.0, 0.0};
    // Sums: 1, 1, 0, 5, 5.
    const double mean = 12.0 / 5.0;
    double c2 = 0, c3 = 0;
    for (double v : {1.0, 1.0, 0.0, 5.0, 5.0}) {
        c2 += (v - mean) * (v - mean) / 5.0;
        c3 += std::pow(v - mean, 3) / 5.0;
    }
    CHECK(aggregated_skewness(x, 2) == doctest::Approx(c3 / std::pow(c2, 1.5)).epsilon(1e-13));
    CHECK_THROWS_AS(aggregated_skewness(x, 6), DomainError);

    // Aggregated TARCH returns become more negatively skewed.
    const auto tr = simulate(tarch::TarchParams::unit_variance(0.02, 0.12, 0.88), 200000, 3);
    CHECK(aggregated_skewness(tr, 20) < aggregated_skewness(tr, 1) - 0.1);
}
