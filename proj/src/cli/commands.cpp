#include "corrsurf/cli/commands.hpp"

#include "corrsurf/errors.hpp"
#include "corrsurf/estimation.hpp"
#include "corrsurf/factor_mc.hpp"
#include "corrsurf/report/csv.hpp"
#include "corrsurf/rng.hpp"
#include "corrsurf/surface.hpp"
#include "corrsurf/tarch.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace corrsurf::cli {

namespace {

std::string number_check(std::string& s, double lo, double hi, bool lo_open, bool hi_open, const char* what)
{
    double v = 0.0;
    try {
        std::size_t pos = 0;
        v = std::stod(s, &pos);
        if (pos != s.size())
            return "'" + s + "' is not a number";
    } catch (const std::exception&) {
        return "'" + s + "' is not a number";
    }
    const bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi) && std::isfinite(v);
    return ok ? std::string() : std::string("must lie in ") + what;
}

const CLI::Validator kOpenUnit([](std::string& s) { return number_check(s, 0, 1, true, true, "(0, 1)"); },
                               "(0, 1)");
const CLI::Validator kRecovery([](std::string& s) { return number_check(s, 0, 1, false, true, "[0, 1)"); },
                               "[0, 1)");
const CLI::Validator kNonNeg([](std::string& s) { return number_check(s, 0, HUGE_VAL, false, true, ">= 0"); },
                             ">= 0");
const CLI::Validator kPositive([](std::string& s) { return number_check(s, 0, HUGE_VAL, true, true, "> 0"); },
                               "> 0");
const CLI::Validator kNu([](std::string& s) {
    std::string t = s;
    if (number_check(t, 0, 0, false, false, "").empty())
        return std::string();
    return number_check(s, 2, HUGE_VAL, true, true, "{0} or (2, inf)");
}, "0 (Gaussian) or > 2");

struct TarchOpts {
    double alpha = 0.01;
    double alpha_d = 0.10;
    double beta = 0.92;
    double shock_nu = 0.0; // 0 means Gaussian shocks

    void add(CLI::App* app)
    {
        app->add_option("--alpha", alpha, "ARCH coefficient")->capture_default_str()->check(kNonNeg);
        app->add_option("--alpha-d", alpha_d, "asymmetric ARCH coefficient on negative returns")
            ->capture_default_str()
            ->check(kNonNeg);
        app->add_option("--beta", beta, "GARCH coefficient")->capture_default_str()->check(kNonNeg);
        app->add_option("--shock-nu", shock_nu, "Student-t shock degrees of freedom, 0 for Gaussian")
            ->capture_default_str()
            ->check(kNu);
    }

    tarch::TarchParams params() const
    {
        tarch::Innovation innov = tarch::GaussianShocks{};
        if (shock_nu > 0.0)
            innov = tarch::StudentTShocks{shock_nu};
        return tarch::TarchParams::unit_variance(alpha, alpha_d, beta, innov);
    }
};

struct ModelOpts {
    std::string model = "tarch";
    double rho = 0.3;
    TarchOpts tarch;
    double nu = 12.0;
    std::string idio = "gaussian";
    double idio_nu = 12.0;
    double recovery = 0.4;
    std::size_t steps_per_year = 52;
    CLI::Option* alpha_d_opt = nullptr;

    void add(CLI::App* app)
    {
        app->add_option("--model", model, "factor model")
            ->capture_default_str()
            ->check(CLI::IsMember({"gaussian", "tarch", "garch", "tmix", "doublet"}));
        app->add_option("--rho", rho, "factor loading squared")->capture_default_str()->check(kOpenUnit);
        tarch.add(app);
        alpha_d_opt = app->get_option("--alpha-d");
        app->add_option("--nu", nu, "degrees of freedom of the mixing variable (tmix) or market factor (doublet)")
            ->capture_default_str()
            ->check(kPositive);
        app->add_option("--idio", idio, "idiosyncratic law")
            ->capture_default_str()
            ->check(CLI::IsMember({"gaussian", "t"}));
        app->add_option("--idio-nu", idio_nu, "idiosyncratic Student-t degrees of freedom")
            ->capture_default_str()
            ->check(kPositive);
        app->add_option("--recovery", recovery, "recovery rate")->capture_default_str()->check(kRecovery);
        app->add_option("--steps-per-year", steps_per_year, "factor simulation steps per year")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
    }

    factor::FactorModelSpec spec() const
    {
        factor::FactorModel f = factor::GaussianStatic{};
        if (model == "tarch") {
            f = factor::TarchFactor{tarch.params()};
        } else if (model == "garch") {
            if (alpha_d_opt->count() > 0 && tarch.alpha_d != 0.0)
                throw ConfigError("alpha-d", "must be 0 for the garch model");
            TarchOpts g = tarch;
            g.alpha_d = 0.0;
            f = factor::TarchFactor{g.params()};
        } else if (model == "tmix") {
            if (!(nu > 2.0))
                throw ConfigError("nu", "must exceed 2");
            f = factor::StudentTMixing{nu};
        } else if (model == "doublet") {
            if (!(nu > 2.0))
                throw ConfigError("nu", "must exceed 2");
            f = factor::DoubleT{nu};
        }
        factor::Idiosyncratic id = factor::GaussianIdio{};
        if (idio == "t") {
            if (!(idio_nu > 2.0))
                throw ConfigError("idio-nu", "must exceed 2");
            id = factor::StudentTIdio{idio_nu};
        }
        auto s = factor::FactorModelSpec::with_rho(f, rho, id, recovery);
        s.steps_per_year = steps_per_year;
        return s;
    }
};

struct McOpts {
    std::size_t paths;
    std::uint64_t seed = 0;
    unsigned threads = 0;

    explicit McOpts(std::size_t default_paths) : paths(default_paths) {}

    void add(CLI::App* app)
    {
        app->add_option("--paths", paths, "Monte Carlo paths")->capture_default_str()->check(CLI::PositiveNumber);
        app->add_option("--seed", seed, "random seed")->required();
        app->add_option("--threads", threads, "worker threads, 0 for all cores")->capture_default_str();
    }

    factor::McConfig config() const
    {
        factor::McConfig c;
        c.n_paths = paths;
        c.seed = seed;
        c.threads = threads;
        return c;
    }
};

gauss::Compounding compounding(const std::string& s)
{
    return s == "discrete" ? gauss::Compounding::discrete : gauss::Compounding::continuous;
}

void add_out(CLI::App* app, std::string& out)
{
    app->add_option("--out", out, "output CSV path, - for stdout")->capture_default_str();
}

void emit(const std::string& path, const std::string& body, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << body;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError("out", "cannot open '" + path + "' for writing");
    f << body;
    if (!f)
        throw ConfigError("out", "write to '" + path + "' failed");
}

void require_grid(const std::string& key, const std::vector<double>& g, double lo, double hi, bool strict)
{
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(g[i] > lo && g[i] <= hi))
            throw ConfigError(key, "value " + report::format_number(g[i]) + " outside (" + report::format_number(lo) +
                                       ", " + report::format_number(hi) + "]");
        if (strict && i > 0 && !(g[i] > g[i - 1]))
            throw ConfigError(key, "values must be strictly increasing");
    }
}

} // namespace

std::vector<double> parse_grid(const std::string& key, const std::string& text)
{
    auto num = [&](const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos == s.size() && std::isfinite(v))
                return v;
        } catch (const std::exception&) {
        }
        throw ConfigError(key, "cannot parse '" + s + "' as a number");
    };
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');)
            parts.push_back(p);
        if (parts.size() != 3)
            throw ConfigError(key, "range must read start:stop:step");
        const double a = num(parts[0]), b = num(parts[1]), h = num(parts[2]);
        if (!(h > 0.0) || b < a)
            throw ConfigError(key, "range needs step > 0 and stop >= start");
        const auto n = static_cast<std::size_t>(std::floor((b - a) / h + 1e-9));
        if (n > 100000)
            throw ConfigError(key, "range has too many points");
        for (std::size_t i = 0; i <= n; ++i)
            out.push_back(a + h * static_cast<double>(i));
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');)
        out.push_back(num(p));
    if (out.empty())
        throw ConfigError(key, "empty grid");
    return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Correlation skew from GARCH/TARCH factor models"};
    app.set_config("--config", "", "INI file with one [section] per subcommand; flags override it")
        ->check(CLI::ExistingFile);
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    std::string out_path = "-";

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate TARCH return paths");
    TarchOpts sim_p;
    McOpts sim_mc(10);
    std::size_t sim_steps = 520, sim_burn = 0;
    sim_p.add(sim);
    sim_mc.add(sim);
    sim->add_option("--steps", sim_steps, "steps per path")->capture_default_str()->check(CLI::PositiveNumber);
    sim->add_option("--burn-in", sim_burn, "discarded steps before recording")->capture_default_str();
    add_out(sim, out_path);

    // fit
    auto* fit = app.add_subcommand("fit", "maximum likelihood fit of GARCH/TARCH models");
    std::string fit_input, fit_freq = "weekly", fit_vol = "all", fit_shocks = "all";
    double fit_trim = 0.0;
    fit->add_option("--input", fit_input, "CSV with date,level or date,return columns")->required();
    fit->add_option("--frequency", fit_freq, "return frequency built from price levels")
        ->capture_default_str()
        ->check(CLI::IsMember({"daily", "weekly"}));
    fit->add_option("--trim", fit_trim, "winsorizing fraction per tail, 0 to disable")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 0.049));
    fit->add_option("--volatility", fit_vol, "volatility model")
        ->capture_default_str()
        ->check(CLI::IsMember({"garch", "tarch", "all"}));
    fit->add_option("--shocks", fit_shocks, "shock distribution")
        ->capture_default_str()
        ->check(CLI::IsMember({"gaussian", "t", "all"}));
    add_out(fit, out_path);

    // moments
    auto* mom = app.add_subcommand("moments", "term structure of aggregated variance, skewness and kurtosis");
    TarchOpts mom_p;
    McOpts mom_mc(10000);
    std::size_t mom_max = 520, mom_stride = 1;
    double mom_low = 0.5, mom_high = 2.0;
    mom_p.add(mom);
    mom_mc.add(mom);
    mom->add_option("--max-steps", mom_max, "longest aggregation horizon")->capture_default_str()->check(
        CLI::PositiveNumber);
    mom->add_option("--stride", mom_stride, "horizon spacing")->capture_default_str()->check(CLI::PositiveNumber);
    mom->add_option("--low-ratio", mom_low, "sigma^2_{t+1} / sigma^2 for the low conditional curve")
        ->capture_default_str()
        ->check(kPositive);
    mom->add_option("--high-ratio", mom_high, "sigma^2_{t+1} / sigma^2 for the high conditional curve")
        ->capture_default_str()
        ->check(kPositive);
    add_out(mom, out_path);

    // defaultcorr
    auto* dc = app.add_subcommand("defaultcorr", "default correlation against default probability");
    ModelOpts dc_m;
    McOpts dc_mc(10000);
    std::string dc_grid = "0.01,0.02,0.05,0.1";
    double dc_horizon = 5.0;
    std::size_t dc_reps = 200;
    dc_m.add(dc);
    dc_mc.add(dc);
    dc->add_option("--p-grid", dc_grid, "default probabilities")->capture_default_str();
    dc->add_option("--horizon", dc_horizon, "aggregation horizon in years")->capture_default_str()->check(kPositive);
    dc->add_option("--reps", dc_reps, "repetitions for the percentile bounds")
        ->capture_default_str()
        ->check(CLI::Range(2, 100000));
    add_out(dc, out_path);

    // surface
    auto* sf = app.add_subcommand("surface", "Gaussian implied correlation surface of a factor model");
    ModelOpts sf_m;
    McOpts sf_mc(100000);
    std::string sf_k = "0.01:0.30:0.01", sf_t = "1,3,5,7,10", sf_conv = "continuous";
    double sf_h = 0.02;
    sf_m.add(sf);
    sf_mc.add(sf);
    sf->add_option("--k-grid", sf_k, "detachment points")->capture_default_str();
    sf->add_option("--t-grid", sf_t, "maturities in years")->capture_default_str();
    sf->add_option("--hazard", sf_h, "hazard rate")->capture_default_str()->check(kOpenUnit);
    sf->add_option("--compounding", sf_conv, "hazard convention")
        ->capture_default_str()
        ->check(CLI::IsMember({"continuous", "discrete"}));
    add_out(sf, out_path);

    // deltas
    auto* dl = app.add_subcommand("deltas", "hazard-rate delta adjustment along K");
    ModelOpts dl_m;
    McOpts dl_mc(100000);
    std::string dl_k = "0.03:0.10:0.01", dl_conv = "continuous";
    double dl_t = 5.0, dl_h = 0.01, dl_bump = 0.0025;
    dl_m.add(dl);
    dl_mc.add(dl);
    dl->add_option("--k-grid", dl_k, "detachment points")->capture_default_str();
    dl->add_option("--maturity", dl_t, "maturity in years")->capture_default_str()->check(kPositive);
    dl->add_option("--hazard", dl_h, "hazard rate")->capture_default_str()->check(kOpenUnit);
    dl->add_option("--bump", dl_bump, "hazard bump for the finite difference")->capture_default_str()->check(kOpenUnit);
    dl->add_option("--compounding", dl_conv, "hazard convention")
        ->capture_default_str()
        ->check(CLI::IsMember({"continuous", "discrete"}));
    add_out(dl, out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            app.exit(e, out, err);
            return ok;
        }
        err << "config error: " << e.what() << '\n';
        return config_error;
    }

    try {
        std::ostringstream body;
        if (*sim) {
            tarch::PathConfig cfg;
            cfg.horizon_steps = sim_steps;
            cfg.n_paths = sim_mc.paths;
            cfg.seed = sim_mc.seed;
            cfg.burn_in = sim_burn;
            cfg.threads = sim_mc.threads;
            report::write_paths(body, tarch::simulate_paths(sim_p.params(), cfg));
        } else if (*fit) {
            const est::CsvSeries csv = est::read_series_csv(fit_input);
            est::ReturnSeries r = csv.is_returns ? csv.returns
                                                 : est::prices_to_log_returns(csv.prices, fit_freq == "daily"
                                                                                              ? est::Frequency::daily
                                                                                              : est::Frequency::weekly);
            if (fit_trim > 0.0)
                r = est::trim_extremes(r, fit_trim);
            std::vector<est::FitResult> fits;
            for (auto vol : {est::Volatility::garch, est::Volatility::tarch})
                for (auto sh : {est::Shocks::gaussian, est::Shocks::student_t}) {
                    if (fit_vol != "all" && (fit_vol == "tarch") != (vol == est::Volatility::tarch))
                        continue;
                    if (fit_shocks != "all" && (fit_shocks == "t") != (sh == est::Shocks::student_t))
                        continue;
                    fits.push_back(est::fit(r.returns, {vol, sh}));
                }
            report::write_fit(body, fits);
        } else if (*mom) {
            const tarch::TarchParams p = mom_p.params();
            const double var = tarch::unconditional_variance(p);
            const auto ratio = tarch::stationary_sigma3_ratio(p, mom_mc.paths, derive_seed(mom_mc.seed, "sigma3"),
                                                              10000, 100, mom_mc.threads);
            const auto lo = tarch::cond_sigma3_forecast(p, mom_low * var, mom_max, mom_mc.paths,
                                                        derive_seed(mom_mc.seed, "low"), mom_mc.threads);
            const auto hi = tarch::cond_sigma3_forecast(p, mom_high * var, mom_max, mom_mc.paths,
                                                        derive_seed(mom_mc.seed, "high"), mom_mc.threads);
            std::vector<report::MomentRow> rows;
            for (std::size_t T = 1; T <= mom_max; T += mom_stride) {
                report::MomentRow row{};
                row.steps = T;
                row.v_t = tarch::cond_variance_agg(p, var, T);
                row.s_t = tarch::uncond_skewness_term(p, T, ratio.value);
                row.s_t_low = tarch::cond_skewness(p, mom_low * var, std::span<const double>(lo).first(T), T);
                row.s_t_high = tarch::cond_skewness(p, mom_high * var, std::span<const double>(hi).first(T), T);
                row.k_t = std::nan("");
                if (p.alpha_d == 0.0 && tarch::is_symmetric(p.innovation))
                    row.k_t = tarch::agg_kurtosis(p, T);
                rows.push_back(row);
            }
            report::write_moments(body, rows);
        } else if (*dc) {
            const auto spec = dc_m.spec();
            const auto grid = parse_grid("p-grid", dc_grid);
            require_grid("p-grid", grid, 0.0, 0.5, false);
            const std::size_t steps = factor::horizon_steps(spec, dc_horizon);
            const auto pts = factor::default_corr_mc(spec, grid, steps, dc_mc.config(), dc_reps);
            report::write_default_corr(body, surface::model_id(spec), steps, pts);
        } else if (*sf) {
            const auto spec = sf_m.spec();
            const auto kg = parse_grid("k-grid", sf_k);
            const auto tg = parse_grid("t-grid", sf_t);
            require_grid("k-grid", kg, 0.0, 1.0, true);
            require_grid("t-grid", tg, 0.0, 100.0, true);
            report::write_surface(body, surface::build_surface(spec, kg, tg, sf_h, sf_mc.config(), compounding(sf_conv)));
        } else if (*dl) {
            const auto spec = dl_m.spec();
            const auto kg = parse_grid("k-grid", dl_k);
            require_grid("k-grid", kg, 0.0, 1.0, true);
            const surface::ModelPricer pricer(spec, {dl_t}, dl_mc.config());
            std::vector<surface::DeltaReport> rows;
            for (double K : kg)
                rows.push_back(surface::delta_adjustment(pricer, K, dl_t, dl_h, dl_bump, compounding(dl_conv)));
            report::write_deltas(body, surface::model_id(spec), rows);
        }
        emit(out_path, body.str(), out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return numeric_error;
    }
    return ok;
}

} // namespace corrsurf::cli
