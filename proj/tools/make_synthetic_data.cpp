// Writes data/sp500_synthetic_daily.csv: a business-day price series in the
// SP500 layout (date,level) driven by a daily TARCH(1,1) with Student-t
// shocks. Deterministic; rerun to regenerate.
#include "corrsurf/estimation.hpp"
#include "corrsurf/tarch.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

int main(int argc, char** argv)
{
    using namespace std::chrono;
    const std::string path = argc > 1 ? argv[1] : "data/sp500_synthetic_daily.csv";
    const sys_days first{year{1962} / July / 2};
    const sys_days last{year{2004} / December / 31};

    std::size_t n = 0;
    for (sys_days d = first; d <= last; d += days{1})
        if (weekday{d}.c_encoding() % 6 != 0)
            ++n;

    const auto p = corrsurf::tarch::TarchParams::unit_variance(0.02, 0.08, 0.93, corrsurf::tarch::StudentTShocks{8.0});
    corrsurf::tarch::PathConfig cfg;
    cfg.horizon_steps = n - 1;
    cfg.n_paths = 1;
    cfg.seed = 19620702;
    cfg.burn_in = 2000;
    cfg.threads = 1;
    const auto r = corrsurf::tarch::simulate_paths(p, cfg).data;
    const double daily_sd = 0.009;

    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) {
        std::perror(path.c_str());
        return 1;
    }
    std::fprintf(f, "date,level\n");
    double log_level = std::log(55.0);
    std::size_t i = 0;
    for (sys_days d = first; d <= last; d += days{1}) {
        if (weekday{d}.c_encoding() % 6 == 0)
            continue;
        if (i > 0)
            log_level += daily_sd * r[i - 1];
        std::fprintf(f, "%s,%.6f\n", corrsurf::est::format_iso_date(d).c_str(), std::exp(log_level));
        ++i;
    }
    std::fclose(f);
    std::printf("%zu rows written to %s\n", n, path.c_str());
}
