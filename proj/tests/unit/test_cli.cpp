#include <doctest.h>

#include "corrsurf/cli/commands.hpp"
#include "corrsurf/report/csv.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace corrsurf;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "corrsurf");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> row;
        std::string cell;
        bool quoted = false;
        for (char c : line) {
            if (c == '"')
                quoted = !quoted;
            else if (c == ',' && !quoted) {
                row.push_back(cell);
                cell.clear();
            } else
                cell += c;
        }
        row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

std::string write_temp(const char* name, const std::string& body)
{
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << body;
    return path.string();
}

} // namespace

TEST_CASE("number formatting and quoting")
{
    CHECK(report::format_number(0.1) == "0.1");
    CHECK(report::format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(report::format_number(std::nan("")) == "nan");
    CHECK(report::escape_field("a,b") == "\"a,b\"");
    CHECK(report::escape_field("x\"y") == "\"x\"\"y\"");
    std::ostringstream os;
    report::CsvWriter w(os, {"a", "b"});
    w.cell(1.5);
    CHECK_THROWS(w.end_row());
}

TEST_CASE("grid parsing")
{
    const auto g = cli::parse_grid("k-grid", "0.01:0.05:0.01");
    REQUIRE(g.size() == 5);
    CHECK(g.back() == doctest::Approx(0.05));
    CHECK(cli::parse_grid("t-grid", "1,3,5") == std::vector<double>{1, 3, 5});
    try {
        cli::parse_grid("k-grid", "0.1,abc");
        FAIL("expected ConfigError");
    } catch (const cli::ConfigError& e) {
        CHECK(e.key() == "k-grid");
    }
    CHECK_THROWS_AS(cli::parse_grid("k-grid", "0.3:0.1:0.01"), cli::ConfigError);
}

TEST_CASE("gaussian surface is flat at the loading")
{
    const Result r = run({"surface", "--model", "gaussian", "--rho", "0.3", "--seed", "1", "--paths", "100000",
                          "--t-grid", "5", "--k-grid", "0.03:0.15:0.03", "--threads", "1"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"model", "T", "K", "p", "hazard", "rho", "flag"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][6] == "ok");
        CHECK(std::abs(std::stod(rows[i][5]) - 0.3) <= 0.01);
    }
}

TEST_CASE("same seed gives byte-identical output, thread count does not matter")
{
    const std::vector<std::string> base = {"defaultcorr", "--model", "tarch", "--seed", "9", "--paths", "2000",
                                           "--reps", "4", "--horizon", "1"};
    auto a = base, b = base, c = base;
    a.insert(a.end(), {"--threads", "1"});
    b.insert(b.end(), {"--threads", "1"});
    c.insert(c.end(), {"--threads", "3"});
    const Result ra = run(a), rb = run(b), rc = run(c);
    REQUIRE(ra.code == 0);
    CHECK(ra.out == rb.out);
    CHECK(ra.out == rc.out);
    auto d = base;
    d[4] = "10";
    CHECK(run(d).out != ra.out);
}

TEST_CASE("exit codes")
{
    SUBCASE("missing seed")
    {
        const Result r = run({"surface", "--model", "gaussian"});
        CHECK(r.code == 2);
        CHECK(r.err.find("--seed") != std::string::npos);
    }
    SUBCASE("value out of domain names the key")
    {
        const Result r = run({"surface", "--seed", "1", "--rho", "1.5"});
        CHECK(r.code == 2);
        CHECK(r.err.find("--rho") != std::string::npos);
    }
    SUBCASE("bad grid names the key")
    {
        const Result r = run({"deltas", "--seed", "1", "--k-grid", "0.05,0.03"});
        CHECK(r.code == 2);
        CHECK(r.err.find("--k-grid") != std::string::npos);
    }
    SUBCASE("garch rejects an asymmetric coefficient")
    {
        const Result r = run({"surface", "--seed", "1", "--model", "garch", "--alpha-d", "0.1"});
        CHECK(r.code == 2);
        CHECK(r.err.find("--alpha-d") != std::string::npos);
    }
    SUBCASE("numeric domain error")
    {
        const Result r = run({"simulate", "--seed", "1", "--beta", "1.2"});
        CHECK(r.code == 1);
        CHECK(r.err.find("persistence") != std::string::npos);
    }
    SUBCASE("help")
    {
        const Result r = run({"surface", "--help"});
        CHECK(r.code == 0);
        for (const char* key : {"--model", "--rho", "--k-grid", "--t-grid", "--hazard", "--seed", "--threads", "--out"})
            CHECK(r.out.find(key) != std::string::npos);
    }
    SUBCASE("no subcommand")
    {
        CHECK(run({}).code == 2);
    }
}

TEST_CASE("config file with per-subcommand sections, flags override")
{
    const std::string ini = write_temp("corrsurf_test.ini", "[surface]\nmodel = \"gaussian\"\nrho = 0.2\nseed = 5\n"
                                                            "paths = 20000\nt-grid = \"5\"\nk-grid = \"0.05\"\n"
                                                            "threads = 1\n");
    const Result a = run({"--config", ini, "surface"});
    REQUIRE(a.code == 0);
    auto rows = parse_csv(a.out);
    REQUIRE(rows.size() == 2);
    CHECK(std::abs(std::stod(rows[1][5]) - 0.2) < 0.02);

    const Result b = run({"--config", ini, "surface", "--rho", "0.5"});
    REQUIRE(b.code == 0);
    rows = parse_csv(b.out);
    CHECK(std::abs(std::stod(rows[1][5]) - 0.5) < 0.02);

    const std::string bad = write_temp("corrsurf_bad.ini", "[surface]\nbogus_key = 1\n");
    const Result c = run({"--config", bad, "surface", "--seed", "1"});
    CHECK(c.code == 2);
    CHECK(c.err.find("bogus_key") != std::string::npos);
}

TEST_CASE("moments and simulate")
{
    const Result m = run({"moments", "--seed", "1", "--paths", "500", "--max-steps", "10", "--threads", "1"});
    REQUIRE(m.code == 0);
    const auto rows = parse_csv(m.out);
    REQUIRE(rows.size() == 11);
    CHECK(rows[0][2] == "S_T");
    CHECK(rows[1][2] == "0");
    CHECK(rows[10][5] == "nan");

    const Result g = run({"moments", "--seed", "1", "--paths", "500", "--max-steps", "3", "--alpha", "0.06",
                          "--alpha-d", "0", "--threads", "1"});
    REQUIRE(g.code == 0);
    CHECK(parse_csv(g.out)[1][5] != "nan");

    const Result s = run({"simulate", "--seed", "1", "--paths", "3", "--steps", "4"});
    REQUIRE(s.code == 0);
    CHECK(parse_csv(s.out).size() == 13);
}

TEST_CASE("fit on the bundled synthetic series")
{
    const std::string path = std::string(CORRSURF_DATA_DIR) + "/sp500_synthetic_daily.csv";
    const Result r = run({"fit", "--input", path});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    // 3 + 4 + 4 + 5 parameters.
    REQUIRE(rows.size() == 17);
    double ll_gg = 0, ll_tt = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][5] == "true");
        if (rows[i][0] == "GARCH-Gaussian")
            ll_gg = std::stod(rows[i][4]);
        if (rows[i][0] == "TARCH-t")
            ll_tt = std::stod(rows[i][4]);
    }
    CHECK(ll_tt > ll_gg);
}

TEST_CASE("output file")
{
    const auto path = (std::filesystem::temp_directory_path() / "corrsurf_out.csv").string();
    std::filesystem::remove(path);
    const Result r = run({"simulate", "--seed", "1", "--paths", "1", "--steps", "2", "--out", path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "path,step,return");
    CHECK(run({"simulate", "--seed", "1", "--out", "/nonexistent/dir/x.csv"}).code == 2);
}
