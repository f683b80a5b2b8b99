#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "app.hpp"
#include "modopo/csv.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("modopo_cli_" + name))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "modopo");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = modopo::app::main_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

modopo::ParsedCsv table(const fs::path& p) { return modopo::parse_csv(slurp(p)); }

double cell(const modopo::ParsedCsv& t, std::size_t row, const std::string& col)
{
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (t.columns[i] == col) {
            return std::stod(t.rows.at(row).at(i));
        }
    }
    FAIL("missing column " << col);
    return 0.0;
}

}  // namespace

TEST_CASE("fig1 curves")
{
    TempDir dir("fig1");
    const auto r = run({"fig1", "--out", dir.path.string()});
    REQUIRE(r.code == 0);
    const auto t = table(dir.path / "fig1.csv");
    REQUIRE(t.columns == std::vector<std::string>{"t", "n0_curve1", "n0_curve2", "n0_curve3"});
    REQUIRE(t.rows.size() == 801);
    CHECK(t.metadata.front().rfind("modopo ", 0) == 0);
    CHECK(fs::exists(dir.path / "fig1.gp"));
    CHECK(fs::exists(dir.path / "run.log"));
    for (std::size_t j = 0; j < t.rows.size(); j += 50) {
        // unmodulated curve sits at the stationary value 2 (fbar - f_th) / (k f_th) -> 2e8
        CHECK(cell(t, j, "n0_curve1") == doctest::Approx(2e8).epsilon(1e-6));
    }
    for (std::size_t j = 0; j + 400 < t.rows.size(); j += 37) {
        CHECK(cell(t, j + 400, "t") - cell(t, j, "t") == doctest::Approx(std::numbers::pi));
        CHECK(cell(t, j + 400, "n0_curve3") == doctest::Approx(cell(t, j, "n0_curve3")).epsilon(1e-6));
    }
}

TEST_CASE("missing output directory is an error")
{
    const auto r = run({"variance", "--out", "/nonexistent/modopo/dir"});
    CHECK(r.code != 0);
    CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("bad configuration is an error")
{
    TempDir dir("config");
    {
        std::ofstream c(dir.path / "bad.json");
        c << R"({"fbar_over_fth": "three"})";
    }
    const auto r = run({"variance", "--out", dir.path.string(), "--config", (dir.path / "bad.json").string()});
    CHECK(r.code == 2);
    CHECK(run({"nosuchcommand"}).code != 0);
}

TEST_CASE("configuration file and flags")
{
    TempDir dir("flags");
    {
        std::ofstream c(dir.path / "c.json");
        c << R"({"fbar_over_fth": 1.0, "f1_over_fbar": 0.0})";
    }
    const auto r = run({"variance", "--out", dir.path.string(), "--config", (dir.path / "c.json").string()});
    REQUIRE(r.code == 0);
    const auto t = table(dir.path / "variance.csv");
    CHECK(cell(t, 0, "V") == doctest::Approx(0.5).epsilon(1e-9));
    // the flag wins over the file
    REQUIRE(run({"variance", "--out", dir.path.string(), "--config", (dir.path / "c.json").string(), "--fbar",
                 "0.5"})
                .code == 0);
    const auto u = table(dir.path / "variance.csv");
    CHECK(cell(u, 0, "V") == doctest::Approx(1.0 / 1.5).epsilon(1e-9));
}

TEST_CASE("repeated runs are byte identical")
{
    TempDir a("repeat_a"), b("repeat_b");
    for (const auto* cmd : {"fig2", "semiclassical"}) {
        REQUIRE(run({cmd, "--out", a.path.string()}).code == 0);
        REQUIRE(run({cmd, "--out", b.path.string()}).code == 0);
    }
    for (const auto* f : {"fig2.csv", "fig2_minima.csv", "semiclassical.csv"}) {
        CHECK(slurp(a.path / f) == slurp(b.path / f));
    }
}

TEST_CASE("stochastic output does not depend on the worker count")
{
    TempDir a("workers_a"), b("workers_b");
    REQUIRE(run({"positivep", "--out", a.path.string(), "--traj", "150", "--lambda", "0.05"}).code == 0);
    REQUIRE(run({"positivep", "--out", b.path.string(), "--traj", "150", "--lambda", "0.05", "--workers", "4"})
                .code == 0);
    CHECK(slurp(a.path / "positivep.csv") == slurp(b.path / "positivep.csv"));
}

TEST_CASE("compare without pump gives vacuum noise")
{
    TempDir dir("compare0");
    const auto r = run({"compare", "--out", dir.path.string(), "--fbar", "0", "--traj", "100"});
    REQUIRE(r.code == 0);
    const auto t = table(dir.path / "compare.csv");
    for (std::size_t j = 0; j < t.rows.size(); ++j) {
        CHECK(cell(t, j, "V_linear") == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(cell(t, j, "V_positivep") == 1.0);
        CHECK(cell(t, j, "V_qsd") == 1.0);
    }
}

TEST_CASE("compare at threshold flags the linear theory")
{
    TempDir dir("compare1");
    const auto r = run({"compare", "--out", dir.path.string(), "--fbar", "1", "--traj", "40"});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("warning: linearization validity") != std::string::npos);
    CHECK(slurp(dir.path / "run.log").find("warning linearization validity") != std::string::npos);
}

TEST_CASE("fig3 sweep at threshold")
{
    TempDir dir("fig3");
    REQUIRE(run({"fig3", "--out", dir.path.string()}).code == 0);
    const auto t = table(dir.path / "fig3.csv");
    bool found = false;
    for (std::size_t j = 0; j < t.rows.size(); ++j) {
        if (std::abs(cell(t, j, "fbar_over_fth") - 1.0) < 1e-12 && cell(t, j, "f1_over_fbar") == 0.0) {
            found = true;
            CHECK(cell(t, j, "v_min") == doctest::Approx(0.5).epsilon(1e-6));
        }
    }
    CHECK(found);
}

TEST_CASE("fig4 layout")
{
    TempDir dir("fig4");
    const auto r = run({"fig4", "--out", dir.path.string(), "--traj", "8"});
    REQUIRE(r.code == 0);
    const auto t = table(dir.path / "fig4.csv");
    CHECK(t.columns == std::vector<std::string>{"t", "V_analytic", "V_qsd", "V_qsd_stderr"});
    CHECK(r.out.find("time-averaged") != std::string::npos);
}
