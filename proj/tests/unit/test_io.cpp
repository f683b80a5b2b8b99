#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "modopo/config.hpp"
#include "modopo/csv.hpp"
#include "modopo/errors.hpp"

using namespace modopo;

TEST_CASE("config parsing")
{
    const auto c = parse_config(R"({"fbar_over_fth": 1.5, "f1_over_fbar": 0.25, "phi_L": 0.1})");
    CHECK(c.fbar_over_fth == 1.5);
    CHECK(c.f1_over_fbar == 0.25);
    CHECK(c.phi_L == 0.1);
    CHECK(c.gamma3_over_gamma == 25.0);

    CHECK_THROWS_AS((void)parse_config(R"({"fbar": 1})"), ConfigError);
    CHECK_THROWS_AS((void)parse_config(R"({"fbar_over_fth": "3"})"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[1, 2]"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS((void)load_config("/nonexistent/modopo.json"), ConfigError);
}

TEST_CASE("config round trip")
{
    DimensionlessConfig c;
    c.k_over_gamma = 1.0 / 3.0;
    c.delta_over_gamma = 0.1;
    c.phi = -2.5;
    const auto back = parse_config(to_json(c));
    CHECK(back.k_over_gamma == c.k_over_gamma);
    CHECK(back.delta_over_gamma == c.delta_over_gamma);
    CHECK(back.phi == c.phi);
}

TEST_CASE("double formatting uses 17 significant digits")
{
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(1e-8) == "1e-08");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("csv layout")
{
    CsvTable t;
    t.metadata = {"modopo test", "seed 1"};
    t.columns = {"t", "flag", "name"};
    t.add_row({0.5, std::int64_t{1}, std::string("x")});
    t.add_row({1.0, std::int64_t{0}, std::string("y")});
    CHECK_THROWS_AS(t.add_row({1.0}), InvalidParameter);
    const std::string text = to_csv(t);
    CHECK(text == "# modopo test\n# seed 1\nt,flag,name\n0.5,1,x\n1,0,y\n");
    CHECK(text.find('\r') == std::string::npos);

    const auto parsed = parse_csv(text);
    CHECK(parsed.metadata.size() == 2);
    CHECK(parsed.columns.size() == 3);
    REQUIRE(parsed.rows.size() == 2);
    CHECK(parsed.rows[1][2] == "y");
}

TEST_CASE("csv writing requires an existing directory")
{
    CsvTable t;
    t.columns = {"a"};
    CHECK_THROWS_AS(write_csv("/nonexistent-dir-modopo/x.csv", t), std::filesystem::filesystem_error);
    const auto dir = std::filesystem::temp_directory_path() / "modopo_io_test";
    std::filesystem::create_directories(dir);
    write_csv(dir / "x.csv", t);
    std::ifstream in(dir / "x.csv", std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == "a\n");
    std::filesystem::remove_all(dir);
}
