#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "migsim/config.hpp"
#include "migsim/io.hpp"

using namespace migsim;
namespace fs = std::filesystem;

TEST_CASE("config files parse sections, comments and lists") {
    std::istringstream in(
        "# header comment\n"
        "[mdp]\n"
        "n_max = 10\n"
        "gamma = 0.9 ; inline comment\n"
        "\n"
        "[sweep]\n"
        "values = 0.5, 0.9 0.99\n"
        "policies = optimal approx\n");
    const ConfigFile config = ConfigFile::parse(in);

    CHECK(config.get_int("mdp", "n_max") == 10);
    CHECK(config.get_double("mdp", "gamma") == 0.9);
    CHECK(config.get_doubles("sweep", "values") == std::vector<double>{0.5, 0.9, 0.99});
    CHECK(config.get_strings("sweep", "policies") == std::vector<std::string>{"optimal", "approx"});
    CHECK(config.get_double_or("mdp", "missing", 1.5) == 1.5);
    CHECK_FALSE(config.has("mdp", "missing"));
}

TEST_CASE("config lookups fail with the field name") {
    std::istringstream in("[mdp]\nn_max = 2.5\n");
    const ConfigFile config = ConfigFile::parse(in);
    try {
        config.get_double("mdp", "gamma");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("[mdp] gamma") != std::string::npos);
    }
    CHECK_THROWS_AS(config.get_int("mdp", "n_max"), ValidationError); // non-integer
}

TEST_CASE("malformed config lines raise parse errors with line numbers") {
    std::istringstream broken("[mdp\n");
    CHECK_THROWS_AS(ConfigFile::parse(broken), ParseError);
    std::istringstream no_eq("[mdp]\njust words\n");
    try {
        ConfigFile::parse(no_eq, "cfg");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("cfg:2") != std::string::npos);
    }
}

TEST_CASE("tables serialize to csv and json") {
    Table t;
    t.columns = {"d", "value", "label"};
    t.add_row({std::int64_t{0}, 0.5, std::string("a")});
    t.add_row({std::int64_t{1}, 1.25, std::string("b")});

    const fs::path dir = fs::temp_directory_path() / "migsim_io_test";
    fs::create_directories(dir);
    const auto csv = t.write(dir, "table", "csv");
    std::ifstream in(csv);
    std::string header, row0;
    std::getline(in, header);
    std::getline(in, row0);
    CHECK(header == "d,value,label");
    CHECK(row0 == "0,0.5,a");

    const auto jsonp = t.write(dir, "table", "json");
    std::ifstream jin(jsonp);
    std::stringstream buffer;
    buffer << jin.rdbuf();
    const auto parsed = nlohmann::json::parse(buffer.str());
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[1]["value"] == 1.25);
    CHECK(parsed[1]["label"] == "b");
    fs::remove_all(dir);
}

TEST_CASE("doubles format to shortest round-trip strings") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(3.0) == "3");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
