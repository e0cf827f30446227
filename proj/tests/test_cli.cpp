// End-to-end checks of the migsim binary: runs real subcommands against
// generated configs and inspects the emitted files and exit codes.
#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include <unistd.h>

#ifndef MIGSIM_BIN
#error "MIGSIM_BIN must point at the CLI binary"
#endif

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("migsim_cli_" + std::to_string(::getpid()) + "_" +
                                                  std::to_string(counter++))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static inline int counter = 0;
};

int run(const std::string& args) {
    const std::string cmd = std::string(MIGSIM_BIN) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

std::string standard_config() {
    return "[mdp]\n"
           "n_max = 10\n"
           "gamma = 0.9\n"
           "r1 = 0.1\n"
           "[hex]\n"
           "n_max = 4\n"
           "r = 0.1\n"
           "gamma = 0.9\n"
           "[costs]\n"
           "beta_c = 1.5\n"
           "beta_l = -0.5\n"
           "mu = 0.8\n"
           "delta_c = 1\n"
           "delta_l = -1\n"
           "theta = 0.8\n"
           "[sweep]\n"
           "values = 0 1\n"
           "gammas = 0.5\n"
           "[simulate]\n"
           "mode = synthetic\n"
           "entities = 10\n"
           "slots = 30\n"
           "walk_r = 0.08\n"
           "T = 60\n"
           "T_u = 300\n"
           "T_w = 900\n"
           "N = 4\n"
           "gamma = 0.9\n";
}

nlohmann::json load_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return nlohmann::json::parse(buffer.str());
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

TEST_CASE("solve-1d writes policy, values and manifest") {
    TempDir dir;
    write_file(dir.path / "run.ini", standard_config());
    REQUIRE(run("solve-1d --config " + (dir.path / "run.ini").string() + " --out " +
                (dir.path / "out").string()) == 0);

    const std::string policy = read_all(dir.path / "out" / "policy.csv");
    CHECK(policy.rfind("d,action,value\n", 0) == 0);
    CHECK(fs::exists(dir.path / "out" / "values.csv"));
    const auto manifest = load_json(dir.path / "out" / "manifest.json");
    CHECK(manifest["command"] == "solve-1d");
    CHECK(manifest["iterations"].get<int>() >= 1);
    CHECK(manifest["solve_wall_ms"].get<double>() >= 0.0);
    CHECK(manifest["spec"]["p0"] == 0.2); // r1 shorthand expanded
}

TEST_CASE("identical configs produce identical outputs") {
    TempDir dir;
    write_file(dir.path / "run.ini", standard_config());
    const std::string base = (dir.path / "run.ini").string();
    REQUIRE(run("solve-1d --config " + base + " --out " + (dir.path / "a").string()) == 0);
    REQUIRE(run("solve-1d --config " + base + " --out " + (dir.path / "b").string()) == 0);
    CHECK(read_all(dir.path / "a" / "policy.csv") == read_all(dir.path / "b" / "policy.csv"));
    CHECK(read_all(dir.path / "a" / "values.csv") == read_all(dir.path / "b" / "values.csv"));
}

TEST_CASE("the emitted spec echo is itself a loadable config") {
    TempDir dir;
    write_file(dir.path / "run.ini", standard_config());
    REQUIRE(run("solve-1d --config " + (dir.path / "run.ini").string() + " --out " +
                (dir.path / "a").string()) == 0);
    REQUIRE(run("solve-1d --config " + (dir.path / "a" / "spec.ini").string() + " --out " +
                (dir.path / "b").string()) == 0);
    CHECK(read_all(dir.path / "a" / "policy.csv") == read_all(dir.path / "b" / "policy.csv"));
}

TEST_CASE("solve-2d both paths report the gap against the bound") {
    TempDir dir;
    write_file(dir.path / "run.ini", standard_config());
    REQUIRE(run("solve-2d --method both --config " + (dir.path / "run.ini").string() + " --out " +
                (dir.path / "out").string()) == 0);
    CHECK(fs::exists(dir.path / "out" / "policy_2d_exact.csv"));
    CHECK(fs::exists(dir.path / "out" / "policy_2d_approx.csv"));
    CHECK(fs::exists(dir.path / "out" / "policy_1d.csv"));
    const std::string header = read_all(dir.path / "out" / "policy_2d_exact.csv");
    CHECK(header.rfind("ring,index,action_ring,action_index,value\n", 0) == 0);

    const auto manifest = load_json(dir.path / "out" / "manifest.json");
    CHECK(manifest["gap_within_bound"] == true);
    CHECK(manifest["observed_max_gap"].get<double>() >= 0.0);
    CHECK(manifest["speedup"].get<double>() > 0.0);

    const std::string comparison = read_all(dir.path / "out" / "comparison.csv");
    CHECK(comparison.rfind("policy,state,value\n", 0) == 0);
    CHECK(comparison.find("optimal,avg,") != std::string::npos);
    CHECK(comparison.find("myopic,0/0,") != std::string::npos);
}

TEST_CASE("solve-2d smallest interesting model works on both paths") {
    TempDir dir;
    std::string cfg = standard_config();
    cfg.replace(cfg.find("n_max = 4"), 9, "n_max = 2");
    write_file(dir.path / "run.ini", cfg);
    REQUIRE(run("solve-2d --method both --config " + (dir.path / "run.ini").string() + " --out " +
                (dir.path / "out").string()) == 0);
    // 19 states plus header
    std::ifstream in(dir.path / "out" / "policy_2d_exact.csv");
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 20);
}

TEST_CASE("sweep emits one file per gamma with all policies") {
    TempDir dir;
    write_file(dir.path / "run.ini", standard_config());
    REQUIRE(run("sweep --config " + (dir.path / "run.ini").string() + " --out " +
                (dir.path / "out").string()) == 0);
    const std::string sweep = read_all(dir.path / "out" / "sweep_gamma_0.5.csv");
    CHECK(sweep.find("optimal") != std::string::npos);
    CHECK(sweep.find("approx") != std::string::npos);
    CHECK(sweep.find("never-migrate") != std::string::npos);
    const auto manifest = load_json(dir.path / "out" / "manifest.json");
    for (const auto& check : manifest["approx_gap_checks"]) CHECK(check["within_bound"] == true);
    // cheap migration favors always-migrate, dear migration never-migrate,
    // so their cost curves cross somewhere in the swept range
    CHECK(manifest.contains("never_always_intersections"));
}

TEST_CASE("fit reproduces the quadratic example through the files") {
    TempDir dir;
    write_file(dir.path / "table.csv", "n,f\n0,0\n1,1\n2,4\n");
    write_file(dir.path / "fit.ini", "[fit]\ninput = " + (dir.path / "table.csv").string() + "\nw = 1\n");
    REQUIRE(run("fit --config " + (dir.path / "fit.ini").string() + " --out " +
                (dir.path / "out").string()) == 0);
    const auto fit = load_json(dir.path / "out" / "fit.json");
    CHECK(fit["params"]["base"].get<double>() == 3.0);
    CHECK(fit["params"]["const_term"].get<double>() == -0.5);
    CHECK(fit["params"]["lin_term"].get<double>() == 0.5);

    write_file(dir.path / "const.csv", "5\n5\n5\n");
    write_file(dir.path / "bad.ini", "[fit]\ninput = " + (dir.path / "const.csv").string() + "\n");
    CHECK(run("fit --config " + (dir.path / "bad.ini").string() + " --out " +
              (dir.path / "out2").string()) == 5);
}

TEST_CASE("simulate in synthetic mode is seed-reproducible") {
    TempDir dir;
    write_file(dir.path / "run.ini", standard_config());
    const std::string base = "simulate --seed 11 --config " + (dir.path / "run.ini").string();
    REQUIRE(run(base + " --out " + (dir.path / "a").string()) == 0);
    REQUIRE(run(base + " --out " + (dir.path / "b").string()) == 0);
    CHECK(read_all(dir.path / "a" / "report.csv") == read_all(dir.path / "b" / "report.csv"));

    const auto summary = load_json(dir.path / "a" / "summary.json");
    CHECK(summary["policies"].size() == 4);
    CHECK(summary["max_post_action_distance"].get<int>() < 4);
    CHECK(summary["avg_cost_per_entity_slot"].contains("proposed"));
}

TEST_CASE("simulate in trace mode consumes cabspotting files") {
    TempDir dir;
    // two taxis moving east every minute
    std::string cab;
    for (int t = 0; t < 20; ++t)
        cab += "37.75 " + std::to_string(-122.39 + 0.001 * t) + " 0 " + std::to_string(1000 + 60 * t) + "\n";
    fs::create_directories(dir.path / "cabs");
    write_file(dir.path / "cabs" / "alpha.txt", cab);
    write_file(dir.path / "cabs" / "beta.txt", cab);
    std::string cfg = standard_config();
    cfg += "trace_dir = " + (dir.path / "cabs").string() + "\ntrace_format = cabspotting\n";
    cfg.replace(cfg.find("mode = synthetic"), 16, "mode = trace    ");
    write_file(dir.path / "run.ini", cfg);

    REQUIRE(run("simulate --config " + (dir.path / "run.ini").string() + " --out " +
                (dir.path / "out").string()) == 0);
    const auto summary = load_json(dir.path / "out" / "summary.json");
    CHECK(summary["source"]["entities"] == 2);
    CHECK(summary["source"]["records"] == 40);
}

TEST_CASE("error paths exit with distinct codes") {
    TempDir dir;
    write_file(dir.path / "nogamma.ini", "[mdp]\nn_max = 10\nr1 = 0.1\n[costs]\nbeta_c = 1\n"
                                         "beta_l = -1\nmu = 0.8\ndelta_c = 1\ndelta_l = -1\ntheta = 0.8\n");
    CHECK(run("solve-1d --config " + (dir.path / "nogamma.ini").string() + " --out " +
              (dir.path / "x").string()) == 2);

    write_file(dir.path / "badtrace.ini", "[simulate]\nmode = trace\ntrace_dir = " +
                                              (dir.path / "missing").string() + "\n");
    CHECK(run("simulate --config " + (dir.path / "badtrace.ini").string() + " --out " +
              (dir.path / "y").string()) == 3);

    CHECK(run("solve-1d --config " + (dir.path / "does_not_exist.ini").string() + " --out " +
              (dir.path / "z").string()) == 3);
}

TEST_CASE("json format switches the table outputs") {
    TempDir dir;
    write_file(dir.path / "run.ini", standard_config());
    REQUIRE(run("solve-1d --format json --config " + (dir.path / "run.ini").string() + " --out " +
                (dir.path / "out").string()) == 0);
    const auto policy = load_json(dir.path / "out" / "policy.json");
    REQUIRE(policy.size() == 11);
    CHECK(policy[0].contains("action"));
    CHECK(policy[0].contains("value"));
}
