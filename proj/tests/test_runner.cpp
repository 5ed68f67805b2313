#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dn/runner.hpp"
#include "test_util.hpp"

using namespace dn;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path config_dir() { return DN_CONFIG_DIR; }

std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "dn_runner_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("runner: flag parsing") {
    SUBCASE("radii ranges") {
        auto r = parse_radii("5..50");
        CHECK(r.size() == 10);
        CHECK(r.front() == doctest::Approx(5.0));
        CHECK(r.back() == doctest::Approx(50.0));
        auto r2 = parse_radii("2..3:5");
        CHECK(r2.size() == 5);
        CHECK(r2[1] == doctest::Approx(2.25));
        CHECK_THROWS_AS(parse_radii("bogus"), ConfigError);
        CHECK_THROWS_AS(parse_radii("5..2"), ConfigError);
    }

    SUBCASE("grid spec") {
        auto [box, n] = parse_grid_spec("box:-1,2,-0.5,0.5:64");
        CHECK(box.x0 == -1.0);
        CHECK(box.x1 == 2.0);
        CHECK(box.y1 == 0.5);
        CHECK(n == 64);
        CHECK_THROWS_AS(parse_grid_spec("circle:1"), ConfigError);
        CHECK_THROWS_AS(parse_grid_spec("box:2,1,0,1"), ConfigError);
    }

    SUBCASE("parameter bindings") {
        ParamEnv env;
        add_param(env, "a=pi/3");
        CHECK(std::abs(env.at("a")(Complex(0.0, 0.0)).get() -
                       Complex(3.14159265358979323846 / 3.0, 0.0)) < 1e-15);
        add_param(env, "Q=exp(2*pi*i*z)");
        CHECK(std::abs(env.at("Q")(Complex(0.25, 0.0)).get() - Complex(0.0, 1.0)) < 1e-14);
        CHECK_THROWS_AS(add_param(env, "junk"), ConfigError);
        CHECK_THROWS_AS(add_param(env, "x=?"), ConfigError);
    }
}

TEST_CASE("runner: equation and solution files") {
    auto eq = load_equation((config_dir() / "equation_b1.json").string());
    auto f = load_solution((config_dir() / "solution_b1.json").string());
    CHECK(eq.form == EquationForm::main);
    CHECK(f.label == "f_b");
    CHECK(f.ledger.lattices.size() == 3);

    // the declared ledger agrees with the catalog build of the same family
    auto e = catalog_get("ex2_2", {{"b", Expr::constant(1.0)}});
    Complex z0(0.37, 0.21);
    CHECK(std::abs(f(z0).get() - e.solutions[0](z0).get()) < 1e-13);

    auto rep = residual_report(eq, f, entry_grid(e, 50));
    CHECK(rep.max_relative <= 1e-9);

    CHECK_THROWS_AS(load_equation("/nonexistent/file.json"), ConfigError);
}

TEST_CASE("runner: verify command") {
    SUBCASE("catalog route passes and writes artifacts") {
        RunConfig cfg;
        cfg.catalog_id = "ex2_1";
        add_param(cfg.params, "a=pi/3");
        cfg.out_dir = fresh_dir("verify_pass").string();
        CHECK(cmd_verify(cfg) == 0);
        CHECK(std::filesystem::exists(std::filesystem::path(cfg.out_dir) / "residuals_f1.csv"));
        CHECK(std::filesystem::exists(std::filesystem::path(cfg.out_dir) / "residuals_f2.csv"));
        auto j = nlohmann::json::parse(slurp(std::filesystem::path(cfg.out_dir) / "summary.json"));
        CHECK(j.at("pass").get<bool>());
    }

    SUBCASE("file route passes") {
        RunConfig cfg;
        cfg.equation_file = (config_dir() / "equation_b1.json").string();
        cfg.solution_file = (config_dir() / "solution_b1.json").string();
        cfg.out_dir = fresh_dir("verify_files").string();
        CHECK(cmd_verify(cfg) == 0);
    }

    SUBCASE("mutated coefficient fails with exit 1") {
        RunConfig cfg;
        cfg.catalog_id = "ex2_1";
        add_param(cfg.params, "a=pi/3");
        cfg.mutate = "B+=0.1";
        cfg.out_dir = fresh_dir("verify_mutated").string();
        CHECK(cmd_verify(cfg) == 1);
    }

    SUBCASE("missing inputs are config errors") {
        RunConfig cfg;
        cfg.out_dir = fresh_dir("verify_cfg").string();
        CHECK_THROWS_AS(cmd_verify(cfg), ConfigError);
        cfg.equation_file = (config_dir() / "equation_b1.json").string();
        CHECK_THROWS_AS(cmd_verify(cfg), ConfigError); // no solution file
        cfg.mutate = "C/=1";
        CHECK_THROWS_AS(cmd_verify(cfg), ConfigError);
    }

    SUBCASE("emitted files are byte-identical across runs") {
        for (const char* name : {"det_a", "det_b"}) {
            RunConfig cfg;
            cfg.catalog_id = "ex2_2";
            cfg.out_dir = fresh_dir(name).string();
            CHECK(cmd_verify(cfg) == 0);
        }
        auto base = std::filesystem::temp_directory_path() / "dn_runner_tests";
        CHECK(slurp(base / "det_a" / "residuals_f_b.csv") ==
              slurp(base / "det_b" / "residuals_f_b.csv"));
        CHECK(slurp(base / "det_a" / "summary.json") == slurp(base / "det_b" / "summary.json"));
    }
}

TEST_CASE("runner: nevanlinna command") {
    RunConfig cfg;
    cfg.catalog_id = "ex2_2";
    cfg.radii = parse_radii("5..20:4"); // integer radii get dodged off the pole circles
    cfg.nodes = 512;
    cfg.out_dir = fresh_dir("nev").string();
    CHECK(cmd_nevanlinna(cfg) == 0);
    auto dir = std::filesystem::path(cfg.out_dir);
    CHECK(std::filesystem::exists(dir / "characteristic_f_b.csv"));
    CHECK(std::filesystem::exists(dir / "growth.svg"));
    auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(std::abs(j.at("N_slope_f_b").get<double>() - 2.0) < 0.2);
}

TEST_CASE("runner: nevanlinna flags growth separation") {
    RunConfig cfg;
    cfg.catalog_id = "ex5_1";
    add_param(cfg.params, "Q2=exp(2*pi*i*5*z)");
    cfg.out_dir = fresh_dir("nev_sep").string();
    cfg.nodes = 512;
    cfg.radii = {4.5, 6.5, 8.5};
    CHECK(cmd_nevanlinna(cfg) == 0);
    auto j = nlohmann::json::parse(
        slurp(std::filesystem::path(cfg.out_dir) / "summary.json"));
    CHECK(j.at("trend").get<std::string>() == "growth-separated");
    CHECK(std::abs(j.at("final_ratio").get<double>() - 0.2) < 0.1);
}

TEST_CASE("runner: casoratian command") {
    RunConfig cfg;
    cfg.catalog_id = "ex2_1";
    add_param(cfg.params, "a=pi/3");
    cfg.grid_count = 60;
    cfg.out_dir = fresh_dir("cas").string();
    CHECK(cmd_casoratian(cfg) == 0);
    auto j = nlohmann::json::parse(
        slurp(std::filesystem::path(cfg.out_dir) / "summary.json"));
    CHECK(j.at("pass").get<bool>());
    CHECK(std::abs(j.at("H_mean_re").get<double>() + std::sin(3.14159265358979323846 / 3.0)) <
          1e-10);

    RunConfig single;
    single.catalog_id = "ex2_2";
    single.out_dir = fresh_dir("cas_single").string();
    CHECK_THROWS_AS(cmd_casoratian(single), ConfigError);
}

TEST_CASE("runner: limit command") {
    SUBCASE("experiment file route") {
        RunConfig cfg;
        cfg.experiment_file = (config_dir() / "experiment_wc.json").string();
        cfg.out_dir = fresh_dir("limit_file").string();
        CHECK(cmd_limit(cfg) == 0);
        auto j = nlohmann::json::parse(
            slurp(std::filesystem::path(cfg.out_dir) / "summary.json"));
        CHECK(j.at("residual_underflow").get<bool>()); // exact family
        CHECK(std::filesystem::exists(std::filesystem::path(cfg.out_dir) / "limit.svg"));
    }

    SUBCASE("indirect families with an eps-dependent candidate") {
        RunConfig cfg;
        cfg.experiment_file = (config_dir() / "experiment_indirect.json").string();
        cfg.out_dir = fresh_dir("limit_indirect").string();
        CHECK(cmd_limit(cfg) == 0);
        auto j = nlohmann::json::parse(
            slurp(std::filesystem::path(cfg.out_dir) / "summary.json"));
        // sin(2t + eps) solves the indirect step equation exactly at every eps
        CHECK(j.at("residual_underflow").get<bool>());
    }

    SUBCASE("non-solution candidate measures order about zero") {
        RunConfig cfg;
        cfg.catalog_id = "ex3_1";
        cfg.candidate = "t^2";
        cfg.out_dir = fresh_dir("limit_bad").string();
        CHECK(cmd_limit(cfg) == 0);
        auto j = nlohmann::json::parse(
            slurp(std::filesystem::path(cfg.out_dir) / "summary.json"));
        CHECK_FALSE(j.at("residual_underflow").get<bool>());
        CHECK(std::abs(j.at("order").get<double>()) < 0.2);
    }

    SUBCASE("missing setup is a config error") {
        RunConfig cfg;
        cfg.out_dir = fresh_dir("limit_cfg").string();
        CHECK_THROWS_AS(cmd_limit(cfg), ConfigError);
    }
}
