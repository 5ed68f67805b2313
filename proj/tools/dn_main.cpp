// dn: verification front end. Subcommands: verify, nevanlinna, casoratian,
// limit, report-all. Exit codes: 0 all-pass, 1 verification failure,
// 2 usage/config error.

#include <iostream>

#include <CLI11.hpp>

#include "dn/runner.hpp"

namespace {

void add_common_flags(CLI::App* cmd, dn::RunConfig& cfg, std::vector<std::string>& params,
                      std::string& radii, std::string& grid) {
    cmd->add_option("--catalog", cfg.catalog_id, "built-in entry id (see `dn list`)");
    cmd->add_option("--param", params, "parameter binding name=value (repeatable)");
    cmd->add_option("--equation", cfg.equation_file, "equation definition file (JSON)");
    cmd->add_option("--solution", cfg.solution_file, "solution definition file (JSON)");
    cmd->add_option("--radii", radii, "radius schedule a..b[:n]");
    cmd->add_option("--nodes", cfg.nodes, "quadrature nodes for proximity integrals");
    cmd->add_option("--grid", grid, "evaluation grid box:x0,x1,y0,y1:n");
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--tol", cfg.tol, "tolerance override");
}

void finish_config(dn::RunConfig& cfg, const std::vector<std::string>& params,
                   const std::string& radii, const std::string& grid) {
    for (const auto& p : params) dn::add_param(cfg.params, p);
    if (!radii.empty()) cfg.radii = dn::parse_radii(radii);
    if (!grid.empty()) {
        auto [box, n] = dn::parse_grid_spec(grid);
        cfg.grid_box = box;
        cfg.grid_count = n;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical verification toolkit for a quadratic first-order difference "
                 "equation, its solution families, and their growth"};
    app.require_subcommand(1);

    dn::RunConfig cfg;
    std::vector<std::string> params;
    std::string radii, grid;
    std::string eps_start;

    auto* verify = app.add_subcommand("verify", "residual sweep for an equation/solution pair");
    add_common_flags(verify, cfg, params, radii, grid);
    verify->add_option("--mutate", cfg.mutate, "coefficient mutation (negative control), e.g. B+=0.1");

    auto* nev = app.add_subcommand("nevanlinna", "characteristic tables and growth curves");
    add_common_flags(nev, cfg, params, radii, grid);

    auto* cas = app.add_subcommand("casoratian", "Casoratian pipeline for a solution pair");
    add_common_flags(cas, cfg, params, radii, grid);

    auto* lim = app.add_subcommand("limit", "continuous-limit experiment");
    add_common_flags(lim, cfg, params, radii, grid);
    lim->add_option("--experiment", cfg.experiment_file, "experiment config file (JSON)");
    lim->add_option("--candidate", cfg.candidate, "candidate solution expression in t");
    lim->add_option("--eps-start", eps_start, "first eps value (default 0.5)");
    lim->add_option("--eps-ratio", cfg.eps_ratio, "schedule ratio (default 0.5)");
    lim->add_option("--eps-steps", cfg.eps_steps, "schedule length (default 12)");

    auto* rep = app.add_subcommand("report-all", "run the full acceptance battery");
    add_common_flags(rep, cfg, params, radii, grid);

    auto* list = app.add_subcommand("list", "list built-in catalog entries");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        finish_config(cfg, params, radii, grid);
        if (!eps_start.empty()) {
            dn::Value v = dn::parse(eps_start)(dn::Complex(0.0, 0.0));
            if (!v.is_finite()) throw dn::ConfigError("bad --eps-start");
            cfg.eps_start = v.get();
        }
        if (list->parsed()) {
            for (const auto& info : dn::catalog_list()) {
                std::cout << info.id << ": " << info.notes << "\n";
                for (const auto& p : info.params)
                    std::cout << "    --param " << p.name << "=" << p.default_text << "  ("
                              << p.description << ")\n";
            }
            return 0;
        }
        if (verify->parsed()) return dn::cmd_verify(cfg);
        if (nev->parsed()) return dn::cmd_nevanlinna(cfg);
        if (cas->parsed()) return dn::cmd_casoratian(cfg);
        if (lim->parsed()) return dn::cmd_limit(cfg);
        if (rep->parsed()) return dn::cmd_report_all(cfg);
        return 2;
    } catch (const dn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const dn::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const dn::UnknownEntry& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const dn::ParameterConstraintViolation& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const dn::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
