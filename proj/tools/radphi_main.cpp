#include <radphi/commands.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

void add_common(CLI::App* cmd, radphi::RunConfig& cfg, std::string& formats_csv) {
    cmd->add_option("--problem", cfg.problem_path, "problem instance JSON file")
        ->required();
    cmd->add_option("--steps", cfg.n_steps, "radial grid steps (default 2048)");
    cmd->add_option("--out", cfg.out_dir, "output directory (default .)");
    cmd->add_option("--format", formats_csv,
                    "comma list of outputs: csv,json,svg (default all)");
}

void apply_formats(radphi::RunConfig& cfg, const std::string& formats_csv) {
    if (formats_csv.empty()) return;
    cfg.formats.clear();
    std::string cur;
    for (char ch : formats_csv + ",") {
        if (ch == ',') {
            if (!cur.empty()) cfg.formats.insert(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (cfg.formats.empty())
        throw std::invalid_argument("--format needs at least one of csv,json,svg");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial phi-Laplacian shooting laboratory"};
    app.require_subcommand(1);

    radphi::RunConfig cfg;
    std::string formats_csv;

    CLI::App* shoot = app.add_subcommand("shoot", "integrate one profile from u(0)=a");
    add_common(shoot, cfg, formats_csv);
    shoot->add_option("--lambda", cfg.lambda_spec, "lambda (single value)");
    shoot->add_option("--a", cfg.a, "shooting height u(0)")->required();

    CLI::App* solve = app.add_subcommand("solve", "find all shooting roots at one lambda");
    add_common(solve, cfg, formats_csv);
    solve->add_option("--lambda", cfg.lambda_spec, "lambda (single value)");
    solve->add_option("--a-range", cfg.a_range, "height scan lo:hi:n");
    solve->add_option("--c", cfg.c, "level divisor for the r2 crossing (default 4)");

    CLI::App* sweep = app.add_subcommand("sweep", "sweep lambda and estimate lambda0");
    add_common(sweep, cfg, formats_csv);
    sweep->add_option("--lambda", cfg.lambda_spec,
                      "lambda grid: v, v1:v2:n, or log:v1:v2:n");
    sweep->add_option("--a-range", cfg.a_range, "height scan lo:hi:n");
    sweep->add_option("--c", cfg.c, "level divisor for the r2 crossing (default 4)");

    CLI::App* verify = app.add_subcommand("verify", "re-check laws on stored results");
    verify->add_option("--out", cfg.out_dir, "directory holding sweep/solutions JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        // CLI11 returns 0 for --help; anything else is a usage error.
        return rc == 0 ? radphi::kExitOk : radphi::kExitUsage;
    }

    try {
        apply_formats(cfg, formats_csv);
        if (shoot->parsed()) return radphi::cmd_shoot(cfg);
        if (solve->parsed()) return radphi::cmd_solve(cfg);
        if (sweep->parsed()) return radphi::cmd_sweep(cfg);
        if (verify->parsed()) return radphi::cmd_verify(cfg);
        std::cerr << "no subcommand given\n";
        return radphi::kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return radphi::kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "bad input file: " << e.what() << '\n';
        return radphi::kExitUsage;
    } catch (const radphi::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return radphi::kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return radphi::kExitNumerical;
    }
}
