#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "phibvp/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Phi-Laplacian two-point boundary value solver"};
    app.require_subcommand(1);

    phibvp::cli::SolveFlags solve_flags;
    std::string solve_path;
    int n = 0;
    double tol = 0.0;
    double theta = 0.0;
    std::string out_csv;
    std::string summary;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file");
    solve_cmd->add_option("problem", solve_path, "Problem file (JSON)")->required();
    auto* n_opt = solve_cmd->add_option("--n", n, "Grid intervals (even, >= 16)");
    auto* tol_opt = solve_cmd->add_option("--tol", tol, "Fixed-point tolerance (C1 norm)");
    auto* theta_opt = solve_cmd->add_option("--theta", theta, "Damping in (0, 1]");
    solve_cmd->add_option("--out", out_csv, "Solution CSV (default: stdout)");
    solve_cmd->add_option("--summary", summary, "Summary JSON");
    solve_cmd->add_flag("--check", solve_flags.check, "Cross-check with the shooting oracle");

    std::string bounds_path;
    auto* bounds_cmd = app.add_subcommand("bounds", "Print the a priori bound chain");
    bounds_cmd->add_option("problem", bounds_path, "Problem file (JSON)")->required();

    phibvp::cli::VerifyFlags verify_flags;
    std::string bc_kind = "dirichlet";
    auto* verify_cmd = app.add_subcommand("verify", "Manufactured-solution convergence study");
    verify_cmd->add_option("--profile", verify_flags.profile,
                           "linear | quadratic | cubic | quartic | sin | sinh");
    verify_cmd->add_option("--p", verify_flags.p_exponent, "Power exponent in (1, 2]");
    verify_cmd->add_option("--n", verify_flags.n_list, "Grid sizes")->delimiter(',');
    verify_cmd->add_option("--bc", bc_kind, "dirichlet | sturm_liouville")
        ->check(CLI::IsMember({"dirichlet", "sturm_liouville"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Usage errors are reported like invalid input; --help still exits 0.
        return app.exit(e) == 0 ? 0 : phibvp::cli::kInvalidProblem;
    }

    if (*solve_cmd) {
        if (*n_opt) solve_flags.n = n;
        if (*tol_opt) solve_flags.tol = tol;
        if (*theta_opt) solve_flags.theta = theta;
        solve_flags.out_csv = out_csv;
        solve_flags.summary = summary;
        return phibvp::cli::cmd_solve(solve_path, solve_flags);
    }
    if (*bounds_cmd) return phibvp::cli::cmd_bounds(bounds_path);
    verify_flags.bc = bc_kind == "dirichlet" ? phibvp::oracle::BcKind::Dirichlet
                                             : phibvp::oracle::BcKind::SturmLiouville;
    return phibvp::cli::cmd_verify(verify_flags);
}
