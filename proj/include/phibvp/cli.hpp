#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "phibvp/apriori.hpp"
#include "phibvp/io.hpp"
#include "phibvp/oracle.hpp"
#include "phibvp/solver.hpp"

namespace phibvp::cli {

enum ExitCode : int {
    kOk = 0,
    kNonConvergence = 2,  // also: verification threshold missed
    kInvalidProblem = 3,
    kParseError = 4,
};

struct SolveFlags {
    std::optional<int> n;
    std::optional<double> tol;
    std::optional<double> theta;
    std::filesystem::path out_csv;  // empty: CSV to stdout
    std::filesystem::path summary;  // empty: no summary file
    bool check = false;             // cross-check against the shooting oracle
};

struct ValidationReport {
    AssumptionReport phi;
    SignCheck sign;
    GrowthCheck growth;
    bool ok() const { return phi.all_pass() && sign.ok && growth.ok; }

    // First failing check, as a field-qualified message.
    std::string failure() const {
        std::ostringstream os;
        if (!phi.zero_conditions) os << "phi: Phi(0) or phi(0) is nonzero";
        else if (!phi.monotone) os << "phi: phi is not increasing near x=" << phi.monotone_witness;
        else if (!phi.nabla2) {
            os << "phi.k_phi: k_phi Phi(x) <= phi(x) x fails at x=" << phi.nabla2_witness
               << " (gap " << phi.nabla2_worst_gap << ")";
        } else if (!phi.psi_roundtrip) {
            os << "phi: psi(phi(x)) round-trip error " << phi.psi_roundtrip_max_error;
        } else if (!sign.ok) {
            os << "f.expr: sign condition x f(t,x,0) > 0 fails at t=" << sign.witness_t
               << ", x=" << sign.witness_x;
            if (!sign.error.empty()) os << " (" << sign.error << ")";
        } else if (!growth.ok) {
            os << "f.T0: growth bound |f| <= S0 (phi(v)v - Phi(v)) + T0 fails at (t,x,v)=("
               << growth.witness_t << ", " << growth.witness_x << ", " << growth.witness_v << ")";
            if (!growth.error.empty()) {
                os << " (" << growth.error << ")";
            } else {
                os << "; smallest passing T0 for this S0 is " << growth.min_T0;
            }
        }
        return os.str();
    }
};

// 10^3 log-spaced magnitudes in [1e-3, 1e3], both signs, plus zero.
inline std::vector<double> phi_sample_points(int count = 1000) {
    std::vector<double> xs{0.0};
    for (int i = 0; i < count; ++i) {
        const double x = std::pow(10.0, -3.0 + 6.0 * i / (count - 1));
        xs.push_back(x);
        xs.push_back(-x);
    }
    return xs;
}

inline ValidationReport validate(const ProblemInstance& p, const BoundCertificate& cert) {
    ValidationReport rep;
    const auto xs = phi_sample_points();
    rep.phi = check_assumptions(p.phi, xs);
    rep.sign = check_sign_condition(p, 21, 20);
    std::optional<double> v_box = p.f.v_box;
    if (!v_box && std::isfinite(cert.r1) && cert.r1 > 0.0) v_box = cert.r1;
    rep.growth = estimate_growth_constants(p, cert.r0, 4096, v_box);
    return rep;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline io::json empty_summary(const std::string& problem) {
    using io::json;
    return {{"problem", problem},
            {"status", nullptr},
            {"exit_code", nullptr},
            {"message", ""},
            {"grid_n", nullptr},
            {"lambda_reached", nullptr},
            {"fixpoint_residual", nullptr},
            {"strong_residual", nullptr},
            {"bc_residuals", nullptr},
            {"picard_iters_total", nullptr},
            {"continuation_stages", nullptr},
            {"certificate", nullptr},
            {"certify", nullptr},
            {"assumption_report", nullptr},
            {"oracle", nullptr},
            {"timings", json::object()}};
}

}  // namespace detail

/**
 * validate -> certificate -> continuation solve -> (optional) oracle check.
 * The summary, when requested, is written for every outcome.
 */
inline int cmd_solve(const std::filesystem::path& path, const SolveFlags& flags,
                     std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    const auto t_start = detail::Clock::now();
    io::json summary = detail::empty_summary(path.string());

    auto finish = [&](int code, const char* status, const std::string& message) {
        summary["status"] = status;
        summary["exit_code"] = code;
        summary["message"] = message;
        summary["timings"]["total_s"] = detail::seconds_since(t_start);
        if (!message.empty()) err << "phibvp: " << message << "\n";
        if (!flags.summary.empty()) {
            try {
                io::write_atomically(flags.summary, summary.dump(2) + "\n");
            } catch (const std::exception& e) {
                err << "phibvp: " << e.what() << "\n";
            }
        }
        return code;
    };

    std::optional<io::LoadedProblem> loaded;
    try {
        loaded = io::load_problem(path);
        if (flags.n) loaded->problem = loaded->problem.with_grid(*flags.n);
        if (flags.tol) loaded->solver.fixpoint_tol = *flags.tol;
        if (flags.theta) loaded->solver.theta = *flags.theta;
        loaded->solver.validate();
    } catch (const ParseError& e) {
        return finish(kParseError, "parse_error", e.what());
    } catch (const InvalidProblem& e) {
        return finish(kInvalidProblem, "invalid_problem", e.what());
    }
    const ProblemInstance& p = loaded->problem;
    summary["grid_n"] = p.grid_n;

    const auto t_validate = detail::Clock::now();
    const BoundCertificate cert = compute_certificate(p);
    summary["certificate"] = io::to_json(cert);
    const ValidationReport rep = validate(p, cert);
    summary["assumption_report"] = {{"phi", io::to_json(rep.phi)},
                                    {"sign_condition", io::to_json(rep.sign)},
                                    {"growth", io::to_json(rep.growth)},
                                    {"pass", rep.ok()}};
    summary["timings"]["validate_s"] = detail::seconds_since(t_validate);
    if (!rep.ok()) return finish(kInvalidProblem, "invalid_problem", rep.failure());

    const auto t_solve = detail::Clock::now();
    Solution sol;
    try {
        sol = solve(p, loaded->solver);
    } catch (const NonConvergence& e) {
        summary["lambda_reached"] = e.lambda_reached();
        summary["fixpoint_residual"] = e.last_residual();
        summary["timings"]["solve_s"] = detail::seconds_since(t_solve);
        return finish(kNonConvergence, "non_convergence", e.what());
    } catch (const InvalidProblem& e) {
        return finish(kInvalidProblem, "invalid_problem", e.what());
    }
    summary["timings"]["solve_s"] = detail::seconds_since(t_solve);
    summary["lambda_reached"] = sol.lambda_reached;
    summary["fixpoint_residual"] = sol.fixpoint_residual;
    summary["strong_residual"] = sol.strong_residual;
    summary["bc_residuals"] = {{"left", sol.bc.left}, {"right", sol.bc.right}};
    summary["picard_iters_total"] = sol.picard_iters_total;
    summary["continuation_stages"] = sol.stages;
    const CertReport cr = certify(sol.u, cert);
    summary["certify"] = io::to_json(cr);

    std::ostringstream csv;
    write_csv(csv, sol.u);
    try {
        if (flags.out_csv.empty()) {
            out << csv.str();
        } else {
            io::write_atomically(flags.out_csv, csv.str());
        }
    } catch (const std::exception& e) {
        return finish(kInvalidProblem, "io_error", e.what());
    }

    if (flags.check) {
        const auto t_oracle = detail::Clock::now();
        try {
            const auto shot = oracle::shooting_solve(p, sol.lambda_reached);
            const auto cmp = oracle::compare(sol.u, shot.u);
            const bool agree = cmp.sup_err_u <= 1e-3;
            summary["oracle"] = {{"ran", true},
                                 {"sup_err_u", cmp.sup_err_u},
                                 {"sup_err_du", cmp.sup_err_du},
                                 {"free_param", shot.free_param},
                                 {"bc_residual", shot.bc_residual},
                                 {"rk4_steps", shot.rk4_steps},
                                 {"agree", agree},
                                 {"threshold", 1e-3}};
            summary["timings"]["oracle_s"] = detail::seconds_since(t_oracle);
            if (!agree) {
                return finish(kNonConvergence, "oracle_mismatch",
                              "solver and shooting oracle differ by " +
                                  std::to_string(cmp.sup_err_u));
            }
        } catch (const Error& e) {
            summary["oracle"] = {{"ran", false}, {"reason", e.what()}};
        }
    }
    return finish(kOk, "ok", "");
}

inline int cmd_bounds(const std::filesystem::path& path, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
    std::optional<io::LoadedProblem> loaded;
    try {
        loaded = io::load_problem(path);
    } catch (const ParseError& e) {
        err << "phibvp: " << e.what() << "\n";
        return kParseError;
    } catch (const InvalidProblem& e) {
        err << "phibvp: " << e.what() << "\n";
        return kInvalidProblem;
    }
    const BoundCertificate c = compute_certificate(loaded->problem);
    char buf[64];
    auto line = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << key << "=" << buf << "\n";
    };
    line("r0", c.r0);
    line("r1", c.r1);
    line("C", c.C);
    line("C0", c.C0);
    line("E", c.E);
    line("k_phi", c.k_phi);
    line("S0", c.s0_used);
    line("T0", c.t0_used);
    out << "branch=" << to_string(c.branch) << "\n";
    out << "degenerate=" << (c.degenerate ? "true" : "false") << "\n";
    return kOk;
}

struct VerifyRow {
    int n = 0;
    double err_u = 0.0;
    double err_du = 0.0;
    double order = NAN;  // observed order against the previous row
    bool converged = true;
};

struct VerifyFlags {
    std::string profile = "sin";
    double p_exponent = 2.0;
    std::vector<int> n_list = {50, 100, 200};
    oracle::BcKind bc = oracle::BcKind::Dirichlet;
};

inline double verify_threshold(double p_exponent) { return p_exponent == 2.0 ? 5e-4 : 5e-3; }

/**
 * Convergence study on a manufactured profile: one solve per n, compared
 * against the exact profile. Grid sizes run concurrently.
 */
inline int cmd_verify(const VerifyFlags& flags, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
    const auto profile = oracle::Profile::by_name(flags.profile);
    if (!profile) {
        err << "phibvp: unknown profile '" << flags.profile << "'\n";
        return kInvalidProblem;
    }
    if (flags.n_list.empty()) {
        err << "phibvp: empty n list\n";
        return kInvalidProblem;
    }
    std::vector<oracle::ManufacturedProblem> problems;
    try {
        const PhiModel phi = PhiModel::power_sum({flags.p_exponent});
        for (int n : flags.n_list) {
            problems.push_back(oracle::manufactured_problem(phi, *profile, flags.bc, n));
        }
    } catch (const InvalidProblem& e) {
        err << "phibvp: " << e.what() << "\n";
        return kInvalidProblem;
    }

    std::vector<std::future<VerifyRow>> jobs;
    for (const auto& mp : problems) {
        jobs.push_back(std::async(std::launch::async, [&mp] {
            VerifyRow row;
            row.n = mp.problem.grid_n;
            try {
                const Solution sol = solve(mp.problem);
                const auto cmp = oracle::compare(sol.u, mp.exact);
                row.err_u = cmp.sup_err_u;
                row.err_du = cmp.sup_err_du;
            } catch (const NonConvergence&) {
                row.converged = false;
                row.err_u = row.err_du = HUGE_VAL;
            }
            return row;
        }));
    }
    std::vector<VerifyRow> rows;
    for (auto& j : jobs) rows.push_back(j.get());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].converged && rows[i - 1].converged && rows[i].err_u > 0.0) {
            rows[i].order = std::log(rows[i - 1].err_u / rows[i].err_u) /
                            std::log(static_cast<double>(rows[i].n) / rows[i - 1].n);
        }
    }

    char buf[128];
    out << "# profile=" << profile->name() << " p=" << flags.p_exponent
        << " bc=" << (flags.bc == oracle::BcKind::Dirichlet ? "dirichlet" : "sturm_liouville")
        << (problems.front().problem.singular_at_zero ? " endpoint=flagged" : "") << "\n";
    out << "n,sup_err_u,sup_err_du,order\n";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.6e,%.6e,%s", r.n, r.err_u, r.err_du,
                      std::isnan(r.order) ? "nan" : std::to_string(r.order).c_str());
        out << buf << "\n";
    }
    const double threshold = verify_threshold(flags.p_exponent);
    const bool ok = rows.back().converged && rows.back().err_u <= threshold;
    if (!ok) {
        err << "phibvp: final error " << rows.back().err_u << " exceeds " << threshold << "\n";
    }
    return ok ? kOk : kNonConvergence;
}

}  // namespace phibvp::cli
