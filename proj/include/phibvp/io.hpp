#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "phibvp/apriori.hpp"
#include "phibvp/errors.hpp"
#include "phibvp/phi_model.hpp"
#include "phibvp/problem.hpp"
#include "phibvp/solver.hpp"

// Problem files (JSON) -> ProblemInstance + SolverConfig. Schema reference:
// docs/problem-schema.md. Type and range errors carry the dotted field path.

namespace phibvp::io {

using json = nlohmann::json;

struct LoadedProblem {
    ProblemInstance problem;
    SolverConfig solver;
};

namespace detail {

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw InvalidProblem(path + key, "required field is missing");
    }
    return obj.at(key);
}

inline double number(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number()) throw InvalidProblem(path + key, "expected a number");
    return v.get<double>();
}

inline std::optional<double> opt_number(const json& obj, const std::string& key,
                                        const std::string& path) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return number(obj, key, path);
}

inline std::vector<double> numbers(const json& obj, const std::string& key,
                                   const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_array()) throw InvalidProblem(path + key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) {
            throw InvalidProblem(path + key + "[" + std::to_string(i) + "]", "expected a number");
        }
        out.push_back(v[i].get<double>());
    }
    return out;
}

inline const json& section(const json& root, const std::string& key) {
    const json& v = require(root, key, "");
    if (!v.is_object()) throw InvalidProblem(key, "expected an object");
    return v;
}

}  // namespace detail

inline LoadedProblem problem_from_json(const json& root) {
    using namespace detail;
    if (!root.is_object()) throw InvalidProblem("", "problem file must hold a JSON object");

    const json& jphi = section(root, "phi");
    std::vector<double> weights;
    if (jphi.contains("weights") && !jphi.at("weights").is_null()) {
        weights = numbers(jphi, "weights", "phi.");
    }
    PhiModel phi(PhiSpec::power_sum(numbers(jphi, "exponents", "phi."), std::move(weights)),
                 opt_number(jphi, "k_phi", "phi."));

    const json& jbc = section(root, "bc");
    const json& kind = require(jbc, "kind", "bc.");
    if (!kind.is_string()) throw InvalidProblem("bc.kind", "expected a string");
    std::optional<BoundaryConditions> bc;
    if (kind == "dirichlet") {
        bc = BoundaryConditions::dirichlet(number(jbc, "A", "bc."), number(jbc, "B", "bc."));
    } else if (kind == "sturm_liouville") {
        bc = BoundaryConditions::sturm_liouville(
            number(jbc, "alpha", "bc."), number(jbc, "beta", "bc."), number(jbc, "A", "bc."),
            number(jbc, "a", "bc."), number(jbc, "b", "bc."), number(jbc, "B", "bc."));
    } else {
        throw InvalidProblem("bc.kind", "expected \"dirichlet\" or \"sturm_liouville\"");
    }

    const json& jf = section(root, "f");
    const json& src = require(jf, "expr", "f.");
    if (!src.is_string()) throw InvalidProblem("f.expr", "expected a string");
    RhsFunction f;
    try {
        f = RhsFunction::from_source(src.get<std::string>(), number(jf, "R", "f."),
                                     number(jf, "S0", "f."), number(jf, "T0", "f."),
                                     opt_number(jf, "v_box", "f."));
    } catch (const ParseError& e) {
        throw ParseError(e.position(), "f.expr: " + e.message(), e.found());
    }
    bool singular = false;
    if (jf.contains("singular_at_zero")) {
        if (!jf.at("singular_at_zero").is_boolean()) {
            throw InvalidProblem("f.singular_at_zero", "expected a boolean");
        }
        singular = jf.at("singular_at_zero").get<bool>();
    }

    int grid_n = ProblemInstance::kDefaultGridN;
    if (root.contains("grid_n")) {
        const json& g = root.at("grid_n");
        if (!g.is_number_integer()) throw InvalidProblem("grid_n", "expected an integer");
        grid_n = g.get<int>();
    }

    SolverConfig cfg;
    if (root.contains("solver")) {
        const json& js = section(root, "solver");
        cfg.theta = opt_number(js, "theta", "solver.").value_or(cfg.theta);
        cfg.fixpoint_tol = opt_number(js, "fixpoint_tol", "solver.").value_or(cfg.fixpoint_tol);
        if (js.contains("max_picard_iters")) {
            if (!js.at("max_picard_iters").is_number_integer()) {
                throw InvalidProblem("solver.max_picard_iters", "expected an integer");
            }
            cfg.max_picard_iters = js.at("max_picard_iters").get<int>();
        }
        cfg.lambda_step0 = opt_number(js, "lambda_step0", "solver.").value_or(cfg.lambda_step0);
        cfg.lambda_step_min =
            opt_number(js, "lambda_step_min", "solver.").value_or(cfg.lambda_step_min);
        cfg.validate();
    }

    return {ProblemInstance(std::move(phi), *bc, std::move(f), grid_n, singular), cfg};
}

// Throws ParseError for malformed JSON and InvalidProblem for schema violations.
inline LoadedProblem load_problem(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidProblem("", "cannot read problem file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.byte == 0 ? 0 : e.byte - 1, std::string("invalid JSON: ") + e.what(),
                         {});
    }
    return problem_from_json(root);
}

inline json to_json(const BoundCertificate& c) {
    return {{"r0", c.r0},
            {"r1", std::isfinite(c.r1) ? json(c.r1) : json(nullptr)},
            {"C", c.C},
            {"C0", c.C0},
            {"E", std::isfinite(c.E) ? json(c.E) : json(nullptr)},
            {"k_phi", c.k_phi},
            {"s0_used", c.s0_used},
            {"t0_used", c.t0_used},
            {"branch", to_string(c.branch)},
            {"degenerate", c.degenerate}};
}

inline json to_json(const CertReport& r) {
    return {{"sup_u", r.sup_u},         {"sup_du", r.sup_du},
            {"r0", r.r0},               {"r1", std::isfinite(r.r1) ? json(r.r1) : json(nullptr)},
            {"u_ok", r.u_ok},           {"du_ok", r.du_ok},
            {"witness_t_u", r.witness_t_u}, {"witness_t_du", r.witness_t_du},
            {"slack", CertReport::kSlack}};
}

inline json to_json(const AssumptionReport& r) {
    return {{"zero_conditions", r.zero_conditions},
            {"monotone", r.monotone},
            {"nabla2", r.nabla2},
            {"nabla2_worst_gap", r.nabla2_worst_gap},
            {"nabla2_witness", r.nabla2_witness},
            {"psi_roundtrip", r.psi_roundtrip},
            {"psi_roundtrip_max_error", r.psi_roundtrip_max_error},
            {"superlinear", r.superlinear_assumed ? "assumed (power sum)" : "checked"},
            {"pass", r.all_pass()}};
}

inline json to_json(const SignCheck& s) {
    json j = {{"pass", s.ok}, {"status", "sampled on (R, 2R], not proven"}};
    if (!s.ok) {
        j["witness"] = {{"t", s.witness_t}, {"x", s.witness_x}};
        if (!s.error.empty()) j["error"] = s.error;
    }
    return j;
}

inline json to_json(const GrowthCheck& g) {
    json j = {{"pass", g.ok},        {"S0", g.S0},
              {"T0", g.T0},          {"r", g.r},
              {"v_box", g.v_box},    {"samples", g.samples},
              {"min_T0", g.min_T0},  {"status", "sampled, not proven"}};
    if (!g.ok) {
        j["witness"] = {{"t", g.witness_t}, {"x", g.witness_x}, {"v", g.witness_v},
                        {"excess", std::isfinite(g.witness_excess) ? json(g.witness_excess)
                                                                   : json(nullptr)}};
        if (!g.error.empty()) j["error"] = g.error;
    }
    return j;
}

// Writes `content` to a sibling temporary file, then renames it over `path`.
inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush()) throw Error("cannot write '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace phibvp::io
