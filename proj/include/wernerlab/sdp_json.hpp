// JSON import/export of LMI problems, for debugging and cross-solver
// comparison. Matrices are row-major lists of [re, im] pairs; sparse terms are
// materialized densely on export, so the format is self-contained.
//
// Schema "wernerlab-lmi/1":
// {
//   "schema": "wernerlab-lmi/1",
//   "num_vars": m,
//   "objective": [c_0, ...],
//   "objective_constant": v,
//   "equalities": [{"a": [...], "b": v}, ...],
//   "lower_bounds": [..] | null,      (null entries inside mean unbounded)
//   "upper_bounds": [..] | null,
//   "blocks": [{"dim": n,
//               "a0": [[re, im], ...] | null,
//               "terms": [{"var": k, "matrix": [[re, im], ...]}, ...]}]
// }
#pragma once

#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "wernerlab/sdp.hpp"

namespace wernerlab {

namespace jsondetail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            rows.push_back({m(i, j).real(), m(i, j).imag()});
    return rows;
}

inline Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j, int dim) {
    if (static_cast<int>(j.size()) != dim * dim)
        throw std::invalid_argument("lmi json: matrix entry count mismatch");
    Eigen::MatrixXcd m(dim, dim);
    int idx = 0;
    for (int i = 0; i < dim; ++i)
        for (int jj = 0; jj < dim; ++jj) {
            const auto& pair = j.at(idx++);
            m(i, jj) = Complex(pair.at(0).get<double>(), pair.at(1).get<double>());
        }
    return m;
}

inline nlohmann::json bounds_to_json(const Eigen::VectorXd& b) {
    if (b.size() == 0) return nullptr;
    nlohmann::json arr = nlohmann::json::array();
    for (int i = 0; i < b.size(); ++i) {
        if (std::isfinite(b(i)))
            arr.push_back(b(i));
        else
            arr.push_back(nullptr);
    }
    return arr;
}

inline Eigen::VectorXd bounds_from_json(const nlohmann::json& j, int m, double fill) {
    if (j.is_null()) return Eigen::VectorXd();
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) b(i) = j.at(i).is_null() ? fill : j.at(i).get<double>();
    return b;
}

}  // namespace jsondetail

inline nlohmann::json lmi_to_json(const LmiProblem& p) {
    nlohmann::json j;
    j["schema"] = "wernerlab-lmi/1";
    j["num_vars"] = p.num_vars;
    j["objective"] = std::vector<double>(p.objective.data(),
                                         p.objective.data() + p.objective.size());
    j["objective_constant"] = p.objective_constant;
    j["equalities"] = nlohmann::json::array();
    for (const auto& eq : p.equalities)
        j["equalities"].push_back(
            {{"a", std::vector<double>(eq.a.data(), eq.a.data() + eq.a.size())},
             {"b", eq.b}});
    j["lower_bounds"] = jsondetail::bounds_to_json(p.lower_bounds);
    j["upper_bounds"] = jsondetail::bounds_to_json(p.upper_bounds);
    j["blocks"] = nlohmann::json::array();
    for (const auto& blk : p.blocks) {
        nlohmann::json bj;
        bj["dim"] = blk.dim;
        bj["a0"] = blk.a0.size() ? jsondetail::matrix_to_json(blk.a0)
                                 : nlohmann::json(nullptr);
        bj["terms"] = nlohmann::json::array();
        for (const auto& t : blk.terms)
            bj["terms"].push_back(
                {{"var", t.var},
                 {"matrix", jsondetail::matrix_to_json(t.mat.to_dense(blk.dim))}});
        j["blocks"].push_back(std::move(bj));
    }
    return j;
}

inline LmiProblem lmi_from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "wernerlab-lmi/1")
        throw std::invalid_argument("lmi json: unknown schema");
    LmiProblem p;
    p.num_vars = j.at("num_vars").get<int>();
    const auto obj = j.at("objective");
    p.objective.resize(p.num_vars);
    for (int i = 0; i < p.num_vars; ++i) p.objective(i) = obj.at(i).get<double>();
    p.objective_constant = j.value("objective_constant", 0.0);
    for (const auto& eqj : j.at("equalities")) {
        LinearEquality eq;
        eq.a.resize(p.num_vars);
        for (int i = 0; i < p.num_vars; ++i) eq.a(i) = eqj.at("a").at(i).get<double>();
        eq.b = eqj.at("b").get<double>();
        p.equalities.push_back(std::move(eq));
    }
    const double inf = std::numeric_limits<double>::infinity();
    p.lower_bounds = jsondetail::bounds_from_json(j.at("lower_bounds"), p.num_vars, -inf);
    p.upper_bounds = jsondetail::bounds_from_json(j.at("upper_bounds"), p.num_vars, inf);
    for (const auto& bj : j.at("blocks")) {
        LmiBlock blk;
        blk.dim = bj.at("dim").get<int>();
        if (!bj.at("a0").is_null())
            blk.a0 = jsondetail::matrix_from_json(bj.at("a0"), blk.dim);
        for (const auto& tj : bj.at("terms")) {
            LmiTerm t;
            t.var = tj.at("var").get<int>();
            t.mat = ConstraintMatrix::from_dense(
                jsondetail::matrix_from_json(tj.at("matrix"), blk.dim));
            blk.terms.push_back(std::move(t));
        }
        p.blocks.push_back(std::move(blk));
    }
    p.validate();
    return p;
}

}  // namespace wernerlab
