#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_helpers.hpp"
#include "wernerlab/operators.hpp"
#include "wernerlab/sdp.hpp"
#include "wernerlab/sdp_json.hpp"
#include "wernerlab/werner.hpp"

using namespace wernerlab;
using Catch::Approx;

namespace {

// min Tr(W1(beta) pi) over the one-copy state simplex with the partial
// transpose kept positive. Built by hand here so the solver tests stay
// independent of the certification module.
LmiProblem one_copy_ppt_problem(double beta) {
    const auto basis = basis_full(1, 3);
    const auto split = party_a_split(4);
    LmiProblem p;
    p.num_vars = 4;
    p.objective.resize(4);
    const double a = (1.0 + 3.0 * beta) / (9.0 + 3.0 * beta);
    const double b = 1.0 / (9.0 + 3.0 * beta);
    p.objective << a, b, 0.0, 0.0;  // Tr(W1 B_i)/Tr(B_i)
    LinearEquality eq;
    eq.a = Eigen::VectorXd::Ones(4);
    eq.b = 1.0;
    p.equalities.push_back(eq);
    p.lower_bounds = Eigen::VectorXd::Zero(4);
    LmiBlock ppt;
    ppt.dim = 36;
    for (int i = 0; i < 4; ++i) {
        const auto bt = partial_transpose(
            scaled(1.0 / basis->traces[i], basis->element(i)), split);
        ppt.terms.push_back({i, ConstraintMatrix::from_dense(bt.mat)});
    }
    p.blocks.push_back(std::move(ppt));
    return p;
}

}  // namespace

TEST_CASE("scalar block", "[sdp]") {
    LmiProblem p;
    p.num_vars = 1;
    p.objective = Eigen::VectorXd::Ones(1);
    LmiBlock blk;
    blk.dim = 1;
    blk.terms.push_back({0, ConstraintMatrix::from_entries({{0, 0, 1.0}})});
    p.blocks.push_back(blk);
    const auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    REQUIRE(sol.objective == Approx(0.0).margin(1e-8));
}

TEST_CASE("line family as a one-variable LMI", "[sdp]") {
    // pi(p) = (1-p) B1 + p B4/24, partial transpose positive: the minimal p is
    // 6/7, from the sector equation -(1-p)/6 + p/36 = 0.
    const auto basis = basis_full(1, 3);
    const auto split = party_a_split(4);
    const auto s0 = partial_transpose(basis->element(0), split);
    const auto s1 = partial_transpose(scaled(1.0 / 24.0, basis->element(3)), split);

    LmiProblem p;
    p.num_vars = 1;
    p.objective = Eigen::VectorXd::Ones(1);
    LmiBlock blk;
    blk.dim = 36;
    blk.a0 = s0.mat;
    blk.terms.push_back({0, ConstraintMatrix::from_dense(s1.mat - s0.mat)});
    p.blocks.push_back(blk);

    const auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    REQUIRE(sol.used_phase1);  // 0 is not feasible, an interior point is found
    REQUIRE(sol.x(0) == Approx(6.0 / 7.0).margin(1e-7));
    REQUIRE(sol.residuals.duality_gap <= 1e-9);

    const auto report = check_solution(p, sol.x);
    REQUIRE(report.feasible(1e-8));
}

TEST_CASE("most-detected ppt state is beta independent", "[sdp]") {
    Eigen::VectorXd reference;
    for (double beta : {-1.0, -0.8, -0.6, -0.51}) {
        const auto p = one_copy_ppt_problem(beta);
        const auto sol = solve(p);
        REQUIRE(sol.status == SolveStatus::Optimal);
        // optimizer: (1/7, 0, 0, 6/7)
        REQUIRE(sol.x(0) == Approx(1.0 / 7.0).margin(1e-6));
        REQUIRE(sol.x(1) == Approx(0.0).margin(1e-6));
        REQUIRE(sol.x(2) == Approx(0.0).margin(1e-6));
        REQUIRE(sol.x(3) == Approx(6.0 / 7.0).margin(1e-6));
        // value: a(beta)/7
        const double a = (1.0 + 3.0 * beta) / (9.0 + 3.0 * beta);
        REQUIRE(sol.objective == Approx(a / 7.0).margin(1e-8));
        if (reference.size() == 0)
            reference = sol.x;
        else
            REQUIRE((sol.x - reference).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("random problems against the grid oracle", "[sdp]") {
    int solved = 0;
    for (int trial = 0; trial < 12; ++trial) {
        Rng rng(5000 + trial);
        const auto p = testutil::random_lmi_problem(rng);
        const auto sol = solve(p);
        REQUIRE(sol.status == SolveStatus::Optimal);
        const double oracle = testutil::grid_search_minimum(p);
        REQUIRE(sol.objective == Approx(oracle).margin(1e-5));
        REQUIRE(check_solution(p, sol.x).feasible(1e-7));
        ++solved;
    }
    REQUIRE(solved == 12);
}

TEST_CASE("weak duality and dual bound", "[sdp]") {
    for (int trial = 0; trial < 4; ++trial) {
        Rng rng(5200 + trial);
        auto p = testutil::random_lmi_problem(rng);
        // move the box into explicit blocks so the dual bound below uses the
        // full block list reported in the solution
        for (int k = 0; k < p.num_vars; ++k) {
            LmiBlock lo;
            lo.dim = 1;
            lo.a0 = Eigen::MatrixXcd::Constant(1, 1, 1.0);
            lo.terms.push_back({k, ConstraintMatrix::from_entries({{0, 0, 1.0}})});
            p.blocks.push_back(lo);
            LmiBlock hi;
            hi.dim = 1;
            hi.a0 = Eigen::MatrixXcd::Constant(1, 1, 1.0);
            hi.terms.push_back({k, ConstraintMatrix::from_entries({{0, 0, -1.0}})});
            p.blocks.push_back(hi);
        }
        p.lower_bounds.resize(0);
        p.upper_bounds.resize(0);
        const auto sol = solve(p);
        REQUIRE(sol.status == SolveStatus::Optimal);
        double dual_obj = 0.0;
        for (size_t b = 0; b < p.blocks.size(); ++b)
            if (p.blocks[b].a0.size())
                dual_obj -= p.blocks[b]
                                .a0.cwiseProduct(sol.block_duals[b].transpose())
                                .sum()
                                .real();
        REQUIRE(dual_obj <= sol.objective + 1e-7);  // weak duality
        REQUIRE(sol.objective - dual_obj <= 1e-6);  // certified gap
    }
}

TEST_CASE("invariance under block permutation and redundancy", "[sdp]") {
    Rng rng(5300);
    const auto p = testutil::random_lmi_problem(rng);
    const auto base = solve(p);
    REQUIRE(base.status == SolveStatus::Optimal);

    LmiProblem reversed = p;
    std::reverse(reversed.blocks.begin(), reversed.blocks.end());
    const auto rev = solve(reversed);
    REQUIRE(rev.status == SolveStatus::Optimal);
    REQUIRE(rev.objective == Approx(base.objective).margin(10 * 1e-9));

    LmiProblem padded = p;
    padded.blocks.push_back(p.blocks.front());
    const auto pad = solve(padded);
    REQUIRE(pad.status == SolveStatus::Optimal);
    REQUIRE(pad.objective == Approx(base.objective).margin(10 * 1e-9));
}

TEST_CASE("complex blocks against the real embedding", "[sdp]") {
    for (int trial = 0; trial < 4; ++trial) {
        Rng rng(5400 + trial);
        const auto p = testutil::random_lmi_problem(rng);
        const auto direct = solve(p);
        const auto embedded = solve(testutil::real_embedding(p));
        REQUIRE(direct.status == SolveStatus::Optimal);
        REQUIRE(embedded.status == SolveStatus::Optimal);
        REQUIRE((direct.x - embedded.x).cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("check_solution flags violations", "[sdp]") {
    LmiProblem p;
    p.num_vars = 1;
    p.objective = Eigen::VectorXd::Ones(1);
    LmiBlock blk;
    blk.dim = 2;
    blk.a0 = Eigen::MatrixXcd::Identity(2, 2);
    blk.terms.push_back(
        {0, ConstraintMatrix::from_entries({{0, 0, 1.0}, {1, 1, -1.0}})});
    p.blocks.push_back(blk);

    Eigen::VectorXd ok(1), bad(1);
    ok << 0.0;
    bad << 2.0;
    REQUIRE(check_solution(p, ok).feasible(1e-10));
    const auto rep = check_solution(p, bad);
    REQUIRE_FALSE(rep.feasible(1e-10));
    REQUIRE(rep.block_min_eigenvalues[0] == Approx(-1.0).margin(1e-12));
}

TEST_CASE("infeasibility certificate", "[sdp]") {
    // x >= 1 and x <= 0 cannot hold together; phase I ends at t* = 1/2
    LmiProblem p;
    p.num_vars = 1;
    p.objective = Eigen::VectorXd::Zero(1);
    LmiBlock ge;
    ge.dim = 1;
    ge.a0 = Eigen::MatrixXcd::Constant(1, 1, -1.0);
    ge.terms.push_back({0, ConstraintMatrix::from_entries({{0, 0, 1.0}})});
    p.blocks.push_back(ge);
    LmiBlock le;
    le.dim = 1;
    le.terms.push_back({0, ConstraintMatrix::from_entries({{0, 0, -1.0}})});
    p.blocks.push_back(le);
    const auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("warm start skips phase one", "[sdp]") {
    const auto p = one_copy_ppt_problem(-0.5);
    SolverSettings settings;
    settings.initial_point.resize(4);
    const auto basis = basis_full(1, 3);
    for (int i = 0; i < 4; ++i) settings.initial_point(i) = basis->traces[i] / 36.0;
    const auto sol = solve(p, settings);
    REQUIRE(sol.status == SolveStatus::Optimal);
    REQUIRE_FALSE(sol.used_phase1);
    REQUIRE(sol.x(3) == Approx(6.0 / 7.0).margin(1e-6));
}

TEST_CASE("json round trip", "[sdp]") {
    Rng rng(5500);
    const auto p = testutil::random_lmi_problem(rng);
    const auto j = lmi_to_json(p);
    const auto q = lmi_from_json(j);
    REQUIRE(q.num_vars == p.num_vars);
    REQUIRE((q.objective - p.objective).norm() == 0.0);
    const auto sp = solve(p);
    const auto sq = solve(q);
    REQUIRE(sp.objective == Approx(sq.objective).margin(1e-10));

    // serialization is loss-free for dense content
    for (size_t b = 0; b < p.blocks.size(); ++b)
        for (size_t t = 0; t < p.blocks[b].terms.size(); ++t)
            REQUIRE((p.blocks[b].terms[t].mat.to_dense(p.blocks[b].dim) -
                     q.blocks[b].terms[t].mat.to_dense(q.blocks[b].dim))
                        .norm() == 0.0);

    REQUIRE_THROWS_AS(lmi_from_json(nlohmann::json{{"schema", "other"}}),
                      std::invalid_argument);
}

TEST_CASE("problem validation", "[sdp]") {
    LmiProblem p;
    p.num_vars = 1;
    p.objective = Eigen::VectorXd::Zero(1);
    REQUIRE_THROWS_AS(solve(p), std::invalid_argument);  // no conic constraints

    LmiBlock blk;
    blk.dim = 1;
    blk.terms.push_back({0, ConstraintMatrix::from_entries({{0, 0, 1.0}})});
    blk.terms.push_back({0, ConstraintMatrix::from_entries({{0, 0, 1.0}})});
    p.blocks.push_back(blk);
    REQUIRE_THROWS_AS(solve(p), std::invalid_argument);  // duplicate variable
}
