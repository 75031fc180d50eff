// Linear objective over real variables subject to Hermitian linear-matrix-
// inequality blocks and linear equalities, solved by a primal-dual
// path-following interior-point method with HKM-style directions.
//
//   minimize    c.x
//   subject to  A0_b + sum_k x_k A_{bk}  >= 0   (each block b, Hermitian)
//               a_i.x = b_i                     (equalities)
//               lo <= x <= hi                   (optional bounds)
//
// Blocks keep S(x) = A0 + sum x_k A_k strictly positive along the iteration;
// a phase-I shift (minimize t with S(x) + t I >= 0) finds an interior point
// when none is supplied, and its optimum t* > 0 is the infeasibility
// certificate. Constraint matrices may be stored dense or as sparse entry
// lists; the Schur assembly dispatches on the pair so that problems with
// thousands of rank-structured constraints stay cheap.
//
// The solver is single-threaded and deterministic: identical problems give
// identical iterates, independent of how many solves run concurrently.
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "wernerlab/operators.hpp"

namespace wernerlab {

struct SolverSettings {
    double tolerance = 1e-9;
    int max_iterations = 200;
    double mu_reduction = 0.3;        // centering factor sigma
    double boundary_fraction = 0.98;  // fraction of the step to the cone boundary
    Eigen::VectorXd initial_point;    // optional interior start (empty = find one)
    bool verbose = false;
};

enum class SolveStatus { Optimal, MaxIterations, Infeasible, NumericalFailure };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::MaxIterations: return "max-iterations";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

struct SparseEntry {
    int row = 0;
    int col = 0;
    Complex val;
};

// One coefficient matrix, stored dense or as entries. Entries are literal
// matrix content (callers supply both (r,c) and (c,r) parts of a Hermitian
// matrix unless they coincide).
struct ConstraintMatrix {
    Eigen::MatrixXcd dense;
    std::vector<SparseEntry> entries;

    bool is_sparse() const { return dense.size() == 0; }

    static ConstraintMatrix from_dense(Eigen::MatrixXcd m) {
        ConstraintMatrix c;
        c.dense = std::move(m);
        return c;
    }

    static ConstraintMatrix from_entries(std::vector<SparseEntry> e) {
        ConstraintMatrix c;
        c.entries = std::move(e);
        return c;
    }

    void accumulate(Eigen::MatrixXcd& target, double scale) const {
        if (is_sparse()) {
            for (const auto& e : entries) target(e.row, e.col) += scale * e.val;
        } else {
            target += scale * dense;
        }
    }

    Eigen::MatrixXcd to_dense(int dim) const {
        if (!is_sparse()) return dense;
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
        for (const auto& e : entries) m(e.row, e.col) += e.val;
        return m;
    }
};

struct LmiTerm {
    int var = 0;
    ConstraintMatrix mat;
};

struct LmiBlock {
    int dim = 0;
    Eigen::MatrixXcd a0;  // empty means zero
    std::vector<LmiTerm> terms;
};

struct LinearEquality {
    Eigen::VectorXd a;
    double b = 0.0;
};

struct LmiProblem {
    int num_vars = 0;
    Eigen::VectorXd objective;
    double objective_constant = 0.0;
    std::vector<LinearEquality> equalities;
    std::vector<LmiBlock> blocks;
    // Optional box; empty vectors mean unbounded. +-inf entries are free.
    Eigen::VectorXd lower_bounds;
    Eigen::VectorXd upper_bounds;

    void validate() const {
        if (num_vars <= 0) throw std::invalid_argument("lmi problem: no variables");
        if (objective.size() != num_vars)
            throw std::invalid_argument("lmi problem: objective size mismatch");
        for (const auto& eq : equalities)
            if (eq.a.size() != num_vars)
                throw std::invalid_argument("lmi problem: equality row size mismatch");
        if (lower_bounds.size() != 0 && lower_bounds.size() != num_vars)
            throw std::invalid_argument("lmi problem: lower bound size mismatch");
        if (upper_bounds.size() != 0 && upper_bounds.size() != num_vars)
            throw std::invalid_argument("lmi problem: upper bound size mismatch");
        for (const auto& blk : blocks) {
            if (blk.dim <= 0) throw std::invalid_argument("lmi problem: empty block");
            if (blk.a0.size() != 0 && (blk.a0.rows() != blk.dim || blk.a0.cols() != blk.dim))
                throw std::invalid_argument("lmi problem: a0 size mismatch");
            std::vector<bool> seen(num_vars, false);
            for (const auto& t : blk.terms) {
                if (t.var < 0 || t.var >= num_vars)
                    throw std::invalid_argument("lmi problem: term variable out of range");
                if (seen[t.var])
                    throw std::invalid_argument(
                        "lmi problem: variable appears twice in one block");
                seen[t.var] = true;
                if (!t.mat.is_sparse() &&
                    (t.mat.dense.rows() != blk.dim || t.mat.dense.cols() != blk.dim))
                    throw std::invalid_argument("lmi problem: term size mismatch");
                for (const auto& e : t.mat.entries)
                    if (e.row < 0 || e.row >= blk.dim || e.col < 0 || e.col >= blk.dim)
                        throw std::invalid_argument("lmi problem: sparse entry out of range");
            }
        }
    }
};

struct SdpResiduals {
    double primal_infeasibility = 0.0;  // relative equality violation
    double dual_infeasibility = 0.0;    // relative stationarity violation
    double duality_gap = 0.0;           // relative primal-dual objective gap
    double complementarity = 0.0;       // total Tr(S Z), absolute
};

struct SdpSolution {
    Eigen::VectorXd x;
    double objective = 0.0;
    SolveStatus status = SolveStatus::NumericalFailure;
    int iterations = 0;
    SdpResiduals residuals;
    // Dual matrices: user blocks in order, then bound blocks (all lower bounds
    // by variable index, then all upper bounds).
    std::vector<Eigen::MatrixXcd> block_duals;
    Eigen::VectorXd equality_duals;
    bool used_phase1 = false;
    std::string note;
};

namespace sdpdetail {

inline bool is_finite(double v) { return std::isfinite(v); }

struct BlockWork {
    int dim = 0;
    const LmiBlock* spec = nullptr;
    Eigen::MatrixXcd s, z, x_inv, ds, dz;
    Eigen::LLT<Eigen::MatrixXcd> llt;
};

inline void assemble(const LmiBlock& blk, const Eigen::VectorXd& x,
                     Eigen::MatrixXcd& out) {
    out = blk.a0.size() ? blk.a0
                        : Eigen::MatrixXcd::Zero(blk.dim, blk.dim);
    for (const auto& t : blk.terms) t.mat.accumulate(out, x(t.var));
    out = ((out + out.adjoint()) / 2.0).eval();
}

// Largest step alpha with M + alpha D >= 0, given the factorization of M > 0.
inline double max_step(const Eigen::LLT<Eigen::MatrixXcd>& llt,
                       const Eigen::MatrixXcd& d) {
    const int n = static_cast<int>(d.rows());
    if (n == 1) {
        const double dv = d(0, 0).real();
        const double sv = (llt.matrixL()(0, 0) * llt.matrixL()(0, 0)).real();
        if (dv >= 0) return std::numeric_limits<double>::infinity();
        return -sv / dv;
    }
    Eigen::MatrixXcd y = llt.matrixL().solve(d);
    Eigen::MatrixXcd t = llt.matrixL().solve(y.adjoint()).adjoint();
    t = ((t + t.adjoint()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin >= -1e-16) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
}

// Adds this block's contribution to the Schur matrix and the vectors
// t_k = Tr(A_k S^-1) and az_k = Tr(A_k Z).
inline void schur_accumulate(const BlockWork& w, Eigen::MatrixXd& m,
                             Eigen::VectorXd& t_vec, Eigen::VectorXd& az_vec) {
    const auto& terms = w.spec->terms;
    const int nt = static_cast<int>(terms.size());
    const auto& x_inv = w.x_inv;
    const auto& z = w.z;

    std::vector<int> dense_ids, sparse_ids;
    dense_ids.reserve(nt);
    for (int k = 0; k < nt; ++k)
        (terms[k].mat.is_sparse() ? sparse_ids : dense_ids).push_back(k);

    // t and az for every term
    for (int k = 0; k < nt; ++k) {
        const auto& cm = terms[k].mat;
        double tk = 0.0, azk = 0.0;
        if (cm.is_sparse()) {
            for (const auto& e : cm.entries) {
                tk += (e.val * x_inv(e.col, e.row)).real();
                azk += (e.val * z(e.col, e.row)).real();
            }
        } else {
            tk = cm.dense.cwiseProduct(x_inv.transpose()).sum().real();
            azk = cm.dense.cwiseProduct(z.transpose()).sum().real();
        }
        t_vec(terms[k].var) += tk;
        az_vec(terms[k].var) += azk;
    }

    // dense x dense and dense x sparse via U_k = X A_k Z
    if (!dense_ids.empty()) {
        std::vector<Eigen::MatrixXcd> u(dense_ids.size());
        for (size_t a = 0; a < dense_ids.size(); ++a) {
            const auto& ak = terms[dense_ids[a]].mat.dense;
            u[a].noalias() = x_inv * ak;
            u[a] = (u[a] * z).eval();
        }
        for (size_t a = 0; a < dense_ids.size(); ++a) {
            const int ka = dense_ids[a];
            const int va = terms[ka].var;
            for (size_t b = a; b < dense_ids.size(); ++b) {
                const int kb = dense_ids[b];
                const int vb = terms[kb].var;
                const double mab =
                    terms[ka].mat.dense.cwiseProduct(u[b].transpose()).sum().real();
                m(va, vb) += mab;
                if (va != vb) m(vb, va) += mab;
            }
            for (int kb : sparse_ids) {
                const int vb = terms[kb].var;
                double mab = 0.0;
                for (const auto& e : terms[kb].mat.entries)
                    mab += (e.val * u[a](e.col, e.row)).real();
                // Re Tr(A_kb X A_ka Z) = Re Tr(A_ka X A_kb Z) for Hermitian
                // factors (the two traces are conjugates), so pairing the
                // sparse term against U of the dense one is enough.
                m(va, vb) += mab;
                if (va != vb) m(vb, va) += mab;
            }
        }
    }

    // sparse x sparse: Tr(A_j X A_k Z) = sum e in A_j, f in A_k
    //                  e.val f.val X(e.col, f.row) Z(f.col, e.row)
    for (size_t a = 0; a < sparse_ids.size(); ++a) {
        const int ka = sparse_ids[a];
        const int va = terms[ka].var;
        const auto& ea = terms[ka].mat.entries;
        for (size_t b = a; b < sparse_ids.size(); ++b) {
            const int kb = sparse_ids[b];
            const int vb = terms[kb].var;
            const auto& eb = terms[kb].mat.entries;
            double mab = 0.0;
            for (const auto& e : ea)
                for (const auto& f : eb)
                    mab += (e.val * f.val * x_inv(e.col, f.row) * z(f.col, e.row)).real();
            m(va, vb) += mab;
            if (va != vb) m(vb, va) += mab;
        }
    }
}

}  // namespace sdpdetail

// Recomputes feasibility of a point from scratch: per-block smallest
// eigenvalues and equality residuals. Deliberately a separate code path from
// the solver internals.
struct ResidualReport {
    std::vector<double> block_min_eigenvalues;
    std::vector<double> equality_residuals;
    double objective = 0.0;
    double worst_block = 0.0;  // most negative eigenvalue (0 if none)
    double worst_equality = 0.0;

    bool feasible(double tol) const {
        return worst_block >= -tol && worst_equality <= tol;
    }
};

inline ResidualReport check_solution(const LmiProblem& problem,
                                     const Eigen::VectorXd& x, double /*tol*/ = kPsdTol) {
    problem.validate();
    if (x.size() != problem.num_vars)
        throw std::invalid_argument("check_solution: point size mismatch");
    ResidualReport rep;
    rep.objective = problem.objective.dot(x) + problem.objective_constant;
    for (const auto& blk : problem.blocks) {
        Eigen::MatrixXcd s = blk.a0.size() ? blk.a0
                                           : Eigen::MatrixXcd::Zero(blk.dim, blk.dim);
        for (const auto& t : blk.terms) {
            Eigen::MatrixXcd m = t.mat.to_dense(blk.dim);
            s += x(t.var) * m;
        }
        s = ((s + s.adjoint()) / 2.0).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s, Eigen::EigenvaluesOnly);
        rep.block_min_eigenvalues.push_back(es.eigenvalues()(0));
    }
    if (problem.lower_bounds.size())
        for (int k = 0; k < problem.num_vars; ++k)
            if (std::isfinite(problem.lower_bounds(k)))
                rep.block_min_eigenvalues.push_back(x(k) - problem.lower_bounds(k));
    if (problem.upper_bounds.size())
        for (int k = 0; k < problem.num_vars; ++k)
            if (std::isfinite(problem.upper_bounds(k)))
                rep.block_min_eigenvalues.push_back(problem.upper_bounds(k) - x(k));
    for (const auto& eq : problem.equalities)
        rep.equality_residuals.push_back(std::abs(eq.a.dot(x) - eq.b));
    rep.worst_block = 0.0;
    for (double v : rep.block_min_eigenvalues) rep.worst_block = std::min(rep.worst_block, v);
    rep.worst_equality = 0.0;
    for (double v : rep.equality_residuals) rep.worst_equality = std::max(rep.worst_equality, v);
    return rep;
}

namespace sdpdetail {

struct CoreResult {
    Eigen::VectorXd x;
    Eigen::VectorXd w;  // equality multipliers
    SolveStatus status = SolveStatus::NumericalFailure;
    int iterations = 0;
    SdpResiduals residuals;
    std::vector<Eigen::MatrixXcd> duals;
    double objective = 0.0;
    std::string note;
    bool early_stopped = false;
};

// Expanded problem: explicit blocks only (bounds already folded in by solve()).
inline CoreResult solve_core(const std::vector<LmiBlock>& blocks,
                             const Eigen::VectorXd& c, double c_const,
                             const Eigen::MatrixXd& g, const Eigen::VectorXd& h,
                             const Eigen::VectorXd& x_start,
                             const SolverSettings& settings,
                             std::optional<double> early_stop_below) {
    const int m = static_cast<int>(c.size());
    const int p = static_cast<int>(g.rows());
    CoreResult res;
    res.x = x_start;
    res.w = Eigen::VectorXd::Zero(p);

    std::vector<BlockWork> work(blocks.size());
    long long n_total = 0;
    for (size_t b = 0; b < blocks.size(); ++b) {
        work[b].dim = blocks[b].dim;
        work[b].spec = &blocks[b];
        work[b].z = Eigen::MatrixXcd::Identity(blocks[b].dim, blocks[b].dim);
        n_total += blocks[b].dim;
    }

    const double c_scale = 1.0 + c.cwiseAbs().maxCoeff();
    const double h_scale = 1.0 + (p ? h.cwiseAbs().maxCoeff() : 0.0);
    double sigma = settings.mu_reduction;

    for (int iter = 0; iter < settings.max_iterations; ++iter) {
        res.iterations = iter;
        // assemble and factor S(x)
        for (auto& w_ : work) {
            assemble(*w_.spec, res.x, w_.s);
            w_.llt.compute(w_.s);
            if (w_.llt.info() != Eigen::Success) {
                res.note = "interior lost: block factorization failed";
                res.status = SolveStatus::NumericalFailure;
                res.objective = c.dot(res.x) + c_const;
                return res;
            }
            w_.x_inv = w_.llt.solve(
                Eigen::MatrixXcd::Identity(w_.dim, w_.dim));
            w_.x_inv = ((w_.x_inv + w_.x_inv.adjoint()) / 2.0).eval();
        }

        // residuals and convergence bookkeeping
        double mu_total = 0.0;
        double dual_obj = 0.0;
        for (auto& w_ : work) {
            mu_total += (w_.s * w_.z).trace().real();
            if (w_.spec->a0.size())
                dual_obj -= w_.spec->a0.cwiseProduct(w_.z.transpose()).sum().real();
        }
        dual_obj += (p ? h.dot(res.w) : 0.0) + c_const;
        const double primal_obj = c.dot(res.x) + c_const;

        Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd t_vec = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd az_vec = Eigen::VectorXd::Zero(m);
        for (auto& w_ : work) schur_accumulate(w_, schur, t_vec, az_vec);

        Eigen::VectorXd r_dual = c - az_vec;
        if (p) r_dual -= g.transpose() * res.w;

        double primal_inf = 0.0;
        for (int i = 0; i < p; ++i)
            primal_inf = std::max(primal_inf, std::abs(g.row(i).dot(res.x) - h(i)));

        res.residuals.primal_infeasibility = primal_inf / h_scale;
        res.residuals.dual_infeasibility = r_dual.cwiseAbs().maxCoeff() / c_scale;
        res.residuals.duality_gap =
            std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj) + std::abs(dual_obj));
        res.residuals.complementarity = mu_total;
        res.objective = primal_obj;

        if (settings.verbose) {
            std::fprintf(stderr,
                         "  it %3d  obj % .9e  gap %.2e  dinf %.2e  mu %.2e\n",
                         iter, primal_obj, res.residuals.duality_gap,
                         res.residuals.dual_infeasibility, mu_total);
        }

        if (early_stop_below && primal_obj < *early_stop_below) {
            res.status = SolveStatus::Optimal;  // caller reinterprets
            res.early_stopped = true;
            for (size_t b = 0; b < work.size(); ++b) res.duals.push_back(work[b].z);
            return res;
        }

        if (res.residuals.duality_gap <= settings.tolerance &&
            res.residuals.dual_infeasibility <= settings.tolerance &&
            res.residuals.primal_infeasibility <= settings.tolerance) {
            res.status = SolveStatus::Optimal;
            for (size_t b = 0; b < work.size(); ++b) res.duals.push_back(work[b].z);
            return res;
        }

        if (!is_finite(primal_obj) || res.x.cwiseAbs().maxCoeff() > 1e13) {
            res.status = SolveStatus::NumericalFailure;
            res.note = "iterates diverged (objective may be unbounded below)";
            return res;
        }

        // Newton direction
        const double mu = mu_total / static_cast<double>(n_total);
        const double mu_target = sigma * mu;
        Eigen::VectorXd rhs = mu_target * t_vec - c;
        if (p) rhs += g.transpose() * res.w;

        // regularized factorization of the Schur matrix
        double reg = 1e-12 * (1.0 + schur.diagonal().cwiseAbs().maxCoeff());
        Eigen::LLT<Eigen::MatrixXd> mllt;
        for (;;) {
            Eigen::MatrixXd reg_m = schur + reg * Eigen::MatrixXd::Identity(m, m);
            mllt.compute(reg_m);
            if (mllt.info() == Eigen::Success) break;
            reg *= 100.0;
            if (reg > 1e-2 * (1.0 + schur.diagonal().cwiseAbs().maxCoeff())) {
                res.status = SolveStatus::NumericalFailure;
                res.note = "Newton system not positive definite after regularization";
                for (size_t b = 0; b < work.size(); ++b) res.duals.push_back(work[b].z);
                return res;
            }
        }

        Eigen::VectorXd dx(m), dw;
        if (p) {
            // bordered system: [M -G^T; G 0] [dx; dw] = [rhs; -(Gx - h)]
            const Eigen::MatrixXd y = mllt.solve(g.transpose());
            const Eigen::MatrixXd eq_schur = g * y;
            Eigen::VectorXd rp = h - g * res.x;  // restore exact feasibility
            const Eigen::VectorXd m_rhs = mllt.solve(rhs);
            dw = eq_schur.ldlt().solve(rp - g * m_rhs);
            dx = m_rhs + y * dw;
        } else {
            dx = mllt.solve(rhs);
        }

        // direction in S and Z
        double alpha_p = std::numeric_limits<double>::infinity();
        double alpha_d = std::numeric_limits<double>::infinity();
        for (auto& w_ : work) {
            w_.ds = Eigen::MatrixXcd::Zero(w_.dim, w_.dim);
            for (const auto& t : w_.spec->terms) t.mat.accumulate(w_.ds, dx(t.var));
            w_.ds = ((w_.ds + w_.ds.adjoint()) / 2.0).eval();

            Eigen::MatrixXcd xdsz = w_.x_inv * w_.ds * w_.z;
            w_.dz = mu_target * w_.x_inv - w_.z - xdsz;
            w_.dz = ((w_.dz + w_.dz.adjoint()) / 2.0).eval();

            alpha_p = std::min(alpha_p, max_step(w_.llt, w_.ds));
            Eigen::LLT<Eigen::MatrixXcd> zllt(w_.z);
            if (zllt.info() != Eigen::Success) {
                res.status = SolveStatus::NumericalFailure;
                res.note = "dual iterate lost positive definiteness";
                return res;
            }
            alpha_d = std::min(alpha_d, max_step(zllt, w_.dz));
        }
        alpha_p = std::min(1.0, settings.boundary_fraction * alpha_p);
        alpha_d = std::min(1.0, settings.boundary_fraction * alpha_d);

        res.x += alpha_p * dx;
        for (auto& w_ : work) w_.z += alpha_d * w_.dz;
        if (p) res.w += alpha_d * dw;

        // stalling steps: recenter before shrinking mu again
        if (std::min(alpha_p, alpha_d) < 0.2)
            sigma = std::min(0.9, sigma + 0.3);
        else
            sigma = settings.mu_reduction;
    }

    res.status = SolveStatus::MaxIterations;
    for (size_t b = 0; b < work.size(); ++b) res.duals.push_back(work[b].z);
    return res;
}

}  // namespace sdpdetail

inline SdpSolution solve(const LmiProblem& problem, const SolverSettings& settings = {}) {
    problem.validate();
    const int m = problem.num_vars;

    // fold box bounds into 1x1 blocks
    std::vector<LmiBlock> blocks = problem.blocks;
    if (problem.lower_bounds.size())
        for (int k = 0; k < m; ++k)
            if (std::isfinite(problem.lower_bounds(k))) {
                LmiBlock b;
                b.dim = 1;
                b.a0 = Eigen::MatrixXcd::Constant(1, 1, -problem.lower_bounds(k));
                b.terms.push_back({k, ConstraintMatrix::from_entries({{0, 0, 1.0}})});
                blocks.push_back(std::move(b));
            }
    if (problem.upper_bounds.size())
        for (int k = 0; k < m; ++k)
            if (std::isfinite(problem.upper_bounds(k))) {
                LmiBlock b;
                b.dim = 1;
                b.a0 = Eigen::MatrixXcd::Constant(1, 1, problem.upper_bounds(k));
                b.terms.push_back({k, ConstraintMatrix::from_entries({{0, 0, -1.0}})});
                blocks.push_back(std::move(b));
            }

    if (blocks.empty())
        throw std::invalid_argument("lmi problem: no conic constraints");

    // equality data
    const int p = static_cast<int>(problem.equalities.size());
    Eigen::MatrixXd g(p, m);
    Eigen::VectorXd h(p);
    for (int i = 0; i < p; ++i) {
        g.row(i) = problem.equalities[i].a.transpose();
        h(i) = problem.equalities[i].b;
    }

    // starting point on the equality manifold
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(m);
    if (settings.initial_point.size()) {
        if (settings.initial_point.size() != m)
            throw std::invalid_argument("solver settings: initial point size mismatch");
        x0 = settings.initial_point;
    }
    if (p) {
        const Eigen::VectorXd correction =
            g.completeOrthogonalDecomposition().solve(h - g * x0);
        x0 += correction;
        if ((g * x0 - h).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + h.cwiseAbs().maxCoeff())) {
            SdpSolution s;
            s.status = SolveStatus::Infeasible;
            s.note = "inconsistent equality constraints";
            s.x = x0;
            return s;
        }
    }

    // interior margin at the start
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& blk : blocks) {
        Eigen::MatrixXcd s;
        sdpdetail::assemble(blk, x0, s);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s, Eigen::EigenvaluesOnly);
        margin = std::min(margin, es.eigenvalues()(0));
    }

    SdpSolution out;
    if (margin < 1e-8) {
        // phase I: add t on every block and minimize it
        std::vector<LmiBlock> ph_blocks = blocks;
        for (auto& blk : ph_blocks) {
            std::vector<SparseEntry> diag;
            for (int i = 0; i < blk.dim; ++i) diag.push_back({i, i, 1.0});
            blk.terms.push_back({m, ConstraintMatrix::from_entries(std::move(diag))});
        }
        Eigen::VectorXd ph_c = Eigen::VectorXd::Zero(m + 1);
        ph_c(m) = 1.0;
        Eigen::MatrixXd ph_g(p, m + 1);
        if (p) {
            ph_g.leftCols(m) = g;
            ph_g.col(m).setZero();
        }
        Eigen::VectorXd ph_x0(m + 1);
        ph_x0.head(m) = x0;
        ph_x0(m) = -margin + 1.0;

        SolverSettings ph_settings = settings;
        ph_settings.initial_point.resize(0);
        ph_settings.tolerance = std::max(settings.tolerance, 1e-10);
        const auto ph = sdpdetail::solve_core(ph_blocks, ph_c, 0.0, ph_g, h, ph_x0,
                                              ph_settings, -1e-4);
        out.used_phase1 = true;
        const double t_star = ph.x(m);
        const bool interior_found = ph.early_stopped || t_star < -settings.tolerance;
        if (!interior_found) {
            if (ph.status == SolveStatus::Optimal && t_star > -settings.tolerance) {
                out.status = SolveStatus::Infeasible;
                out.note = "phase I optimum t* = " + std::to_string(t_star);
                out.x = ph.x.head(m);
                out.iterations = ph.iterations;
                return out;
            }
            out.status = ph.status;
            out.note = "phase I did not certify feasibility (" + ph.note + ")";
            out.x = ph.x.head(m);
            out.iterations = ph.iterations;
            return out;
        }
        x0 = ph.x.head(m);
    }

    const auto core = sdpdetail::solve_core(blocks, problem.objective,
                                            problem.objective_constant, g, h, x0,
                                            settings, std::nullopt);
    out.x = core.x;
    out.objective = core.objective;
    out.status = core.status;
    out.iterations = core.iterations;
    out.residuals = core.residuals;
    out.block_duals = core.duals;
    out.equality_duals = core.w;
    out.note = out.note.empty() ? core.note : out.note + "; " + core.note;
    return out;
}

}  // namespace wernerlab
