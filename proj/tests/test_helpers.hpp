#pragma once

#include <Eigen/Dense>

#include "wernerlab/operators.hpp"
#include "wernerlab/rng.hpp"
#include "wernerlab/sdp.hpp"

namespace testutil {

inline wernerlab::HermitianOperator random_hermitian(std::vector<int> dims,
                                                     wernerlab::Rng& rng) {
    const long long d = wernerlab::detail::product_of(dims);
    Eigen::MatrixXcd m(d, d);
    for (long long i = 0; i < d; ++i)
        for (long long j = 0; j < d; ++j) m(i, j) = rng.complex_gaussian();
    return wernerlab::make_hermitian(std::move(dims), (m + m.adjoint()) / 2.0);
}

inline wernerlab::HermitianOperator random_psd_state(std::vector<int> dims,
                                                     wernerlab::Rng& rng) {
    const long long d = wernerlab::detail::product_of(dims);
    Eigen::MatrixXcd g(d, d);
    for (long long i = 0; i < d; ++i)
        for (long long j = 0; j < d; ++j) g(i, j) = rng.complex_gaussian();
    Eigen::MatrixXcd m = g * g.adjoint();
    m /= m.trace().real();
    return wernerlab::make_hermitian(std::move(dims), m);
}

// Haar-distributed unitary: QR of a Ginibre matrix with the phase fix.
inline Eigen::MatrixXcd haar_unitary(int d, wernerlab::Rng& rng) {
    Eigen::MatrixXcd g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = rng.complex_gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
        const auto rj = r(j, j);
        q.col(j) *= rj / std::abs(rj);
    }
    return q;
}

// Random box-bounded LMI problems with a fat interior, small enough that a
// refining grid search can certify the optimum independently of the solver.
inline wernerlab::LmiProblem random_lmi_problem(wernerlab::Rng& rng) {
    using namespace wernerlab;
    LmiProblem p;
    const int m = 1 + static_cast<int>(rng.uniform() * 3.0);  // 1..3 variables
    p.num_vars = m;
    p.objective.resize(m);
    for (int k = 0; k < m; ++k) p.objective(k) = rng.gaussian();
    p.objective /= std::max(1e-12, p.objective.norm());

    Eigen::VectorXd interior(m);
    for (int k = 0; k < m; ++k) interior(k) = 0.6 * (rng.uniform() - 0.5);

    const int n_blocks = 1 + static_cast<int>(rng.uniform() * 2.0);
    for (int b = 0; b < n_blocks; ++b) {
        const int n = 2 + static_cast<int>(rng.uniform() * 7.0);  // 2..8
        LmiBlock blk;
        blk.dim = n;
        std::vector<Eigen::MatrixXcd> mats;
        for (int k = 0; k < m; ++k) {
            Eigen::MatrixXcd g(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) g(i, j) = rng.complex_gaussian();
            Eigen::MatrixXcd a = (g + g.adjoint()) / 2.0;
            a /= a.norm();
            mats.push_back(a);
        }
        Eigen::MatrixXcd a0 =
            (1.5 + rng.uniform()) * Eigen::MatrixXcd::Identity(n, n);
        for (int k = 0; k < m; ++k) a0 -= interior(k) * mats[k];
        blk.a0 = a0;
        for (int k = 0; k < m; ++k)
            blk.terms.push_back({k, ConstraintMatrix::from_dense(mats[k])});
        p.blocks.push_back(std::move(blk));
    }
    p.lower_bounds = Eigen::VectorXd::Constant(m, -1.0);
    p.upper_bounds = Eigen::VectorXd::Constant(m, 1.0);
    return p;
}

// Brute-force oracle: refining grid search over the variable box. Independent
// of the interior-point path (feasibility via dense eigensolves).
inline double grid_search_minimum(const wernerlab::LmiProblem& p) {
    using namespace wernerlab;
    const int m = p.num_vars;
    Eigen::VectorXd lo = p.lower_bounds, hi = p.upper_bounds;
    const int pts = 21;
    double best_obj = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x;

    const auto feasible = [&](const Eigen::VectorXd& x) {
        for (const auto& blk : p.blocks) {
            Eigen::MatrixXcd s = blk.a0;
            for (const auto& t : blk.terms) s += x(t.var) * t.mat.to_dense(blk.dim);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s, Eigen::EigenvaluesOnly);
            if (es.eigenvalues()(0) < -1e-12) return false;
        }
        return true;
    };

    for (int round = 0; round < 10; ++round) {
        Eigen::VectorXd step(m);
        for (int k = 0; k < m; ++k) step(k) = (hi(k) - lo(k)) / (pts - 1);
        std::vector<int> idx(m, 0);
        bool done = false;
        while (!done) {
            Eigen::VectorXd x(m);
            for (int k = 0; k < m; ++k) x(k) = lo(k) + idx[k] * step(k);
            const double obj = p.objective.dot(x);
            if (obj < best_obj && feasible(x)) {
                best_obj = obj;
                best_x = x;
            }
            int k = 0;
            for (; k < m; ++k) {
                if (++idx[k] < pts) break;
                idx[k] = 0;
            }
            done = (k == m);
        }
        if (best_x.size() == 0) break;  // nothing feasible on the grid yet
        for (int k = 0; k < m; ++k) {
            const double w = 1.5 * step(k);
            lo(k) = std::max(p.lower_bounds(k), best_x(k) - w);
            hi(k) = std::min(p.upper_bounds(k), best_x(k) + w);
        }
    }
    return best_obj + p.objective_constant;
}

// Real symmetric embedding of every Hermitian block: H -> [[Re, -Im],[Im, Re]].
// The embedded problem has the same optimal x.
inline wernerlab::LmiProblem real_embedding(const wernerlab::LmiProblem& p) {
    using namespace wernerlab;
    LmiProblem q = p;
    q.blocks.clear();
    for (const auto& blk : p.blocks) {
        LmiBlock nb;
        nb.dim = 2 * blk.dim;
        const auto embed = [&](const Eigen::MatrixXcd& h) {
            Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(2 * blk.dim, 2 * blk.dim);
            e.topLeftCorner(blk.dim, blk.dim) = h.real().cast<Complex>();
            e.bottomRightCorner(blk.dim, blk.dim) = h.real().cast<Complex>();
            e.topRightCorner(blk.dim, blk.dim) = (-h.imag()).cast<Complex>();
            e.bottomLeftCorner(blk.dim, blk.dim) = h.imag().cast<Complex>();
            return e;
        };
        if (blk.a0.size()) nb.a0 = embed(blk.a0);
        for (const auto& t : blk.terms)
            nb.terms.push_back({t.var, ConstraintMatrix::from_dense(
                                           embed(t.mat.to_dense(blk.dim)))});
        q.blocks.push_back(std::move(nb));
    }
    return q;
}

}  // namespace testutil
