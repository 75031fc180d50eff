// Optimal entanglement witnesses through the sampled relaxation of
//   min Tr(W rho)  s.t.  Tr(W) = 1,  <psi_A| W |psi_A> >= 0 for all psi_A,
// where each sampled psi_A contributes one Hermitian block on side B. Sampling
// relaxes the constraint set, so the optimum LOWER-bounds the true witness
// value; every report carries an a-posteriori product-state verification and
// the cutting-plane loop feeds violations back as new blocks.
//
// Party A owns the even tensor factors throughout (the same layout the
// operator constructors produce).
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wernerlab/operators.hpp"
#include "wernerlab/parallel.hpp"
#include "wernerlab/rng.hpp"
#include "wernerlab/sdp.hpp"
#include "wernerlab/werner.hpp"

namespace wernerlab {

struct SampleProvenance {
    enum class Kind { Haar, DeterministicRecipe, Explicit };
    Kind kind = Kind::Explicit;
    int count = 0;
    std::uint64_t seed = 0;

    std::string describe() const {
        switch (kind) {
            case Kind::Haar:
                return "haar(n=" + std::to_string(count) +
                       ", seed=" + std::to_string(seed) + ")";
            case Kind::DeterministicRecipe:
                return "deterministic-recipe(n=" + std::to_string(count) + ")";
            case Kind::Explicit:
                return "explicit(n=" + std::to_string(count) + ")";
        }
        return "unknown";
    }
};

struct SampleSet {
    std::vector<PureState> states;
    SampleProvenance provenance;
};

struct WitnessSettings {
    SolverSettings solver;
    std::uint64_t seed = 12345;
    int verify_multistarts = 200;
    int seesaw_max_iterations = 500;
    double seesaw_tolerance = 1e-12;
    double product_floor = 1e-7;  // cutting-plane stop threshold
    int max_cut_rounds = 5;
};

struct VerificationRecord {
    double min_product_expectation = 0.0;
    Eigen::VectorXcd psi_a;  // argmin product state, A side
    Eigen::VectorXcd chi_b;  // argmin product state, B side
    int multistarts = 0;
};

struct WitnessReport {
    HermitianOperator witness;
    // Present when the witness lies in (or was restricted to) the symmetric
    // span; trace-normalized convention.
    std::optional<SymmetricOperator> coefficients;
    double value = 0.0;  // Tr(W rho); lower bound on the true witness value
    HermitianOperator target;
    SampleProvenance provenance;
    VerificationRecord verification;
    SolveStatus solver_status = SolveStatus::NumericalFailure;
    SdpResiduals solver_residuals;
    int cutting_rounds = 0;
};

namespace witdetail {

struct Geometry {
    std::vector<int> a_set, b_set;
    long long dim_a = 1, dim_b = 1;
};

inline Geometry geometry_of(const std::vector<int>& dims) {
    Geometry g;
    for (size_t k = 0; k < dims.size(); ++k) {
        if (k % 2 == 0) {
            g.a_set.push_back(static_cast<int>(k));
            g.dim_a *= dims[k];
        } else {
            g.b_set.push_back(static_cast<int>(k));
            g.dim_b *= dims[k];
        }
    }
    return g;
}

// Index split tables: global = a_part[a] + b_part[b].
struct IndexSplit {
    std::vector<long long> a_part, b_part;
    std::vector<int> a_of, b_of;  // inverse maps for global indices
};

inline IndexSplit index_split(const std::vector<int>& dims, const Geometry& g) {
    IndexSplit s;
    const auto strides = detail::strides_of(dims);
    std::vector<int> a_dims, b_dims;
    for (int k : g.a_set) a_dims.push_back(dims[k]);
    for (int k : g.b_set) b_dims.push_back(dims[k]);
    const auto a_str = detail::strides_of(a_dims);
    const auto b_str = detail::strides_of(b_dims);
    s.a_part.assign(g.dim_a, 0);
    s.b_part.assign(g.dim_b, 0);
    {
        std::vector<int> dig(a_dims.size());
        for (long long a = 0; a < g.dim_a; ++a) {
            detail::decode(a, a_dims, a_str, dig);
            for (size_t k = 0; k < a_dims.size(); ++k)
                s.a_part[a] += dig[k] * strides[g.a_set[k]];
        }
    }
    {
        std::vector<int> dig(b_dims.size());
        for (long long b = 0; b < g.dim_b; ++b) {
            detail::decode(b, b_dims, b_str, dig);
            for (size_t k = 0; k < b_dims.size(); ++k)
                s.b_part[b] += dig[k] * strides[g.b_set[k]];
        }
    }
    const long long d = g.dim_a * g.dim_b;
    s.a_of.assign(d, 0);
    s.b_of.assign(d, 0);
    for (long long a = 0; a < g.dim_a; ++a)
        for (long long b = 0; b < g.dim_b; ++b) {
            s.a_of[s.a_part[a] + s.b_part[b]] = static_cast<int>(a);
            s.b_of[s.a_part[a] + s.b_part[b]] = static_cast<int>(b);
        }
    return s;
}

// Hermitian parametrization of a D x D operator: diagonal entries first per
// pair order, then (real, imaginary) parts of each off-diagonal pair, in a
// fixed row-major order. Variable k multiplies basis operator H_k.
struct HermitianBasis {
    int dim = 0;
    struct Elem {
        int p, q;
        bool imag;
    };
    std::vector<Elem> elems;

    explicit HermitianBasis(int d) : dim(d) {
        for (int p = 0; p < d; ++p)
            for (int q = p; q < d; ++q) {
                if (p == q) {
                    elems.push_back({p, q, false});
                } else {
                    elems.push_back({p, q, false});
                    elems.push_back({p, q, true});
                }
            }
    }

    int size() const { return static_cast<int>(elems.size()); }

    // coefficient of H_k in the expansion of a Hermitian operator M
    double coefficient_in(const Eigen::MatrixXcd& m, int k) const {
        const auto& e = elems[k];
        if (e.p == e.q) return m(e.p, e.p).real();
        return e.imag ? m(e.p, e.q).imag() : m(e.p, e.q).real();
    }

    // Tr(H_k M)
    double pairing(const Eigen::MatrixXcd& m, int k) const {
        const auto& e = elems[k];
        if (e.p == e.q) return m(e.p, e.p).real();
        return e.imag ? 2.0 * m(e.p, e.q).imag() : 2.0 * m(e.p, e.q).real();
    }

    Eigen::MatrixXcd reconstruct(const Eigen::VectorXd& x) const {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
        for (int k = 0; k < size(); ++k) {
            const auto& e = elems[k];
            if (e.p == e.q) {
                m(e.p, e.p) += x(k);
            } else if (!e.imag) {
                m(e.p, e.q) += x(k);
                m(e.q, e.p) += x(k);
            } else {
                m(e.p, e.q) += Complex(0, 1) * x(k);
                m(e.q, e.p) += Complex(0, -1) * x(k);
            }
        }
        return m;
    }
};

}  // namespace witdetail

// <psi_A| W |psi_A> as an operator on side B.
inline Eigen::MatrixXcd compress_side_a(const HermitianOperator& w,
                                        const Eigen::VectorXcd& psi_a) {
    const auto g = witdetail::geometry_of(w.dims);
    return partial_expectation(w, psi_a, g.a_set);
}

inline Eigen::MatrixXcd compress_side_b(const HermitianOperator& w,
                                        const Eigen::VectorXcd& chi_b) {
    const auto g = witdetail::geometry_of(w.dims);
    return partial_expectation(w, chi_b, g.b_set);
}

inline SampleSet haar_samples(int dim, int count, std::uint64_t seed) {
    if (count <= 0) throw std::invalid_argument("haar_samples: count must be positive");
    SampleSet set;
    set.provenance = {SampleProvenance::Kind::Haar, count, seed};
    Rng rng(seed);
    for (int i = 0; i < count; ++i) set.states.push_back(sample_haar_vector(dim, rng));
    return set;
}

// Default sample sizes for the sampled relaxation, by copy count.
inline int default_haar_count(int copies) { return copies >= 2 ? 1000 : 300; }

// Certifies how negative a witness candidate can get on product states:
// alternating exact eigenvalue minimizations over the two sides, restarted
// from `multistarts` Haar seeds. A local method; the multistart count is the
// only hedge against local minima, so callers treat nonnegative results as
// evidence, not proof.
inline VerificationRecord verify_witness(const HermitianOperator& w, int multistarts,
                                         const WitnessSettings& settings = {}) {
    const auto g = witdetail::geometry_of(w.dims);
    if (multistarts <= 0)
        throw std::invalid_argument("verify_witness: multistarts must be positive");

    struct Result {
        double value;
        Eigen::VectorXcd psi, chi;
    };
    std::vector<Result> results(multistarts);

    parallel_for(multistarts, [&](int task) {
        Rng rng = Rng::derive(settings.seed, static_cast<std::uint64_t>(task));
        Eigen::VectorXcd psi = rng.haar_vector(static_cast<int>(g.dim_a));
        Eigen::VectorXcd chi;
        double value = std::numeric_limits<double>::infinity();
        for (int it = 0; it < settings.seesaw_max_iterations; ++it) {
            const Eigen::MatrixXcd mb = partial_expectation(w, psi, g.a_set);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esb(mb);
            chi = esb.eigenvectors().col(0);
            const Eigen::MatrixXcd ma = partial_expectation(w, chi, g.b_set);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esa(ma);
            psi = esa.eigenvectors().col(0);
            const double next = esa.eigenvalues()(0);
            if (std::abs(value - next) < settings.seesaw_tolerance) {
                value = next;
                break;
            }
            value = next;
        }
        results[task] = {value, psi, chi};
    });

    int best = 0;
    for (int i = 1; i < multistarts; ++i)
        if (results[i].value < results[best].value) best = i;

    VerificationRecord rec;
    rec.min_product_expectation = results[best].value;
    rec.psi_a = results[best].psi;
    rec.chi_b = results[best].chi;
    rec.multistarts = multistarts;
    return rec;
}

// Builds the sampled-relaxation LMI over symmetric-basis coefficients
// (trace-normalized). The objective is left zero; use witness_objective.
inline LmiProblem build_symmetric_witness_problem(const BasisPtr& basis,
                                                  const SampleSet& samples) {
    if (samples.states.empty())
        throw std::invalid_argument("witness problem: empty sample set");
    const auto g = witdetail::geometry_of(basis->element_dims);
    const int m = basis->size();
    LmiProblem p;
    p.num_vars = m;
    p.objective = Eigen::VectorXd::Zero(m);
    LinearEquality eq;
    eq.a = Eigen::VectorXd::Ones(m);
    eq.b = 1.0;
    p.equalities.push_back(eq);

    std::vector<HermitianOperator> normalized;
    for (int i = 0; i < m; ++i)
        normalized.push_back(scaled(1.0 / basis->traces[i], basis->element(i)));

    for (const auto& state : samples.states) {
        if (state.dim != g.dim_a)
            throw std::invalid_argument("witness problem: sample dimension mismatch");
        LmiBlock blk;
        blk.dim = static_cast<int>(g.dim_b);
        for (int i = 0; i < m; ++i) {
            const auto mat = partial_expectation(normalized[i], state.amplitudes, g.a_set);
            blk.terms.push_back({i, ConstraintMatrix::from_dense(mat)});
        }
        p.blocks.push_back(std::move(blk));
    }
    return p;
}

// Objective vector for the symmetric problem: q_i = Tr(B_i rho)/Tr(B_i).
inline Eigen::VectorXd witness_objective(const BasisPtr& basis,
                                         const HermitianOperator& rho) {
    Eigen::VectorXd q(basis->size());
    for (int i = 0; i < basis->size(); ++i)
        q(i) = hs_inner(basis->element(i), rho) / basis->traces[i];
    return q;
}

namespace witdetail {

struct FullProblem {
    LmiProblem problem;
    HermitianBasis basis;
};

// Full Hermitian parametrization: every sample block entry is a rank-one
// contraction of an elementary basis operator, stored sparsely.
inline FullProblem build_full_witness_problem(const std::vector<int>& dims,
                                              const SampleSet& samples) {
    if (samples.states.empty())
        throw std::invalid_argument("witness problem: empty sample set");
    const auto g = geometry_of(dims);
    const long long d = g.dim_a * g.dim_b;
    if (d > 36)
        throw CapacityError(
            "full-space witness optimization is limited to one-copy geometry");
    const auto split = index_split(dims, g);
    FullProblem fp{LmiProblem{}, HermitianBasis(static_cast<int>(d))};
    auto& p = fp.problem;
    const auto& hb = fp.basis;
    p.num_vars = hb.size();
    p.objective = Eigen::VectorXd::Zero(p.num_vars);
    LinearEquality eq;
    eq.a = Eigen::VectorXd::Zero(p.num_vars);
    for (int k = 0; k < hb.size(); ++k)
        if (hb.elems[k].p == hb.elems[k].q) eq.a(k) = 1.0;
    eq.b = 1.0;
    p.equalities.push_back(eq);

    for (const auto& state : samples.states) {
        if (state.dim != g.dim_a)
            throw std::invalid_argument("witness problem: sample dimension mismatch");
        const auto& c = state.amplitudes;
        LmiBlock blk;
        blk.dim = static_cast<int>(g.dim_b);
        for (int k = 0; k < hb.size(); ++k) {
            const auto& e = hb.elems[k];
            const int pa = split.a_of[e.p], pb = split.b_of[e.p];
            const int qa = split.a_of[e.q], qb = split.b_of[e.q];
            const Complex w1 = std::conj(c(pa)) * c(qa);
            std::vector<SparseEntry> entries;
            if (e.p == e.q) {
                entries.push_back({pb, qb, w1});
            } else if (!e.imag) {
                entries.push_back({pb, qb, w1});
                entries.push_back({qb, pb, std::conj(c(qa)) * c(pa)});
            } else {
                entries.push_back({pb, qb, Complex(0, 1) * w1});
                entries.push_back({qb, pb, Complex(0, -1) * std::conj(c(qa)) * c(pa)});
            }
            blk.terms.push_back({k, ConstraintMatrix::from_entries(std::move(entries))});
        }
        p.blocks.push_back(std::move(blk));
    }
    return fp;
}

}  // namespace witdetail

// The sampled-relaxation optimal witness of rho. With restrict_symmetric the
// variables are the symmetric-basis coefficients; otherwise the full Hermitian
// parametrization (one-copy geometry only). The report's value lower-bounds
// the exact Tr(W_rho rho) and carries the see-saw verification of the
// returned witness.
inline WitnessReport optimal_witness(const HermitianOperator& rho,
                                     const SampleSet& samples, bool restrict_symmetric,
                                     const WitnessSettings& settings = {}) {
    if (std::abs(rho.trace() - 1.0) > 1e-8)
        throw std::invalid_argument("optimal_witness: target state must have unit trace");
    if (samples.states.empty())
        throw std::invalid_argument("optimal_witness: empty sample set");
    const int copies = static_cast<int>(rho.dims.size()) / 2 - 1;

    WitnessReport report;
    report.target = rho;
    report.provenance = samples.provenance;

    if (restrict_symmetric) {
        if (copies < 1 || copies > kMaxDenseCopies || rho.dims != wn_dims(copies, rho.dims[2]))
            throw std::invalid_argument(
                "optimal_witness: symmetric restriction expects the qubit-pair + copies layout");
        const auto basis = basis_full(copies, rho.dims[2]);
        auto problem = build_symmetric_witness_problem(basis, samples);
        problem.objective = witness_objective(basis, rho);

        SolverSettings solver_settings = settings.solver;
        solver_settings.initial_point.resize(basis->size());
        for (int i = 0; i < basis->size(); ++i)
            solver_settings.initial_point(i) = basis->traces[i] / rho.dim();
        const auto sol = solve(problem, solver_settings);
        if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::MaxIterations)
            throw std::runtime_error("optimal_witness: solver failed (" +
                                     std::string(to_string(sol.status)) + "; " + sol.note +
                                     ")");
        SymmetricOperator coeffs{basis, sol.x, true};
        report.witness = coeffs.densify();
        report.coefficients = std::move(coeffs);
        report.value = sol.objective;
        report.solver_status = sol.status;
        report.solver_residuals = sol.residuals;
    } else {
        auto fp = witdetail::build_full_witness_problem(rho.dims, samples);
        for (int k = 0; k < fp.basis.size(); ++k)
            fp.problem.objective(k) = fp.basis.pairing(rho.mat, k);

        SolverSettings solver_settings = settings.solver;
        solver_settings.initial_point = Eigen::VectorXd::Zero(fp.basis.size());
        for (int k = 0; k < fp.basis.size(); ++k)
            if (fp.basis.elems[k].p == fp.basis.elems[k].q)
                solver_settings.initial_point(k) = 1.0 / rho.dim();
        const auto sol = solve(fp.problem, solver_settings);
        if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::MaxIterations)
            throw std::runtime_error("optimal_witness: solver failed (" +
                                     std::string(to_string(sol.status)) + "; " + sol.note +
                                     ")");
        report.witness = make_hermitian(rho.dims, fp.basis.reconstruct(sol.x));
        report.value = sol.objective;
        report.solver_status = sol.status;
        report.solver_residuals = sol.residuals;
        // record coefficients when the optimizer happens to be symmetric
        try {
            const auto basis = basis_full(copies, rho.dims[2]);
            report.coefficients = expand_in_basis(report.witness, basis).as_normalized();
        } catch (const SpanError&) {
        } catch (const std::invalid_argument&) {
        }
    }

    report.verification =
        verify_witness(report.witness, settings.verify_multistarts, settings);
    return report;
}

// Iterates the sampled relaxation: solve, verify, and when a product state
// with expectation below -product_floor exists, append its A-side vector as a
// new constraint block and re-solve.
inline WitnessReport cutting_plane_witness(const HermitianOperator& rho,
                                           const SampleSet& initial, int rounds,
                                           bool restrict_symmetric,
                                           const WitnessSettings& settings = {}) {
    SampleSet set = initial;
    WitnessReport report;
    int round = 0;
    for (;;) {
        report = optimal_witness(rho, set, restrict_symmetric, settings);
        report.cutting_rounds = round;
        ++round;
        if (report.verification.min_product_expectation >= -settings.product_floor)
            break;
        if (round >= rounds) break;
        PureState violator{static_cast<int>(report.verification.psi_a.size()),
                           report.verification.psi_a};
        set.states.push_back(std::move(violator));
        set.provenance.kind = SampleProvenance::Kind::Explicit;
        set.provenance.count = static_cast<int>(set.states.size());
    }
    return report;
}

// The deterministic sample recipe: from the border-state construction
//   sigma = (rho - Tr(W_cand rho) I) / (1 - D Tr(W_cand rho)),
// take every eigenvector |Psi_k> of sigma, reduce to side A, and return all
// eigenvectors of the reduced states. Yields D * dim_A states (216 at one
// copy).
inline SampleSet deterministic_samples(const HermitianOperator& rho,
                                       const HermitianOperator& w_cand) {
    if (rho.dims != w_cand.dims)
        throw std::invalid_argument("deterministic_samples: layout mismatch");
    const double v = hs_inner(w_cand, rho);
    const int d = rho.dim();
    const double denom = 1.0 - d * v;
    if (denom <= 1e-12)
        throw std::invalid_argument(
            "deterministic_samples: degenerate denominator; candidate does not "
            "detect the state strongly enough");
    const Eigen::MatrixXcd sigma_mat =
        (rho.mat - v * Eigen::MatrixXcd::Identity(d, d)) / denom;
    const HermitianOperator sigma{rho.dims, sigma_mat};
    const auto g = witdetail::geometry_of(rho.dims);

    SampleSet set;
    set.provenance.kind = SampleProvenance::Kind::DeterministicRecipe;
    const auto eig = eig_hermitian(sigma);
    for (int k = 0; k < d; ++k) {
        const auto psi_k = pure_density(rho.dims, eig.vectors.col(k));
        const auto rho_a = partial_trace(psi_k, g.a_set);
        const auto eig_a = eig_hermitian(rho_a);
        for (int j = 0; j < rho_a.dim(); ++j) {
            Eigen::VectorXcd vec = eig_a.vectors.col(j);
            set.states.push_back(PureState{static_cast<int>(vec.size()), vec});
        }
    }
    set.provenance.count = static_cast<int>(set.states.size());
    return set;
}

struct RandomRobustness {
    double value = 0.0;  // clamped at zero when undetected
    bool detected = false;
};

// Rr = -Tr(I) Tr(W_rho rho): the minimal identity mixing that erases the
// entanglement the witness sees.
inline RandomRobustness random_robustness(const HermitianOperator& rho,
                                          double witness_value) {
    const double rr = -static_cast<double>(rho.dim()) * witness_value;
    if (rr > 0.0) return {rr, true};
    return {0.0, false};
}

// sigma = (rho + Rr I/Tr(I)) / (1 + Rr): the state on the witness hyperplane.
// rho already on the hyperplane (Rr = 0) is returned unchanged.
inline HermitianOperator border_state(const HermitianOperator& rho,
                                      double witness_value) {
    const double rr = -static_cast<double>(rho.dim()) * witness_value;
    if (rr < 0.0)
        throw std::invalid_argument("border_state: state is not detected (Rr < 0)");
    const int d = rho.dim();
    Eigen::MatrixXcd m =
        (rho.mat + (rr / d) * Eigen::MatrixXcd::Identity(d, d)) / (1.0 + rr);
    return HermitianOperator{rho.dims, m};
}

}  // namespace wernerlab
