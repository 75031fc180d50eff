// The Werner family and its operator algebra: the swap/max-entangled pair,
// the N-copy candidate witness P2 (x) (rho^TA)^(x)N, the orthogonal projector
// bases it is diagonal in, their recurrences and trace identities, and the
// coefficient expansions that keep N-copy objects O(N) in memory.
#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wernerlab/operators.hpp"

namespace wernerlab {

// Thrown when a dense representation would exceed the supported scale
// (two copies, 324-dimensional). Coefficient representations stay available
// for any copy count.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an operator does not lie in the span of a basis.
struct SpanError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WernerParams {
    int d = 3;
    double beta = 0.0;
};

inline WernerParams make_werner_params(int d, double beta) {
    if (d < 2) throw std::invalid_argument("werner params: d must be >= 2");
    if (beta < -1.0 || beta > 1.0)
        throw std::invalid_argument("werner params: beta must lie in [-1, 1]");
    return WernerParams{d, beta};
}

// F_d = sum |ij><ji| on two qudits.
inline HermitianOperator swap_op(int d) {
    if (d < 2) throw std::invalid_argument("swap_op: d must be >= 2");
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) f(i * d + j, j * d + i) = 1.0;
    return HermitianOperator{{d, d}, f};
}

// P_d = F_d^{T_A} / d: rank-one projector onto the maximally entangled vector.
inline HermitianOperator max_entangled(int d) {
    if (d < 2) throw std::invalid_argument("max_entangled: d must be >= 2");
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) p(i * d + i, j * d + j) = 1.0 / d;
    return HermitianOperator{{d, d}, p};
}

// rho_w = (I + beta F) / (d^2 + d beta).
inline HermitianOperator werner_state(const WernerParams& p) {
    const auto f = swap_op(p.d);
    const double norm = p.d * p.d + p.d * p.beta;
    Eigen::MatrixXcd m =
        (Eigen::MatrixXcd::Identity(p.d * p.d, p.d * p.d) + p.beta * f.mat) / norm;
    return HermitianOperator{{p.d, p.d}, m};
}

namespace detail {

inline long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline double pow_int(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

inline long long ipow(long long x, int n) {
    long long r = 1;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

// Sum over the distinct arrangements of (N-j) copies of `lo` and j copies of
// `hi` in the tensor product; totally symmetric under copy exchange.
inline HermitianOperator symmetric_arrangements(const HermitianOperator& lo,
                                                const HermitianOperator& hi,
                                                int copies, int j) {
    HermitianOperator acc;
    bool first = true;
    std::vector<int> mask(copies, 0);
    std::fill(mask.end() - j, mask.end(), 1);
    // masks in lexicographic order via std::next_permutation on sorted start
    std::sort(mask.begin(), mask.end());
    do {
        HermitianOperator term = mask[0] ? hi : lo;
        for (int c = 1; c < copies; ++c) term = tensor(term, mask[c] ? hi : lo);
        if (first) {
            acc = std::move(term);
            first = false;
        } else {
            acc = sum(acc, term);
        }
    } while (std::next_permutation(mask.begin(), mask.end()));
    return acc;
}

}  // namespace detail

enum class BasisKind {
    B,        // P2-sector orthogonal projectors, N+1 elements
    A,        // state-side family over F/d, not orthogonal
    G,        // zero-trace combinations, one copy only
    B1Copy,   // one-copy basis extended with the (I2 - P2) sector, 4 elements
    B2Copy,   // two-copy extension, 6 elements
};

struct ProjectorBasis {
    BasisKind kind;
    int copies = 1;
    int d = 3;
    std::vector<int> element_dims;            // factor layout of dense elements
    std::vector<HermitianOperator> elements;  // empty when only traces are available
    std::vector<double> traces;               // exact, from integer arithmetic

    int size() const { return static_cast<int>(traces.size()); }
    bool has_dense() const { return !elements.empty(); }

    const HermitianOperator& element(int i) const {
        if (!has_dense())
            throw CapacityError("basis elements were not built densely at this copy count");
        return elements.at(i);
    }
};

using BasisPtr = std::shared_ptr<const ProjectorBasis>;

inline constexpr int kMaxDenseCopies = 2;

// Factor layout for N-copy witness-side operators: qubit pair first, then
// (A, B) qudit pairs per copy. Party A owns the even factor positions.
inline std::vector<int> wn_dims(int copies, int d) {
    std::vector<int> dims{2, 2};
    for (int c = 0; c < copies; ++c) {
        dims.push_back(d);
        dims.push_back(d);
    }
    return dims;
}

inline std::vector<int> state_dims(int copies, int d) {
    std::vector<int> dims;
    for (int c = 0; c < copies; ++c) {
        dims.push_back(d);
        dims.push_back(d);
    }
    return dims;
}

inline SubsystemSplit party_a_split(int num_factors) {
    std::vector<int> a;
    for (int k = 0; k < num_factors; k += 2) a.push_back(k);
    return SubsystemSplit::of(a);
}

// P2-sector basis: B_{j+1} = P2 (x) sym_j(P_d, I - P_d), j = 0..N.
// Tr(B_{j+1}) = C(N, j) (d^2 - 1)^j. Elements sum to P2 (x) I.
inline BasisPtr basis_b(int copies, int d) {
    if (copies < 1) throw std::invalid_argument("basis_b: copies must be >= 1");
    auto basis = std::make_shared<ProjectorBasis>();
    basis->kind = BasisKind::B;
    basis->copies = copies;
    basis->d = d;
    basis->element_dims = wn_dims(copies, d);
    for (int j = 0; j <= copies; ++j)
        basis->traces.push_back(static_cast<double>(
            detail::binomial(copies, j) * detail::ipow(1LL * d * d - 1, j)));
    if (copies <= kMaxDenseCopies) {
        const auto p2 = max_entangled(2);
        const auto pd = max_entangled(d);
        const auto id_minus_pd = sum(identity_operator({d, d}), scaled(-1.0, pd));
        for (int j = 0; j <= copies; ++j)
            basis->elements.push_back(
                tensor(p2, detail::symmetric_arrangements(pd, id_minus_pd, copies, j)));
    }
    return basis;
}

// Extended basis covering the (I2 - P2) sector; states live there too.
// Order: P2-sector j = 0..N, then (I2 - P2)-sector j = 0..N. At one and two
// copies this is the 4- and 6-element basis used for witness and state
// expansions.
inline BasisPtr basis_full(int copies, int d) {
    if (copies < 1 || copies > kMaxDenseCopies)
        throw CapacityError("basis_full: dense construction supports 1 or 2 copies");
    auto basis = std::make_shared<ProjectorBasis>();
    basis->kind = copies == 1 ? BasisKind::B1Copy : BasisKind::B2Copy;
    basis->copies = copies;
    basis->d = d;
    basis->element_dims = wn_dims(copies, d);
    const auto p2 = max_entangled(2);
    const auto q2 = sum(identity_operator({2, 2}), scaled(-1.0, p2));
    const auto pd = max_entangled(d);
    const auto id_minus_pd = sum(identity_operator({d, d}), scaled(-1.0, pd));
    for (int sector = 0; sector < 2; ++sector) {
        const auto& head = sector == 0 ? p2 : q2;
        const double head_trace = sector == 0 ? 1.0 : 3.0;
        for (int j = 0; j <= copies; ++j) {
            basis->elements.push_back(
                tensor(head, detail::symmetric_arrangements(pd, id_minus_pd, copies, j)));
            basis->traces.push_back(head_trace * static_cast<double>(
                detail::binomial(copies, j) * detail::ipow(1LL * d * d - 1, j)));
        }
    }
    return basis;
}

// State-side family: A_{j+1} = sym_j(f, I - f) with f = F_d / d. Same traces
// as the B family but the elements are not mutually orthogonal; only the last
// one is positive.
inline BasisPtr basis_a(int copies, int d) {
    if (copies < 1) throw std::invalid_argument("basis_a: copies must be >= 1");
    auto basis = std::make_shared<ProjectorBasis>();
    basis->kind = BasisKind::A;
    basis->copies = copies;
    basis->d = d;
    basis->element_dims = state_dims(copies, d);
    for (int j = 0; j <= copies; ++j)
        basis->traces.push_back(static_cast<double>(
            detail::binomial(copies, j) * detail::ipow(1LL * d * d - 1, j)));
    if (copies <= kMaxDenseCopies) {
        const auto f = scaled(1.0 / d, swap_op(d));
        const auto id_minus_f = sum(identity_operator({d, d}), scaled(-1.0, f));
        for (int j = 0; j <= copies; ++j)
            basis->elements.push_back(
                detail::symmetric_arrangements(f, id_minus_f, copies, j));
    }
    return basis;
}

// Zero-trace combinations of the one-copy extended basis (d = 3):
// G1 = 8 B1 - B2, G2 = 8 B3 - B4, G3 = -3 (B1 + B2) + B3 + B4.
inline BasisPtr basis_g() {
    auto full = basis_full(1, 3);
    auto basis = std::make_shared<ProjectorBasis>();
    basis->kind = BasisKind::G;
    basis->copies = 1;
    basis->d = 3;
    basis->element_dims = full->element_dims;
    const auto& b = full->elements;
    basis->elements.push_back(sum(scaled(8.0, b[0]), scaled(-1.0, b[1])));
    basis->elements.push_back(sum(scaled(8.0, b[2]), scaled(-1.0, b[3])));
    basis->elements.push_back(
        sum(sum(scaled(-3.0, b[0]), scaled(-3.0, b[1])), sum(b[2], b[3])));
    basis->traces = {0.0, 0.0, 0.0};
    return basis;
}

// Coefficient vector over a projector basis. `normalized` selects the
// convention: coefficients multiply B_i / Tr(B_i) when true, bare B_i when
// false. The two appear side by side in the literature and silently mixing
// them is the classic bug, so the flag is explicit and conversions are loud.
struct SymmetricOperator {
    BasisPtr basis;
    Eigen::VectorXd coeffs;
    bool normalized = false;

    SymmetricOperator as_normalized() const {
        if (normalized) return *this;
        SymmetricOperator out{basis, coeffs, true};
        for (int i = 0; i < coeffs.size(); ++i) out.coeffs(i) *= basis->traces[i];
        return out;
    }

    SymmetricOperator as_raw() const {
        if (!normalized) return *this;
        SymmetricOperator out{basis, coeffs, false};
        for (int i = 0; i < coeffs.size(); ++i) out.coeffs(i) /= basis->traces[i];
        return out;
    }

    double trace() const {
        const auto n = as_normalized();
        return n.coeffs.sum();
    }

    HermitianOperator densify() const {
        const auto raw = as_raw();
        HermitianOperator acc{basis->element_dims,
                              Eigen::MatrixXcd::Zero(
                                  detail::product_of(basis->element_dims),
                                  detail::product_of(basis->element_dims))};
        for (int i = 0; i < raw.coeffs.size(); ++i)
            acc.mat += raw.coeffs(i) * basis->element(i).mat;
        return acc;
    }
};

// Dense W_N = P2 (x) (rho_w^{T_A})^(x)N. Dense only through two copies; use
// wn_coefficients beyond that.
inline HermitianOperator wn_dense(const WernerParams& p, int copies) {
    if (copies < 1) throw std::invalid_argument("wn_dense: copies must be >= 1");
    if (copies > kMaxDenseCopies)
        throw CapacityError(
            "wn_dense: dense mode supports 1 or 2 copies; use wn_coefficients for more");
    const auto rho = werner_state(p);
    const auto rho_ta = partial_transpose(rho, SubsystemSplit::of({0}));
    HermitianOperator acc = max_entangled(2);
    for (int c = 0; c < copies; ++c) acc = tensor(acc, rho_ta);
    return acc;
}

// Diagonal coefficients of W_N over the P2-sector basis:
// lambda_{j+1} = (1 + d beta)^{N-j} / (d^2 + d beta)^N.
inline SymmetricOperator wn_coefficients(const WernerParams& p, int copies) {
    if (copies < 1) throw std::invalid_argument("wn_coefficients: copies must be >= 1");
    auto basis = basis_b(copies, p.d);
    Eigen::VectorXd lambda(copies + 1);
    const double denom = detail::pow_int(p.d * p.d + p.d * p.beta, copies);
    for (int j = 0; j <= copies; ++j)
        lambda(j) = detail::pow_int(1.0 + p.d * p.beta, copies - j) / denom;
    return SymmetricOperator{basis, lambda, false};
}

// rho_w^(x)N over the state-side family, same polynomial coefficients.
inline SymmetricOperator werner_power_coefficients(const WernerParams& p, int copies) {
    if (copies < 1)
        throw std::invalid_argument("werner_power_coefficients: copies must be >= 1");
    auto basis = basis_a(copies, p.d);
    Eigen::VectorXd lambda(copies + 1);
    const double denom = detail::pow_int(p.d * p.d + p.d * p.beta, copies);
    for (int j = 0; j <= copies; ++j)
        lambda(j) = detail::pow_int(1.0 + p.d * p.beta, copies - j) / denom;
    return SymmetricOperator{basis, lambda, false};
}

// Expansion of a dense operator over a basis, with a residual check: an
// operator outside the span is an error, which is exactly how
// symmetry-breaking bugs surface. Returns raw-convention coefficients.
inline SymmetricOperator expand_in_basis(const HermitianOperator& op, BasisPtr basis) {
    if (!basis->has_dense())
        throw CapacityError("expand_in_basis: basis has no dense elements");
    if (op.dims != basis->element_dims)
        throw std::invalid_argument("expand_in_basis: factor layout mismatch");
    const int n = basis->size();
    Eigen::VectorXd coeffs(n);
    const bool orthogonal_projectors = basis->kind != BasisKind::A;
    if (orthogonal_projectors && basis->kind != BasisKind::G) {
        for (int i = 0; i < n; ++i)
            coeffs(i) = hs_inner(basis->element(i), op) / basis->traces[i];
    } else {
        // Gram solve; covers the non-orthogonal state-side family and the
        // zero-trace combinations (whose traces vanish).
        Eigen::MatrixXd gram(n, n);
        Eigen::VectorXd rhs(n);
        for (int i = 0; i < n; ++i) {
            rhs(i) = hs_inner(basis->element(i), op);
            for (int j = 0; j < n; ++j)
                gram(i, j) = hs_inner(basis->element(i), basis->element(j));
        }
        coeffs = gram.ldlt().solve(rhs);
    }
    Eigen::MatrixXcd recon = Eigen::MatrixXcd::Zero(op.dim(), op.dim());
    for (int i = 0; i < n; ++i) recon += coeffs(i) * basis->element(i).mat;
    const double residual = (op.mat - recon).norm();
    if (residual > 1e-8 * std::max(1e-300, op.mat.norm()))
        throw SpanError("expand_in_basis: operator lies outside the basis span (residual " +
                        std::to_string(residual) + ")");
    return SymmetricOperator{std::move(basis), coeffs, false};
}

struct GCoords {
    double g1 = 0, g2 = 0, g3 = 0;
    double alpha = 0;  // identity component

    Eigen::Vector3d vec() const { return {g1, g2, g3}; }
};

// Coordinates of a one-copy operator in the zero-trace basis:
// op = alpha I + g1 G1 + g2 G2 + g3 G3, solved through the Gram matrix of the
// G elements (they are orthogonal to I but not normalized).
inline GCoords g_coords(const HermitianOperator& op, const BasisPtr& g_basis) {
    if (op.dim() != 36)
        throw std::invalid_argument("g_coords: expects a one-copy (36-dim) operator");
    const int n = 3;
    Eigen::MatrixXd gram(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        rhs(i) = hs_inner(g_basis->element(i), op);
        for (int j = 0; j < n; ++j)
            gram(i, j) = hs_inner(g_basis->element(i), g_basis->element(j));
    }
    const Eigen::VectorXd g = gram.ldlt().solve(rhs);
    GCoords out{g(0), g(1), g(2), op.trace() / 36.0};
    Eigen::MatrixXcd recon =
        out.alpha * Eigen::MatrixXcd::Identity(36, 36);
    for (int i = 0; i < n; ++i) recon += g(i) * g_basis->element(i).mat;
    const double residual = (op.mat - recon).norm();
    if (residual > 1e-8 * std::max(1e-300, op.mat.norm()))
        throw SpanError("g_coords: operator lies outside span{I, G1, G2, G3}");
    return out;
}

// Projects a bipartite d x d state onto the Werner family: beta such that
// Tr(rho_w(d, beta) F) = Tr(rho F).
inline WernerParams twirl_parameter(const HermitianOperator& rho) {
    if (rho.dims.size() != 2 || rho.dims[0] != rho.dims[1])
        throw std::invalid_argument("twirl_parameter: expects a two-qudit operator");
    const int d = rho.dims[0];
    if (std::abs(rho.trace() - 1.0) > 1e-10)
        throw std::invalid_argument("twirl_parameter: state must have unit trace");
    const double f = hs_inner(swap_op(d), rho);
    if (std::abs(d - f) < 1e-12)
        throw std::invalid_argument("twirl_parameter: swap expectation at the d pole");
    return WernerParams{d, (f * d - 1.0) / (d - f)};
}

struct DecayRow {
    int copies;
    double max_abs_eigenvalue;
};

// max_j |lambda_{j+1}| per copy count, from coefficients only.
inline std::vector<DecayRow> eigenvalue_decay_table(const WernerParams& p,
                                                    const std::vector<int>& copy_counts) {
    if (std::abs(1.0 + p.d * p.beta) >= std::abs(p.d * p.d + p.d * p.beta))
        throw std::invalid_argument(
            "eigenvalue_decay_table: requires |1 + d beta| < |d^2 + d beta|");
    std::vector<DecayRow> rows;
    for (int n : copy_counts) {
        const auto w = wn_coefficients(p, n);
        rows.push_back({n, w.coeffs.cwiseAbs().maxCoeff()});
    }
    return rows;
}

}  // namespace wernerlab
