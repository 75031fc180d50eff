// Dense complex Hermitian operators on tensor-factored Hilbert spaces:
// construction, tensor products, partial transpose/trace, eigensolves,
// PSD tests and Haar sampling. Everything here is an immutable value;
// all routines are pure.
#pragma once

#include <algorithm>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wernerlab/rng.hpp"

namespace wernerlab {

using Complex = std::complex<double>;

// Default tolerance used wherever a check has no caller-supplied one.
inline constexpr double kPsdTol = 1e-9;

// Which tensor factors belong to party A; party B is the complement.
struct SubsystemSplit {
    std::vector<int> party_a;

    static SubsystemSplit of(std::vector<int> factors) {
        SubsystemSplit s;
        s.party_a = std::move(factors);
        std::sort(s.party_a.begin(), s.party_a.end());
        return s;
    }

    void validate(int num_factors) const {
        if (party_a.empty())
            throw std::invalid_argument("subsystem split: party A is empty");
        for (size_t i = 0; i < party_a.size(); ++i) {
            if (party_a[i] < 0 || party_a[i] >= num_factors)
                throw std::invalid_argument("subsystem split: factor index out of range");
            if (i > 0 && party_a[i] == party_a[i - 1])
                throw std::invalid_argument("subsystem split: duplicate factor index");
        }
    }

    bool contains(int k) const {
        return std::binary_search(party_a.begin(), party_a.end(), k);
    }
};

struct HermitianOperator {
    std::vector<int> dims;  // local dimensions; matrix dimension is their product
    Eigen::MatrixXcd mat;

    int dim() const { return static_cast<int>(mat.rows()); }
    int num_factors() const { return static_cast<int>(dims.size()); }
    double trace() const { return mat.trace().real(); }
};

namespace detail {

inline long long product_of(const std::vector<int>& dims) {
    long long p = 1;
    for (int d : dims) {
        if (d < 1) throw std::invalid_argument("factor dimension must be >= 1");
        p *= d;
    }
    return p;
}

// Row-major strides: global index = sum_k digit_k * stride_k.
inline std::vector<long long> strides_of(const std::vector<int>& dims) {
    std::vector<long long> s(dims.size(), 1);
    for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k)
        s[k] = s[k + 1] * dims[k + 1];
    return s;
}

inline void decode(long long index, const std::vector<int>& dims,
                   const std::vector<long long>& strides, std::vector<int>& digits) {
    for (size_t k = 0; k < dims.size(); ++k) {
        digits[k] = static_cast<int>(index / strides[k]);
        index %= strides[k];
    }
}

}  // namespace detail

// Builds a Hermitian operator, symmetrizing (M + M^dagger)/2. Inputs whose
// anti-Hermitian part exceeds 1e-9 (max-abs entry) are rejected as user error;
// smaller corrections are treated as roundoff.
inline HermitianOperator make_hermitian(std::vector<int> dims, const Eigen::MatrixXcd& m) {
    const long long d = detail::product_of(dims);
    if (m.rows() != m.cols() || m.rows() != d)
        throw std::invalid_argument("operator size does not match factor dimensions");
    const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff() / 2.0;
    if (defect > 1e-9)
        throw std::invalid_argument("operator is not Hermitian (defect " +
                                    std::to_string(defect) + ")");
    HermitianOperator out;
    out.dims = std::move(dims);
    out.mat = (m + m.adjoint()) / 2.0;
    return out;
}

inline HermitianOperator identity_operator(std::vector<int> dims) {
    const long long d = detail::product_of(dims);
    HermitianOperator out;
    out.dims = std::move(dims);
    out.mat = Eigen::MatrixXcd::Identity(d, d);
    return out;
}

// Real linear combinations stay Hermitian; these skip re-validation.
inline HermitianOperator scaled(double c, const HermitianOperator& a) {
    return HermitianOperator{a.dims, c * a.mat};
}

inline HermitianOperator sum(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dims != b.dims) throw std::invalid_argument("operator sum: dims mismatch");
    return HermitianOperator{a.dims, a.mat + b.mat};
}

inline double hs_inner(const HermitianOperator& a, const HermitianOperator& b) {
    return (a.mat.adjoint() * b.mat).trace().real();
}

inline double frobenius(const HermitianOperator& a) { return a.mat.norm(); }

inline HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
    HermitianOperator out;
    out.dims = a.dims;
    out.dims.insert(out.dims.end(), b.dims.begin(), b.dims.end());
    const int da = a.dim(), db = b.dim();
    out.mat.resize(static_cast<long long>(da) * db, static_cast<long long>(da) * db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            out.mat.block(static_cast<long long>(i) * db, static_cast<long long>(j) * db,
                          db, db) = a.mat(i, j) * b.mat;
    return out;
}

// Transposes the party-A factor indices only. A pure entry permutation, so
// applying it twice returns the input exactly.
inline HermitianOperator partial_transpose(const HermitianOperator& op,
                                           const SubsystemSplit& split) {
    split.validate(op.num_factors());
    const auto strides = detail::strides_of(op.dims);
    const int d = op.dim();
    const int nf = op.num_factors();

    std::vector<std::vector<int>> digits(d, std::vector<int>(nf));
    for (int i = 0; i < d; ++i) detail::decode(i, op.dims, strides, digits[i]);

    HermitianOperator out;
    out.dims = op.dims;
    out.mat.resize(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            long long r = 0, c = 0;
            for (int k = 0; k < nf; ++k) {
                const bool swap = split.contains(k);
                r += static_cast<long long>(swap ? digits[j][k] : digits[i][k]) * strides[k];
                c += static_cast<long long>(swap ? digits[i][k] : digits[j][k]) * strides[k];
            }
            out.mat(r, c) = op.mat(i, j);
        }
    }
    return out;
}

// Traces out every factor not in `keep`; keeps the given factor order.
inline HermitianOperator partial_trace(const HermitianOperator& op,
                                       const std::vector<int>& keep_arg) {
    std::vector<int> keep = keep_arg;
    std::sort(keep.begin(), keep.end());
    if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
    for (size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= op.num_factors())
            throw std::invalid_argument("partial_trace: keep index out of range");
        if (i > 0 && keep[i] == keep[i - 1])
            throw std::invalid_argument("partial_trace: duplicate keep index");
    }

    std::vector<int> traced;
    for (int k = 0; k < op.num_factors(); ++k)
        if (!std::binary_search(keep.begin(), keep.end(), k)) traced.push_back(k);

    const auto strides = detail::strides_of(op.dims);
    std::vector<int> keep_dims, tr_dims;
    for (int k : keep) keep_dims.push_back(op.dims[k]);
    for (int k : traced) tr_dims.push_back(op.dims[k]);
    const long long dk = detail::product_of(keep_dims);
    const long long dt = detail::product_of(tr_dims);
    const auto keep_str = detail::strides_of(keep_dims);
    const auto tr_str = detail::strides_of(tr_dims);

    // merge tables: global index of (kept digits, traced digits)
    std::vector<long long> keep_part(dk, 0), tr_part(dt, 0);
    {
        std::vector<int> dig(keep.size());
        for (long long a = 0; a < dk; ++a) {
            detail::decode(a, keep_dims, keep_str, dig);
            long long g = 0;
            for (size_t k = 0; k < keep.size(); ++k) g += static_cast<long long>(dig[k]) * strides[keep[k]];
            keep_part[a] = g;
        }
    }
    {
        std::vector<int> dig(traced.size());
        for (long long t = 0; t < dt; ++t) {
            detail::decode(t, tr_dims, tr_str, dig);
            long long g = 0;
            for (size_t k = 0; k < traced.size(); ++k) g += static_cast<long long>(dig[k]) * strides[traced[k]];
            tr_part[t] = g;
        }
    }

    HermitianOperator out;
    out.dims = keep_dims;
    out.mat = Eigen::MatrixXcd::Zero(dk, dk);
    for (long long a = 0; a < dk; ++a)
        for (long long b = 0; b < dk; ++b) {
            Complex acc(0, 0);
            for (long long t = 0; t < dt; ++t)
                acc += op.mat(keep_part[a] + tr_part[t], keep_part[b] + tr_part[t]);
            out.mat(a, b) = acc;
        }
    return out;
}

// <psi| op |psi> contracted over the `contracted` factors only: an operator on
// the remaining factors. psi is indexed by the contracted factors in ascending
// factor order.
inline Eigen::MatrixXcd partial_expectation(const HermitianOperator& op,
                                            const Eigen::VectorXcd& psi,
                                            const std::vector<int>& contracted_arg) {
    std::vector<int> contracted = contracted_arg;
    std::sort(contracted.begin(), contracted.end());
    std::vector<int> kept;
    for (int k = 0; k < op.num_factors(); ++k)
        if (!std::binary_search(contracted.begin(), contracted.end(), k)) kept.push_back(k);
    if (contracted.empty() || kept.empty())
        throw std::invalid_argument("partial_expectation: need a proper factor subset");

    const auto strides = detail::strides_of(op.dims);
    std::vector<int> c_dims, k_dims;
    for (int k : contracted) c_dims.push_back(op.dims[k]);
    for (int k : kept) k_dims.push_back(op.dims[k]);
    const long long dc = detail::product_of(c_dims);
    const long long dk = detail::product_of(k_dims);
    if (psi.size() != dc)
        throw std::invalid_argument("partial_expectation: vector dimension mismatch");

    const auto c_str = detail::strides_of(c_dims);
    const auto k_str = detail::strides_of(k_dims);
    std::vector<long long> c_part(dc, 0), k_part(dk, 0);
    {
        std::vector<int> dig(contracted.size());
        for (long long a = 0; a < dc; ++a) {
            detail::decode(a, c_dims, c_str, dig);
            long long g = 0;
            for (size_t k = 0; k < contracted.size(); ++k)
                g += static_cast<long long>(dig[k]) * strides[contracted[k]];
            c_part[a] = g;
        }
    }
    {
        std::vector<int> dig(kept.size());
        for (long long r = 0; r < dk; ++r) {
            detail::decode(r, k_dims, k_str, dig);
            long long g = 0;
            for (size_t k = 0; k < kept.size(); ++k)
                g += static_cast<long long>(dig[k]) * strides[kept[k]];
            k_part[r] = g;
        }
    }

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
    for (long long a = 0; a < dc; ++a) {
        const Complex ca = std::conj(psi(a));
        if (ca == Complex(0, 0)) continue;
        for (long long b = 0; b < dc; ++b) {
            const Complex w = ca * psi(b);
            if (w == Complex(0, 0)) continue;
            for (long long r = 0; r < dk; ++r)
                for (long long c = 0; c < dk; ++c)
                    out(r, c) += w * op.mat(c_part[a] + k_part[r], c_part[b] + k_part[c]);
        }
    }
    return out;
}

struct EigResult {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors; // orthonormal columns
};

inline EigResult eig_hermitian(const HermitianOperator& op) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.mat);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian eigensolver failed to converge");
    return EigResult{solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_eigenvalue(const HermitianOperator& op) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.mat,
                                                           Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

inline bool is_psd(const HermitianOperator& op, double tol = kPsdTol) {
    return min_eigenvalue(op) >= -tol;
}

struct PureState {
    int dim = 0;
    Eigen::VectorXcd amplitudes;
};

inline PureState make_pure_state(const Eigen::VectorXcd& amplitudes) {
    const double n = amplitudes.norm();
    if (!(n > 0)) throw std::invalid_argument("pure state: zero vector");
    if (std::abs(n - 1.0) > 1e-12)
        throw std::invalid_argument("pure state: norm deviates from 1 by more than 1e-12");
    return PureState{static_cast<int>(amplitudes.size()), amplitudes};
}

inline PureState sample_haar_vector(int dim, Rng& rng) {
    if (dim < 1) throw std::invalid_argument("sample_haar_vector: dim must be >= 1");
    return PureState{dim, rng.haar_vector(dim)};
}

// |psi><psi| with the given factorization.
inline HermitianOperator pure_density(std::vector<int> dims, const Eigen::VectorXcd& psi) {
    const long long d = detail::product_of(dims);
    if (psi.size() != d) throw std::invalid_argument("pure_density: dimension mismatch");
    HermitianOperator out;
    out.dims = std::move(dims);
    out.mat = psi * psi.adjoint();
    return out;
}

}  // namespace wernerlab
