#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "test_helpers.hpp"
#include "wernerlab/operators.hpp"
#include "wernerlab/werner.hpp"

using namespace wernerlab;
using Catch::Approx;

TEST_CASE("construction symmetrizes and rejects", "[operators]") {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(4, 4);
    m(0, 1) = Complex(0.0, 1e-11);  // tiny anti-Hermitian defect: absorbed
    auto h = make_hermitian({2, 2}, m);
    REQUIRE((h.mat - h.mat.adjoint()).norm() == 0.0);

    m(0, 1) = Complex(0.0, 1e-6);  // too large: rejected
    REQUIRE_THROWS_AS(make_hermitian({2, 2}, m), std::invalid_argument);

    REQUIRE_THROWS_AS(make_hermitian({2, 3}, Eigen::MatrixXcd::Identity(4, 4)),
                      std::invalid_argument);
}

TEST_CASE("tensor products", "[operators]") {
    const auto i2 = identity_operator({2});
    const auto i3 = identity_operator({3});
    const auto t = tensor(i2, i3);
    REQUIRE(t.dims == std::vector<int>{2, 3});
    REQUIRE(t.trace() == Approx(6.0));
    REQUIRE((t.mat - Eigen::MatrixXcd::Identity(6, 6)).norm() == 0.0);

    const auto b1 = tensor(max_entangled(2), max_entangled(3));
    REQUIRE(b1.trace() == Approx(1.0).margin(1e-14));
    REQUIRE((b1.mat * b1.mat - b1.mat).norm() < 1e-13);  // projector

    // trace multiplicativity on random operators
    Rng rng(7001);
    const auto a = testutil::random_hermitian({2, 2}, rng);
    const auto b = testutil::random_hermitian({3}, rng);
    REQUIRE(tensor(a, b).trace() == Approx(a.trace() * b.trace()).margin(1e-10));
}

TEST_CASE("swap tensor swap spectrum", "[operators]") {
    // F2 (x) F3 has eigenvalues +-1; +1 on sym(x)sym and anti(x)anti,
    // multiplicity 3*6 + 1*3 = 21.
    const auto f23 = tensor(swap_op(2), swap_op(3));
    const auto eig = eig_hermitian(f23);
    int plus = 0, minus = 0;
    for (int i = 0; i < eig.values.size(); ++i) {
        if (std::abs(eig.values(i) - 1.0) < 1e-10) ++plus;
        else if (std::abs(eig.values(i) + 1.0) < 1e-10) ++minus;
    }
    REQUIRE(plus == 21);
    REQUIRE(minus == 15);
}

TEST_CASE("partial transpose", "[operators]") {
    const auto f3 = swap_op(3);
    const auto p3 = partial_transpose(f3, SubsystemSplit::of({0}));
    REQUIRE((p3.mat / 3.0 - max_entangled(3).mat).norm() < 1e-15);
    const auto eig = eig_hermitian(scaled(1.0 / 3.0, p3));
    REQUIRE(eig.values(8) == Approx(1.0).margin(1e-12));  // rank one
    for (int i = 0; i < 8; ++i) REQUIRE(eig.values(i) == Approx(0.0).margin(1e-12));

    const auto id = identity_operator({3, 3});
    REQUIRE((partial_transpose(id, SubsystemSplit::of({0})).mat - id.mat).norm() == 0.0);

    Rng rng(7002);
    const auto x = testutil::random_hermitian({2, 2, 3, 3}, rng);
    const auto split = SubsystemSplit::of({0, 2});
    const auto twice = partial_transpose(partial_transpose(x, split), split);
    REQUIRE((twice.mat - x.mat).norm() == 0.0);  // involution, exact

    // Tr(X^{T_A} Y) = Tr(X Y^{T_A})
    const auto y = testutil::random_hermitian({2, 2, 3, 3}, rng);
    const double lhs = hs_inner(partial_transpose(x, split), y);
    const double rhs = hs_inner(x, partial_transpose(y, split));
    REQUIRE(lhs == Approx(rhs).margin(1e-10));

    REQUIRE_THROWS_AS(partial_transpose(x, SubsystemSplit::of({5})),
                      std::invalid_argument);
}

TEST_CASE("werner partial transpose spectrum", "[operators]") {
    // eigenvalues of (I + beta d P)/(d^2 + d beta): (1 + beta d)/(d^2 + d beta)
    // once and 1/(d^2 + d beta) with multiplicity d^2 - 1
    for (double beta : {-1.0, -0.5, -0.25}) {
        const int d = 3;
        const auto rho = werner_state(make_werner_params(d, beta));
        const auto pt = partial_transpose(rho, SubsystemSplit::of({0}));
        const auto eig = eig_hermitian(pt);
        const double lo = (1.0 + beta * d) / (d * d + d * beta);
        const double hi = 1.0 / (d * d + d * beta);
        Eigen::VectorXd expected(d * d);
        expected.setConstant(hi);
        expected(0) = lo;
        std::sort(expected.data(), expected.data() + expected.size());
        for (int i = 0; i < d * d; ++i)
            REQUIRE(eig.values(i) == Approx(expected(i)).margin(1e-12));
    }
    const auto pt1 = partial_transpose(werner_state(make_werner_params(3, -1.0)),
                                       SubsystemSplit::of({0}));
    REQUIRE(min_eigenvalue(pt1) == Approx(-1.0 / 3.0).margin(1e-12));
}

TEST_CASE("partial trace", "[operators]") {
    Rng rng(7003);
    const auto a = testutil::random_hermitian({2, 2}, rng);
    const auto b = testutil::random_hermitian({3}, rng);
    const auto ab = tensor(a, b);
    const auto ta = partial_trace(ab, {0, 1});
    REQUIRE((ta.mat - b.trace() * a.mat).norm() < 1e-12);
    REQUIRE(ta.trace() == Approx(ab.trace()).margin(1e-10));

    // Tr_B of the maximally entangled state is maximally mixed
    const auto phi3 = max_entangled(3);
    const auto red = partial_trace(phi3, {0});
    REQUIRE((red.mat - Eigen::MatrixXcd::Identity(3, 3) / 3.0).norm() < 1e-14);

    REQUIRE_THROWS_AS(partial_trace(ab, {}), std::invalid_argument);
}

TEST_CASE("partial expectation", "[operators]") {
    Rng rng(7004);
    const auto a = testutil::random_hermitian({2}, rng);
    const auto b = testutil::random_hermitian({3}, rng);
    const auto ab = tensor(a, b);
    const auto psi = sample_haar_vector(2, rng);
    const auto m = partial_expectation(ab, psi.amplitudes, {0});
    const Complex exp_a = (psi.amplitudes.adjoint() * a.mat * psi.amplitudes)(0);
    REQUIRE((m - exp_a * b.mat).norm() < 1e-12);

    REQUIRE_THROWS_AS(partial_expectation(ab, psi.amplitudes, {0, 1}),
                      std::invalid_argument);
}

TEST_CASE("hermitian eigensolve contract", "[operators]") {
    const auto eig_i6 = eig_hermitian(identity_operator({2, 3}));
    for (int i = 0; i < 6; ++i) REQUIRE(eig_i6.values(i) == Approx(1.0));

    const auto eig_f3 = eig_hermitian(swap_op(3));
    for (int i = 0; i < 3; ++i) REQUIRE(eig_f3.values(i) == Approx(-1.0));
    for (int i = 3; i < 9; ++i) REQUIRE(eig_f3.values(i) == Approx(1.0));

    Rng rng(7005);
    const auto x = testutil::random_hermitian({3, 3}, rng);
    const auto eig = eig_hermitian(x);
    const Eigen::MatrixXcd recon =
        eig.vectors * eig.values.asDiagonal() * eig.vectors.adjoint();
    REQUIRE((x.mat - recon).norm() <= 1e-10 * x.mat.norm());
    REQUIRE((eig.vectors.adjoint() * eig.vectors -
             Eigen::MatrixXcd::Identity(9, 9)).norm() < 1e-10);
}

TEST_CASE("candidate witness one-copy spectrum", "[operators]") {
    // W1(-1/2): eigenvalue -1/15 once, 2/15 eight times, 0 on the rest
    const auto w1 = wn_dense(make_werner_params(3, -0.5), 1);
    const auto eig = eig_hermitian(w1);
    std::map<long, int> counts;
    for (int i = 0; i < 36; ++i)
        counts[std::lround(eig.values(i) * 1e6)]++;
    REQUIRE(counts[std::lround(-1e6 / 15.0)] == 1);
    REQUIRE(counts[std::lround(2e6 / 15.0)] == 8);
    REQUIRE(counts[0] == 27);
}

TEST_CASE("psd checks", "[operators]") {
    REQUIRE(is_psd(max_entangled(3), 1e-9));
    const auto pt = partial_transpose(werner_state(make_werner_params(3, -1.0)),
                                      SubsystemSplit::of({0}));
    REQUIRE_FALSE(is_psd(pt, 1e-9));
    REQUIRE(is_psd(wn_dense(make_werner_params(3, -1.0 / 3.0), 1), 1e-9));
}

TEST_CASE("haar sampling", "[operators]") {
    Rng rng(7006);
    const auto s1 = sample_haar_vector(1, rng);
    REQUIRE(std::abs(s1.amplitudes(0)) == Approx(1.0).margin(1e-14));

    // first-moment check: E |<e1|psi>|^2 = 1/dim; the rotated frame must agree
    const int dim = 6, n = 100000;
    Rng stat_rng(90210);
    Rng u_rng(90211);
    const Eigen::MatrixXcd u = testutil::haar_unitary(dim, u_rng);
    double mean = 0.0, mean_rot = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto psi = stat_rng.haar_vector(dim);
        mean += std::norm(psi(0));
        mean_rot += std::norm((u.row(0) * psi)(0));
    }
    mean /= n;
    mean_rot /= n;
    // Var(|c1|^2) = (d-1)/(d^2 (d+1)); three sigma of the sample mean
    const double sigma = std::sqrt((dim - 1.0) / (double(dim) * dim * (dim + 1)) / n);
    REQUIRE(std::abs(mean - 1.0 / dim) < 3.0 * sigma);
    REQUIRE(std::abs(mean_rot - 1.0 / dim) < 3.0 * sigma);

    // determinism: same seed, same stream -> identical draws
    Rng r1(42), r2(42);
    REQUIRE((r1.haar_vector(5) - r2.haar_vector(5)).norm() == 0.0);
    Rng r3(43);
    REQUIRE((Rng(42).haar_vector(5) - r3.haar_vector(5)).norm() > 1e-3);

    REQUIRE_THROWS_AS(sample_haar_vector(0, rng), std::invalid_argument);
}

TEST_CASE("pure state validation", "[operators]") {
    Eigen::VectorXcd v(2);
    v << 1.0, 1.0;
    REQUIRE_THROWS_AS(make_pure_state(v), std::invalid_argument);
    v << 1.0, 0.0;
    REQUIRE(make_pure_state(v).dim == 2);
}
