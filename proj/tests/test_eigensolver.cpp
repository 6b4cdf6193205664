// test_eigensolver.cpp — Householder + QL solver against a Jacobi-rotation oracle

#include "doctest.h"

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "rabi/eigensolver.hpp"
#include "rabi/errors.hpp"
#include "rabi/hamiltonian.hpp"

using namespace rabi;

namespace {

Eigen::MatrixXd random_symmetric(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd a(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j <= i; ++j) a(i, j) = a(j, i) = normal(rng);
    }
    return a;
}

}  // namespace

TEST_CASE("eigenvalues and eigenvectors agree with the Jacobi oracle") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Eigen::MatrixXd a = random_symmetric(37, seed);
        const auto dec = eigendecompose(a);
        const auto [w, v] = oracle::jacobi_eigen(a);
        CHECK((dec.energies - w).cwiseAbs().maxCoeff() < 1e-12);
        // eigenvectors agree up to sign: |<u, v>| = 1
        for (Index k = 0; k < w.size(); ++k) CHECK(std::abs(std::abs(dec.vectors.col(k).dot(v.col(k))) - 1.0) < 1e-10);
        const auto res = check_decomposition(dec, a);
        CHECK(res.orthogonality < 1e-13);
        CHECK(res.residual < 1e-12);
        CHECK(res.sorted);
    }
}

TEST_CASE("Rabi Hamiltonian spectrum against the oracle") {
    const ModelParams p{1.0, 3.0, 2.0, 30};
    const auto dec = decompose_hamiltonian(p);
    const auto [w, v] = oracle::jacobi_eigen(oracle::hamiltonian(p));
    CHECK((dec.energies - w).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(dec.params_hash == hash_params(p));
    CHECK_NOTHROW(validate_decomposition(dec, build_hamiltonian(p).sym));
}

TEST_CASE("sign convention: largest component positive") {
    const auto dec = eigendecompose(random_symmetric(20, 42));
    for (Index k = 0; k < dec.dimension(); ++k) {
        Index imax = 0;
        dec.vectors.col(k).cwiseAbs().maxCoeff(&imax);
        CHECK(dec.vectors(imax, k) > 0.0);
    }
}

TEST_CASE("degenerate spectra keep an orthonormal basis") {
    // Q diag(1,1,1,2,2,3,...) Q^T with a random orthogonal Q
    const Index n = 24;
    Eigen::VectorXd d(n);
    for (Index i = 0; i < n; ++i) d(i) = static_cast<double>(i / 3);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_symmetric(n, 7));
    const Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd a = q * d.asDiagonal() * q.transpose();
    const auto dec = eigendecompose(0.5 * (a + a.transpose()));
    CHECK((dec.energies - d).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(check_decomposition(dec, a).orthogonality < 1e-12);
}

TEST_CASE("eigenvalue-only mode") {
    const Eigen::MatrixXd a = random_symmetric(30, 3);
    EigensolverOptions opts;
    opts.compute_vectors = false;
    const auto vals = eigendecompose(a, opts);
    CHECK(vals.vectors.size() == 0);
    CHECK((vals.energies - eigendecompose(a).energies).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tridiagonalization is an orthogonal similarity") {
    const Eigen::MatrixXd a = random_symmetric(25, 11);
    const auto t = tridiagonalize(a);
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(25, 25);
    tri.diagonal() = t.diagonal;
    tri.diagonal(1) = t.off_diagonal;
    tri.diagonal(-1) = t.off_diagonal;
    CHECK((t.q.transpose() * t.q - Eigen::MatrixXd::Identity(25, 25)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((t.q.transpose() * a * t.q - tri).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trivial sizes and invariance under basis permutation") {
    const auto one = eigendecompose(Eigen::MatrixXd::Constant(1, 1, 3.5));
    CHECK(one.energies(0) == 3.5);
    CHECK(one.vectors(0, 0) == 1.0);

    const Eigen::MatrixXd a = random_symmetric(15, 5);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(15);
    perm.setIdentity();
    std::mt19937 rng(2);
    std::shuffle(perm.indices().data(), perm.indices().data() + 15, rng);
    const Eigen::MatrixXd b = perm * a * perm.transpose();
    CHECK((eigendecompose(a).energies - eigendecompose(b).energies).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("input validation") {
    Eigen::MatrixXd a = random_symmetric(5, 1);
    a(0, 1) += 1e-6;
    CHECK_THROWS_AS(eigendecompose(a), InvalidArgument);
    a = random_symmetric(5, 1);
    a(2, 2) = std::nan("");
    CHECK_THROWS_AS(eigendecompose(a), InvalidArgument);
    CHECK_THROWS_AS(eigendecompose(Eigen::MatrixXd(3, 4)), InvalidArgument);
}

TEST_CASE("ground state and its degeneracy guard") {
    const ModelParams p{1.0, 0.5, 0.3, 20};
    const Eigen::VectorXd gs = ground_state(p);
    const Eigen::MatrixXd h = oracle::hamiltonian(p);
    const Eigen::VectorXd ref = oracle::jacobi_ground_state(h);
    CHECK(std::abs(std::abs(gs.dot(ref)) - 1.0) < 1e-12);
    CHECK(std::abs(gs.norm() - 1.0) < 1e-14);
    // omega = 0, g = 0, lambda = 0: every level doubly degenerate
    CHECK_THROWS_AS(ground_state(ModelParams{0.0, 0.0, 0.0, 4}), DegenerateGroundState);
}

TEST_CASE("sector-resolved decomposition fixes the parity gauge") {
    const ModelParams p{1.0, 4.0, 0.0, 60};
    const auto h = build_hamiltonian(p).sym;
    const Eigen::VectorXd parity = parity_diagonal(p.n_tr);
    const auto before = eigensolver_invocations();
    const auto dec = eigendecompose_in_sectors(h, parity);
    CHECK(eigensolver_invocations() == before + 1);
    CHECK((dec.energies - eigendecompose(h).energies).cwiseAbs().maxCoeff() < 1e-10);
    for (Index k = 0; k < dec.dimension(); ++k) {
        const Eigen::VectorXd v = dec.vectors.col(k);
        CHECK(std::abs(std::abs(v.dot(parity.cwiseProduct(v))) - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(eigendecompose_in_sectors(build_hamiltonian(p.with_g(4.0)).sym + build_observable(ObservableKind::SigmaX, p.n_tr).sym, parity),
                    InvalidArgument);
}

TEST_CASE("invocation counter") {
    const auto before = eigensolver_invocations();
    (void)eigendecompose(random_symmetric(4, 9));
    (void)decompose_hamiltonian({1.0, 1.0, 0.0, 3});
    CHECK(eigensolver_invocations() == before + 2);
}
