// hamiltonian.hpp — truncated driven Rabi Hamiltonian, parity and observables
//
// All matrices live in the flat product basis i = 2n + (s - 1), with hard
// truncation at n = n_tr (ladder elements into n_tr + 1 are dropped).

#pragma once

#include <string_view>

#include <Eigen/Dense>

#include "rabi/model.hpp"

namespace rabi {

enum class ObservableKind {
    N,
    X,
    P,
    SigmaX,
    SigmaY,
    SigmaZ,
    XSigmaX,
    Hamiltonian,
    Parity,
    Custom,
};

std::string_view to_string(ObservableKind kind);
/// Parses "n", "x", "p", "sx", "sy", "sz", "xsx" (and the enum spellings). Throws InvalidArgument.
ObservableKind parse_observable_kind(std::string_view name);

/// Hermitian operator stored as A = sym + i * antisym.
struct HermitianObservable {
    Eigen::MatrixXd sym;
    Eigen::MatrixXd antisym;
    ObservableKind kind{ObservableKind::Custom};

    Index dimension() const { return sym.rows(); }
    bool is_real() const { return antisym.size() == 0 || antisym.isZero(0.0); }
    Eigen::MatrixXcd full() const;

    /// Real symmetric observable; antisym is set to zero.
    static HermitianObservable real(Eigen::MatrixXd matrix, ObservableKind kind = ObservableKind::Custom);
};

HermitianObservable build_hamiltonian(const ModelParams& params);

/// kind must be one of N, X, P, SigmaX, SigmaY, SigmaZ, XSigmaX.
HermitianObservable build_observable(ObservableKind kind, int n_tr);

/// Pi = sz (-1)^n, diagonal with entries +-1.
HermitianObservable build_parity(int n_tr);

/// Diagonal of build_parity(n_tr) as a vector.
Eigen::VectorXd parity_diagonal(int n_tr);

/// Hamiltonian after displacing the boson by x -> x - lambda/(sqrt(2) g):
///   a^dag a - (lambda / 2g)(a^dag + a) + lambda^2 / 4g^2 + (omega/2) sz + g (a^dag + a) sx.
/// Unitarily equivalent to build_hamiltonian(params) in the untruncated space.
/// Throws InvalidArgument when g == 0 (the displacement is undefined).
HermitianObservable build_displaced_hamiltonian(const ModelParams& params);

/// max_ij |(AB - BA)_ij| for the real symmetric parts.
double commutator_max_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace rabi
