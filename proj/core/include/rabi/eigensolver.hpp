// eigensolver.hpp — dense real-symmetric eigendecomposition
//
// Householder reduction to tridiagonal form followed by implicitly shifted QL
// iterations with eigenvector accumulation. O(D^3), no external LAPACK.

#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "rabi/model.hpp"

namespace rabi {

struct EigenDecomposition {
    Eigen::VectorXd energies;  // ascending
    Eigen::MatrixXd vectors;   // column nu is |psi_nu>, orthonormal
    std::uint64_t params_hash{0};

    Index dimension() const { return energies.size(); }
};

struct EigensolverOptions {
    int max_iterations_per_eigenvalue{50};
    /// Consecutive eigenvalues closer than this form a cluster that is
    /// re-orthogonalized and sign-fixed as a unit.
    double degeneracy_tolerance{1e-10};
    /// Allowed |A - A^T| relative to max|A| before the input is rejected.
    double symmetry_tolerance{1e-14};
    /// Eigenvalues only; `vectors` is left empty.
    bool compute_vectors{true};
};

/// Full eigendecomposition. Throws InvalidArgument for non-symmetric or
/// non-finite input and NumericalError when QL fails to converge.
EigenDecomposition eigendecompose(const Eigen::MatrixXd& matrix, const EigensolverOptions& options = {});

/// Eigendecomposition respecting a diagonal symmetry: `sector_labels[i]` tags basis
/// state i (e.g. the parity diagonal). Each sector block is diagonalized separately
/// so every returned eigenvector lies in a single sector, which fixes the gauge
/// inside degenerate multiplets of different symmetry. Throws InvalidArgument if
/// the matrix couples different sectors.
EigenDecomposition eigendecompose_in_sectors(const Eigen::MatrixXd& matrix,
                                             const Eigen::VectorXd& sector_labels,
                                             const EigensolverOptions& options = {});

/// Eigendecomposition of build_hamiltonian(params), tagged with hash_params(params).
EigenDecomposition decompose_hamiltonian(const ModelParams& params, const EigensolverOptions& options = {});

/// Normalized lowest eigenvector of build_hamiltonian(params), largest-magnitude
/// component positive. Throws DegenerateGroundState if E1 - E0 < 1e-12.
Eigen::VectorXd ground_state(const ModelParams& params);

/// Same, reusing an existing decomposition.
Eigen::VectorXd ground_state(const EigenDecomposition& dec);

/// Number of eigendecompositions performed by this process (instrumentation).
std::uint64_t eigensolver_invocations();

struct DecompositionResiduals {
    double orthogonality{0.0};  // max |V^T V - I|
    double residual{0.0};       // max |H V - V diag(E)|
    double trace_error{0.0};    // |sum E - tr H| / max(1, |tr H|)
    bool sorted{true};
};

DecompositionResiduals check_decomposition(const EigenDecomposition& dec, const Eigen::MatrixXd& matrix);

/// Throws NumericalError if the residuals violate the decomposition invariants
/// (orthogonality 1e-10, residual 1e-8 * max|H|).
void validate_decomposition(const EigenDecomposition& dec, const Eigen::MatrixXd& matrix);

/// Reduces a symmetric matrix to tridiagonal form, Q^T A Q = T. Exposed for tests.
struct Tridiagonal {
    Eigen::VectorXd diagonal;
    Eigen::VectorXd off_diagonal;  // size D - 1 (0 for D <= 1)
    Eigen::MatrixXd q;  // empty unless accumulated
};
Tridiagonal tridiagonalize(const Eigen::MatrixXd& matrix, bool accumulate_q = true);

}  // namespace rabi
