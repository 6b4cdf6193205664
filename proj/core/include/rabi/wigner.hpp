// wigner.hpp — reduced boson density matrix and its Wigner distribution
//
// W(x, p) = (1/2pi) int dy <x - y/2| rho_f |x + y/2> e^{i p y}, normalized to 1,
// with x = (a + a^dag)/sqrt2 and p = i(a^dag - a)/sqrt2.

#pragma once

#include <Eigen/Dense>

#include "rabi/eigensolver.hpp"
#include "rabi/quench.hpp"

namespace rabi {

/// rho_f[n, m] = sum_s psi(n, s) conj(psi(m, s)) for a product-basis state.
Eigen::MatrixXcd reduce_field(const Eigen::VectorXcd& state);

/// sum_nu C_nu e^{-i E_nu t} |psi_nu> in the product basis.
Eigen::VectorXcd state_at_time(const QuenchState& state, double t);

/// Eigenvector `index` of `dec` as a complex product-basis state.
Eigen::VectorXcd eigenstate_vector(const EigenDecomposition& dec, Index index);

/// Normalized oscillator eigenfunctions phi_0..phi_{n_max}(x), built by the three-term
/// recurrence of normalized functions with exponent rescaling (no overflow at large n).
Eigen::VectorXd hermite_functions(int n_max, double x);

struct WignerGridSpec {
    double x_min{-25.0};
    double x_max{25.0};
    int nx{512};
    double p_min{-25.0};
    double p_max{25.0};
    int np{512};
};

/// Square grid covering the field support: half-width max(2g + 5, sqrt(2 n_max + 1) + 4)
/// and enough points that the grid spacing resolves interference between the extremes.
WignerGridSpec default_wigner_grid(double g, int n_max);

/// Largest Fock index n such that the diagonal weight beyond n stays below `tail`.
/// Dropped coherences scale like sqrt(tail), hence the small default.
int field_support(const Eigen::MatrixXcd& rho, double tail = 1e-26);

enum class WignerSource { EvolvedState, Eigenstate, Custom };

struct WignerGrid {
    Eigen::VectorXd x_axis;
    Eigen::VectorXd p_axis;
    Eigen::MatrixXd values;  // values(i, j) = W(x_i, p_j)
    double time{0.0};
    WignerSource source{WignerSource::Custom};

    double normalization{0.0};    // sum W dx dp
    double imag_residue{0.0};     // bound on |Im W| over the grid
    double marginal_error{0.0};   // max_x |sum_p W dp - <x|rho|x>|
    double support_fraction{0.0}; // min of position and momentum mass inside the grid
    double origin_value{0.0};     // W(0,0) by quadrature
    double origin_parity{0.0};    // tr(rho (-1)^n) / pi

    double dx() const { return x_axis.size() > 1 ? x_axis(1) - x_axis(0) : 0.0; }
    double dp() const { return p_axis.size() > 1 ? p_axis(1) - p_axis(0) : 0.0; }
};

struct WignerOptions {
    /// Grids losing more than this probability mass are rejected.
    double max_missing_mass{1e-5};
};

/// Throws InvalidArgument for a non-Hermitian / non-unit-trace rho or a grid that misses
/// more than options.max_missing_mass of the state.
WignerGrid wigner_transform(const Eigen::MatrixXcd& rho, const WignerGridSpec& grid, const WignerOptions& options = {});

/// Position density <x|rho|x> at the given points.
Eigen::VectorXd position_density(const Eigen::MatrixXcd& rho, const Eigen::VectorXd& xs);

/// integral |W| dx dp - 1, zero for non-negative distributions.
double negativity_volume(const WignerGrid& grid);

}  // namespace rabi
