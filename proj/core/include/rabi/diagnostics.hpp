// diagnostics.hpp — thermalization diagnostics for quenched states and spectra
//
// Inverse participation ratio, microcanonical averages, level-spacing
// statistics, Gaussianity of temporal fluctuations, eigenstate populations,
// truncation convergence and coupling sweeps.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rabi/eigensolver.hpp"
#include "rabi/model.hpp"
#include "rabi/quench.hpp"
#include "rabi/statistics.hpp"

namespace rabi {

/// (sum |C_nu|^4)^-1. Throws InvalidArgument if sum |C_nu|^2 deviates from 1 by more than 1e-8.
double ipr(const Eigen::VectorXcd& coeffs);

/// Mean of A_{gamma gamma} over eigenvalues in [energy - delta, energy + delta].
/// Throws InvalidArgument if the window is empty.
double microcanonical_average(const EigenDecomposition& dec, const ObservableInEigenbasis& obs, double energy,
                              double delta);

/// Mean spacing of the `neighbours` eigenvalues closest to `energy`.
double local_mean_spacing(const Eigen::VectorXd& energies, double energy, int neighbours = 20);

/// Default microcanonical half-width: five local mean spacings.
double default_microcanonical_delta(const Eigen::VectorXd& energies, double energy);

struct EnergyWindow {
    double e_min{0.0};
    double e_max{0.0};
};

/// Consecutive gaps of the eigenvalues inside the window, divided by their mean.
/// Throws InvalidArgument with fewer than three eigenvalues in the window.
std::vector<double> level_spacings(const Eigen::VectorXd& energies, EnergyWindow window);

struct SpacingHistogram {
    std::vector<double> bin_edges;
    std::vector<double> counts;  // normalized densities
    double mean_spacing{0.0};    // mean raw gap before normalization
    EnergyWindow window;
};

/// Histogram of level_spacings over [0, max S]; `bins == 0` selects Freedman-Diaconis.
SpacingHistogram spacing_histogram(const Eigen::VectorXd& energies, EnergyWindow window, std::size_t bins = 0);

struct ReferenceDensities {
    std::vector<double> poisson;
    std::vector<double> wigner_dyson;
};

/// Poisson e^{-S} and Wigner-Dyson (S pi/2) e^{-S^2 pi/4} at each S >= 0.
ReferenceDensities reference_distributions(std::span<const double> spacings);

struct SpacingTests {
    std::size_t count{0};
    double ks_poisson{0.0};
    double ks_wigner_dyson{0.0};
    double critical_1pct{0.0};
    double critical_5pct{0.0};
};

SpacingTests spacing_ks_tests(std::span<const double> spacings);

/// Intra-pair gaps E_{2k+1} - E_{2k} of the eigenvalues below `energy_max`, and the mean
/// consecutive spacing over the same levels.
struct PairingReport {
    std::vector<double> pair_energies;
    std::vector<double> intra_gaps;
    double mean_spacing{0.0};
    double max_ratio{0.0};  // max intra gap / mean spacing
};
PairingReport parity_pairing(const Eigen::VectorXd& energies, double energy_max);

struct GaussianityOptions {
    double t_burn{1e3};
};

struct GaussianityReport {
    std::vector<double> times;
    std::vector<double> samples;  // A(t_k)
    double ks_statistic{0.0};
    double reference_mean{0.0};   // long-time average
    double reference_sigma{0.0};  // spectral delta_A
    double critical_5pct{0.0};

    bool passes() const { return ks_statistic < critical_5pct; }
};

/// KS distance of A(t_k), t_k uniform in [t_burn, t_max], against Normal(<A>_T, delta_A^2).
/// Throws NumericalError if delta_A vanishes (degenerate reference); n_samples must be >= 100.
GaussianityReport gaussianity_test(const QuenchState& state, const ObservableInEigenbasis& obs, int n_samples,
                                   double t_max, std::uint64_t seed, const GaussianityOptions& options = {});

/// Gamma(l) = |C_l|^2.
Eigen::VectorXd eigenstate_population(const QuenchState& state);

enum class ConvergenceQuantity { GroundEnergy, LongTimeAverageN, BosonDeviation, Ipr, Trace };

struct ConvergenceOptions {
    int n_start{8};
    int n_cap{4096};
    bool relative{false};  // compare |dq| / |q| instead of |dq|
    /// Pre-quench parameters for the quench quantities; n_tr is overridden.
    ModelParams quench_initial{1.0, 0.1, 0.0, 0};
};

struct ConvergenceStep {
    int n_tr{0};
    double value{0.0};
};

struct ConvergenceResult {
    int n_tr{0};
    double value{0.0};
    std::vector<ConvergenceStep> history;
};

/// Smallest n in n_start * 2^k with |q(2n) - q(n)| < tol. Throws InvalidArgument for
/// Trace (n_tr-dependent by construction) or tol <= 0, ResourceCapError past n_cap.
ConvergenceResult convergence_sweep(const ModelParams& params, ConvergenceQuantity quantity, double tol,
                                    const ConvergenceOptions& options = {});

/// Truncation that contains the classical orbit of energy `e_max` in the lower adiabatic
/// potential plus a quantum tail margin.
int estimate_truncation(const ModelParams& params, double e_max);

struct QuenchSpec {
    ModelParams initial{1.0, 0.1, 0.0, 0};  // n_tr is set per sweep point
};

using DecompositionProvider = std::function<std::shared_ptr<const EigenDecomposition>(const ModelParams&)>;

enum class TruncationPolicy { Fixed, Estimate, Converged };

struct SweepOptions {
    TruncationPolicy truncation{TruncationPolicy::Converged};
    double tolerance{1e-3};  // relative change of delta_n under doubling
    int n_cap{4096};
    VarianceMode variance_mode{VarianceMode::Spectral};
    VarianceOptions variance{};
    unsigned threads{0};  // 0: hardware concurrency
    /// Source of post- and pre-quench decompositions (e.g. a persistent cache); must be
    /// thread-safe. Unset: computed on demand.
    DecompositionProvider provider{};
};

struct SweepRow {
    double g{0.0};
    int n_tr{0};
    double delta_n{0.0};
    double mean_n{0.0};
    double ratio{0.0};
    double ipr{0.0};
    double energy{0.0};
};

/// Quench from spec.initial to template.with_g(g) for every g; rows in input order.
std::vector<SweepRow> variance_sweep(std::span<const double> g_values, const ModelParams& templ, const QuenchSpec& spec,
                                     const SweepOptions& options = {});

/// Row for a single coupling at a fixed truncation (templ.n_tr).
SweepRow quench_statistics_row(const ModelParams& final, const QuenchSpec& spec, const SweepOptions& options = {});

/// Truncation chosen by `options.truncation` for one sweep point.
int sweep_truncation(const ModelParams& final, const QuenchSpec& spec, const SweepOptions& options);

}  // namespace rabi
