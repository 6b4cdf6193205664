// quench.hpp — quench protocol and spectral time evolution
//
// A state |Psi(0)> = sum_nu C_nu |psi_nu> evolves as sum_nu C_nu e^{-i E_nu t} |psi_nu>.
// Expectations, long-time (diagonal ensemble) averages and temporal fluctuations
// are evaluated in the eigenbasis of the post-quench Hamiltonian.

#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "rabi/eigensolver.hpp"
#include "rabi/hamiltonian.hpp"
#include "rabi/model.hpp"

namespace rabi {

/// Populations below this are dropped from double sums over eigenstates.
inline constexpr double kDefaultCoefficientCutoff = 1e-16;

struct QuenchState {
    Eigen::VectorXcd coeffs;  // C_nu
    double energy{0.0};       // sum |C_nu|^2 E_nu
    std::shared_ptr<const EigenDecomposition> decomposition;
    std::vector<Index> support;    // nu with |C_nu|^2 >= cutoff, ascending
    double discarded_weight{0.0};  // sum of |C_nu|^2 outside the support

    Index dimension() const { return coeffs.size(); }
};

struct ObservableInEigenbasis {
    Eigen::MatrixXcd elements;  // A_{nu mu} = <psi_nu|A|psi_mu>
    ObservableKind kind{ObservableKind::Custom};
};

/// Expands a product-basis state in the eigenbasis of `dec`. The state must be normalized.
QuenchState prepare_state(const Eigen::VectorXcd& initial, std::shared_ptr<const EigenDecomposition> dec,
                          double cutoff = kDefaultCoefficientCutoff);

/// Ground state of H(initial) expanded in the eigenbasis of H(final).
/// Throws InvalidArgument when the truncations differ.
QuenchState quench(const ModelParams& initial, const ModelParams& final);

ObservableInEigenbasis to_eigenbasis(const HermitianObservable& obs, const EigenDecomposition& dec);

struct Expectation {
    double value{0.0};
    double imag_residue{0.0};
};

/// Evaluates <Psi(t)|A|Psi(t)> for many times; holds the support block of A.
class ExpectationEvaluator {
public:
    ExpectationEvaluator(const QuenchState& state, const ObservableInEigenbasis& obs);

    Expectation evaluate(double t) const;
    double operator()(double t) const { return evaluate(t).value; }

private:
    Eigen::VectorXcd coeffs_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXcd block_;
};

double expectation_at(const QuenchState& state, const ObservableInEigenbasis& obs, double t);
Expectation evaluate_expectation(const QuenchState& state, const ObservableInEigenbasis& obs, double t);

/// Diagonal-ensemble average sum_nu |C_nu|^2 A_{nu nu}.
double long_time_average(const QuenchState& state, const ObservableInEigenbasis& obs);

/// Uniform random sampling times, reproducible from the seed on every platform.
struct TimeSampling {
    double t_min{1e3};
    double t_max{1e6};
    int samples{10000};
    std::uint64_t seed{0};
};

std::vector<double> sample_times(const TimeSampling& sampling);

enum class VarianceMode { Spectral, Sampled };

struct VarianceOptions {
    TimeSampling sampling{};
    /// Two gaps E_mu - E_nu closer than this count as a collision.
    double gap_tolerance{1e-10};
    /// Spectral mode falls back to sampling above this collision fraction.
    double max_collision_fraction{0.01};
};

struct VarianceResult {
    double deviation{0.0};  // delta_A, the standard deviation of A(t) around its time average
    VarianceMode mode{VarianceMode::Spectral};
    bool fell_back{false};
    double gap_collision_fraction{0.0};
    double discarded_weight{0.0};
    double standard_error{0.0};  // sampled mode only
    double sample_mean{0.0};     // sampled mode only
};

/// Temporal fluctuation delta_A of <A(t)>. Spectral mode uses
/// delta_A^2 = sum_{nu != mu} |C_nu|^2 |C_mu|^2 |A_{nu mu}|^2, valid for non-degenerate gaps.
VarianceResult long_time_variance(const QuenchState& state, const ObservableInEigenbasis& obs, VarianceMode mode,
                                  const VarianceOptions& options = {});

/// Share of the pair weight sum_{nu<mu} w_nu w_mu (w = |C|^2) carried by support gaps
/// E_mu - E_nu that collide with another gap. Tail states of negligible weight sit on a
/// nearly harmonic ladder, so an unweighted count would flag them.
double gap_collision_fraction(const QuenchState& state, double tolerance = 1e-10);

}  // namespace rabi
