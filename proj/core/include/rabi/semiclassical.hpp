// semiclassical.hpp — mean-field boson coupled to a quantum spin
//
// H_cl = p^2/2 + x^2/2 + (w/2) Z + (g sqrt2 x + lambda) sqrt(1 - Z^2) cos(dphi),
// with (x, p) and (dphi, Z) canonical pairs.

#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "rabi/model.hpp"

namespace rabi {

struct ClassicalState {
    double x{0.0};
    double p{0.0};
    double Z{0.0};
    double dphi{0.0};  // unwrapped along trajectories
};

/// Throws InvalidArgument when |Z| > 1.
double classical_energy(const ClassicalState& s, const ModelParams& params);

/// Hamiltonian flow of H_cl in the (Z, dphi) chart: dphi' = dH/dZ, Z' = -dH/ddphi.
/// Throws NumericalError at the poles |Z| >= 1.
ClassicalState eom_rhs(const ClassicalState& s, const ModelParams& params);

/// Z' written without the drive: g sqrt2 x sqrt(1 - Z^2) sin(dphi). Differs from the
/// flow of H_cl by lambda sqrt(1 - Z^2) sin(dphi); kept for reporting that difference.
double z_rate_undriven_form(const ClassicalState& s, const ModelParams& params);

/// Pole-free variables (x, p, s_x, s_y, s_z) with s = (sqrt(1-Z^2) cos dphi, sqrt(1-Z^2) sin dphi, Z).
using CartesianState = std::array<double, 5>;

CartesianState to_cartesian(const ClassicalState& s);
/// `dphi_hint` selects the branch of the unwrapped phase closest to it.
ClassicalState from_cartesian(const CartesianState& c, double dphi_hint = 0.0);

/// s' = B x s with B = (g sqrt2 x + lambda, 0, w/2); p' = -x - g sqrt2 s_x.
CartesianState cartesian_rhs(const CartesianState& c, const ModelParams& params);
double cartesian_energy(const CartesianState& c, const ModelParams& params);

enum class Chart { Angular, Cartesian };

struct IntegrationOptions {
    Chart chart{Chart::Cartesian};
    double abs_tolerance{1e-12};
    double rel_tolerance{1e-12};
    /// Angular chart only: |Z| > 1 - pole_epsilon aborts.
    double pole_epsilon{1e-9};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ClassicalState> states;
    std::vector<double> energies;
    ModelParams params;
    IntegrationOptions options;

    double max_energy_drift() const;
};

/// Adaptive Runge-Kutta-Fehlberg 7(8) sampled every dt up to t_end (t_end < 0 integrates backwards).
/// Throws InvalidArgument for bad inputs and NumericalError on a pole or stalled step control.
Trajectory integrate(const ClassicalState& s0, const ModelParams& params, double t_end, double dt,
                     const IntegrationOptions& options = {});

/// Single state propagated by `t` (may be negative).
ClassicalState propagate(const ClassicalState& s0, const ModelParams& params, double t,
                         const IntegrationOptions& options = {});

enum class Coordinate { X, P, Z, Dphi };

struct SurfaceSpec {
    Coordinate variable{Coordinate::Z};
    double value{0.0};
    int direction{+1};  // +1 upward crossings, -1 downward, 0 both
    Coordinate first{Coordinate::X};
    Coordinate second{Coordinate::P};
    /// Points with |H_cl - shell| above this are dropped; the shell defaults to the initial energy.
    double shell_tolerance{1e-6};
    bool has_shell{false};
    double shell{0.0};
};

struct SectionPoint {
    double time{0.0};
    double first{0.0};
    double second{0.0};
    double energy{0.0};
};

/// Crossings located by root finding on re-integrated segments. Throws NumericalError when
/// no crossing lies on the shell. Dphi is reported wrapped to (-pi, pi]; it cannot be the
/// surface variable.
std::vector<SectionPoint> poincare_section(const Trajectory& traj, const SurfaceSpec& surface = {});

/// Fraction of occupied cells in a bins x bins box covering the bounding box of the points.
double section_fill_fraction(const std::vector<SectionPoint>& points, int bins = 40);

struct LyapunovOptions {
    double renormalization_interval{1.0};
    double initial_separation{1e-8};
    std::uint64_t seed{0};
    /// Converged when the running exponent over the last `tail_fraction` of the run stays
    /// within max(relative_band * |lambda|, absolute_band) of the final value.
    double tail_fraction{0.2};
    double relative_band{0.1};
    double absolute_band{1e-3};
    bool require_convergence{false};
    IntegrationOptions integration{};
};

struct LyapunovResult {
    double exponent{0.0};
    std::vector<double> times;
    std::vector<double> history;  // running estimate after each renormalization
    bool converged{false};
};

/// Benettin estimate of the largest exponent in the Cartesian chart: a reference orbit and a
/// neighbour at distance initial_separation, renormalized every interval.
LyapunovResult lyapunov_largest(const ClassicalState& s0, const ModelParams& params, double t_total,
                                const LyapunovOptions& options = {});

struct AdiabaticPotentials {
    double minus{0.0};
    double plus{0.0};
};

/// V_pm(x) = x^2/2 pm sqrt(w^2/4 + (sqrt2 g x + lambda)^2).
AdiabaticPotentials adiabatic_potentials(double x, const ModelParams& params);

/// Point with the given x, Z, dphi and p >= 0 on the shell H_cl = energy.
/// Throws InvalidArgument when the shell is not reachable from that configuration.
ClassicalState state_on_shell(const ModelParams& params, double energy, double x, double Z, double dphi);

}  // namespace rabi
