// semiclassical.cpp

#include "rabi/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "rabi/errors.hpp"

namespace rabi {

namespace odeint = boost::numeric::odeint;

namespace {

using AngularState = std::array<double, 4>;
using Stepper5 = odeint::runge_kutta_fehlberg78<CartesianState>;
using Stepper4 = odeint::runge_kutta_fehlberg78<AngularState>;
using PairState = std::array<double, 10>;
using Stepper10 = odeint::runge_kutta_fehlberg78<PairState>;

constexpr double kSqrt2 = std::numbers::sqrt2;

void check_params(const ModelParams& params) {
    if (!std::isfinite(params.omega) || !std::isfinite(params.g) || !std::isfinite(params.lambda)) {
        throw InvalidArgument("semiclassical: non-finite model parameters");
    }
}

void check_state(const ClassicalState& s) {
    if (!std::isfinite(s.x) || !std::isfinite(s.p) || !std::isfinite(s.Z) || !std::isfinite(s.dphi)) {
        throw InvalidArgument("semiclassical: non-finite state");
    }
    if (std::abs(s.Z) > 1.0) throw InvalidArgument("semiclassical: |Z| > 1");
}

double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * std::numbers::pi);
    if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
    return w;
}

double coordinate(const ClassicalState& s, Coordinate c) {
    switch (c) {
        case Coordinate::X: return s.x;
        case Coordinate::P: return s.p;
        case Coordinate::Z: return s.Z;
        case Coordinate::Dphi: return wrap_angle(s.dphi);
    }
    return 0.0;
}

struct AngularSystem {
    const ModelParams& params;
    void operator()(const AngularState& y, AngularState& dy, double /*t*/) const {
        const ClassicalState d = eom_rhs({y[0], y[1], y[2], y[3]}, params);
        dy = {d.x, d.p, d.Z, d.dphi};
    }
};

struct CartesianSystem {
    const ModelParams& params;
    void operator()(const CartesianState& y, CartesianState& dy, double /*t*/) const { dy = cartesian_rhs(y, params); }
};

// Reference orbit (first five slots) and the scaled separation w = (y_pert - y_ref) / d0.
// The flow is bilinear, so f(y + d0 w) - f(y) = d0 (J w + d0 g sqrt2 w_x e_x x w_s) exactly;
// evaluating it in that form avoids the cancellation of differencing two nearby orbits.
struct PairSystem {
    const ModelParams& params;
    double d0;
    void operator()(const PairState& y, PairState& dy, double /*t*/) const {
        const double k = params.g * kSqrt2;
        const double bx = k * y[0] + params.lambda;
        const double bz = 0.5 * params.omega;
        dy[0] = y[1];
        dy[1] = -y[0] - k * y[2];
        dy[2] = -bz * y[3];
        dy[3] = bz * y[2] - bx * y[4];
        dy[4] = bx * y[3];
        // s_pert = s + d0 w_s, B_pert = B + (k d0 w_x, 0, 0)
        const double dbx = k * y[5];
        const double py = y[3] + d0 * y[8];
        const double pz = y[4] + d0 * y[9];
        dy[5] = y[6];
        dy[6] = -y[5] - k * y[7];
        dy[7] = -bz * y[8];
        dy[8] = bz * y[7] - bx * y[9] - dbx * pz;
        dy[9] = bx * y[8] + dbx * py;
    }
};

// Advances y from t0 to t1 with step control; odeint failures become NumericalError.
template <class Stepper, class State, class System>
void advance(State& y, const System& sys, double t0, double t1, const IntegrationOptions& opt) {
    if (t1 == t0) return;
    auto stepper = odeint::make_controlled<Stepper>(opt.abs_tolerance, opt.rel_tolerance);
    const double guess = std::copysign(std::min(0.01, std::abs(t1 - t0)), t1 - t0);
    try {
        odeint::integrate_adaptive(stepper, sys, y, t0, t1, guess);
    } catch (const odeint::odeint_error& e) {
        throw NumericalError(std::string("integrate: step control failed: ") + e.what());
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw NumericalError("integrate: non-finite state");
    }
}

void check_pole(const ClassicalState& s, const IntegrationOptions& opt) {
    if (opt.chart == Chart::Angular && std::abs(s.Z) > 1.0 - opt.pole_epsilon) {
        throw NumericalError("integrate: trajectory reached a pole of the (Z, dphi) chart");
    }
}

}  // namespace

double classical_energy(const ClassicalState& s, const ModelParams& params) {
    if (std::abs(s.Z) > 1.0) throw InvalidArgument("classical_energy: |Z| > 1");
    const double r = std::sqrt(std::max(0.0, 1.0 - s.Z * s.Z));
    return 0.5 * s.p * s.p + 0.5 * s.x * s.x + 0.5 * params.omega * s.Z +
           (params.g * s.x * kSqrt2 + params.lambda) * r * std::cos(s.dphi);
}

ClassicalState eom_rhs(const ClassicalState& s, const ModelParams& params) {
    if (!(std::abs(s.Z) < 1.0)) throw NumericalError("eom_rhs: pole of the (Z, dphi) chart");
    const double r = std::sqrt(1.0 - s.Z * s.Z);
    const double c = std::cos(s.dphi);
    const double sn = std::sin(s.dphi);
    const double field = params.g * kSqrt2 * s.x + params.lambda;
    ClassicalState d;
    d.x = s.p;
    d.p = -s.x - params.g * kSqrt2 * r * c;
    d.Z = field * r * sn;
    d.dphi = 0.5 * params.omega - field * c * s.Z / r;
    return d;
}

double z_rate_undriven_form(const ClassicalState& s, const ModelParams& params) {
    const double r = std::sqrt(std::max(0.0, 1.0 - s.Z * s.Z));
    return params.g * s.x * kSqrt2 * r * std::sin(s.dphi);
}

CartesianState to_cartesian(const ClassicalState& s) {
    const double r = std::sqrt(std::max(0.0, 1.0 - s.Z * s.Z));
    return {s.x, s.p, r * std::cos(s.dphi), r * std::sin(s.dphi), s.Z};
}

ClassicalState from_cartesian(const CartesianState& c, double dphi_hint) {
    const double norm = std::sqrt(c[2] * c[2] + c[3] * c[3] + c[4] * c[4]);
    const double z = std::clamp(c[4] / norm, -1.0, 1.0);
    double phi = dphi_hint;
    if (c[2] != 0.0 || c[3] != 0.0) {
        phi = std::atan2(c[3], c[2]);
        phi += 2.0 * std::numbers::pi * std::round((dphi_hint - phi) / (2.0 * std::numbers::pi));
    }
    return {c[0], c[1], z, phi};
}

CartesianState cartesian_rhs(const CartesianState& c, const ModelParams& params) {
    const double bx = params.g * kSqrt2 * c[0] + params.lambda;
    const double bz = 0.5 * params.omega;
    return {c[1], -c[0] - params.g * kSqrt2 * c[2], -bz * c[3], bz * c[2] - bx * c[4], bx * c[3]};
}

double cartesian_energy(const CartesianState& c, const ModelParams& params) {
    return 0.5 * c[1] * c[1] + 0.5 * c[0] * c[0] + 0.5 * params.omega * c[4] +
           (params.g * kSqrt2 * c[0] + params.lambda) * c[2];
}

double Trajectory::max_energy_drift() const {
    double drift = 0.0;
    for (double e : energies) drift = std::max(drift, std::abs(e - energies.front()));
    return drift;
}

Trajectory integrate(const ClassicalState& s0, const ModelParams& params, double t_end, double dt,
                     const IntegrationOptions& options) {
    check_params(params);
    check_state(s0);
    if (!(dt > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("integrate: need dt > 0 and finite t_end");
    check_pole(s0, options);

    Trajectory traj;
    traj.params = params;
    traj.options = options;
    const double sign = t_end < 0.0 ? -1.0 : 1.0;
    const auto steps = static_cast<std::size_t>(std::ceil(std::abs(t_end) / dt - 1e-9));
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.energies.reserve(steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(s0);
    traj.energies.push_back(classical_energy(s0, params));

    CartesianState yc = to_cartesian(s0);
    AngularState ya{s0.x, s0.p, s0.Z, s0.dphi};
    double t = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t_next = k == steps ? t_end : sign * dt * static_cast<double>(k);
        ClassicalState s;
        double energy = 0.0;
        if (options.chart == Chart::Cartesian) {
            advance<Stepper5>(yc, CartesianSystem{params}, t, t_next, options);
            s = from_cartesian(yc, traj.states.back().dphi);
            energy = cartesian_energy(yc, params);
        } else {
            advance<Stepper4>(ya, AngularSystem{params}, t, t_next, options);
            s = {ya[0], ya[1], ya[2], ya[3]};
            check_pole(s, options);
            energy = classical_energy(s, params);
        }
        t = t_next;
        traj.times.push_back(t);
        traj.states.push_back(s);
        traj.energies.push_back(energy);
    }
    return traj;
}

ClassicalState propagate(const ClassicalState& s0, const ModelParams& params, double t,
                         const IntegrationOptions& options) {
    check_state(s0);
    if (options.chart == Chart::Cartesian) {
        CartesianState y = to_cartesian(s0);
        advance<Stepper5>(y, CartesianSystem{params}, 0.0, t, options);
        return from_cartesian(y, s0.dphi);
    }
    AngularState y{s0.x, s0.p, s0.Z, s0.dphi};
    advance<Stepper4>(y, AngularSystem{params}, 0.0, t, options);
    ClassicalState s{y[0], y[1], y[2], y[3]};
    check_pole(s, options);
    return s;
}

std::vector<SectionPoint> poincare_section(const Trajectory& traj, const SurfaceSpec& surface) {
    if (surface.variable == Coordinate::Dphi) throw InvalidArgument("poincare_section: dphi cannot define the surface");
    if (traj.states.size() < 2) throw InvalidArgument("poincare_section: trajectory too short");
    const double shell = surface.has_shell ? surface.shell : traj.energies.front();

    std::vector<SectionPoint> points;
    bool crossed = false;
    for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
        const double f0 = coordinate(traj.states[i], surface.variable) - surface.value;
        const double f1 = coordinate(traj.states[i + 1], surface.variable) - surface.value;
        const bool up = f0 < 0.0 && f1 >= 0.0;
        const bool down = f0 > 0.0 && f1 <= 0.0;
        if (!((up && surface.direction >= 0) || (down && surface.direction <= 0))) continue;
        crossed = true;

        const ClassicalState& start = traj.states[i];
        const double span = traj.times[i + 1] - traj.times[i];
        auto f = [&](double tau) {
            return coordinate(propagate(start, traj.params, tau, traj.options), surface.variable) - surface.value;
        };
        double tau = span;
        if (f1 != 0.0) {
            std::uintmax_t iterations = 100;
            const auto bracket = boost::math::tools::toms748_solve(f, 0.0, span, f0, f1,
                                                                   boost::math::tools::eps_tolerance<double>(50),
                                                                   iterations);
            tau = 0.5 * (bracket.first + bracket.second);
        }
        const ClassicalState hit = propagate(start, traj.params, tau, traj.options);
        const double energy = classical_energy(hit, traj.params);
        if (std::abs(energy - shell) > surface.shell_tolerance) continue;
        points.push_back({traj.times[i] + tau, coordinate(hit, surface.first), coordinate(hit, surface.second), energy});
    }
    if (points.empty()) {
        throw NumericalError(crossed ? "poincare_section: no crossing on the energy shell"
                                     : "poincare_section: trajectory never crosses the surface");
    }
    return points;
}

double section_fill_fraction(const std::vector<SectionPoint>& points, int bins) {
    if (points.empty() || bins < 1) throw InvalidArgument("section_fill_fraction: need points and bins >= 1");
    double a0 = points.front().first, a1 = a0, b0 = points.front().second, b1 = b0;
    for (const auto& pt : points) {
        a0 = std::min(a0, pt.first);
        a1 = std::max(a1, pt.first);
        b0 = std::min(b0, pt.second);
        b1 = std::max(b1, pt.second);
    }
    const double wa = std::max(a1 - a0, 1e-300);
    const double wb = std::max(b1 - b0, 1e-300);
    std::set<long> cells;
    for (const auto& pt : points) {
        const long ia = std::min<long>(bins - 1, static_cast<long>((pt.first - a0) / wa * bins));
        const long ib = std::min<long>(bins - 1, static_cast<long>((pt.second - b0) / wb * bins));
        cells.insert(ia * bins + ib);
    }
    return static_cast<double>(cells.size()) / (static_cast<double>(bins) * bins);
}

LyapunovResult lyapunov_largest(const ClassicalState& s0, const ModelParams& params, double t_total,
                                const LyapunovOptions& options) {
    check_params(params);
    check_state(s0);
    const double tau = options.renormalization_interval;
    const double d0 = options.initial_separation;
    if (!(tau > 0.0) || !(d0 > 0.0) || !(t_total >= 2.0 * tau)) {
        throw InvalidArgument("lyapunov_largest: need interval > 0, separation > 0 and t_total >= 2 intervals");
    }

    // Perturbation direction drawn in (x, p, Z, dphi), then scaled to d0 in Cartesian variables.
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    ClassicalState shifted = s0;
    CartesianState ref = to_cartesian(s0);
    CartesianState pert{};
    double dist = 0.0;
    for (int attempt = 0; attempt < 16 && dist == 0.0; ++attempt) {
        std::array<double, 4> u{normal(rng), normal(rng), normal(rng), normal(rng)};
        const double nu = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3]);
        const double eps = 1e-6;
        shifted = {s0.x + eps * u[0] / nu, s0.p + eps * u[1] / nu, std::clamp(s0.Z + eps * u[2] / nu, -1.0, 1.0),
                   s0.dphi + eps * u[3] / nu};
        pert = to_cartesian(shifted);
        dist = 0.0;
        for (int k = 0; k < 5; ++k) dist += (pert[k] - ref[k]) * (pert[k] - ref[k]);
        dist = std::sqrt(dist);
    }
    if (dist == 0.0) throw NumericalError("lyapunov_largest: could not build a perturbation");
    for (int k = 0; k < 5; ++k) pert[k] = ref[k] + d0 * (pert[k] - ref[k]) / dist;

    LyapunovResult result;
    const auto steps = static_cast<std::size_t>(std::floor(t_total / tau + 1e-9));
    result.times.reserve(steps);
    result.history.reserve(steps);
    IntegrationOptions opt = options.integration;
    opt.chart = Chart::Cartesian;
    PairState y{};
    for (int i = 0; i < 5; ++i) {
        y[i] = ref[i];
        y[i + 5] = (pert[i] - ref[i]) / d0;
    }
    const PairSystem system{params, d0};
    double log_sum = 0.0;
    double t = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        advance<Stepper10>(y, system, t, t + tau, opt);
        t += tau;
        double growth = 0.0;
        for (int i = 5; i < 10; ++i) growth += y[i] * y[i];
        growth = std::sqrt(growth);
        if (!(growth > 0.0) || !std::isfinite(growth)) throw NumericalError("lyapunov_largest: separation collapsed");
        log_sum += std::log(growth);
        for (int i = 5; i < 10; ++i) y[i] /= growth;
        result.times.push_back(t);
        result.history.push_back(log_sum / t);
    }
    result.exponent = result.history.back();

    const auto tail_start = static_cast<std::size_t>(std::floor((1.0 - options.tail_fraction) * steps));
    const double band = std::max(options.relative_band * std::abs(result.exponent), options.absolute_band);
    result.converged = true;
    for (std::size_t k = tail_start; k < steps; ++k) {
        if (std::abs(result.history[k] - result.exponent) > band) {
            result.converged = false;
            break;
        }
    }
    if (options.require_convergence && !result.converged) {
        throw NumericalError("lyapunov_largest: running estimate has not settled");
    }
    return result;
}

AdiabaticPotentials adiabatic_potentials(double x, const ModelParams& params) {
    const double field = kSqrt2 * params.g * x + params.lambda;
    const double root = std::sqrt(0.25 * params.omega * params.omega + field * field);
    return {0.5 * x * x - root, 0.5 * x * x + root};
}

ClassicalState state_on_shell(const ModelParams& params, double energy, double x, double Z, double dphi) {
    ClassicalState s{x, 0.0, Z, dphi};
    const double rest = classical_energy(s, params);
    if (rest > energy) {
        throw InvalidArgument("state_on_shell: energy " + std::to_string(energy) + " below potential " +
                              std::to_string(rest));
    }
    s.p = std::sqrt(2.0 * (energy - rest));
    return s;
}

}  // namespace rabi
