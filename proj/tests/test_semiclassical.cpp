// test_semiclassical.cpp — classical flow against finite-difference gradients and closed forms

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include <boost/math/tools/minima.hpp>

#include "rabi/errors.hpp"
#include "rabi/semiclassical.hpp"

using namespace rabi;
using std::numbers::pi;

namespace {

const ModelParams kChaotic{1.0, 10.0, 2.0, 0};

ClassicalState symplectic_gradient(const ClassicalState& s, const ModelParams& p, double h = 1e-6) {
    auto H = [&](ClassicalState q) { return classical_energy(q, p); };
    auto shifted = [&](double ClassicalState::*field, double d) {
        ClassicalState q = s;
        q.*field += d;
        return H(q);
    };
    auto diff = [&](double ClassicalState::*field) { return (shifted(field, h) - shifted(field, -h)) / (2.0 * h); };
    // x' = dH/dp, p' = -dH/dx, Z' = -dH/ddphi, dphi' = dH/dZ
    return {diff(&ClassicalState::p), -diff(&ClassicalState::x), -diff(&ClassicalState::dphi), diff(&ClassicalState::Z)};
}

}  // namespace

TEST_CASE("classical energy: worked values") {
    CHECK(classical_energy({0.0, 0.0, 1.0, 0.7}, {1.0, 3.0, 1.0, 0}) == doctest::Approx(0.5));
    CHECK(classical_energy({1.0, 0.0, 0.0, pi / 2}, kChaotic) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(classical_energy({1.0, 1.0, 0.0, 0.0}, kChaotic) == doctest::Approx(1.0 + 10.0 * std::sqrt(2.0) + 2.0));
    CHECK_THROWS_AS(classical_energy({0.0, 0.0, 1.5, 0.0}, kChaotic), InvalidArgument);
}

TEST_CASE("equations of motion are the Hamiltonian flow of H_cl") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const ModelParams p : {kChaotic, ModelParams{0.7, 1.3, -0.4, 0}, ModelParams{1.0, 2.0, 0.0, 0}}) {
        for (int k = 0; k < 50; ++k) {
            const ClassicalState s{4.0 * u(rng), 4.0 * u(rng), 0.99 * u(rng), pi * u(rng)};
            const ClassicalState d = eom_rhs(s, p);
            const ClassicalState fd = symplectic_gradient(s, p);
            CHECK(std::abs(d.x - fd.x) < 1e-6);
            CHECK(std::abs(d.p - fd.p) < 1e-6);
            CHECK(std::abs(d.Z - fd.Z) < 1e-6);
            CHECK(std::abs(d.dphi - fd.dphi) < 1e-6);
        }
    }
    CHECK_THROWS_AS(eom_rhs({0.0, 0.0, 1.0, 0.0}, kChaotic), NumericalError);
}

TEST_CASE("undriven form of Z' and the drive correction") {
    const ClassicalState s{0.8, 0.0, 0.0, pi / 2};
    const ModelParams undriven{1.0, 10.0, 0.0, 0};
    CHECK(eom_rhs(s, undriven).Z == doctest::Approx(10.0 * 0.8 * std::sqrt(2.0)));
    CHECK(eom_rhs(s, undriven).dphi == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(z_rate_undriven_form(s, undriven) == doctest::Approx(eom_rhs(s, undriven).Z));
    // with the drive the flow picks up lambda sqrt(1 - Z^2) sin(dphi)
    CHECK(eom_rhs(s, kChaotic).Z - z_rate_undriven_form(s, kChaotic) == doctest::Approx(2.0));
}

TEST_CASE("Cartesian spin variables reproduce the angular flow") {
    const ClassicalState s{1.1, -0.4, 0.35, 2.2};
    const CartesianState c = to_cartesian(s);
    const ClassicalState back = from_cartesian(c, 2.0);
    CHECK(back.Z == doctest::Approx(s.Z).epsilon(1e-15));
    CHECK(back.dphi == doctest::Approx(s.dphi).epsilon(1e-15));
    CHECK(cartesian_energy(c, kChaotic) == doctest::Approx(classical_energy(s, kChaotic)).epsilon(1e-14));
    // chain rule: d/dt s_z = Z', d/dt s_x = -r Z Z'/r^2 ... compared through a short step of both charts
    IntegrationOptions angular;
    angular.chart = Chart::Angular;
    const ClassicalState a = propagate(s, kChaotic, 2.0, angular);
    const ClassicalState b = propagate(s, kChaotic, 2.0);
    CHECK(std::abs(a.x - b.x) < 1e-6);
    CHECK(std::abs(a.p - b.p) < 1e-6);
    CHECK(std::abs(a.Z - b.Z) < 1e-6);
    CHECK(std::abs(a.dphi - b.dphi) < 1e-6);
}

TEST_CASE("decoupled oscillator: exact harmonic motion, constant Z") {
    const ModelParams p{1.0, 0.0, 0.0, 0};
    const ClassicalState s0{1.2, -0.3, 0.4, 0.1};
    const auto traj = integrate(s0, p, 20.0, 0.5);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k];
        CHECK(std::abs(traj.states[k].x - (1.2 * std::cos(t) - 0.3 * std::sin(t))) < 1e-9);
        CHECK(std::abs(traj.states[k].Z - 0.4) < 1e-12);
        CHECK(std::abs(traj.states[k].dphi - (0.1 + 0.5 * t)) < 1e-9);
    }
}

TEST_CASE("energy conservation and time reversal") {
    const ClassicalState s0 = state_on_shell(kChaotic, 0.0, 0.0, 0.3, 2.0);
    const auto traj = integrate(s0, kChaotic, 1000.0, 0.25);
    CHECK(traj.max_energy_drift() < 1e-8);
    CHECK(traj.times.back() == 1000.0);

    // the chaotic flow amplifies errors ~ e^{0.8 t}; reverse over a short span there
    for (const auto& [p, span] : {std::pair{kChaotic, 10.0}, std::pair{ModelParams{1.0, 0.4, 0.3, 0}, 200.0}}) {
        const ClassicalState end = propagate(s0, p, span);
        const ClassicalState back = propagate(end, p, -span);
        CHECK(std::abs(back.x - s0.x) < 1e-6);
        CHECK(std::abs(back.p - s0.p) < 1e-6);
        CHECK(std::abs(back.Z - s0.Z) < 1e-6);
        CHECK(std::abs(back.dphi - s0.dphi) < 1e-6);
    }
}

TEST_CASE("the angular chart reports the pole") {
    IntegrationOptions angular;
    angular.chart = Chart::Angular;
    const ClassicalState s0 = state_on_shell(kChaotic, 0.0, 0.0, 0.3, 2.0);
    CHECK_THROWS_AS(integrate(s0, kChaotic, 1000.0, 0.1, angular), NumericalError);
    CHECK_THROWS_AS(integrate(s0, kChaotic, 10.0, 0.0), InvalidArgument);
}

TEST_CASE("Poincare sections: circle in the integrable limit, filled in the chaotic one") {
    const ModelParams free_drive{1.0, 0.0, 2.0, 0};
    const ClassicalState s0{1.0, 0.5, 0.2, 0.3};
    const auto traj = integrate(s0, free_drive, 400.0, 0.1);
    const auto pts = poincare_section(traj);
    REQUIRE(pts.size() > 20);
    for (const auto& pt : pts) {
        CHECK(std::abs(pt.first * pt.first + pt.second * pt.second - 1.25) < 1e-9);
        CHECK(std::abs(pt.energy - traj.energies.front()) < 1e-6);
    }

    const ClassicalState c0 = state_on_shell(kChaotic, 0.0, 0.0, 0.3, 2.0);
    const auto chaotic = poincare_section(integrate(c0, kChaotic, 2000.0, 0.05));
    const ClassicalState r0 = state_on_shell(free_drive, 0.0, 0.0, 0.3, 2.0);
    const auto regular = poincare_section(integrate(r0, free_drive, 2000.0, 0.05));
    CHECK(section_fill_fraction(chaotic) > 5.0 * section_fill_fraction(regular));

    SurfaceSpec never;
    never.variable = Coordinate::Z;
    never.value = 2.0;
    CHECK_THROWS_AS(poincare_section(traj, never), NumericalError);
}

TEST_CASE("largest Lyapunov exponent") {
    const ClassicalState c0 = state_on_shell(kChaotic, 0.0, 0.0, 0.3, 2.0);
    LyapunovOptions opts;
    std::vector<double> estimates;
    for (double d0 : {1e-6, 1e-8, 1e-10}) {
        opts.initial_separation = d0;
        estimates.push_back(lyapunov_largest(c0, kChaotic, 1e4, opts).exponent);
        MESSAGE("d0 " << d0 << " exponent " << estimates.back());
    }
    for (double e : estimates) {
        CHECK(e > 0.1);
        CHECK(std::abs(e - estimates[1]) < 0.1 * estimates[1]);
    }
    const auto integrable = lyapunov_largest({1.0, 0.5, 0.3, 1.0}, {1.0, 0.0, 0.0, 0}, 1e4);
    CHECK(std::abs(integrable.exponent) < 1e-3);
    CHECK(integrable.converged);
    CHECK(integrable.history.size() == 10000);
    CHECK_THROWS_AS(lyapunov_largest(c0, kChaotic, 0.5), InvalidArgument);
}

TEST_CASE("adiabatic potentials") {
    const auto v0 = adiabatic_potentials(0.0, kChaotic);
    CHECK(v0.minus == doctest::Approx(-std::sqrt(4.25)));
    CHECK(v0.plus == doctest::Approx(std::sqrt(4.25)));
    const double xc = -2.0 / (std::sqrt(2.0) * 10.0);
    const auto vc = adiabatic_potentials(xc, kChaotic);
    CHECK(std::abs(vc.plus - vc.minus - 1.0) < 1e-12);

    const ModelParams sym{1.0, 10.0, 0.0, 0};
    for (double x : {0.3, 2.0, 7.5, 14.0}) {
        CHECK(adiabatic_potentials(x, sym).minus == adiabatic_potentials(-x, sym).minus);
        CHECK(adiabatic_potentials(x, kChaotic).minus != doctest::Approx(adiabatic_potentials(-x, kChaotic).minus));
    }
    const auto f = [&](double x) { return adiabatic_potentials(x, sym).minus; };
    const double x_min = boost::math::tools::brent_find_minima(f, 5.0, 25.0, 52).first;
    CHECK(x_min == doctest::Approx(std::sqrt(2.0) * 10.0).epsilon(1e-3));
    CHECK(0.5 * x_min * x_min == doctest::Approx(100.0).epsilon(2e-3));
}

TEST_CASE("states on an energy shell") {
    const ClassicalState s = state_on_shell(kChaotic, 10.0, 0.5, -0.2, 1.0);
    CHECK(classical_energy(s, kChaotic) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(s.p >= 0.0);
    CHECK_THROWS_AS(state_on_shell(kChaotic, -1000.0, 0.5, 0.0, 0.0), InvalidArgument);
}
