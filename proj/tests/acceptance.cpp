// acceptance.cpp — end-to-end acceptance checks, one pass/fail line per criterion

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "lab/cache.hpp"
#include "lab/config.hpp"
#include "lab/experiments.hpp"
#include "oracles.hpp"
#include "rabi/diagnostics.hpp"
#include "rabi/eigensolver.hpp"
#include "rabi/errors.hpp"
#include "rabi/hamiltonian.hpp"
#include "rabi/quench.hpp"
#include "rabi/semiclassical.hpp"
#include "rabi/statistics.hpp"
#include "rabi/wigner.hpp"

namespace fs = std::filesystem;
using rabi::Index;
using rabi::ModelParams;

namespace {

// Tolerances and bands of the acceptance contract.
constexpr double kExactLimitTol = 1e-10;
constexpr double kTwoLevelTol = 1e-12;
constexpr int kOracleMaxTruncation = 6;
constexpr double kOracleTol = 1e-6;
constexpr double kOracleTimeMax = 100.0;
constexpr double kCommutatorTol = 1e-12;
constexpr double kParityTol = 1e-8;
constexpr int kDisplacedCount = 50;
constexpr double kDisplacedTol = 1e-6;
constexpr double kCrossingGapTol = 1e-12;
constexpr double kSpectrumEMin = 0.0;
constexpr double kSpectrumEMax = 250.0;
constexpr double kPairingRatio = 1e-3;
constexpr double kSlopeTarget = 2.0;
constexpr double kSlopeBand = 0.3;
constexpr double kMinRatioAtTen = 0.05;
constexpr int kGaussianSamples = 10000;
constexpr std::uint64_t kGaussianSeed = 1;
constexpr double kIprMin = 30.0, kIprMax = 90.0;
constexpr Index kPeakMin = 150, kPeakMax = 260;
constexpr Index kLowCount = 140;
constexpr double kLowWeightMax = 0.02;
constexpr double kWignerTime = 500000.0;
constexpr double kWignerNormTol = 1e-4;
constexpr double kWignerImagTol = 1e-10;
constexpr double kNegativityMin = 0.1;
constexpr double kVacuumTol = 1e-8;
constexpr double kDriftTol = 1e-8;
constexpr double kDriftTime = 1e3;
constexpr double kGradientTol = 1e-6;
constexpr double kLyapunovFactor = 10.0;
constexpr double kIntegrableLyapunovTol = 1e-3;
constexpr double kLyapunovTime = 1e4;

// Numerical settings of the checks themselves.
constexpr double kSpectralConvergence = 1e-9;
constexpr double kQuenchConvergence = 1e-3;

const ModelParams kReference{1.0, 10.0, 2.0, 0};
const ModelParams kReferenceInitial{1.0, 0.1, 0.0, 0};

struct Outcome {
    bool pass{false};
    std::string detail;
};

fs::path cache_directory() {
    if (const char* env = std::getenv("RABI_ACCEPTANCE_CACHE")) return env;
    return RABI_ACCEPTANCE_CACHE_DIR;
}

lab::EigenCache& cache() {
    static lab::EigenCache instance(cache_directory());
    return instance;
}

rabi::DecompositionProvider provider() {
    return [](const ModelParams& p) { return cache().get_or_compute(p); };
}

/// Smallest n (grown by 25%) whose eigenvalues selected by `count` or `e_max` move by less
/// than kSpectralConvergence when the basis grows.
int converged_truncation(const ModelParams& p, int start, int count, double e_max,
                         const std::function<Eigen::VectorXd(const ModelParams&)>& energies) {
    int n = start;
    while (true) {
        const int next = n + std::max(8, n / 4);
        const Eigen::VectorXd a = energies(p.with_truncation(n));
        const Eigen::VectorXd b = energies(p.with_truncation(next));
        double change = 0.0;
        for (Index i = 0; i < a.size(); ++i) {
            if (count > 0 ? i >= count : a(i) > e_max) break;
            change = std::max(change, std::abs(a(i) - b(i)));
        }
        if (change < kSpectralConvergence) return n;
        n = next;
        if (n > 8192) throw rabi::ResourceCapError("acceptance: spectral truncation did not converge");
    }
}

Eigen::VectorXd cached_energies(const ModelParams& p) { return cache().get_or_compute(p, false)->energies; }

Eigen::VectorXd displaced_energies(const ModelParams& p) {
    rabi::EigensolverOptions opts;
    opts.compute_vectors = false;
    return rabi::eigendecompose(rabi::build_displaced_hamiltonian(p).sym, opts).energies;
}

struct ReferenceQuench {
    int n_tr{0};
    rabi::QuenchState state;
    rabi::ObservableInEigenbasis n_obs;
};

const ReferenceQuench& reference_quench() {
    static const ReferenceQuench q = [] {
        rabi::SweepOptions opts;
        opts.truncation = rabi::TruncationPolicy::Converged;
        opts.tolerance = kQuenchConvergence;
        opts.provider = provider();
        ReferenceQuench out;
        out.n_tr = rabi::sweep_truncation(kReference, rabi::QuenchSpec{kReferenceInitial}, opts);
        const auto initial = cache().get_or_compute(kReferenceInitial.with_truncation(out.n_tr));
        const auto final = cache().get_or_compute(kReference.with_truncation(out.n_tr));
        out.state = rabi::prepare_state(rabi::ground_state(*initial).cast<std::complex<double>>(), final);
        out.n_obs = rabi::to_eigenbasis(rabi::build_observable(rabi::ObservableKind::N, out.n_tr), *final);
        return out;
    }();
    return q;
}

// ---------------------------------------------------------------------------------------------

Outcome exact_limits() {
    const ModelParams p{1.0, 0.0, 0.0, 40};
    const auto dec = rabi::decompose_hamiltonian(p);
    std::vector<double> ref;
    for (int n = 0; n <= p.n_tr; ++n) {
        ref.push_back(n - 0.5 * p.omega);
        ref.push_back(n + 0.5 * p.omega);
    }
    std::sort(ref.begin(), ref.end());
    double worst = 0.0;
    for (Index i = 0; i < dec.dimension(); ++i) worst = std::max(worst, std::abs(dec.energies(i) - ref[i]));

    const auto two = rabi::decompose_hamiltonian({1.0, 10.0, 2.0, 0});
    const double root = std::sqrt(4.25);
    const double two_err = std::max(std::abs(two.energies(0) + root), std::abs(two.energies(1) - root));
    return {worst < kExactLimitTol && two_err < kTwoLevelTol,
            fmt::format("g=0 max error {:.2e} (tol {:.0e}); two-level max error {:.2e} (tol {:.0e})", worst,
                        kExactLimitTol, two_err, kTwoLevelTol)};
}

Outcome oracle_equivalence() {
    double worst = 0.0;
    std::vector<double> times;
    for (int k = 0; k <= 200; ++k) times.push_back(0.5 * k);
    for (int n_tr = 1; n_tr <= kOracleMaxTruncation; ++n_tr) {
        for (const ModelParams final : {ModelParams{1.0, 1.0, 0.0, n_tr}, ModelParams{1.0, 2.0, 2.0, n_tr},
                                        ModelParams{0.7, 0.4, -1.0, n_tr}}) {
            const auto st = rabi::quench(kReferenceInitial.with_truncation(n_tr), final);
            const auto n_obs = rabi::build_observable(rabi::ObservableKind::N, n_tr);
            const auto z_obs = rabi::build_observable(rabi::ObservableKind::SigmaZ, n_tr);
            const auto n_eig = rabi::to_eigenbasis(n_obs, *st.decomposition);
            const auto z_eig = rabi::to_eigenbasis(z_obs, *st.decomposition);
            const Eigen::VectorXcd psi0 = rabi::ground_state(kReferenceInitial.with_truncation(n_tr)).cast<std::complex<double>>();
            const auto ref = oracle::schrodinger_expectations(oracle::hamiltonian(final), psi0, {n_obs.sym, z_obs.sym}, times);
            for (std::size_t k = 0; k < times.size(); ++k) {
                worst = std::max(worst, std::abs(rabi::expectation_at(st, n_eig, times[k]) - ref[0][k]));
                worst = std::max(worst, std::abs(rabi::expectation_at(st, z_eig, times[k]) - ref[1][k]));
            }
        }
    }
    return {worst < kOracleTol, fmt::format("n_tr 1..{}, t in [0, {}]: max |spectral - ODE| = {:.2e} (tol {:.0e})",
                                            kOracleMaxTruncation, kOracleTimeMax, worst, kOracleTol)};
}

Outcome symmetry() {
    const ModelParams undriven{1.0, 10.0, 0.0, 0};
    const int n = converged_truncation(undriven, 128, 100, 0.0, cached_energies);
    const ModelParams p = undriven.with_truncation(n);
    const Eigen::MatrixXd h = rabi::build_hamiltonian(p).sym;
    const Eigen::MatrixXd parity = rabi::build_parity(n).sym;
    const Eigen::VectorXd labels = rabi::parity_diagonal(n);
    const double comm = rabi::commutator_max_norm(h, parity);
    const auto sectors = rabi::eigendecompose_in_sectors(h, labels);
    double worst = 0.0;
    for (Index i = 0; i < sectors.dimension(); ++i) {
        const Eigen::VectorXd v = sectors.vectors.col(i);
        const double pi = v.dot(labels.cwiseProduct(v));
        worst = std::max(worst, 1.0 - std::abs(pi));
    }

    const ModelParams driven = kReference.with_truncation(n);
    const Eigen::MatrixXd hd = rabi::build_hamiltonian(driven).sym;
    const double comm_driven = rabi::commutator_max_norm(hd, parity);
    const auto dec = cache().get_or_compute(driven);
    double broken = 0.0;
    for (Index i = 0; i < dec->dimension(); ++i) {
        const Eigen::VectorXd v = dec->vectors.col(i);
        broken = std::max(broken, 1.0 - std::abs(v.dot(labels.cwiseProduct(v))));
    }
    const bool pass = comm < kCommutatorTol && worst < kParityTol && comm_driven > kCommutatorTol && broken > kParityTol;
    return {pass, fmt::format("n_tr {}: lambda=0 |[H,Pi]| {:.1e}, max 1-|<Pi>| {:.1e}; lambda=2 |[H,Pi]| {:.3g}, "
                              "max 1-|<Pi>| {:.3g}",
                              n, comm, worst, comm_driven, broken)};
}

Outcome displacement() {
    const int n_a = converged_truncation(kReference, 128, kDisplacedCount, 0.0, cached_energies);
    const int n_b = converged_truncation(kReference, 128, kDisplacedCount, 0.0, displaced_energies);
    const int n = std::max(n_a, n_b);
    const Eigen::VectorXd a = cached_energies(kReference.with_truncation(n));
    const Eigen::VectorXd b = displaced_energies(kReference.with_truncation(n));
    const double worst = (a.head(kDisplacedCount) - b.head(kDisplacedCount)).cwiseAbs().maxCoeff();
    return {worst < kDisplacedTol, fmt::format("n_tr {}: lowest {} eigenvalues max difference {:.2e} (tol {:.0e})", n,
                                               kDisplacedCount, worst, kDisplacedTol)};
}

Outcome adiabatic_double_well() {
    const auto lower = [](double x) { return rabi::adiabatic_potentials(x, kReference).minus; };
    const double x_c = -kReference.lambda / (std::sqrt(2.0) * kReference.g);
    const auto left = boost::math::tools::brent_find_minima(lower, -40.0, x_c, 52);
    const auto right = boost::math::tools::brent_find_minima(lower, x_c, 40.0, 52);
    const auto barrier = boost::math::tools::brent_find_minima([&](double x) { return -lower(x); }, left.first,
                                                               right.first, 52);
    const double top = -barrier.second;
    const auto at_c = rabi::adiabatic_potentials(x_c, kReference);
    const double gap_err = std::abs(at_c.plus - at_c.minus - kReference.omega);
    const bool double_well = left.first < x_c && right.first > x_c && top > left.second && top > right.second;
    const bool asymmetric = std::abs(left.second - right.second) > 1.0;
    return {double_well && asymmetric && gap_err < kCrossingGapTol,
            fmt::format("minima V(-{:.4f})={:.4f}, V({:.4f})={:.4f}, barrier {:.4f}; crossing gap error {:.1e} (tol "
                        "{:.0e})",
                        -left.first, left.second, right.first, right.second, top, gap_err, kCrossingGapTol)};
}

Outcome level_statistics() {
    const int n = converged_truncation(kReference, rabi::estimate_truncation(kReference, kSpectrumEMax), 0, kSpectrumEMax,
                                       cached_energies);
    const Eigen::VectorXd e = cached_energies(kReference.with_truncation(n));
    const auto spacings = rabi::level_spacings(e, {kSpectrumEMin, kSpectrumEMax});
    const auto ks = rabi::spacing_ks_tests(spacings);
    const bool rejects_poisson = ks.ks_poisson > ks.critical_1pct;
    const bool rejects_wd = ks.ks_wigner_dyson > ks.critical_1pct;

    const ModelParams undriven{1.0, 10.0, 0.0, 0};
    const int n0 = converged_truncation(undriven, rabi::estimate_truncation(undriven, 0.0), 0, 0.0, cached_energies);
    const auto pairing = rabi::parity_pairing(cached_energies(undriven.with_truncation(n0)), 0.0);
    const bool paired = pairing.max_ratio < kPairingRatio;
    std::size_t first_bad = pairing.intra_gaps.size();
    for (std::size_t k = 0; k < pairing.intra_gaps.size(); ++k) {
        if (pairing.intra_gaps[k] >= kPairingRatio * pairing.mean_spacing) {
            first_bad = k;
            break;
        }
    }
    const std::string unpaired =
        first_bad < pairing.intra_gaps.size() ? fmt::format(", first unpaired level at E={:.3f}", pairing.pair_energies[first_bad]) : "";
    return {rejects_poisson && rejects_wd && paired,
            fmt::format("n_tr {}: {} spacings, KS Poisson {:.4f}, KS Wigner-Dyson {:.4f}, 1% critical {:.4f}; "
                        "lambda=0 pairing (n_tr {}) max gap/spacing {:.3e} (tol {:.0e}){}",
                        n, ks.count, ks.ks_poisson, ks.ks_wigner_dyson, ks.critical_1pct, n0, pairing.max_ratio,
                        kPairingRatio, unpaired)};
}

Outcome variance_scaling() {
    std::vector<double> gs;
    for (int k = 1; k <= 10; ++k) gs.push_back(k);
    rabi::SweepOptions opts;
    opts.truncation = rabi::TruncationPolicy::Converged;
    opts.tolerance = kQuenchConvergence;
    opts.provider = provider();
    opts.threads = 1;
    const auto rows = rabi::variance_sweep(gs, kReference, rabi::QuenchSpec{kReferenceInitial}, opts);
    std::vector<double> g_hi, d_hi, n_hi;
    for (const auto& r : rows) {
        if (r.g >= 0.5 * (gs.front() + gs.back())) {
            g_hi.push_back(r.g);
            d_hi.push_back(r.delta_n);
            n_hi.push_back(r.mean_n);
        }
    }
    const double slope_delta = rabi::stats::loglog_slope(g_hi, d_hi);
    const double slope_mean = rabi::stats::loglog_slope(g_hi, n_hi);
    bool strictly_decreasing = true;
    std::string ratios;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (k > 0 && rows[k].ratio >= rows[k - 1].ratio) strictly_decreasing = false;
        ratios += fmt::format("{}{:.3f}", k ? " " : "", rows[k].ratio);
    }
    const bool slopes = std::abs(slope_delta - kSlopeTarget) <= kSlopeBand && std::abs(slope_mean - kSlopeTarget) <= kSlopeBand;
    const bool ratio_ok = rows.back().ratio > kMinRatioAtTen && !strictly_decreasing;
    return {slopes && ratio_ok,
            fmt::format("upper-half slopes: delta_n {:.3f}, <n> {:.3f} (target {} +- {}); delta_n/<n> at g=10 {:.4f} "
                        "(min {}); ratios g=1..10 [{}]{}; n_tr at g=10 {}",
                        slope_delta, slope_mean, kSlopeTarget, kSlopeBand, rows.back().ratio, kMinRatioAtTen, ratios,
                        strictly_decreasing ? " decay monotonically" : "", rows.back().n_tr)};
}

Outcome gaussianity() {
    const auto& q = reference_quench();
    const auto rep = rabi::gaussianity_test(q.state, q.n_obs, kGaussianSamples, 1e6, kGaussianSeed);
    return {rep.passes(), fmt::format("n_tr {}: KS {:.5f} vs 5% critical {:.5f} ({} samples, seed {})", q.n_tr,
                                      rep.ks_statistic, rep.critical_5pct, kGaussianSamples, kGaussianSeed)};
}

Outcome populations() {
    const auto& q = reference_quench();
    const double participation = rabi::ipr(q.state.coeffs);
    const Eigen::VectorXd gamma = rabi::eigenstate_population(q.state);
    Index peak = 0;
    gamma.maxCoeff(&peak);
    const double low = gamma.head(kLowCount).sum();
    const bool pass = participation >= kIprMin && participation <= kIprMax && peak >= kPeakMin && peak <= kPeakMax &&
                      low < kLowWeightMax;
    return {pass, fmt::format("n_tr {}: IPR {:.2f} in [{}, {}]; peak index {} in [{}, {}]; weight of lowest {} {:.2e} "
                              "(max {})",
                              q.n_tr, participation, kIprMin, kIprMax, peak, kPeakMin, kPeakMax, kLowCount, low,
                              kLowWeightMax)};
}

Outcome wigner() {
    const auto& q = reference_quench();
    const auto& dec = *q.state.decomposition;
    auto check = [&](const Eigen::VectorXcd& psi, std::string& detail) {
        const Eigen::MatrixXcd rho = rabi::reduce_field(psi);
        const auto grid = rabi::wigner_transform(rho, rabi::default_wigner_grid(kReference.g, rabi::field_support(rho)));
        const double norm_err = std::abs(grid.normalization - 1.0);
        const double neg = rabi::negativity_volume(grid);
        detail += fmt::format("norm error {:.1e}, imag {:.1e}, negativity {:.3f}", norm_err, grid.imag_residue, neg);
        return norm_err < kWignerNormTol && grid.imag_residue < kWignerImagTol && neg > kNegativityMin;
    };
    std::string detail = fmt::format("t={}: ", kWignerTime);
    const bool evolved = check(rabi::state_at_time(q.state, kWignerTime), detail);
    Index idx = 0;
    dec.energies.cwiseAbs().minCoeff(&idx);
    detail += fmt::format("; eigenstate {} (E={:.4f}): ", idx, dec.energies(idx));
    const bool eigen = check(rabi::eigenstate_vector(dec, idx), detail);

    Eigen::MatrixXcd vac = Eigen::MatrixXcd::Zero(1, 1);
    vac(0, 0) = 1.0;
    const auto v = rabi::wigner_transform(vac, {-6.0, 6.0, 241, -6.0, 6.0, 241});
    double worst = 0.0;
    for (Index i = 0; i < v.x_axis.size(); ++i) {
        for (Index j = 0; j < v.p_axis.size(); ++j) {
            const double x = v.x_axis(i), p = v.p_axis(j);
            worst = std::max(worst, std::abs(v.values(i, j) - std::exp(-x * x - p * p) / std::numbers::pi));
        }
    }
    detail += fmt::format("; vacuum max error {:.1e} (tol {:.0e})", worst, kVacuumTol);
    return {evolved && eigen && worst < kVacuumTol, detail};
}

Outcome classical() {
    const rabi::ClassicalState s0 = rabi::state_on_shell(kReference, 0.0, 0.0, 0.3, 2.0);
    const auto traj = rabi::integrate(s0, kReference, kDriftTime, 0.1);
    const double drift = traj.max_energy_drift();

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double grad_err = 0.0;
    const double h = 1e-6;
    // |Z| <= 0.99: closer to the poles the central-difference error itself exceeds the tolerance
    for (int k = 0; k < 500; ++k) {
        const rabi::ClassicalState s{15.0 * u(rng), 15.0 * u(rng), 0.99 * u(rng), std::numbers::pi * u(rng)};
        auto energy_at = [&](double rabi::ClassicalState::*f, double d) {
            rabi::ClassicalState q = s;
            q.*f += d;
            return rabi::classical_energy(q, kReference);
        };
        auto d = [&](double rabi::ClassicalState::*f) { return (energy_at(f, h) - energy_at(f, -h)) / (2.0 * h); };
        const auto rhs = rabi::eom_rhs(s, kReference);
        grad_err = std::max({grad_err, std::abs(rhs.x - d(&rabi::ClassicalState::p)),
                             std::abs(rhs.p + d(&rabi::ClassicalState::x)),
                             std::abs(rhs.Z + d(&rabi::ClassicalState::dphi)),
                             std::abs(rhs.dphi - d(&rabi::ClassicalState::Z))});
    }

    const double chaotic = rabi::lyapunov_largest(s0, kReference, kLyapunovTime).exponent;
    const ModelParams integrable = kReference.with_g(0.0);
    const rabi::ClassicalState b0 = rabi::state_on_shell(integrable, 0.0, 0.0, 0.3, 2.0);
    const double baseline = rabi::lyapunov_largest(b0, integrable, kLyapunovTime).exponent;
    const bool pass = drift < kDriftTol && grad_err < kGradientTol && chaotic > 0.0 &&
                      chaotic >= kLyapunovFactor * std::abs(baseline) && std::abs(baseline) < kIntegrableLyapunovTol;
    return {pass, fmt::format("energy drift {:.1e} (tol {:.0e}); gradient error {:.1e} (tol {:.0e}); Lyapunov {:.4f} "
                              "vs g=0 baseline {:.2e}",
                              drift, kDriftTol, grad_err, kGradientTol, chaotic, baseline)};
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / fmt::format("rabi_acceptance_{}", ::getpid());
    fs::remove_all(root);
    struct Case {
        lab::Experiment experiment;
        nlohmann::json options;
    };
    const std::vector<Case> cases{
        {lab::Experiment::Gaussianity, {{"samples", 2000}}},
        {lab::Experiment::QuenchStats, {{"t_max", 200.0}, {"variance_mode", "sampled"}, {"samples", 2000}}},
        {lab::Experiment::Classical, {{"t_end", 200.0}, {"energy", 0.0}, {"section_trajectories", 2}, {"lyapunov", {{"t_total", 200.0}}}}},
        {lab::Experiment::Wigner, {{"source", "evolved"}, {"time", 1234.5}}},
    };
    std::size_t files = 0;
    std::vector<std::string> mismatched;
    for (const auto& c : cases) {
        lab::RunConfig cfg;
        cfg.experiment = c.experiment;
        cfg.model = {1.0, 3.0, 2.0, 80};
        cfg.auto_truncation = false;
        cfg.seed = 20240607;
        cfg.threads = 2;
        cfg.options = c.options;
        for (const char* run : {"a", "b"}) {
            cfg.output_dir = root / std::string(lab::to_string(c.experiment)) / run;
            lab::EigenCache fresh({});
            lab::run(cfg, fresh);
        }
        const fs::path a = root / std::string(lab::to_string(c.experiment)) / "a";
        for (const auto& entry : fs::directory_iterator(a)) {
            ++files;
            const fs::path other = a.parent_path() / "b" / entry.path().filename();
            if (slurp(entry.path()) != slurp(other)) mismatched.push_back(entry.path().filename().string());
        }
    }
    fs::remove_all(root);
    std::string detail = fmt::format("{} files compared across two runs, {} differ", files, mismatched.size());
    for (const auto& m : mismatched) detail += " " + m;
    return {mismatched.empty() && files > 0, detail};
}

}  // namespace

int main(int argc, char** argv) {
    // optional arguments select criteria by number
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    struct Criterion {
        int id;
        const char* name;
        Outcome (*check)();
    };
    const std::vector<Criterion> criteria{
        {1, "exact limits", exact_limits},
        {2, "oracle equivalence", oracle_equivalence},
        {3, "parity symmetry", symmetry},
        {4, "displacement equivalence", displacement},
        {5, "adiabatic double well", adiabatic_double_well},
        {6, "level statistics and pairing", level_statistics},
        {7, "variance scaling", variance_scaling},
        {8, "Gaussian fluctuations", gaussianity},
        {9, "eigenstate populations", populations},
        {10, "Wigner distributions", wigner},
        {11, "classical dynamics", classical},
        {12, "determinism", determinism},
    };
    int failures = 0;
    int ran = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.check();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!out.pass) ++failures;
        std::cout << fmt::format("[{}] {:>2} {}: {} [{:.1f} s]", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail,
                                 secs)
                  << std::endl;
    }
    std::cout << fmt::format("{} of {} criteria passed", ran - failures, ran) << std::endl;
    return failures == 0 ? 0 : 1;
}
