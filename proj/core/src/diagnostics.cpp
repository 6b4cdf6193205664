// diagnostics.cpp

#include "rabi/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <string>
#include <thread>

#include "rabi/errors.hpp"
#include "rabi/hamiltonian.hpp"

namespace rabi {

double ipr(const Eigen::VectorXcd& coeffs) {
    const Eigen::VectorXd w = coeffs.cwiseAbs2();
    const double total = w.sum();
    if (std::abs(total - 1.0) > 1e-8) {
        throw InvalidArgument("ipr: coefficients are not normalized (sum |C|^2 = " + std::to_string(total) + ")");
    }
    return 1.0 / w.squaredNorm();
}

double microcanonical_average(const EigenDecomposition& dec, const ObservableInEigenbasis& obs, double energy,
                              double delta) {
    if (obs.elements.rows() != dec.dimension()) throw InvalidArgument("microcanonical_average: dimension mismatch");
    double sum = 0.0;
    int count = 0;
    for (Index i = 0; i < dec.dimension(); ++i) {
        if (std::abs(dec.energies(i) - energy) <= delta) {
            sum += obs.elements(i, i).real();
            ++count;
        }
    }
    if (count == 0) throw InvalidArgument("microcanonical_average: no eigenvalue inside the energy window");
    return sum / count;
}

double local_mean_spacing(const Eigen::VectorXd& energies, double energy, int neighbours) {
    const Index n = energies.size();
    if (n < 2) throw InvalidArgument("local_mean_spacing: need at least two eigenvalues");
    const auto* begin = energies.data();
    const auto pos = static_cast<Index>(std::lower_bound(begin, begin + n, energy) - begin);
    const Index half = std::max(1, neighbours / 2);
    const Index lo = std::clamp<Index>(pos - half, 0, n - 2);
    const Index hi = std::clamp<Index>(pos + half, lo + 1, n - 1);
    return (energies(hi) - energies(lo)) / static_cast<double>(hi - lo);
}

double default_microcanonical_delta(const Eigen::VectorXd& energies, double energy) {
    return 5.0 * local_mean_spacing(energies, energy);
}

std::vector<double> level_spacings(const Eigen::VectorXd& energies, EnergyWindow window) {
    std::vector<double> levels;
    for (Index i = 0; i < energies.size(); ++i) {
        if (energies(i) > window.e_min && energies(i) < window.e_max) levels.push_back(energies(i));
    }
    if (levels.size() < 3) throw InvalidArgument("level_spacings: fewer than three eigenvalues in the window");
    std::sort(levels.begin(), levels.end());
    std::vector<double> gaps(levels.size() - 1);
    double mean = 0.0;
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        gaps[i] = levels[i + 1] - levels[i];
        mean += gaps[i];
    }
    mean /= static_cast<double>(gaps.size());
    if (!(mean > 0.0)) throw InvalidArgument("level_spacings: window spectrum is fully degenerate");
    for (auto& s : gaps) s /= mean;
    return gaps;
}

SpacingHistogram spacing_histogram(const Eigen::VectorXd& energies, EnergyWindow window, std::size_t bins) {
    const auto spacings = level_spacings(energies, window);
    SpacingHistogram out;
    out.window = window;
    {
        // raw mean gap, for reference
        std::vector<double> levels;
        for (Index i = 0; i < energies.size(); ++i) {
            if (energies(i) > window.e_min && energies(i) < window.e_max) levels.push_back(energies(i));
        }
        std::sort(levels.begin(), levels.end());
        out.mean_spacing = (levels.back() - levels.front()) / static_cast<double>(levels.size() - 1);
    }
    const double hi = *std::max_element(spacings.begin(), spacings.end());
    if (bins == 0) {
        const double width = stats::freedman_diaconis_width(spacings);
        bins = static_cast<std::size_t>(std::max(1.0, std::ceil(hi / width)));
    }
    const auto h = stats::histogram(spacings, 0.0, hi > 0.0 ? hi : 1.0, bins);
    out.bin_edges = h.edges;
    out.counts = h.densities;
    return out;
}

ReferenceDensities reference_distributions(std::span<const double> spacings) {
    ReferenceDensities out;
    out.poisson.reserve(spacings.size());
    out.wigner_dyson.reserve(spacings.size());
    for (double s : spacings) {
        if (!(s >= 0.0)) throw InvalidArgument("reference_distributions: spacings must be non-negative");
        out.poisson.push_back(stats::poisson_density(s));
        out.wigner_dyson.push_back(stats::wigner_dyson_density(s));
    }
    return out;
}

SpacingTests spacing_ks_tests(std::span<const double> spacings) {
    SpacingTests t;
    t.count = spacings.size();
    t.ks_poisson = stats::ks_statistic(spacings, stats::poisson_cdf);
    t.ks_wigner_dyson = stats::ks_statistic(spacings, stats::wigner_dyson_cdf);
    t.critical_1pct = stats::ks_critical_value(t.count, 0.01);
    t.critical_5pct = stats::ks_critical_value(t.count, 0.05);
    return t;
}

PairingReport parity_pairing(const Eigen::VectorXd& energies, double energy_max) {
    std::vector<double> levels;
    for (Index i = 0; i < energies.size(); ++i) {
        if (energies(i) < energy_max) levels.push_back(energies(i));
    }
    std::sort(levels.begin(), levels.end());
    if (levels.size() < 2) throw InvalidArgument("parity_pairing: fewer than two levels below the cutoff");
    PairingReport r;
    r.mean_spacing = (levels.back() - levels.front()) / static_cast<double>(levels.size() - 1);
    for (std::size_t k = 0; k + 1 < levels.size(); k += 2) {
        r.pair_energies.push_back(0.5 * (levels[k] + levels[k + 1]));
        r.intra_gaps.push_back(levels[k + 1] - levels[k]);
        r.max_ratio = std::max(r.max_ratio, r.intra_gaps.back() / r.mean_spacing);
    }
    return r;
}

GaussianityReport gaussianity_test(const QuenchState& state, const ObservableInEigenbasis& obs, int n_samples,
                                   double t_max, std::uint64_t seed, const GaussianityOptions& options) {
    if (n_samples < 100) throw InvalidArgument("gaussianity_test: need at least 100 samples");
    if (!(t_max > options.t_burn)) throw InvalidArgument("gaussianity_test: t_max must exceed the burn-in time");

    GaussianityReport r;
    r.reference_mean = long_time_average(state, obs);
    r.reference_sigma = long_time_variance(state, obs, VarianceMode::Spectral).deviation;
    if (!(r.reference_sigma > 1e-12 * std::max(1.0, std::abs(r.reference_mean)))) {
        throw NumericalError("gaussianity_test: vanishing temporal fluctuations, Gaussian reference is degenerate");
    }
    r.times = sample_times(TimeSampling{options.t_burn, t_max, n_samples, seed});
    const ExpectationEvaluator eval(state, obs);
    r.samples.reserve(r.times.size());
    for (double t : r.times) r.samples.push_back(eval(t));
    const double mean = r.reference_mean;
    const double sigma = r.reference_sigma;
    r.ks_statistic = stats::ks_statistic(r.samples, [mean, sigma](double x) { return stats::normal_cdf(x, mean, sigma); });
    r.critical_5pct = stats::ks_critical_value(r.samples.size(), 0.05);
    return r;
}

Eigen::VectorXd eigenstate_population(const QuenchState& state) { return state.coeffs.cwiseAbs2(); }

namespace {

ConvergenceResult converge(const std::function<double(int)>& quantity, double tol, int n_start, int n_cap,
                           bool relative) {
    if (!(tol > 0.0)) throw InvalidArgument("convergence_sweep: tolerance must be positive");
    if (n_start < 1) throw InvalidArgument("convergence_sweep: n_start must be positive");
    ConvergenceResult result;
    int n = n_start;
    double q = quantity(n);
    result.history.push_back({n, q});
    while (true) {
        const int next = 2 * n;
        if (next > n_cap) {
            throw ResourceCapError("convergence_sweep: truncation cap " + std::to_string(n_cap) +
                                   " reached before convergence (last n_tr " + std::to_string(n) + ")");
        }
        const double q_next = quantity(next);
        result.history.push_back({next, q_next});
        const double change = std::abs(q_next - q);
        const double scale = relative ? std::max(std::abs(q_next), 1e-300) : 1.0;
        if (change / scale < tol) {
            result.n_tr = n;
            result.value = q;
            return result;
        }
        n = next;
        q = q_next;
    }
}

struct QuenchSummary {
    double delta_n{0.0};
    double mean_n{0.0};
    double ipr{0.0};
    double energy{0.0};
};

QuenchSummary summarize_quench(const ModelParams& initial, const ModelParams& final, const SweepOptions& options) {
    QuenchState state;
    if (options.provider) {
        const Eigen::VectorXd psi0 = ground_state(*options.provider(initial));
        state = prepare_state(psi0.cast<std::complex<double>>(), options.provider(final));
    } else {
        state = quench(initial, final);
    }
    const auto n_eig = to_eigenbasis(build_observable(ObservableKind::N, final.n_tr), *state.decomposition);
    QuenchSummary s;
    s.mean_n = long_time_average(state, n_eig);
    s.delta_n = long_time_variance(state, n_eig, options.variance_mode, options.variance).deviation;
    s.ipr = ipr(state.coeffs);
    s.energy = state.energy;
    return s;
}

}  // namespace

ConvergenceResult convergence_sweep(const ModelParams& params, ConvergenceQuantity quantity, double tol,
                                    const ConvergenceOptions& options) {
    params.validate();
    if (quantity == ConvergenceQuantity::Trace) {
        throw InvalidArgument("convergence_sweep: the trace grows with n_tr by construction and cannot converge");
    }
    auto evaluate = [&](int n) -> double {
        const ModelParams p = params.with_truncation(n);
        if (quantity == ConvergenceQuantity::GroundEnergy) {
            EigensolverOptions eo;
            eo.compute_vectors = false;
            return eigendecompose(build_hamiltonian(p).sym, eo).energies(0);
        }
        const QuenchSummary s = summarize_quench(options.quench_initial.with_truncation(n), p, SweepOptions{});
        switch (quantity) {
            case ConvergenceQuantity::LongTimeAverageN: return s.mean_n;
            case ConvergenceQuantity::BosonDeviation: return s.delta_n;
            case ConvergenceQuantity::Ipr: return s.ipr;
            default: break;
        }
        throw InvalidArgument("convergence_sweep: unsupported quantity");
    };
    return converge(evaluate, tol, options.n_start, options.n_cap, options.relative);
}

int estimate_truncation(const ModelParams& params, double e_max) {
    params.validate();
    const double c = std::abs(params.lambda) + 0.5 * std::abs(params.omega);
    const double s2g = std::sqrt(2.0) * params.g;
    const double x_max = s2g + std::sqrt(s2g * s2g + 2.0 * std::max(0.0, e_max + c));
    const double n_classical = 0.5 * x_max * x_max;
    return static_cast<int>(std::ceil(n_classical + 6.0 * std::sqrt(n_classical) + 10.0));
}

namespace {

// Energy mean and spread of the pre-quench ground state under the final Hamiltonian.
std::pair<double, double> quench_energy_window(const ModelParams& initial, const ModelParams& final) {
    const int n_probe = std::max(32, estimate_truncation(initial, 10.0));
    const Eigen::VectorXd psi_small = ground_state(initial.with_truncation(n_probe));
    const auto h = build_hamiltonian(final.with_truncation(n_probe + 1)).sym;
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(h.rows());
    psi.head(psi_small.size()) = psi_small;
    const Eigen::VectorXd hpsi = h * psi;
    const double mean = psi.dot(hpsi);
    const double spread = std::sqrt(std::max(0.0, hpsi.squaredNorm() - mean * mean));
    return {mean, spread};
}

}  // namespace

int sweep_truncation(const ModelParams& final, const QuenchSpec& spec, const SweepOptions& options) {
    if (options.truncation == TruncationPolicy::Fixed) return final.n_tr;
    const auto [mean, spread] = quench_energy_window(spec.initial, final);
    const int estimate = estimate_truncation(final, mean + 6.0 * spread);
    if (options.truncation == TruncationPolicy::Estimate) return estimate;
    std::map<int, double> memo;
    auto delta_at = [&](int n) {
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
        const double v = summarize_quench(spec.initial.with_truncation(n), final.with_truncation(n), options).delta_n;
        memo.emplace(n, v);
        return v;
    };
    return converge(delta_at, options.tolerance, std::max(8, (estimate + 1) / 2), options.n_cap, true).n_tr;
}

SweepRow quench_statistics_row(const ModelParams& final, const QuenchSpec& spec, const SweepOptions& options) {
    const QuenchSummary s = summarize_quench(spec.initial.with_truncation(final.n_tr), final, options);
    SweepRow row;
    row.g = final.g;
    row.n_tr = final.n_tr;
    row.delta_n = s.delta_n;
    row.mean_n = s.mean_n;
    row.ratio = s.mean_n != 0.0 ? s.delta_n / s.mean_n : 0.0;
    row.ipr = s.ipr;
    row.energy = s.energy;
    return row;
}

std::vector<SweepRow> variance_sweep(std::span<const double> g_values, const ModelParams& templ, const QuenchSpec& spec,
                                     const SweepOptions& options) {
    templ.validate();
    const std::size_t count = g_values.size();
    std::vector<SweepRow> rows(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        // Remembers the latest four decompositions (two doubling steps) so the converged
        // point is not solved twice.
        SweepOptions local = options;
        if (!local.provider) {
            using Entry = std::pair<ModelParams, std::shared_ptr<const EigenDecomposition>>;
            auto recent = std::make_shared<std::vector<Entry>>();
            local.provider = [recent](const ModelParams& p) {
                for (const auto& e : *recent) {
                    if (e.first == p) return e.second;
                }
                auto dec = std::make_shared<const EigenDecomposition>(decompose_hamiltonian(p));
                if (recent->size() == 4) recent->erase(recent->begin());
                recent->emplace_back(p, dec);
                return std::shared_ptr<const EigenDecomposition>(dec);
            };
        }
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                ModelParams p = templ.with_g(g_values[i]);
                p.n_tr = sweep_truncation(p, spec, local);
                rows[i] = quench_statistics_row(p, spec, local);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    unsigned threads = options.threads != 0 ? options.threads : std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

}  // namespace rabi
