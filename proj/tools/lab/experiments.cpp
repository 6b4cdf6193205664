// experiments.cpp

#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>
#include <thread>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "output.hpp"
#include "rabi/diagnostics.hpp"
#include "rabi/errors.hpp"
#include "rabi/hamiltonian.hpp"
#include "rabi/quench.hpp"
#include "rabi/semiclassical.hpp"
#include "rabi/statistics.hpp"
#include "rabi/wigner.hpp"

#ifndef RABI_LAB_VERSION
#define RABI_LAB_VERSION "unversioned"
#endif

namespace lab {

namespace {

using rabi::ModelParams;
using Decomposition = std::shared_ptr<const rabi::EigenDecomposition>;

struct Truncation {
    int n_tr{0};
    nlohmann::json evidence;
};

struct Context {
    const RunConfig& config;
    EigenCache& cache;
    RunReport report;

    nlohmann::json provenance(const Truncation* truncation, nlohmann::json results) const {
        RunConfig resolved = config;
        nlohmann::json doc = {
            {"code_version", code_version()},
            {"matrix_version", kMatrixVersion},
            {"experiment", std::string(to_string(config.experiment))},
            {"seed", config.seed},
        };
        if (truncation != nullptr) {
            resolved.model.n_tr = truncation->n_tr;
            doc["truncation"] = truncation->evidence;
            doc["truncation"]["n_tr"] = truncation->n_tr;
        }
        doc["config"] = to_json(resolved);
        // locations do not affect results; leaving them out keeps sidecars comparable across runs
        doc["config"].erase("output_dir");
        doc["config"].erase("cache_dir");
        doc["results"] = std::move(results);
        return doc;
    }

    void write(const std::string& name, const CsvTable& table, const Truncation* truncation,
               const nlohmann::json& results) {
        report.files.push_back(emit(config.output_dir, name, table, provenance(truncation, results)));
    }
};

rabi::SweepOptions sweep_options(const Context& ctx, double tolerance, int n_cap) {
    rabi::SweepOptions opts;
    opts.tolerance = tolerance;
    opts.n_cap = n_cap;
    opts.threads = ctx.config.threads;
    if (!ctx.cache.directory().empty()) {
        EigenCache* cache = &ctx.cache;
        opts.provider = [cache](const ModelParams& p) { return cache->get_or_compute(p); };
    }
    return opts;
}

// n_tr at which every eigenvalue below e_max moves by less than `tol` when the basis grows by 25%.
Truncation spectral_truncation(Context& ctx, double e_max, double tol, int n_cap) {
    const ModelParams& model = ctx.config.model;
    if (!ctx.config.auto_truncation) return {model.n_tr, {{"policy", "fixed"}}};
    int n = rabi::estimate_truncation(model, e_max);
    nlohmann::json steps = nlohmann::json::array();
    while (true) {
        const int next = n + std::max(8, n / 4);
        if (next > n_cap) {
            throw rabi::ResourceCapError(fmt::format("spectral truncation: cap {} reached (last n_tr {})", n_cap, n));
        }
        const auto a = ctx.cache.get_or_compute(model.with_truncation(n), false);
        const auto b = ctx.cache.get_or_compute(model.with_truncation(next), false);
        double change = 0.0;
        for (rabi::Index i = 0; i < a->energies.size() && a->energies(i) <= e_max; ++i) {
            change = std::max(change, std::abs(a->energies(i) - b->energies(i)));
        }
        steps.push_back({{"n_tr", n}, {"compared_with", next}, {"max_eigenvalue_change", change}});
        if (change < tol) {
            return {n, {{"policy", "eigenvalues below e_max stable under 25% basis growth"},
                        {"e_max", e_max},
                        {"tolerance", tol},
                        {"history", steps}}};
        }
        n = next;
    }
}

Truncation quench_truncation(Context& ctx, double tol, int n_cap) {
    const ModelParams& model = ctx.config.model;
    if (!ctx.config.auto_truncation) return {model.n_tr, {{"policy", "fixed"}}};
    rabi::QuenchSpec spec{ctx.config.quench_initial};
    auto opts = sweep_options(ctx, tol, n_cap);
    opts.truncation = rabi::TruncationPolicy::Converged;
    const int n = rabi::sweep_truncation(model, spec, opts);
    return {n, {{"policy", "relative change of delta_n under doubling"}, {"tolerance", tol}}};
}

rabi::QuenchState quench_state(Context& ctx, int n_tr) {
    const auto initial = ctx.cache.get_or_compute(ctx.config.quench_initial.with_truncation(n_tr));
    const auto final = ctx.cache.get_or_compute(ctx.config.model.with_truncation(n_tr));
    const Eigen::VectorXd psi0 = rabi::ground_state(*initial);
    return rabi::prepare_state(psi0.cast<std::complex<double>>(), final);
}

rabi::ObservableKind observable(OptionReader& opts) {
    const std::string name = opts.text("observable", "n");
    try {
        return rabi::parse_observable_kind(name);
    } catch (const rabi::InvalidArgument&) {
        throw ConfigError("options.observable", "unknown observable '" + name + "'");
    }
}

rabi::VarianceMode variance_mode(OptionReader& opts) {
    const std::string mode = opts.text("variance_mode", "spectral");
    if (mode == "spectral") return rabi::VarianceMode::Spectral;
    if (mode == "sampled") return rabi::VarianceMode::Sampled;
    throw ConfigError("options.variance_mode", "expected \"spectral\" or \"sampled\"");
}

int positive_int(OptionReader& opts, const std::string& key, long long fallback, long long max = 1LL << 30) {
    const long long v = opts.integer(key, fallback);
    if (v < 1 || v > max) throw ConfigError("options." + key, fmt::format("must lie in [1, {}]", max));
    return static_cast<int>(v);
}

// ---------------------------------------------------------------------------------------------

void run_spectrum(Context& ctx) {
    OptionReader opts(ctx.config.options);
    const long long count = opts.integer("count", 0);
    const double e_max = opts.number("e_max", 50.0);
    const double tol = opts.number("truncation_tolerance", 1e-8);
    const int n_cap = positive_int(opts, "n_cap", 4096);
    opts.finish();
    if (count < 0) throw ConfigError("options.count", "must be non-negative");

    const Truncation tr = spectral_truncation(ctx, e_max, tol, n_cap);
    const ModelParams p = ctx.config.model.with_truncation(tr.n_tr);
    const auto dec = ctx.cache.get_or_compute(p);
    const Eigen::VectorXd parity = rabi::parity_diagonal(p.n_tr);
    const rabi::Index rows = count == 0 ? dec->dimension() : std::min<rabi::Index>(count, dec->dimension());

    const bool exact = p.g == 0.0;
    std::vector<double> reference;
    if (exact) {
        // decoupled boson: n -+ sqrt(omega^2/4 + lambda^2)
        const double split = std::hypot(0.5 * p.omega, p.lambda);
        for (int n = 0; n <= p.n_tr; ++n) {
            reference.push_back(n - split);
            reference.push_back(n + split);
        }
        std::sort(reference.begin(), reference.end());
    }
    std::vector<std::string> header{"index", "energy", "parity"};
    if (exact) header.emplace_back("reference");
    CsvTable table(header);
    for (rabi::Index i = 0; i < rows; ++i) {
        const Eigen::VectorXd v = dec->vectors.col(i);
        std::vector<double> row{static_cast<double>(i), dec->energies(i), v.dot(parity.cwiseProduct(v))};
        if (exact) row.push_back(reference[static_cast<std::size_t>(i)]);
        table.add_row(row);
    }
    nlohmann::json results = {{"dimension", dec->dimension()}, {"ground_energy", dec->energies(0)}};
    ctx.write("spectrum.csv", table, &tr, results);
    ctx.report.results = results;
}

void run_levelstats(Context& ctx) {
    OptionReader opts(ctx.config.options);
    const double e_min = opts.number("e_min", 0.0);
    const double e_max = opts.number("e_max", 250.0);
    const long long bins = opts.integer("bins", 0);
    const double tol = opts.number("truncation_tolerance", 1e-8);
    const int n_cap = positive_int(opts, "n_cap", 4096);
    opts.finish();
    if (!(e_max > e_min)) throw ConfigError("options.e_max", "must exceed options.e_min");
    if (bins < 0) throw ConfigError("options.bins", "must be non-negative");

    const Truncation tr = spectral_truncation(ctx, e_max, tol, n_cap);
    const auto dec = ctx.cache.get_or_compute(ctx.config.model.with_truncation(tr.n_tr), false);
    const rabi::EnergyWindow window{e_min, e_max};
    const auto spacings = rabi::level_spacings(dec->energies, window);
    const auto hist = rabi::spacing_histogram(dec->energies, window, static_cast<std::size_t>(bins));
    const auto tests = rabi::spacing_ks_tests(spacings);

    CsvTable table({"s_lo", "s_hi", "density", "poisson", "wigner_dyson"});
    for (std::size_t b = 0; b + 1 < hist.bin_edges.size(); ++b) {
        const double lo = hist.bin_edges[b];
        const double hi = hist.bin_edges[b + 1];
        const double w = hi - lo;
        table.add_row({lo, hi, hist.counts[b], (rabi::stats::poisson_cdf(hi) - rabi::stats::poisson_cdf(lo)) / w,
                       (rabi::stats::wigner_dyson_cdf(hi) - rabi::stats::wigner_dyson_cdf(lo)) / w});
    }
    CsvTable raw({"index", "spacing"});
    for (std::size_t i = 0; i < spacings.size(); ++i) raw.add_row({static_cast<double>(i), spacings[i]});

    nlohmann::json results = {{"spacings", tests.count},
                              {"mean_spacing", hist.mean_spacing},
                              {"ks_poisson", tests.ks_poisson},
                              {"ks_wigner_dyson", tests.ks_wigner_dyson},
                              {"critical_1pct", tests.critical_1pct},
                              {"critical_5pct", tests.critical_5pct},
                              {"rejects_poisson_1pct", tests.ks_poisson > tests.critical_1pct},
                              {"rejects_wigner_dyson_1pct", tests.ks_wigner_dyson > tests.critical_1pct}};
    ctx.write("levelstats.csv", table, &tr, results);
    ctx.write("levelstats_spacings.csv", raw, &tr, results);
    ctx.report.results = results;
}

void run_quench_stats(Context& ctx) {
    OptionReader opts(ctx.config.options);
    const auto kind = observable(opts);
    const double t_max = opts.number("t_max", 1000.0);
    const double dt = opts.number("dt", 1.0);
    const auto mode = variance_mode(opts);
    rabi::VarianceOptions vopts;
    vopts.sampling.samples = positive_int(opts, "samples", 10000);
    vopts.sampling.t_min = opts.number("t_sample_min", 1e3);
    vopts.sampling.t_max = opts.number("t_sample_max", 1e6);
    vopts.sampling.seed = ctx.config.seed;
    const int low_count = positive_int(opts, "low_count", 140);
    const double tol = opts.number("truncation_tolerance", 1e-3);
    const int n_cap = positive_int(opts, "n_cap", 4096);
    opts.finish();
    if (!(dt > 0.0) || !(t_max >= 0.0)) throw ConfigError("options.dt", "need dt > 0 and t_max >= 0");

    const Truncation tr = quench_truncation(ctx, tol, n_cap);
    const auto state = quench_state(ctx, tr.n_tr);
    const auto& dec = *state.decomposition;
    const auto obs = rabi::to_eigenbasis(rabi::build_observable(kind, tr.n_tr), dec);
    const double mean = rabi::long_time_average(state, obs);
    const auto var = rabi::long_time_variance(state, obs, mode, vopts);
    const Eigen::VectorXd gamma = rabi::eigenstate_population(state);

    const rabi::ExpectationEvaluator eval(state, obs);
    CsvTable trace({"t", "value"});
    const auto steps = static_cast<long long>(std::floor(t_max / dt + 1e-9));
    for (long long k = 0; k <= steps; ++k) {
        const double t = dt * static_cast<double>(k);
        trace.add_row({t, eval(t)});
    }
    CsvTable pops({"index", "energy", "weight", "diagonal"});
    for (rabi::Index i = 0; i < gamma.size(); ++i) {
        pops.add_row({static_cast<double>(i), dec.energies(i), gamma(i), obs.elements(i, i).real()});
    }
    rabi::Index peak = 0;
    gamma.maxCoeff(&peak);
    const double low_weight = gamma.head(std::min<rabi::Index>(low_count, gamma.size())).sum();
    const double delta_mc = rabi::default_microcanonical_delta(dec.energies, state.energy);

    nlohmann::json results = {
        {"observable", std::string(rabi::to_string(kind))},
        {"long_time_average", mean},
        {"deviation", var.deviation},
        {"ratio", mean != 0.0 ? var.deviation / mean : 0.0},
        {"variance_mode", var.mode == rabi::VarianceMode::Spectral ? "spectral" : "sampled"},
        {"fell_back_to_sampling", var.fell_back},
        {"gap_collision_fraction", var.gap_collision_fraction},
        {"ipr", rabi::ipr(state.coeffs)},
        {"energy", state.energy},
        {"microcanonical_average", rabi::microcanonical_average(dec, obs, state.energy, delta_mc)},
        {"microcanonical_half_width", delta_mc},
        {"population_peak_index", peak},
        {"low_count", low_count},
        {"low_weight", low_weight},
        {"discarded_weight", state.discarded_weight},
    };
    ctx.write("quench_trace.csv", trace, &tr, results);
    ctx.write("quench_populations.csv", pops, &tr, results);
    ctx.report.results = results;
}

void run_gaussianity(Context& ctx) {
    OptionReader opts(ctx.config.options);
    const auto kind = observable(opts);
    const int samples = positive_int(opts, "samples", 10000);
    const double t_max = opts.number("t_max", 1e6);
    rabi::GaussianityOptions gopts;
    gopts.t_burn = opts.number("t_burn", 1e3);
    const long long bins = opts.integer("bins", 0);
    const double tol = opts.number("truncation_tolerance", 1e-3);
    const int n_cap = positive_int(opts, "n_cap", 4096);
    opts.finish();
    if (bins < 0) throw ConfigError("options.bins", "must be non-negative");

    const Truncation tr = quench_truncation(ctx, tol, n_cap);
    const auto state = quench_state(ctx, tr.n_tr);
    const auto obs = rabi::to_eigenbasis(rabi::build_observable(kind, tr.n_tr), *state.decomposition);
    const auto rep = rabi::gaussianity_test(state, obs, samples, t_max, ctx.config.seed, gopts);

    CsvTable raw({"t", "value"});
    for (std::size_t i = 0; i < rep.samples.size(); ++i) raw.add_row({rep.times[i], rep.samples[i]});

    const auto [lo_it, hi_it] = std::minmax_element(rep.samples.begin(), rep.samples.end());
    std::size_t nb = static_cast<std::size_t>(bins);
    if (nb == 0) {
        const double w = rabi::stats::freedman_diaconis_width(rep.samples);
        nb = static_cast<std::size_t>(std::max(1.0, std::ceil((*hi_it - *lo_it) / w)));
    }
    const auto hist = rabi::stats::histogram(rep.samples, *lo_it, *hi_it, nb);
    CsvTable table({"lo", "hi", "density", "normal"});
    for (std::size_t b = 0; b < nb; ++b) {
        const double lo = hist.edges[b];
        const double hi = hist.edges[b + 1];
        const double ref = (rabi::stats::normal_cdf(hi, rep.reference_mean, rep.reference_sigma) -
                            rabi::stats::normal_cdf(lo, rep.reference_mean, rep.reference_sigma)) /
                           (hi - lo);
        table.add_row({lo, hi, hist.densities[b], ref});
    }
    nlohmann::json results = {{"observable", std::string(rabi::to_string(kind))},
                              {"samples", samples},
                              {"ks_statistic", rep.ks_statistic},
                              {"critical_5pct", rep.critical_5pct},
                              {"passes_5pct", rep.passes()},
                              {"reference_mean", rep.reference_mean},
                              {"reference_sigma", rep.reference_sigma}};
    ctx.write("gaussianity_samples.csv", raw, &tr, results);
    ctx.write("gaussianity_histogram.csv", table, &tr, results);
    ctx.report.results = results;
}

void run_wigner(Context& ctx) {
    OptionReader opts(ctx.config.options);
    const std::string source = opts.text("source", "evolved");
    const double time = opts.number("time", 500000.0);
    const double target = opts.number("eigenstate_energy", 0.0);
    const long long index_opt = opts.integer("eigenstate_index", -1);
    OptionReader grid_opts = opts.child("grid");
    const auto gx_min = grid_opts.optional_number("x_min");
    const auto gx_max = grid_opts.optional_number("x_max");
    const auto gp_min = grid_opts.optional_number("p_min");
    const auto gp_max = grid_opts.optional_number("p_max");
    const long long gnx = grid_opts.integer("nx", 0);
    const long long gnp = grid_opts.integer("np", 0);
    grid_opts.finish();
    const double tol = opts.number("truncation_tolerance", 1e-3);
    const int n_cap = positive_int(opts, "n_cap", 4096);
    opts.finish();
    if (source != "evolved" && source != "eigenstate") {
        throw ConfigError("options.source", "expected \"evolved\" or \"eigenstate\"");
    }

    const Truncation tr = quench_truncation(ctx, tol, n_cap);
    Eigen::VectorXcd psi;
    nlohmann::json results = {{"source", source}};
    if (source == "evolved") {
        const auto state = quench_state(ctx, tr.n_tr);
        psi = rabi::state_at_time(state, time);
        results["time"] = time;
    } else {
        const auto dec = ctx.cache.get_or_compute(ctx.config.model.with_truncation(tr.n_tr));
        rabi::Index index = index_opt;
        if (index < 0) {
            (dec->energies.array() - target).abs().minCoeff(&index);
        }
        if (index >= dec->dimension()) throw ConfigError("options.eigenstate_index", "out of range");
        psi = rabi::eigenstate_vector(*dec, index);
        results["eigenstate_index"] = index;
        results["eigenstate_energy"] = dec->energies(index);
    }
    const Eigen::MatrixXcd rho = rabi::reduce_field(psi);
    auto spec = rabi::default_wigner_grid(ctx.config.model.g, rabi::field_support(rho));
    spec.x_min = gx_min.value_or(spec.x_min);
    spec.x_max = gx_max.value_or(spec.x_max);
    spec.p_min = gp_min.value_or(spec.p_min);
    spec.p_max = gp_max.value_or(spec.p_max);
    if (gnx != 0) spec.nx = static_cast<int>(gnx);
    if (gnp != 0) spec.np = static_cast<int>(gnp);
    const auto grid = rabi::wigner_transform(rho, spec);

    CsvTable table({"x", "p", "W"});
    for (rabi::Index i = 0; i < grid.x_axis.size(); ++i) {
        for (rabi::Index j = 0; j < grid.p_axis.size(); ++j) {
            table.add_row({grid.x_axis(i), grid.p_axis(j), grid.values(i, j)});
        }
    }
    results.update({{"normalization", grid.normalization},
                    {"imag_residue", grid.imag_residue},
                    {"marginal_error", grid.marginal_error},
                    {"support_fraction", grid.support_fraction},
                    {"negativity_volume", rabi::negativity_volume(grid)},
                    {"origin_value", grid.origin_value},
                    {"origin_parity", grid.origin_parity},
                    {"grid", {{"x_min", spec.x_min}, {"x_max", spec.x_max}, {"nx", spec.nx},
                              {"p_min", spec.p_min}, {"p_max", spec.p_max}, {"np", spec.np}}}});
    ctx.write("wigner.csv", table, &tr, results);
    ctx.report.results = results;
}

rabi::Coordinate parse_coordinate(const std::string& name, const std::string& path) {
    if (name == "x") return rabi::Coordinate::X;
    if (name == "p") return rabi::Coordinate::P;
    if (name == "Z" || name == "z") return rabi::Coordinate::Z;
    if (name == "dphi") return rabi::Coordinate::Dphi;
    throw ConfigError(path, "expected one of x, p, Z, dphi");
}

void run_classical(Context& ctx) {
    const ModelParams& model = ctx.config.model;
    OptionReader opts(ctx.config.options);
    const double x0 = opts.number("x", 0.0);
    const double z0 = opts.number("Z", 0.3);
    const double phi0 = opts.number("dphi", 2.0);
    const auto energy = opts.optional_number("energy");
    const double p0 = opts.number("p", 0.0);
    const double t_end = opts.number("t_end", 1000.0);
    const double dt = opts.number("dt", 0.05);
    const std::string chart = opts.text("chart", "cartesian");
    const int extra = static_cast<int>(opts.integer("section_trajectories", 0));
    OptionReader surf = opts.child("surface");
    rabi::SurfaceSpec surface;
    surface.variable = parse_coordinate(surf.text("variable", "Z"), "options.surface.variable");
    surface.value = surf.number("value", 0.0);
    surface.direction = static_cast<int>(surf.integer("direction", 1));
    surface.first = parse_coordinate(surf.text("first", "x"), "options.surface.first");
    surface.second = parse_coordinate(surf.text("second", "p"), "options.surface.second");
    surface.shell_tolerance = surf.number("shell_tolerance", 1e-6);
    surf.finish();
    OptionReader lyap = opts.child("lyapunov");
    const double lyap_t = lyap.number("t_total", 1e4);
    rabi::LyapunovOptions lopts;
    lopts.renormalization_interval = lyap.number("interval", 1.0);
    lopts.initial_separation = lyap.number("separation", 1e-8);
    lopts.seed = ctx.config.seed;
    lyap.finish();
    opts.finish();
    if (chart != "cartesian" && chart != "angular") throw ConfigError("options.chart", "expected cartesian or angular");
    if (surface.variable == rabi::Coordinate::Dphi) throw ConfigError("options.surface.variable", "dphi not allowed");
    if (surface.direction < -1 || surface.direction > 1) throw ConfigError("options.surface.direction", "use -1, 0, 1");
    if (extra < 0) throw ConfigError("options.section_trajectories", "must be non-negative");
    if (std::abs(z0) > 1.0) throw ConfigError("options.Z", "must lie in [-1, 1]");

    rabi::IntegrationOptions iopts;
    iopts.chart = chart == "angular" ? rabi::Chart::Angular : rabi::Chart::Cartesian;
    const rabi::ClassicalState s0 =
        energy ? rabi::state_on_shell(model, *energy, x0, z0, phi0) : rabi::ClassicalState{x0, p0, z0, phi0};
    const double shell = rabi::classical_energy(s0, model);
    surface.has_shell = true;
    surface.shell = shell;

    // Further initial conditions on the same shell, drawn from the seed.
    std::vector<rabi::ClassicalState> starts{s0};
    std::mt19937_64 rng(ctx.config.seed);
    std::uniform_real_distribution<double> uz(-1.0, 1.0);
    std::uniform_real_distribution<double> uphi(-std::numbers::pi, std::numbers::pi);
    const double reach = std::sqrt(2.0 * (std::abs(shell) + std::abs(model.lambda) + 1.0)) + 2.0 * std::sqrt(2.0) * model.g;
    std::uniform_real_distribution<double> ux(-reach, reach);
    for (int attempts = 0; static_cast<int>(starts.size()) < extra + 1; ++attempts) {
        if (attempts > 1000 * (extra + 1)) throw rabi::NumericalError("classical: energy shell not reachable by sampling");
        const rabi::ClassicalState probe{ux(rng), 0.0, uz(rng), uphi(rng)};
        if (rabi::classical_energy(probe, model) <= shell) {
            starts.push_back(rabi::state_on_shell(model, shell, probe.x, probe.Z, probe.dphi));
        }
    }

    std::vector<rabi::Trajectory> trajectories(starts.size());
    std::vector<std::vector<rabi::SectionPoint>> sections(starts.size());
    std::vector<std::exception_ptr> errors(starts.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < starts.size(); i = next.fetch_add(1)) {
            try {
                trajectories[i] = rabi::integrate(starts[i], model, t_end, dt, iopts);
                try {
                    sections[i] = rabi::poincare_section(trajectories[i], surface);
                } catch (const rabi::NumericalError&) {
                    // a trajectory that never crosses the surface contributes no points
                }
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        unsigned threads = ctx.config.threads != 0 ? ctx.config.threads : std::max(1U, std::thread::hardware_concurrency());
        threads = static_cast<unsigned>(std::min<std::size_t>(threads, starts.size()));
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    CsvTable traj({"t", "x", "p", "Z", "dphi", "energy"});
    const auto& main = trajectories.front();
    for (std::size_t k = 0; k < main.times.size(); ++k) {
        const auto& s = main.states[k];
        traj.add_row({main.times[k], s.x, s.p, s.Z, s.dphi, main.energies[k]});
    }
    CsvTable sec({"trajectory", "t", "first", "second", "energy"});
    std::vector<rabi::SectionPoint> all_points;
    double drift = 0.0;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        drift = std::max(drift, trajectories[i].max_energy_drift());
        for (const auto& pt : sections[i]) {
            sec.add_row({static_cast<double>(i), pt.time, pt.first, pt.second, pt.energy});
            all_points.push_back(pt);
        }
    }
    nlohmann::json results = {{"energy", shell},
                              {"trajectories", starts.size()},
                              {"max_energy_drift", drift},
                              {"section_points", all_points.size()}};
    if (!all_points.empty()) results["section_fill_fraction"] = rabi::section_fill_fraction(all_points);

    ctx.write("classical_trajectory.csv", traj, nullptr, results);
    ctx.write("classical_section.csv", sec, nullptr, results);
    if (lyap_t > 0.0) {
        const auto ly = rabi::lyapunov_largest(s0, model, lyap_t, lopts);
        CsvTable hist({"t", "exponent"});
        for (std::size_t k = 0; k < ly.times.size(); ++k) hist.add_row({ly.times[k], ly.history[k]});
        results["lyapunov_exponent"] = ly.exponent;
        results["lyapunov_converged"] = ly.converged;
        ctx.write("classical_lyapunov.csv", hist, nullptr, results);
    }
    ctx.report.results = results;
}

void run_sweep(Context& ctx) {
    OptionReader opts(ctx.config.options);
    const double g_min = opts.number("g_min", 1.0);
    const double g_max = opts.number("g_max", 10.0);
    const int g_count = positive_int(opts, "g_count", 10, 10000);
    const std::string policy = opts.text("truncation", ctx.config.auto_truncation ? "converged" : "fixed");
    const double tol = opts.number("truncation_tolerance", 1e-3);
    const int n_cap = positive_int(opts, "n_cap", 4096);
    const auto mode = variance_mode(opts);
    const int samples = positive_int(opts, "samples", 10000);
    opts.finish();
    if (!(g_max >= g_min) || g_min < 0.0) throw ConfigError("options.g_max", "need 0 <= g_min <= g_max");

    auto sopts = sweep_options(ctx, tol, n_cap);
    if (policy == "converged") {
        sopts.truncation = rabi::TruncationPolicy::Converged;
    } else if (policy == "estimate") {
        sopts.truncation = rabi::TruncationPolicy::Estimate;
    } else if (policy == "fixed") {
        sopts.truncation = rabi::TruncationPolicy::Fixed;
    } else {
        throw ConfigError("options.truncation", "expected converged, estimate or fixed");
    }
    if (sopts.truncation == rabi::TruncationPolicy::Fixed && ctx.config.auto_truncation) {
        throw ConfigError("model.n_tr", "a fixed truncation needs an integer n_tr");
    }
    sopts.variance_mode = mode;
    sopts.variance.sampling.samples = samples;
    sopts.variance.sampling.seed = ctx.config.seed;

    std::vector<double> gs(static_cast<std::size_t>(g_count));
    for (int i = 0; i < g_count; ++i) {
        gs[static_cast<std::size_t>(i)] = g_count == 1 ? g_min : g_min + (g_max - g_min) * i / (g_count - 1.0);
    }
    const auto rows = rabi::variance_sweep(gs, ctx.config.model, rabi::QuenchSpec{ctx.config.quench_initial}, sopts);

    CsvTable table({"g", "n_tr", "mean_n", "delta_n", "ratio", "ipr", "energy"});
    for (const auto& r : rows) table.add_row({r.g, static_cast<double>(r.n_tr), r.mean_n, r.delta_n, r.ratio, r.ipr, r.energy});

    nlohmann::json results = {{"points", rows.size()}, {"truncation_policy", policy}};
    const std::size_t half = rows.size() / 2;
    if (rows.size() - half >= 2 && rows[half].g > 0.0) {
        std::vector<double> g, d, m;
        for (std::size_t i = half; i < rows.size(); ++i) {
            g.push_back(rows[i].g);
            d.push_back(rows[i].delta_n);
            m.push_back(rows[i].mean_n);
        }
        results["upper_half_slope_delta_n"] = rabi::stats::loglog_slope(g, d);
        results["upper_half_slope_mean_n"] = rabi::stats::loglog_slope(g, m);
    }
    results["final_ratio"] = rows.back().ratio;
    Truncation tr{rows.back().n_tr, {{"policy", policy}, {"tolerance", tol}, {"per_row", "see n_tr column"}}};
    ctx.write("sweep.csv", table, &tr, results);
    ctx.report.results = results;
}

void run_potentials(Context& ctx) {
    const ModelParams& model = ctx.config.model;
    OptionReader opts(ctx.config.options);
    const double half = 2.0 * model.g + 5.0;
    const double x_min = opts.number("x_min", -half);
    const double x_max = opts.number("x_max", half);
    const int points = positive_int(opts, "points", 1001, 10000000);
    opts.finish();
    if (!(x_max > x_min) || points < 2) throw ConfigError("options.x_max", "need x_max > x_min and points >= 2");

    CsvTable table({"x", "v_minus", "v_plus"});
    std::vector<double> xs(static_cast<std::size_t>(points));
    std::vector<double> lower(xs.size());
    for (int i = 0; i < points; ++i) {
        const double x = i == points - 1 ? x_max : x_min + (x_max - x_min) * i / (points - 1.0);
        const auto v = rabi::adiabatic_potentials(x, model);
        xs[static_cast<std::size_t>(i)] = x;
        lower[static_cast<std::size_t>(i)] = v.minus;
        table.add_row({x, v.minus, v.plus});
    }
    nlohmann::json minima = nlohmann::json::array();
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
        if (lower[i] <= lower[i - 1] && lower[i] < lower[i + 1]) {
            const auto f = [&](double x) { return rabi::adiabatic_potentials(x, model).minus; };
            const auto [x, v] = boost::math::tools::brent_find_minima(f, xs[i - 1], xs[i + 1], 52);
            minima.push_back({{"x", x}, {"v_minus", v}});
        }
    }
    nlohmann::json results = {{"minima", minima}};
    if (model.g != 0.0) {
        const double xc = -model.lambda / (std::sqrt(2.0) * model.g);
        const auto v = rabi::adiabatic_potentials(xc, model);
        results["crossing_x"] = xc;
        results["crossing_gap"] = v.plus - v.minus;
    }
    ctx.write("potentials.csv", table, nullptr, results);
    ctx.report.results = results;
}

}  // namespace

std::string code_version() { return RABI_LAB_VERSION; }

RunReport run(const RunConfig& config, EigenCache& cache) {
    config.model.validate();
    config.quench_initial.validate();
    Context ctx{config, cache, {}};
    switch (config.experiment) {
        case Experiment::Spectrum: run_spectrum(ctx); break;
        case Experiment::LevelStats: run_levelstats(ctx); break;
        case Experiment::QuenchStats: run_quench_stats(ctx); break;
        case Experiment::Gaussianity: run_gaussianity(ctx); break;
        case Experiment::Wigner: run_wigner(ctx); break;
        case Experiment::Classical: run_classical(ctx); break;
        case Experiment::Sweep: run_sweep(ctx); break;
        case Experiment::Potentials: run_potentials(ctx); break;
    }
    for (const auto& w : cache.warnings()) ctx.report.warnings.push_back(w);
    return ctx.report;
}

int exit_code_for(const std::exception_ptr& error, std::ostream& err) {
    try {
        std::rethrow_exception(error);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const rabi::InvalidArgument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const rabi::ResourceCapError& e) {
        err << "resource cap: " << e.what() << '\n';
        return kResourceCap;
    } catch (const rabi::NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::bad_alloc&) {
        err << "resource cap: out of memory\n";
        return kResourceCap;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

int run_with_status(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        EigenCache cache(config.cache_dir);
        const RunReport report = run(config, cache);
        for (const auto& w : report.warnings) err << "warning: " << w << '\n';
        for (const auto& f : report.files) out << f.generic_string() << '\n';
        out << report.results.dump(2) << '\n';
        return kSuccess;
    } catch (...) {
        return exit_code_for(std::current_exception(), err);
    }
}

}  // namespace lab
