// rabi_lab.cpp — command line front end for the driven Rabi model laboratory

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lab/config.hpp"
#include "lab/experiments.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> cache;
    std::optional<std::string> ntr;
    std::optional<double> omega;
    std::optional<double> g;
    std::optional<double> lambda;
    std::optional<unsigned> threads;
    std::vector<std::string> options;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config, "JSON configuration file");
    sub->add_option("--seed", o.seed, "seed for every stochastic choice");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--cache", o.cache, "eigendecomposition cache directory");
    sub->add_option("--ntr", o.ntr, "boson truncation, or 'auto' for convergence mode");
    sub->add_option("--omega", o.omega, "spin splitting");
    sub->add_option("--g", o.g, "spin-boson coupling");
    sub->add_option("--lambda", o.lambda, "spin drive amplitude");
    sub->add_option("--threads", o.threads, "worker threads (0: all cores)");
    sub->add_option("--set", o.options, "experiment option KEY=JSON (repeatable)");
}

lab::RunConfig resolve(lab::Experiment experiment, const Overrides& o) {
    lab::RunConfig cfg;
    if (!o.config.empty()) cfg = lab::load_config(o.config);
    cfg.experiment = experiment;  // the subcommand overrides the file
    if (o.seed) cfg.seed = *o.seed;
    if (o.out) cfg.output_dir = *o.out;
    if (o.cache) cfg.cache_dir = *o.cache;
    if (o.omega) cfg.model.omega = *o.omega;
    if (o.g) cfg.model.g = *o.g;
    if (o.lambda) cfg.model.lambda = *o.lambda;
    if (o.threads) cfg.threads = *o.threads;
    if (o.ntr) {
        if (*o.ntr == "auto") {
            cfg.auto_truncation = true;
        } else {
            try {
                std::size_t used = 0;
                const int n = std::stoi(*o.ntr, &used);
                if (used != o.ntr->size() || n < 0) throw std::invalid_argument("negative");
                cfg.model.n_tr = n;
                cfg.auto_truncation = false;
            } catch (const std::exception&) {
                throw lab::ConfigError("--ntr", "expected a non-negative integer or 'auto'");
            }
        }
    }
    for (const auto& kv : o.options) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw lab::ConfigError("--set", "expected KEY=JSON, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string text = kv.substr(eq + 1);
        nlohmann::json value;
        try {
            value = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error&) {
            value = text;  // bare words are strings
        }
        cfg.options[nlohmann::json::json_pointer("/" + [&] {
            std::string p = key;
            for (auto& c : p) {
                if (c == '.') c = '/';
            }
            return p;
        }())] = value;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rabi-lab: exact diagonalization, quench dynamics and semiclassics of the driven Rabi model"};
    app.require_subcommand(1);
    Overrides overrides;
    struct Entry {
        lab::Experiment experiment;
        const char* help;
    };
    const std::vector<Entry> entries{
        {lab::Experiment::Spectrum, "eigenvalues and parities"},
        {lab::Experiment::LevelStats, "nearest-neighbour spacing distribution"},
        {lab::Experiment::QuenchStats, "time trace, long-time average, fluctuations and populations after a quench"},
        {lab::Experiment::Gaussianity, "distribution of random-time samples against a normal law"},
        {lab::Experiment::Wigner, "Wigner function of the reduced boson state"},
        {lab::Experiment::Classical, "semiclassical trajectories, Poincare sections and Lyapunov exponent"},
        {lab::Experiment::Sweep, "fluctuations across a coupling sweep"},
        {lab::Experiment::Potentials, "adiabatic potential curves"},
    };
    std::vector<std::pair<CLI::App*, lab::Experiment>> subs;
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(std::string(lab::to_string(e.experiment)), e.help);
        add_common(sub, overrides);
        subs.emplace_back(sub, e.experiment);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : lab::kConfigError;
    }
    for (const auto& [sub, experiment] : subs) {
        if (!sub->parsed()) continue;
        lab::RunConfig config;
        try {
            config = resolve(experiment, overrides);
        } catch (...) {
            return lab::exit_code_for(std::current_exception(), std::cerr);
        }
        return lab::run_with_status(config, std::cout, std::cerr);
    }
    return lab::kConfigError;
}
