// config.hpp — run configuration for rabi-lab: JSON schema, defaults and flag overrides

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "rabi/model.hpp"

namespace lab {

inline constexpr int kSchemaVersion = 1;

enum class Experiment { Spectrum, LevelStats, QuenchStats, Gaussianity, Wigner, Classical, Sweep, Potentials };

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

/// Schema violation; `path` locates the offending field (e.g. "model.g").
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

struct RunConfig {
    int schema_version{kSchemaVersion};
    Experiment experiment{Experiment::Spectrum};
    rabi::ModelParams model{1.0, 10.0, 2.0, 0};
    bool auto_truncation{true};  // n_tr chosen by convergence; model.n_tr ignored
    rabi::ModelParams quench_initial{1.0, 0.1, 0.0, 0};
    std::uint64_t seed{0};
    std::filesystem::path output_dir{"out"};
    std::filesystem::path cache_dir{};  // empty: no persistent cache
    unsigned threads{0};                // 0: hardware concurrency
    nlohmann::json options = nlohmann::json::object();
};

/// Parses and validates a configuration document. Unknown keys are errors.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& file);
nlohmann::json to_json(const RunConfig& config);

/// Typed, path-aware access to an experiment's "options" object. Call finish() after
/// reading every option to reject misspelled keys.
class OptionReader {
public:
    explicit OptionReader(const nlohmann::json& options, std::string prefix = "options");

    double number(const std::string& key, double fallback);
    std::optional<double> optional_number(const std::string& key);
    long long integer(const std::string& key, long long fallback);
    std::string text(const std::string& key, const std::string& fallback);
    bool flag(const std::string& key, bool fallback);
    OptionReader child(const std::string& key);
    bool has(const std::string& key) const { return options_.contains(key); }
    void finish() const;

private:
    const nlohmann::json& lookup(const std::string& key);

    const nlohmann::json& options_;
    std::string prefix_;
    std::set<std::string> seen_;
};

}  // namespace lab
