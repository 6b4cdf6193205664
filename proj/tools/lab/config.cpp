// config.cpp

#include "config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <utility>

namespace lab {

namespace {

constexpr std::array<std::pair<Experiment, std::string_view>, 8> kNames{{
    {Experiment::Spectrum, "spectrum"},
    {Experiment::LevelStats, "levelstats"},
    {Experiment::QuenchStats, "quench-stats"},
    {Experiment::Gaussianity, "gaussianity"},
    {Experiment::Wigner, "wigner"},
    {Experiment::Classical, "classical"},
    {Experiment::Sweep, "sweep"},
    {Experiment::Potentials, "potentials"},
}};

double read_real(const nlohmann::json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
    return x;
}

bool is_non_negative_integer(const nlohmann::json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
}

void read_model(const nlohmann::json& doc, const std::string& path, rabi::ModelParams& out, bool* auto_ntr) {
    if (!doc.is_object()) throw ConfigError(path, "expected an object");
    for (const auto& [key, value] : doc.items()) {
        const std::string here = path + "." + key;
        if (key == "omega") {
            out.omega = read_real(value, here);
        } else if (key == "g") {
            out.g = read_real(value, here);
            if (out.g < 0.0) throw ConfigError(here, "must be non-negative");
        } else if (key == "lambda") {
            out.lambda = read_real(value, here);
        } else if (key == "n_tr" && auto_ntr != nullptr) {
            if (value.is_string() && value.get<std::string>() == "auto") {
                *auto_ntr = true;
            } else if (value.is_number_integer() && value.get<long long>() >= 0 && value.get<long long>() < (1 << 20)) {
                out.n_tr = static_cast<int>(value.get<long long>());
                *auto_ntr = false;
            } else {
                throw ConfigError(here, "expected a non-negative integer or \"auto\"");
            }
        } else {
            throw ConfigError(here, "unknown key");
        }
    }
}

}  // namespace

std::string_view to_string(Experiment e) {
    for (const auto& [k, name] : kNames) {
        if (k == e) return name;
    }
    return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
    for (const auto& [k, n] : kNames) {
        if (n == name) return k;
    }
    if (name == "quench_stats") return Experiment::QuenchStats;
    return std::nullopt;
}

RunConfig parse_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("$", "configuration must be a JSON object");
    RunConfig cfg;
    if (!doc.contains("schema_version")) throw ConfigError("schema_version", "missing");
    for (const auto& [key, value] : doc.items()) {
        if (key == "schema_version") {
            if (!value.is_number_integer() || value.get<int>() != kSchemaVersion) {
                throw ConfigError(key, "unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");
            }
        } else if (key == "experiment") {
            if (!value.is_string()) throw ConfigError(key, "expected a string");
            const auto e = parse_experiment(value.get<std::string>());
            if (!e) throw ConfigError(key, "unknown experiment '" + value.get<std::string>() + "'");
            cfg.experiment = *e;
        } else if (key == "model") {
            read_model(value, key, cfg.model, &cfg.auto_truncation);
        } else if (key == "quench_initial") {
            read_model(value, key, cfg.quench_initial, nullptr);
        } else if (key == "seed") {
            if (!is_non_negative_integer(value)) throw ConfigError(key, "expected a non-negative integer");
            cfg.seed = value.get<std::uint64_t>();
        } else if (key == "output_dir") {
            if (!value.is_string()) throw ConfigError(key, "expected a string");
            cfg.output_dir = value.get<std::string>();
        } else if (key == "cache_dir") {
            if (!value.is_string()) throw ConfigError(key, "expected a string");
            cfg.cache_dir = value.get<std::string>();
        } else if (key == "threads") {
            if (!is_non_negative_integer(value)) throw ConfigError(key, "expected a non-negative integer");
            cfg.threads = value.get<unsigned>();
        } else if (key == "options") {
            if (!value.is_object()) throw ConfigError(key, "expected an object");
            cfg.options = value;
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError(file.string(), "cannot open configuration file");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(file.string(), std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

nlohmann::json to_json(const RunConfig& config) {
    nlohmann::json model = {{"omega", config.model.omega}, {"g", config.model.g}, {"lambda", config.model.lambda}};
    if (config.auto_truncation) {
        model["n_tr"] = "auto";
    } else {
        model["n_tr"] = config.model.n_tr;
    }
    return {
        {"schema_version", config.schema_version},
        {"experiment", std::string(to_string(config.experiment))},
        {"model", model},
        {"quench_initial",
         {{"omega", config.quench_initial.omega}, {"g", config.quench_initial.g}, {"lambda", config.quench_initial.lambda}}},
        {"seed", config.seed},
        {"output_dir", config.output_dir.generic_string()},
        {"cache_dir", config.cache_dir.generic_string()},
        {"threads", config.threads},
        {"options", config.options},
    };
}

OptionReader::OptionReader(const nlohmann::json& options, std::string prefix)
    : options_(options), prefix_(std::move(prefix)) {
    if (!options_.is_object()) throw ConfigError(prefix_, "expected an object");
}

const nlohmann::json& OptionReader::lookup(const std::string& key) {
    seen_.insert(key);
    return options_.at(key);
}

double OptionReader::number(const std::string& key, double fallback) {
    return optional_number(key).value_or(fallback);
}

std::optional<double> OptionReader::optional_number(const std::string& key) {
    if (!options_.contains(key)) {
        seen_.insert(key);
        return std::nullopt;
    }
    return read_real(lookup(key), prefix_ + "." + key);
}

long long OptionReader::integer(const std::string& key, long long fallback) {
    seen_.insert(key);
    if (!options_.contains(key)) return fallback;
    const auto& v = lookup(key);
    if (!v.is_number_integer()) throw ConfigError(prefix_ + "." + key, "expected an integer");
    return v.get<long long>();
}

std::string OptionReader::text(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    if (!options_.contains(key)) return fallback;
    const auto& v = lookup(key);
    if (!v.is_string()) throw ConfigError(prefix_ + "." + key, "expected a string");
    return v.get<std::string>();
}

bool OptionReader::flag(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!options_.contains(key)) return fallback;
    const auto& v = lookup(key);
    if (!v.is_boolean()) throw ConfigError(prefix_ + "." + key, "expected true or false");
    return v.get<bool>();
}

OptionReader OptionReader::child(const std::string& key) {
    seen_.insert(key);
    static const nlohmann::json kEmpty = nlohmann::json::object();
    if (!options_.contains(key)) return OptionReader(kEmpty, prefix_ + "." + key);
    return OptionReader(lookup(key), prefix_ + "." + key);
}

void OptionReader::finish() const {
    for (const auto& [key, value] : options_.items()) {
        if (!seen_.contains(key)) throw ConfigError(prefix_ + "." + key, "unknown option");
    }
}

}  // namespace lab
