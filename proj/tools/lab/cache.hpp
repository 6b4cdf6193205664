// cache.hpp — persistent cache of Hamiltonian eigendecompositions keyed by parameters

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rabi/eigensolver.hpp"
#include "rabi/model.hpp"

namespace lab {

/// Bumped whenever the matrix construction or the solver output changes.
inline constexpr std::uint64_t kMatrixVersion = 1;

struct CacheKey {
    std::uint64_t hash{0};
    bool vectors{true};

    static CacheKey of(const rabi::ModelParams& params, bool vectors = true);
    std::string file_name() const;
    friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
};

/// Binary round trip. read_decomposition returns nullopt for a missing, truncated,
/// mis-keyed or checksum-failing file.
void write_decomposition(const std::filesystem::path& file, const CacheKey& key, const rabi::ModelParams& params,
                         const rabi::EigenDecomposition& dec);
std::optional<rabi::EigenDecomposition> read_decomposition(const std::filesystem::path& file, const CacheKey& key,
                                                           const rabi::ModelParams& params);

/// Thread-safe; concurrent processes sharing a directory serialize per key through
/// advisory file locks. An empty directory disables the on-disk layer.
class EigenCache {
public:
    explicit EigenCache(std::filesystem::path dir);

    std::shared_ptr<const rabi::EigenDecomposition> get_or_compute(const rabi::ModelParams& params,
                                                                   bool vectors = true);

    struct Stats {
        std::size_t memory_hits{0};
        std::size_t disk_hits{0};
        std::size_t computed{0};
        std::size_t corrupt{0};
    };
    Stats stats() const;
    std::vector<std::string> warnings() const;
    const std::filesystem::path& directory() const { return dir_; }

private:
    std::filesystem::path dir_;
    mutable std::mutex mutex_;
    std::map<CacheKey, std::weak_ptr<const rabi::EigenDecomposition>> memory_;  // reused while alive
    Stats stats_;
    std::vector<std::string> warnings_;
};

}  // namespace lab
