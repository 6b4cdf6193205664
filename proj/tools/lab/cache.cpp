// cache.cpp

#include "cache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "output.hpp"

namespace lab {

namespace {

constexpr char kMagic[8] = {'R', 'A', 'B', 'I', 'E', 'I', 'G', '1'};
constexpr std::uint32_t kFormatVersion = 1;

std::uint64_t fnv1a(const char* data, std::size_t size) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <class T>
void put(std::string& buf, const T& value) {
    buf.append(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
bool get(const std::string& buf, std::size_t& pos, T& value) {
    if (pos + sizeof(T) > buf.size()) return false;
    std::memcpy(&value, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return true;
}

// Exclusive advisory lock on a side file, released on destruction.
class FileLock {
public:
    explicit FileLock(const std::filesystem::path& file) {
        fd_ = ::open(file.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
        if (fd_ >= 0 && ::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            fd_ = -1;
        }
    }
    ~FileLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;
    bool locked() const { return fd_ >= 0; }

private:
    int fd_{-1};
};

}  // namespace

CacheKey CacheKey::of(const rabi::ModelParams& params, bool vectors) {
    return CacheKey{rabi::hash_params(params, kMatrixVersion), vectors};
}

std::string CacheKey::file_name() const { return fmt::format("eig-{:016x}-{}.bin", hash, vectors ? "v" : "e"); }

void write_decomposition(const std::filesystem::path& file, const CacheKey& key, const rabi::ModelParams& params,
                         const rabi::EigenDecomposition& dec) {
    const std::int64_t d = dec.energies.size();
    const bool vectors = key.vectors && dec.vectors.size() == d * d;
    std::string buf;
    buf.reserve(64 + static_cast<std::size_t>(d) * 8 * (vectors ? d + 1 : 1));
    buf.append(kMagic, sizeof(kMagic));
    put(buf, kFormatVersion);
    put(buf, key.hash);
    put(buf, params.omega);
    put(buf, params.g);
    put(buf, params.lambda);
    put(buf, static_cast<std::int32_t>(params.n_tr));
    put(buf, static_cast<std::uint8_t>(vectors ? 1 : 0));
    put(buf, d);
    put(buf, dec.params_hash);
    buf.append(reinterpret_cast<const char*>(dec.energies.data()), static_cast<std::size_t>(d) * sizeof(double));
    if (vectors) {
        buf.append(reinterpret_cast<const char*>(dec.vectors.data()), static_cast<std::size_t>(d * d) * sizeof(double));
    }
    put(buf, fnv1a(buf.data(), buf.size()));
    write_atomic(file, buf);
}

std::optional<rabi::EigenDecomposition> read_decomposition(const std::filesystem::path& file, const CacheKey& key,
                                                           const rabi::ModelParams& params) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < sizeof(kMagic) + sizeof(std::uint64_t)) return std::nullopt;
    const std::size_t payload = buf.size() - sizeof(std::uint64_t);
    std::uint64_t checksum = 0;
    std::memcpy(&checksum, buf.data() + payload, sizeof(checksum));
    if (checksum != fnv1a(buf.data(), payload)) return std::nullopt;
    if (std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) return std::nullopt;

    std::size_t pos = sizeof(kMagic);
    std::uint32_t version = 0;
    std::uint64_t hash = 0;
    rabi::ModelParams stored;
    std::int32_t n_tr = 0;
    std::uint8_t has_vectors = 0;
    std::int64_t d = 0;
    rabi::EigenDecomposition dec;
    if (!get(buf, pos, version) || !get(buf, pos, hash) || !get(buf, pos, stored.omega) || !get(buf, pos, stored.g) ||
        !get(buf, pos, stored.lambda) || !get(buf, pos, n_tr) || !get(buf, pos, has_vectors) || !get(buf, pos, d) ||
        !get(buf, pos, dec.params_hash)) {
        return std::nullopt;
    }
    stored.n_tr = n_tr;
    if (version != kFormatVersion || hash != key.hash || !(stored == params) || (has_vectors != 0) != key.vectors ||
        d != params.dimension()) {
        return std::nullopt;
    }
    const std::size_t need = static_cast<std::size_t>(d) * sizeof(double) * (has_vectors != 0 ? d + 1 : 1);
    if (pos + need != payload) return std::nullopt;
    dec.energies.resize(d);
    std::memcpy(dec.energies.data(), buf.data() + pos, static_cast<std::size_t>(d) * sizeof(double));
    pos += static_cast<std::size_t>(d) * sizeof(double);
    if (has_vectors != 0) {
        dec.vectors.resize(d, d);
        std::memcpy(dec.vectors.data(), buf.data() + pos, static_cast<std::size_t>(d * d) * sizeof(double));
    }
    return dec;
}

EigenCache::EigenCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::shared_ptr<const rabi::EigenDecomposition> EigenCache::get_or_compute(const rabi::ModelParams& params,
                                                                           bool vectors) {
    params.validate();
    const CacheKey key = CacheKey::of(params, vectors);
    {
        std::lock_guard lock(mutex_);
        auto alive = [&](const CacheKey& k) -> std::shared_ptr<const rabi::EigenDecomposition> {
            auto it = memory_.find(k);
            return it == memory_.end() ? nullptr : it->second.lock();
        };
        auto hit = alive(key);
        // A decomposition with vectors also serves eigenvalue-only requests.
        if (!hit && !vectors) hit = alive(CacheKey::of(params, true));
        if (hit) {
            ++stats_.memory_hits;
            return hit;
        }
    }

    auto compute = [&]() {
        rabi::EigensolverOptions opts;
        opts.compute_vectors = vectors;
        return std::make_shared<const rabi::EigenDecomposition>(rabi::decompose_hamiltonian(params, opts));
    };

    std::shared_ptr<const rabi::EigenDecomposition> dec;
    if (dir_.empty()) {
        dec = compute();
        std::lock_guard lock(mutex_);
        ++stats_.computed;
    } else {
        const auto file = dir_ / key.file_name();
        FileLock guard(std::filesystem::path(file).concat(".lock"));
        const bool existed = std::filesystem::exists(file);
        if (auto stored = read_decomposition(file, key, params)) {
            dec = std::make_shared<const rabi::EigenDecomposition>(std::move(*stored));
            std::lock_guard lock(mutex_);
            ++stats_.disk_hits;
        } else {
            dec = compute();
            write_decomposition(file, key, params, *dec);
            std::lock_guard lock(mutex_);
            ++stats_.computed;
            if (existed) {
                ++stats_.corrupt;
                warnings_.push_back("cache entry " + file.string() + " was unreadable and has been recomputed");
            }
        }
    }
    std::lock_guard lock(mutex_);
    memory_[key] = dec;
    return dec;
}

EigenCache::Stats EigenCache::stats() const {
    std::lock_guard lock(mutex_);
    return stats_;
}

std::vector<std::string> EigenCache::warnings() const {
    std::lock_guard lock(mutex_);
    return warnings_;
}

}  // namespace lab
