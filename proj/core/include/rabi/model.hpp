// model.hpp — physical parameters and the product basis {|n,s>} of the driven Rabi model

#pragma once

#include <cstdint>
#include <Eigen/Dense>

namespace rabi {

using Index = Eigen::Index;

/// Parameters of H = a^dag a + (omega/2) sz + g (a^dag + a) sx + lambda sx,
/// truncated to boson numbers n <= n_tr.
struct ModelParams {
    double omega{1.0};   // spin splitting, in units of the boson energy
    double g{0.0};       // spin-boson coupling
    double lambda{0.0};  // spin drive amplitude
    int n_tr{0};         // largest boson number retained

    Index dimension() const { return 2 * (static_cast<Index>(n_tr) + 1); }

    /// Throws InvalidArgument unless all fields are finite, g >= 0 and n_tr >= 0.
    void validate() const;

    ModelParams with_g(double value) const {
        ModelParams p = *this;
        p.g = value;
        return p;
    }
    ModelParams with_truncation(int value) const {
        ModelParams p = *this;
        p.n_tr = value;
        return p;
    }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Stable 64-bit content hash of the parameters (bit patterns of the doubles).
std::uint64_t hash_params(const ModelParams& params, std::uint64_t seed = 0);

/// Position of |n,s> in the flat basis, i = 2n + (s - 1). Spin label s=1 is the
/// sz = -1 state, s=2 the sz = +1 state.
struct BasisIndex {
    int n{0};
    int s{1};

    constexpr Index flat() const { return 2 * static_cast<Index>(n) + (s - 1); }
    static constexpr BasisIndex from_flat(Index i) {
        return BasisIndex{static_cast<int>(i / 2), static_cast<int>(i % 2) + 1};
    }
    friend constexpr bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

}  // namespace rabi
