// hamiltonian.cpp

#include "rabi/hamiltonian.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <string>

#include "rabi/errors.hpp"

namespace rabi {

void ModelParams::validate() const {
    if (!std::isfinite(omega) || !std::isfinite(g) || !std::isfinite(lambda)) {
        throw InvalidArgument("model parameters must be finite");
    }
    if (g < 0.0) throw InvalidArgument("coupling g must be non-negative");
    if (n_tr < 0) throw InvalidArgument("truncation n_tr must be non-negative");
}

std::uint64_t hash_params(const ModelParams& params, std::uint64_t seed) {
    // FNV-1a over the raw bytes of each field
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    auto mix = [&h](std::uint64_t word) {
        for (int b = 0; b < 8; ++b) {
            h ^= (word >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    mix(std::bit_cast<std::uint64_t>(params.omega));
    mix(std::bit_cast<std::uint64_t>(params.g));
    mix(std::bit_cast<std::uint64_t>(params.lambda));
    mix(static_cast<std::uint64_t>(params.n_tr));
    return h;
}

std::string_view to_string(ObservableKind kind) {
    switch (kind) {
        case ObservableKind::N: return "n";
        case ObservableKind::X: return "x";
        case ObservableKind::P: return "p";
        case ObservableKind::SigmaX: return "sx";
        case ObservableKind::SigmaY: return "sy";
        case ObservableKind::SigmaZ: return "sz";
        case ObservableKind::XSigmaX: return "xsx";
        case ObservableKind::Hamiltonian: return "H";
        case ObservableKind::Parity: return "parity";
        case ObservableKind::Custom: return "custom";
    }
    return "custom";
}

ObservableKind parse_observable_kind(std::string_view name) {
    std::string lower(name);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "n") return ObservableKind::N;
    if (lower == "x") return ObservableKind::X;
    if (lower == "p") return ObservableKind::P;
    if (lower == "sx" || lower == "sigmax") return ObservableKind::SigmaX;
    if (lower == "sy" || lower == "sigmay") return ObservableKind::SigmaY;
    if (lower == "sz" || lower == "sigmaz") return ObservableKind::SigmaZ;
    if (lower == "xsx" || lower == "xsigmax") return ObservableKind::XSigmaX;
    throw InvalidArgument("unknown observable '" + std::string(name) + "'");
}

Eigen::MatrixXcd HermitianObservable::full() const {
    Eigen::MatrixXcd m = sym.cast<std::complex<double>>();
    if (antisym.size() != 0) m += std::complex<double>(0.0, 1.0) * antisym.cast<std::complex<double>>();
    return m;
}

HermitianObservable HermitianObservable::real(Eigen::MatrixXd matrix, ObservableKind kind) {
    HermitianObservable obs;
    obs.antisym = Eigen::MatrixXd::Zero(matrix.rows(), matrix.cols());
    obs.sym = std::move(matrix);
    obs.kind = kind;
    return obs;
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Writes value at (i, j) and (j, i); keeps storage bit-symmetric.
void set_symmetric(Eigen::MatrixXd& m, Index i, Index j, double value) {
    m(i, j) = value;
    m(j, i) = value;
}

void check_truncation(int n_tr) {
    if (n_tr < 0) throw InvalidArgument("truncation n_tr must be non-negative");
}

// Adds c * (a^dag + a) (x) spin_op to m, spin_op a real symmetric 2x2 block.
void add_ladder_sum(Eigen::MatrixXd& m, int n_tr, double c, const std::array<std::array<double, 2>, 2>& spin_op) {
    for (int n = 0; n < n_tr; ++n) {
        const double amp = c * std::sqrt(static_cast<double>(n + 1));
        for (int s = 1; s <= 2; ++s) {
            for (int t = 1; t <= 2; ++t) {
                const double v = spin_op[s - 1][t - 1];
                if (v == 0.0) continue;
                const Index upper = BasisIndex{n + 1, s}.flat();
                const Index lower = BasisIndex{n, t}.flat();
                m(upper, lower) += amp * v;
                m(lower, upper) += amp * v;
            }
        }
    }
}

constexpr std::array<std::array<double, 2>, 2> kSigmaX{{{0.0, 1.0}, {1.0, 0.0}}};
constexpr std::array<std::array<double, 2>, 2> kIdentity{{{1.0, 0.0}, {0.0, 1.0}}};

}  // namespace

HermitianObservable build_hamiltonian(const ModelParams& params) {
    params.validate();
    const Index dim = params.dimension();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 0; n <= params.n_tr; ++n) {
        const Index lo = BasisIndex{n, 1}.flat();
        const Index hi = BasisIndex{n, 2}.flat();
        h(lo, lo) = n - 0.5 * params.omega;
        h(hi, hi) = n + 0.5 * params.omega;
        set_symmetric(h, lo, hi, params.lambda);
        if (n < params.n_tr) {
            const double amp = params.g * std::sqrt(static_cast<double>(n + 1));
            // g (a^dag + a) sx couples |n,s> with |n+1,s'>, s' != s
            set_symmetric(h, BasisIndex{n + 1, 2}.flat(), lo, amp);
            set_symmetric(h, BasisIndex{n + 1, 1}.flat(), hi, amp);
        }
    }
    return HermitianObservable::real(std::move(h), ObservableKind::Hamiltonian);
}

HermitianObservable build_observable(ObservableKind kind, int n_tr) {
    check_truncation(n_tr);
    const Index dim = 2 * (static_cast<Index>(n_tr) + 1);
    HermitianObservable obs;
    obs.kind = kind;
    obs.sym = Eigen::MatrixXd::Zero(dim, dim);
    obs.antisym = Eigen::MatrixXd::Zero(dim, dim);
    switch (kind) {
        case ObservableKind::N:
            for (Index i = 0; i < dim; ++i) obs.sym(i, i) = static_cast<double>(BasisIndex::from_flat(i).n);
            break;
        case ObservableKind::X:
            add_ladder_sum(obs.sym, n_tr, kInvSqrt2, kIdentity);
            break;
        case ObservableKind::P:
            // p = i (a^dag - a)/sqrt(2): <n+1|p|n> = i sqrt((n+1)/2)
            for (int n = 0; n < n_tr; ++n) {
                const double amp = kInvSqrt2 * std::sqrt(static_cast<double>(n + 1));
                for (int s = 1; s <= 2; ++s) {
                    const Index up = BasisIndex{n + 1, s}.flat();
                    const Index down = BasisIndex{n, s}.flat();
                    obs.antisym(up, down) = amp;
                    obs.antisym(down, up) = -amp;
                }
            }
            break;
        case ObservableKind::SigmaX:
            for (int n = 0; n <= n_tr; ++n) set_symmetric(obs.sym, BasisIndex{n, 1}.flat(), BasisIndex{n, 2}.flat(), 1.0);
            break;
        case ObservableKind::SigmaY:
            // <s=1|sy|s=2> = i in the (sz=-1, sz=+1) ordering
            for (int n = 0; n <= n_tr; ++n) {
                obs.antisym(BasisIndex{n, 1}.flat(), BasisIndex{n, 2}.flat()) = 1.0;
                obs.antisym(BasisIndex{n, 2}.flat(), BasisIndex{n, 1}.flat()) = -1.0;
            }
            break;
        case ObservableKind::SigmaZ:
            for (int n = 0; n <= n_tr; ++n) {
                obs.sym(BasisIndex{n, 1}.flat(), BasisIndex{n, 1}.flat()) = -1.0;
                obs.sym(BasisIndex{n, 2}.flat(), BasisIndex{n, 2}.flat()) = 1.0;
            }
            break;
        case ObservableKind::XSigmaX:
            add_ladder_sum(obs.sym, n_tr, kInvSqrt2, kSigmaX);
            break;
        default:
            throw InvalidArgument("build_observable: unsupported kind '" + std::string(to_string(kind)) + "'");
    }
    return obs;
}

Eigen::VectorXd parity_diagonal(int n_tr) {
    check_truncation(n_tr);
    const Index dim = 2 * (static_cast<Index>(n_tr) + 1);
    Eigen::VectorXd d(dim);
    for (Index i = 0; i < dim; ++i) {
        const auto b = BasisIndex::from_flat(i);
        const double spin = b.s == 1 ? -1.0 : 1.0;
        d(i) = (b.n % 2 == 0) ? spin : -spin;
    }
    return d;
}

HermitianObservable build_parity(int n_tr) {
    Eigen::MatrixXd m = parity_diagonal(n_tr).asDiagonal();
    return HermitianObservable::real(std::move(m), ObservableKind::Parity);
}

HermitianObservable build_displaced_hamiltonian(const ModelParams& params) {
    params.validate();
    if (params.g == 0.0) throw InvalidArgument("displaced Hamiltonian requires g > 0");
    ModelParams undriven = params;
    undriven.lambda = 0.0;
    HermitianObservable h = build_hamiltonian(undriven);
    const double shift = params.lambda / (2.0 * params.g);
    if (shift != 0.0) {
        add_ladder_sum(h.sym, params.n_tr, -shift, kIdentity);
        h.sym.diagonal().array() += shift * shift;
    }
    return h;
}

double commutator_max_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("commutator: dimension mismatch");
    return (a * b - b * a).cwiseAbs().maxCoeff();
}

}  // namespace rabi
