// eigensolver.cpp

#include "rabi/eigensolver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "rabi/errors.hpp"
#include "rabi/hamiltonian.hpp"

namespace rabi {

namespace {

std::atomic<std::uint64_t> g_invocations{0};

void check_input(const Eigen::MatrixXd& a, double tolerance) {
    if (a.rows() != a.cols()) throw InvalidArgument("eigendecompose: matrix is not square");
    if (!a.allFinite()) throw InvalidArgument("eigendecompose: matrix has non-finite entries");
    if (a.size() == 0) return;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > tolerance * scale) {
        throw InvalidArgument("eigendecompose: matrix is not symmetric (max |A - A^T| = " + std::to_string(asym) + ")");
    }
}

// Implicit QL with Wilkinson-type shift on (d, e); e[i] couples i and i+1.
// Rotations are accumulated into the columns of z.
void tridiagonal_ql(Eigen::VectorXd& d, Eigen::VectorXd& e, Eigen::MatrixXd& z, int max_iterations) {
    const Index n = d.size();
    if (n <= 1) return;
    const double eps = std::numeric_limits<double>::epsilon();
    const Index rows = z.rows();  // 0 when eigenvectors are not requested
    for (Index l = 0; l < n; ++l) {
        int iter = 0;
        Index m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d(m)) + std::abs(d(m + 1));
                if (std::abs(e(m)) <= eps * dd) break;
            }
            if (m == l) break;
            if (iter++ == max_iterations) {
                throw NumericalError("eigendecompose: QL did not converge for eigenvalue " + std::to_string(l) +
                                     " of " + std::to_string(n) + " after " + std::to_string(max_iterations) +
                                     " shifts (|d|max = " + std::to_string(d.cwiseAbs().maxCoeff()) +
                                     ", |e|max = " + std::to_string(e.cwiseAbs().maxCoeff()) + ")");
            }
            double g = (d(l + 1) - d(l)) / (2.0 * e(l));
            double r = std::hypot(g, 1.0);
            g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            Index i = m - 1;
            bool underflow = false;
            for (; i >= l; --i) {
                const double f = s * e(i);
                const double b = c * e(i);
                r = std::hypot(f, g);
                e(i + 1) = r;
                if (r == 0.0) {
                    d(i + 1) -= p;
                    e(m) = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d(i + 1) - p;
                r = (d(i) - g) * s + 2.0 * c * b;
                p = s * r;
                d(i + 1) = g + p;
                g = c * r - b;
                if (rows == 0) continue;
                double* zi = z.col(i).data();
                double* zi1 = z.col(i + 1).data();
                for (Index k = 0; k < rows; ++k) {
                    const double t = zi1[k];
                    zi1[k] = s * zi[k] + c * t;
                    zi[k] = c * zi[k] - s * t;
                }
            }
            if (underflow) continue;
            d(l) -= p;
            e(l) = g;
            e(m) = 0.0;
        } while (m != l);
    }
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
}

// Sort ascending, re-orthogonalize numerically degenerate clusters, fix signs.
EigenDecomposition finalize(Eigen::VectorXd d, const Eigen::MatrixXd& z, double degeneracy_tolerance) {
    const Index n = d.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&d](Index a, Index b) { return d(a) < d(b); });

    EigenDecomposition out;
    out.energies.resize(n);
    for (Index k = 0; k < n; ++k) out.energies(k) = d(order[static_cast<std::size_t>(k)]);
    if (z.size() == 0) return out;
    out.vectors.resize(z.rows(), n);
    for (Index k = 0; k < n; ++k) out.vectors.col(k) = z.col(order[static_cast<std::size_t>(k)]);

    Index start = 0;
    while (start < n) {
        Index stop = start + 1;
        while (stop < n && out.energies(stop) - out.energies(stop - 1) < degeneracy_tolerance) ++stop;
        for (Index k = start; k < stop; ++k) {
            auto vk = out.vectors.col(k);
            for (Index j = start; j < k; ++j) vk -= out.vectors.col(j).dot(vk) * out.vectors.col(j);
            vk.normalize();
            fix_sign(vk);
        }
        start = stop;
    }
    return out;
}

}  // namespace

Tridiagonal tridiagonalize(const Eigen::MatrixXd& matrix, bool accumulate_q) {
    const Index n = matrix.rows();
    Eigen::MatrixXd a = matrix;
    Eigen::VectorXd betas = Eigen::VectorXd::Zero(std::max<Index>(n, 1));
    Tridiagonal t;
    t.diagonal.resize(n);
    t.off_diagonal = Eigen::VectorXd::Zero(std::max<Index>(n - 1, 0));

    // Householder vectors are stored below the subdiagonal of a, column k.
    for (Index k = 0; k + 2 < n; ++k) {
        const Index m = n - k - 1;
        auto x = a.col(k).segment(k + 1, m);
        const double norm = x.norm();
        if (norm == 0.0) {
            t.off_diagonal(k) = 0.0;
            betas(k) = 0.0;
            continue;
        }
        const double alpha = x(0) > 0.0 ? -norm : norm;
        Eigen::VectorXd v = x;
        v(0) -= alpha;
        const double vnorm2 = v.squaredNorm();
        if (vnorm2 == 0.0) {
            t.off_diagonal(k) = x(0);
            betas(k) = 0.0;
            continue;
        }
        const double beta = 2.0 / vnorm2;
        auto block = a.block(k + 1, k + 1, m, m);
        Eigen::VectorXd p = beta * (block.selfadjointView<Eigen::Lower>() * v);
        const double kfac = 0.5 * beta * p.dot(v);
        Eigen::VectorXd w = p - kfac * v;
        block.selfadjointView<Eigen::Lower>().rankUpdate(v, w, -1.0);
        t.off_diagonal(k) = alpha;
        betas(k) = beta;
        x = v;
    }
    for (Index i = 0; i < n; ++i) t.diagonal(i) = a(i, i);
    if (n >= 2) t.off_diagonal(n - 2) = a(n - 1, n - 2);

    if (!accumulate_q) return t;
    t.q = Eigen::MatrixXd::Identity(n, n);
    for (Index k = n - 3; k >= 0; --k) {
        if (betas(k) == 0.0) continue;
        const Index m = n - k - 1;
        const auto v = a.col(k).segment(k + 1, m);
        auto block = t.q.block(k + 1, k + 1, m, m);
        Eigen::RowVectorXd vq = v.transpose() * block;
        block.noalias() -= (betas(k) * v) * vq;
    }
    return t;
}

namespace {

EigenDecomposition decompose_checked(const Eigen::MatrixXd& matrix, const EigensolverOptions& options) {
    const Index n = matrix.rows();
    if (n == 0) return {};
    Tridiagonal t = tridiagonalize(matrix, options.compute_vectors);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    if (n >= 2) e.head(n - 1) = t.off_diagonal;
    tridiagonal_ql(t.diagonal, e, t.q, options.max_iterations_per_eigenvalue);
    return finalize(std::move(t.diagonal), t.q, options.degeneracy_tolerance);
}

}  // namespace

EigenDecomposition eigendecompose(const Eigen::MatrixXd& matrix, const EigensolverOptions& options) {
    check_input(matrix, options.symmetry_tolerance);
    g_invocations.fetch_add(1, std::memory_order_relaxed);
    return decompose_checked(matrix, options);
}

EigenDecomposition eigendecompose_in_sectors(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& sector_labels,
                                             const EigensolverOptions& options) {
    check_input(matrix, options.symmetry_tolerance);
    g_invocations.fetch_add(1, std::memory_order_relaxed);
    const Index n = matrix.rows();
    if (sector_labels.size() != n) throw InvalidArgument("eigendecompose_in_sectors: label size mismatch");

    std::vector<double> labels(sector_labels.data(), sector_labels.data() + n);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (sector_labels(i) != sector_labels(j) && matrix(i, j) != 0.0) {
                throw InvalidArgument("eigendecompose_in_sectors: matrix couples different symmetry sectors");
            }
        }
    }

    Eigen::VectorXd energies(n);
    Eigen::MatrixXd vectors = options.compute_vectors ? Eigen::MatrixXd::Zero(n, n) : Eigen::MatrixXd();
    Index filled = 0;
    for (double label : labels) {
        std::vector<Index> members;
        for (Index i = 0; i < n; ++i) {
            if (sector_labels(i) == label) members.push_back(i);
        }
        const auto m = static_cast<Index>(members.size());
        Eigen::MatrixXd block(m, m);
        for (Index r = 0; r < m; ++r) {
            for (Index c = 0; c < m; ++c) block(r, c) = matrix(members[static_cast<std::size_t>(r)], members[static_cast<std::size_t>(c)]);
        }
        EigenDecomposition sub = decompose_checked(block, options);
        for (Index k = 0; k < m; ++k) {
            energies(filled + k) = sub.energies(k);
            if (!options.compute_vectors) continue;
            for (Index r = 0; r < m; ++r) vectors(members[static_cast<std::size_t>(r)], filled + k) = sub.vectors(r, k);
        }
        filled += m;
    }

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&energies](Index a, Index b) { return energies(a) < energies(b); });
    EigenDecomposition out;
    out.energies.resize(n);
    for (Index k = 0; k < n; ++k) out.energies(k) = energies(order[static_cast<std::size_t>(k)]);
    if (!options.compute_vectors) return out;
    out.vectors.resize(n, n);
    for (Index k = 0; k < n; ++k) out.vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
    return out;
}

EigenDecomposition decompose_hamiltonian(const ModelParams& params, const EigensolverOptions& options) {
    EigenDecomposition dec = eigendecompose(build_hamiltonian(params).sym, options);
    dec.params_hash = hash_params(params);
    return dec;
}

Eigen::VectorXd ground_state(const EigenDecomposition& dec) {
    if (dec.dimension() == 0) throw InvalidArgument("ground_state: empty decomposition");
    if (dec.dimension() > 1) {
        const double gap = dec.energies(1) - dec.energies(0);
        if (gap < 1e-12) {
            throw DegenerateGroundState("ground_state: lowest level is degenerate (gap " + std::to_string(gap) + ")", gap);
        }
    }
    Eigen::VectorXd v = dec.vectors.col(0);
    v.normalize();
    fix_sign(v);
    return v;
}

Eigen::VectorXd ground_state(const ModelParams& params) { return ground_state(decompose_hamiltonian(params)); }

std::uint64_t eigensolver_invocations() { return g_invocations.load(std::memory_order_relaxed); }

DecompositionResiduals check_decomposition(const EigenDecomposition& dec, const Eigen::MatrixXd& matrix) {
    DecompositionResiduals r;
    const Index n = dec.dimension();
    if (n == 0) return r;
    r.orthogonality = (dec.vectors.transpose() * dec.vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    r.residual = (matrix * dec.vectors - dec.vectors * dec.energies.asDiagonal()).cwiseAbs().maxCoeff();
    const double tr = matrix.trace();
    r.trace_error = std::abs(dec.energies.sum() - tr) / std::max(1.0, std::abs(tr));
    for (Index i = 1; i < n; ++i) {
        if (dec.energies(i) < dec.energies(i - 1)) r.sorted = false;
    }
    return r;
}

void validate_decomposition(const EigenDecomposition& dec, const Eigen::MatrixXd& matrix) {
    if (dec.dimension() != matrix.rows()) throw NumericalError("decomposition dimension does not match matrix");
    const auto r = check_decomposition(dec, matrix);
    const double scale = matrix.size() ? matrix.cwiseAbs().maxCoeff() : 1.0;
    if (!r.sorted || r.orthogonality >= 1e-10 || r.residual >= 1e-8 * std::max(scale, 1e-300)) {
        throw NumericalError("decomposition invariants violated: orthogonality " + std::to_string(r.orthogonality) +
                             ", residual " + std::to_string(r.residual));
    }
}

}  // namespace rabi
