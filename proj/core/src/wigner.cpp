// wigner.cpp

#include "rabi/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rabi/errors.hpp"

namespace rabi {

namespace {

using cplx = std::complex<double>;

constexpr double kRescale = 1e150;

// Rows: points; columns: phi_0..phi_{n_max}.
Eigen::MatrixXd hermite_table(int n_max, const Eigen::VectorXd& xs) {
    Eigen::MatrixXd table(xs.size(), n_max + 1);
    for (Index i = 0; i < xs.size(); ++i) table.row(i) = hermite_functions(n_max, xs(i)).transpose();
    return table;
}

Eigen::VectorXd linspace(double lo, double hi, int n) {
    Eigen::VectorXd v(n);
    if (n == 1) {
        v(0) = lo;
        return v;
    }
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) v(i) = lo + step * i;
    v(n - 1) = hi;
    return v;
}

void check_rho(const Eigen::MatrixXcd& rho) {
    if (rho.rows() != rho.cols() || rho.rows() == 0) throw InvalidArgument("wigner: rho must be square and non-empty");
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10) throw InvalidArgument("wigner: rho is not Hermitian");
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > 1e-8) throw InvalidArgument("wigner: rho does not have unit trace (" + std::to_string(tr) + ")");
}

}  // namespace

Eigen::MatrixXcd reduce_field(const Eigen::VectorXcd& state) {
    if (state.size() == 0 || state.size() % 2 != 0) throw InvalidArgument("reduce_field: state size must be 2(n_tr+1)");
    const Index nb = state.size() / 2;
    Eigen::MatrixXcd psi(nb, 2);
    for (Index n = 0; n < nb; ++n) {
        psi(n, 0) = state(2 * n);
        psi(n, 1) = state(2 * n + 1);
    }
    return psi * psi.adjoint();
}

Eigen::VectorXcd state_at_time(const QuenchState& state, double t) {
    if (!std::isfinite(t)) throw InvalidArgument("state_at_time: time must be finite");
    if (!state.decomposition) throw InvalidArgument("state_at_time: state without decomposition");
    const auto& dec = *state.decomposition;
    Eigen::VectorXcd c(state.dimension());
    for (Index i = 0; i < c.size(); ++i) c(i) = state.coeffs(i) * std::polar(1.0, -dec.energies(i) * t);
    Eigen::VectorXcd out(dec.vectors.rows());
    out.real() = dec.vectors * c.real();
    out.imag() = dec.vectors * c.imag();
    return out;
}

Eigen::VectorXcd eigenstate_vector(const EigenDecomposition& dec, Index index) {
    if (index < 0 || index >= dec.dimension() || dec.vectors.size() == 0) {
        throw InvalidArgument("eigenstate_vector: index out of range");
    }
    return dec.vectors.col(index).cast<cplx>();
}

Eigen::VectorXd hermite_functions(int n_max, double x) {
    if (n_max < 0) throw InvalidArgument("hermite_functions: n_max must be non-negative");
    Eigen::VectorXd out(n_max + 1);
    // phi_n = value_n * exp(log_scale); the exponent absorbs both the Gaussian and rescalings.
    double log_scale = -0.5 * x * x - 0.25 * std::log(std::numbers::pi);
    double prev = 0.0;
    double cur = 1.0;
    out(0) = std::exp(log_scale);
    for (int n = 0; n < n_max; ++n) {
        const double next = std::sqrt(2.0 / (n + 1.0)) * x * cur - std::sqrt(n / (n + 1.0)) * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > kRescale) {
            cur /= kRescale;
            prev /= kRescale;
            log_scale += std::log(kRescale);
        }
        out(n + 1) = cur * std::exp(log_scale);
    }
    return out;
}

int field_support(const Eigen::MatrixXcd& rho, double tail) {
    const Index nb = rho.rows();
    double acc = 0.0;
    for (Index n = nb - 1; n >= 0; --n) {
        acc += std::abs(rho(n, n).real());
        if (acc > tail) return static_cast<int>(n);
    }
    return 0;
}

WignerGridSpec default_wigner_grid(double g, int n_max) {
    const double half = std::max(2.0 * g + 5.0, std::sqrt(2.0 * n_max + 1.0) + 4.0);
    // p-sums alias coherences separated by 2 pi / dp; keep that beyond the 2 * half extent
    const int needed = static_cast<int>(std::ceil(1.1 * 2.0 * half * half / std::numbers::pi)) + 1;
    int points = std::max(512, needed);
    if (points % 2 == 0) ++points;  // odd count puts a node at the origin
    return WignerGridSpec{-half, half, points, -half, half, points};
}

Eigen::VectorXd position_density(const Eigen::MatrixXcd& rho, const Eigen::VectorXd& xs) {
    const int n_max = static_cast<int>(rho.rows()) - 1;
    const Eigen::MatrixXd phi = hermite_table(n_max, xs);
    const Eigen::MatrixXcd tmp = phi.cast<cplx>() * rho;
    Eigen::VectorXd out(xs.size());
    for (Index i = 0; i < xs.size(); ++i) out(i) = (tmp.row(i).transpose().cwiseProduct(phi.row(i).transpose().cast<cplx>())).sum().real();
    return out;
}

WignerGrid wigner_transform(const Eigen::MatrixXcd& rho_in, const WignerGridSpec& spec, const WignerOptions& options) {
    check_rho(rho_in);
    if (spec.nx < 2 || spec.np < 2 || !(spec.x_max > spec.x_min) || !(spec.p_max > spec.p_min)) {
        throw InvalidArgument("wigner_transform: invalid grid specification");
    }
    const int n_max = field_support(rho_in);
    const Eigen::MatrixXcd rho = rho_in.topLeftCorner(n_max + 1, n_max + 1);

    WignerGrid grid;
    grid.x_axis = linspace(spec.x_min, spec.x_max, spec.nx);
    grid.p_axis = linspace(spec.p_min, spec.p_max, spec.np);
    const double dx = grid.dx();
    const double dp = grid.dp();

    // Support: probability mass of rho inside the x and p ranges.
    {
        const Eigen::VectorXd pos = position_density(rho, grid.x_axis);
        Eigen::MatrixXcd rho_p = rho;
        for (Index n = 0; n <= n_max; ++n) {
            for (Index m = 0; m <= n_max; ++m) {
                // phi~_n(p) = (-i)^n phi_n(p)
                static constexpr cplx kPow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
                rho_p(n, m) *= kPow[n % 4] * std::conj(kPow[m % 4]);
            }
        }
        const Eigen::VectorXd mom = position_density(rho_p, grid.p_axis);
        grid.support_fraction = std::min(pos.sum() * dx, mom.sum() * dp);
        if (1.0 - grid.support_fraction > options.max_missing_mass) {
            throw InvalidArgument("wigner_transform: grid too small, support fraction " +
                                  std::to_string(grid.support_fraction));
        }
    }

    // Fine position grid with step h = dx / m resolving p_state + p_grid in the y-integral.
    const double p_state = std::sqrt(2.0 * n_max + 1.0) + 3.0;
    const double p_grid = std::max(std::abs(spec.p_min), std::abs(spec.p_max));
    const double h_max = 0.9 * std::numbers::pi / (p_state + p_grid);
    const int m = std::max(1, static_cast<int>(std::ceil(dx / h_max)));
    const double h = dx / m;
    // Padding beyond the output range keeps the y-integral complete for every output x.
    const double x_support = std::sqrt(2.0 * n_max + 1.0) + 8.0;
    const auto pad = [h](double gap) { return gap > 0.0 ? static_cast<Index>(std::ceil(gap / h)) : Index{0}; };
    const Index pad_left = pad(spec.x_min + x_support);
    const Index pad_right = pad(x_support - spec.x_max);
    const Index nf = pad_left + static_cast<Index>(m) * (spec.nx - 1) + 1 + pad_right;
    Eigen::VectorXd xf(nf);
    for (Index j = 0; j < nf; ++j) xf(j) = spec.x_min + h * static_cast<double>(j - pad_left);

    const Eigen::MatrixXd phi = hermite_table(n_max, xf);
    const Eigen::MatrixXcd phi_c = phi.cast<cplx>();
    const Eigen::MatrixXcd rho_pos = (phi_c * rho) * phi_c.transpose();  // rho(x_a, x_b)

    Index kmax = 0;
    for (Index i = 0; i < spec.nx; ++i) {
        const Index centre = pad_left + i * m;
        kmax = std::max(kmax, std::min(centre, nf - 1 - centre));
    }
    Eigen::MatrixXd a_re = Eigen::MatrixXd::Zero(spec.nx, kmax + 1);
    Eigen::MatrixXd a_im = Eigen::MatrixXd::Zero(spec.nx, kmax + 1);
    Eigen::VectorXd residue = Eigen::VectorXd::Zero(spec.nx);
    for (Index i = 0; i < spec.nx; ++i) {
        const Index centre = pad_left + i * m;
        const Index reach = std::min(centre, nf - 1 - centre);
        a_re(i, 0) = rho_pos(centre, centre).real();
        residue(i) = std::abs(rho_pos(centre, centre).imag());
        for (Index k = 1; k <= reach; ++k) {
            const cplx a = rho_pos(centre - k, centre + k);
            const cplx b = rho_pos(centre + k, centre - k);
            a_re(i, k) = 2.0 * a.real();
            a_im(i, k) = 2.0 * a.imag();
            residue(i) += std::abs(b - std::conj(a));
        }
    }

    Eigen::MatrixXd cos_t(kmax + 1, spec.np);
    Eigen::MatrixXd sin_t(kmax + 1, spec.np);
    for (Index k = 0; k <= kmax; ++k) {
        for (Index j = 0; j < spec.np; ++j) {
            const double theta = 2.0 * grid.p_axis(j) * h * static_cast<double>(k);
            cos_t(k, j) = std::cos(theta);
            sin_t(k, j) = std::sin(theta);
        }
    }
    const double pref = h / std::numbers::pi;
    grid.values = pref * (a_re * cos_t - a_im * sin_t);
    grid.imag_residue = pref * residue.maxCoeff();
    grid.normalization = grid.values.sum() * dx * dp;

    const Eigen::VectorXd marginal = grid.values.rowwise().sum() * dp;
    const Eigen::VectorXd density =
        rho_pos.diagonal().real()(Eigen::seqN(pad_left, spec.nx, m));
    grid.marginal_error = (marginal - density).cwiseAbs().maxCoeff();

    // W(0, 0) by the same quadrature on a symmetric grid, checked against the parity trace.
    {
        const Index k0 = static_cast<Index>(std::ceil(x_support / h));
        Eigen::VectorXd pts(k0 + 1);
        for (Index k = 0; k <= k0; ++k) pts(k) = h * static_cast<double>(k);
        const Eigen::MatrixXd u = hermite_table(n_max, pts);
        Eigen::MatrixXd u_reflected = u;
        for (Index n = 1; n <= n_max; n += 2) u_reflected.col(n) *= -1.0;  // phi_n(-x) = (-1)^n phi_n(x)
        const Eigen::MatrixXcd t = u_reflected.cast<cplx>() * rho;
        double sum = 0.0;
        for (Index k = 0; k <= k0; ++k) {
            const double ak = (t.row(k).transpose().cwiseProduct(u.row(k).transpose().cast<cplx>())).sum().real();
            sum += (k == 0 ? 1.0 : 2.0) * ak;
        }
        grid.origin_value = pref * sum;
        double parity = 0.0;
        for (Index n = 0; n <= n_max; ++n) parity += (n % 2 == 0 ? 1.0 : -1.0) * rho(n, n).real();
        grid.origin_parity = parity / std::numbers::pi;
    }
    return grid;
}

double negativity_volume(const WignerGrid& grid) {
    return grid.values.cwiseAbs().sum() * grid.dx() * grid.dp() - 1.0;
}

}  // namespace rabi
