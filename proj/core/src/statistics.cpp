// statistics.cpp

#include "rabi/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rabi/errors.hpp"

namespace rabi::stats {

double poisson_density(double s) { return std::exp(-s); }
double poisson_cdf(double s) { return s <= 0.0 ? 0.0 : -std::expm1(-s); }

double wigner_dyson_density(double s) {
    using std::numbers::pi;
    return 0.5 * pi * s * std::exp(-0.25 * pi * s * s);
}
double wigner_dyson_cdf(double s) { return s <= 0.0 ? 0.0 : -std::expm1(-0.25 * std::numbers::pi * s * s); }

double normal_cdf(double x, double mean, double sigma) {
    return 0.5 * std::erfc(-(x - mean) / (sigma * std::numbers::sqrt2));
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw InvalidArgument("ks_statistic: no samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return std::clamp(d, 0.0, 1.0);
}

double ks_critical_value(std::size_t n, double alpha) {
    if (n == 0 || !(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("ks_critical_value: bad arguments");
    return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(static_cast<double>(n));
}

double quantile(std::span<const double> data, double q) {
    if (data.empty()) throw InvalidArgument("quantile: no data");
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double freedman_diaconis_width(std::span<const double> data) {
    if (data.size() < 2) throw InvalidArgument("freedman_diaconis_width: need at least two samples");
    const double n = static_cast<double>(data.size());
    const double iqr = quantile(data, 0.75) - quantile(data, 0.25);
    if (iqr > 0.0) return 2.0 * iqr / std::cbrt(n);
    double mean = 0.0;
    for (double v : data) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : data) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / (n - 1.0));
    return sd > 0.0 ? 3.49 * sd / std::cbrt(n) : 1.0;
}

Histogram histogram(std::span<const double> data, double lo, double hi, std::size_t bins) {
    if (bins == 0 || !(hi > lo)) throw InvalidArgument("histogram: bad range or bin count");
    Histogram h;
    h.edges.resize(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
    h.edges.back() = hi;
    h.counts.assign(bins, 0);
    std::size_t inside = 0;
    for (double v : data) {
        if (v < lo || v > hi) continue;
        auto idx = static_cast<std::size_t>((v - lo) / width);
        if (idx >= bins) idx = bins - 1;
        ++h.counts[idx];
        ++inside;
    }
    h.densities.assign(bins, 0.0);
    if (inside == 0) return h;
    for (std::size_t i = 0; i < bins; ++i) {
        h.densities[i] = static_cast<double>(h.counts[i]) / (static_cast<double>(inside) * (h.edges[i + 1] - h.edges[i]));
    }
    return h;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need matching arrays of size >= 2");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("loglog_slope: values must be positive");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw InvalidArgument("loglog_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels < 2) panels = 2;
    if (panels % 2 != 0) ++panels;
    const double h = (b - a) / panels;
    double sum = f(a) + f(b);
    for (int i = 1; i < panels; ++i) sum += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

}  // namespace rabi::stats
