// statistics.hpp — small statistical toolkit used by the diagnostics
//
// Kolmogorov-Smirnov distances, reference spacing distributions, histograms
// and least-squares slopes. Everything is deterministic.

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rabi::stats {

double poisson_density(double s);
double poisson_cdf(double s);
/// Wigner surmise (GOE): P(S) = (pi S / 2) exp(-pi S^2 / 4).
double wigner_dyson_density(double s);
double wigner_dyson_cdf(double s);
double normal_cdf(double x, double mean, double sigma);

/// One-sample KS distance sup |F_n - F| against a continuous CDF.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Asymptotic critical value c(alpha)/sqrt(n), c(alpha) = sqrt(-ln(alpha/2)/2).
double ks_critical_value(std::size_t n, double alpha);

/// Linear-interpolation quantile (Hyndman-Fan type 7) of unsorted data.
double quantile(std::span<const double> data, double q);

/// Freedman-Diaconis bin width 2 IQR n^(-1/3); falls back to Scott's rule for IQR = 0.
double freedman_diaconis_width(std::span<const double> data);

struct Histogram {
    std::vector<double> edges;      // size bins + 1
    std::vector<double> densities;  // counts / (n * width), integrates to 1
    std::vector<std::size_t> counts;
};

/// Histogram over [lo, hi]; the last bin is closed. Samples outside are ignored
/// and densities are normalized to the samples inside.
Histogram histogram(std::span<const double> data, double lo, double hi, std::size_t bins);

/// Least-squares slope of log(y) against log(x). All values must be positive.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Composite Simpson rule on [a, b] with an even number of panels.
double simpson(const std::function<double(double)>& f, double a, double b, int panels);

}  // namespace rabi::stats
