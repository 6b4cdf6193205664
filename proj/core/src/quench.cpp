// quench.cpp

#include "rabi/quench.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <random>
#include <string>

#include "rabi/errors.hpp"

namespace rabi {

namespace {

using cplx = std::complex<double>;

}  // namespace

QuenchState prepare_state(const Eigen::VectorXcd& initial, std::shared_ptr<const EigenDecomposition> dec,
                          double cutoff) {
    if (!dec) throw InvalidArgument("prepare_state: null decomposition");
    if (initial.size() != dec->dimension()) throw InvalidArgument("prepare_state: dimension mismatch");
    const double norm2 = initial.squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-10) throw InvalidArgument("prepare_state: initial state is not normalized");

    QuenchState state;
    state.coeffs = dec->vectors.transpose().cast<cplx>() * initial;
    const Eigen::VectorXd weights = state.coeffs.cwiseAbs2();
    state.energy = weights.dot(dec->energies);
    for (Index i = 0; i < weights.size(); ++i) {
        if (weights(i) >= cutoff) {
            state.support.push_back(i);
        } else {
            state.discarded_weight += weights(i);
        }
    }
    state.decomposition = std::move(dec);
    return state;
}

QuenchState quench(const ModelParams& initial, const ModelParams& final) {
    if (initial.n_tr != final.n_tr) {
        throw InvalidArgument("quench: initial and final truncations differ (" + std::to_string(initial.n_tr) + " vs " +
                              std::to_string(final.n_tr) + ")");
    }
    const Eigen::VectorXd psi0 = ground_state(initial);
    auto dec = std::make_shared<const EigenDecomposition>(decompose_hamiltonian(final));
    return prepare_state(psi0.cast<cplx>(), std::move(dec));
}

ObservableInEigenbasis to_eigenbasis(const HermitianObservable& obs, const EigenDecomposition& dec) {
    if (obs.dimension() != dec.dimension()) throw InvalidArgument("to_eigenbasis: dimension mismatch");
    const Eigen::MatrixXd& v = dec.vectors;
    ObservableInEigenbasis out;
    out.kind = obs.kind;
    Eigen::MatrixXd re = v.transpose() * (obs.sym * v);
    if (obs.is_real()) {
        out.elements = re.cast<cplx>();
    } else {
        Eigen::MatrixXd im = v.transpose() * (obs.antisym * v);
        out.elements.resize(re.rows(), re.cols());
        out.elements.real() = re;
        out.elements.imag() = im;
    }
    return out;
}

ExpectationEvaluator::ExpectationEvaluator(const QuenchState& state, const ObservableInEigenbasis& obs) {
    if (!state.decomposition) throw InvalidArgument("expectation: state without decomposition");
    if (obs.elements.rows() != state.dimension()) throw InvalidArgument("expectation: dimension mismatch");
    const auto k = static_cast<Index>(state.support.size());
    coeffs_.resize(k);
    energies_.resize(k);
    block_.resize(k, k);
    for (Index a = 0; a < k; ++a) {
        const Index i = state.support[static_cast<std::size_t>(a)];
        coeffs_(a) = state.coeffs(i);
        energies_(a) = state.decomposition->energies(i);
        for (Index b = 0; b < k; ++b) block_(a, b) = obs.elements(i, state.support[static_cast<std::size_t>(b)]);
    }
}

Expectation ExpectationEvaluator::evaluate(double t) const {
    const Index k = coeffs_.size();
    Eigen::VectorXcd c(k);
    for (Index a = 0; a < k; ++a) c(a) = coeffs_(a) * std::polar(1.0, -energies_(a) * t);
    const cplx value = c.dot(block_ * c);  // dot conjugates the first argument
    return Expectation{value.real(), std::abs(value.imag())};
}

Expectation evaluate_expectation(const QuenchState& state, const ObservableInEigenbasis& obs, double t) {
    if (!std::isfinite(t)) throw InvalidArgument("expectation_at: time must be finite");
    return ExpectationEvaluator(state, obs).evaluate(t);
}

double expectation_at(const QuenchState& state, const ObservableInEigenbasis& obs, double t) {
    return evaluate_expectation(state, obs, t).value;
}

double long_time_average(const QuenchState& state, const ObservableInEigenbasis& obs) {
    if (obs.elements.rows() != state.dimension()) throw InvalidArgument("long_time_average: dimension mismatch");
    double sum = 0.0;
    for (Index i = 0; i < state.dimension(); ++i) sum += std::norm(state.coeffs(i)) * obs.elements(i, i).real();
    return sum;
}

std::vector<double> sample_times(const TimeSampling& sampling) {
    if (sampling.samples <= 0) throw InvalidArgument("sample_times: samples must be positive");
    if (!(sampling.t_max > sampling.t_min)) throw InvalidArgument("sample_times: empty time window");
    std::mt19937_64 rng(sampling.seed);
    std::vector<double> times(static_cast<std::size_t>(sampling.samples));
    const double width = sampling.t_max - sampling.t_min;
    for (auto& t : times) {
        // 53 random mantissa bits -> [0, 1); independent of the standard library's distributions
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        t = sampling.t_min + width * u;
    }
    return times;
}

double gap_collision_fraction(const QuenchState& state, double tolerance) {
    const auto& e = state.decomposition->energies;
    const auto k = state.support.size();
    if (k < 3) return 0.0;
    std::vector<std::pair<double, double>> gaps;  // (E_mu - E_nu, w_nu w_mu)
    gaps.reserve(k * (k - 1) / 2);
    double total = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        const double wa = std::norm(state.coeffs(state.support[a]));
        for (std::size_t b = a + 1; b < k; ++b) {
            const double w = wa * std::norm(state.coeffs(state.support[b]));
            gaps.emplace_back(e(state.support[b]) - e(state.support[a]), w);
            total += w;
        }
    }
    std::sort(gaps.begin(), gaps.end());
    double colliding = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const bool left = i > 0 && gaps[i].first - gaps[i - 1].first < tolerance;
        const bool right = i + 1 < gaps.size() && gaps[i + 1].first - gaps[i].first < tolerance;
        if (left || right) colliding += gaps[i].second;
    }
    return total > 0.0 ? colliding / total : 0.0;
}

namespace {

VarianceResult sampled_variance(const QuenchState& state, const ObservableInEigenbasis& obs,
                                const TimeSampling& sampling) {
    const ExpectationEvaluator eval(state, obs);
    const auto times = sample_times(sampling);
    std::vector<double> values;
    values.reserve(times.size());
    for (double t : times) values.push_back(eval(t));
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    VarianceResult r;
    r.mode = VarianceMode::Sampled;
    r.deviation = std::sqrt(ss / static_cast<double>(values.size()));
    r.standard_error = r.deviation / std::sqrt(2.0 * static_cast<double>(values.size()));
    r.sample_mean = mean;
    return r;
}

}  // namespace

VarianceResult long_time_variance(const QuenchState& state, const ObservableInEigenbasis& obs, VarianceMode mode,
                                  const VarianceOptions& options) {
    if (obs.elements.rows() != state.dimension()) throw InvalidArgument("long_time_variance: dimension mismatch");
    if (mode == VarianceMode::Sampled) {
        VarianceResult r = sampled_variance(state, obs, options.sampling);
        r.discarded_weight = state.discarded_weight;
        return r;
    }

    const double collisions = gap_collision_fraction(state, options.gap_tolerance);
    if (collisions > options.max_collision_fraction) {
        VarianceResult r = sampled_variance(state, obs, options.sampling);
        r.fell_back = true;
        r.gap_collision_fraction = collisions;
        r.discarded_weight = state.discarded_weight;
        return r;
    }

    double sum = 0.0;
    for (Index a : state.support) {
        const double wa = std::norm(state.coeffs(a));
        for (Index b : state.support) {
            if (a == b) continue;
            sum += wa * std::norm(state.coeffs(b)) * std::norm(obs.elements(a, b));
        }
    }
    VarianceResult r;
    r.mode = VarianceMode::Spectral;
    r.deviation = std::sqrt(sum);
    r.gap_collision_fraction = collisions;
    r.discarded_weight = state.discarded_weight;
    return r;
}

}  // namespace rabi
