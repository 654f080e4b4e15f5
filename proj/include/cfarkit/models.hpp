/* Copyright 2026 the cfarkit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CFARKIT_MODELS_HPP
#define CFARKIT_MODELS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "cfarkit/error.hpp"
#include "cfarkit/rng.hpp"

namespace cfarkit {

// ---------------------------------------------------------------------------
// Clutter model families. All power/magnitude families live on [0, inf).
// The compound families realize the multiplicative construction Z = X * Y
// with unit-mean speckle Y ~ Gamma(n, n) in the power domain:
//   KCompound : backscatter X ~ Gamma(shape, rate)
//   G0Compound: backscatter X ~ reciprocal gamma, X = gamma_g0 / Gamma(shape_g0, 1)
//   BetaPrime : the closed form G0Compound takes at n = 1
// ---------------------------------------------------------------------------

struct Exponential {
    double mean = 1.0;
};

struct Rayleigh {
    double scale = 1.0;
};

struct GammaModel {
    double shape = 1.0;
    double rate = 1.0;
};

struct SqrtGamma {
    double shape = 1.0;
    double rate = 1.0;
};

struct WeibullModel {
    double shape = 1.0;
    double scale = 1.0;
};

struct LogNormal {
    double mu = 0.0;
    double sigma = 1.0;
};

namespace detail {

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730950488); }
inline double std_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / 2.5066282746310005024;
}

/// Quadrature of E_g[f(g)] for g ~ Gamma(shape, 1), truncated where the
/// gamma mass drops below 1e-12 per tail.
template <typename F>
double gamma_expectation(double shape, F&& f) {
    namespace bm = boost::math;
    const double g_lo = bm::gamma_p_inv(shape, 1e-12);
    const double g_hi = bm::gamma_q_inv(shape, 1e-12);
    double err = 0.0;
    const double val = bm::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double g) { return bm::gamma_p_derivative(shape, g) * f(g); },
        g_lo, g_hi, 12, 1e-9, &err);
    if (!(std::isfinite(val)) || err > 1e-5 * std::max(1.0, std::abs(val)))
        throw ConvergenceFailure("compound quadrature did not converge");
    return val;
}

struct CompoundCache {
    // Monotone (value, cdf) table used to bracket quantile queries, built
    // eagerly so const queries stay pure and thread-safe.
    std::vector<double> z;
    std::vector<double> p;
    bool monte_carlo = false;  // table built from draws because quadrature failed
};

}  // namespace detail

struct KCompound {
    double shape = 1.0;
    double rate = 1.0;
    int looks = 1;
    std::shared_ptr<const detail::CompoundCache> cache;
};

struct G0Compound {
    double shape_g0 = 3.0;
    double gamma_g0 = 1.0;
    int looks = 1;
    std::shared_ptr<const detail::CompoundCache> cache;
};

struct BetaPrime {
    double shape_g0 = 3.0;
    double gamma_g0 = 1.0;
};

struct Kde {
    std::shared_ptr<const std::vector<double>> samples;
    double bandwidth = 1.0;
};

using ClutterModel = std::variant<Exponential, Rayleigh, GammaModel, SqrtGamma, WeibullModel,
                                  LogNormal, KCompound, G0Compound, BetaPrime, Kde>;

// --- forward declarations used by the compound constructors -----------------
double cdf(const ClutterModel& model, double x);
double pdf(const ClutterModel& model, double x);
double quantile(const ClutterModel& model, double p);
double sample(const ClutterModel& model, RngStream& g);

namespace detail {

// Compound densities through the mixing variable g ~ Gamma(shape, 1).
// speckle_scale(g) maps the mixing draw to the speckle argument multiplier:
// Z = X*Y with Y ~ Gamma(n, n), so F_Z(z) = E_g[ F_Y(z * t(g)) ], t = 1/X(g).

template <typename ScaleFn>
double compound_cdf(double shape, int looks, double z, ScaleFn&& t) {
    namespace bm = boost::math;
    if (z <= 0.0) return 0.0;
    const double n = looks;
    return gamma_expectation(shape, [&](double g) { return bm::gamma_p(n, n * z * t(g)); });
}

template <typename ScaleFn>
double compound_pdf(double shape, int looks, double z, ScaleFn&& t) {
    namespace bm = boost::math;
    if (z <= 0.0) return 0.0;
    const double n = looks;
    return gamma_expectation(shape, [&](double g) {
        const double s = t(g);
        return bm::gamma_p_derivative(n, n * z * s) * n * s;
    });
}

template <typename CdfFn, typename SampleFn>
std::shared_ptr<const CompoundCache> build_compound_cache(CdfFn&& cdf_fn, SampleFn&& sample_fn,
                                                          double mean_hint) {
    auto cache = std::make_shared<CompoundCache>();
    try {
        // Doubling scan for the far tail, then a log-spaced table.
        double hi = std::max(mean_hint, 1e-6);
        while (cdf_fn(hi) < 1.0 - 1e-9) {
            hi *= 2.0;
            if (hi > 1e18) throw ConvergenceFailure("compound tail scan diverged");
        }
        const double lo = hi * 1e-9;
        const int points = 160;
        cache->z.reserve(points);
        cache->p.reserve(points);
        double prev_p = -1.0;
        for (int i = 0; i < points; ++i) {
            const double z = lo * std::pow(hi / lo, i / double(points - 1));
            const double p = cdf_fn(z);
            if (p > prev_p) {  // keep the table strictly monotone
                cache->z.push_back(z);
                cache->p.push_back(p);
                prev_p = p;
            }
        }
    } catch (const ConvergenceFailure&) {
        // Empirical-quantile fallback from one million seeded draws.
        RngStream g(0x5EEDCACE, 7);
        const int n = 1'000'000;
        std::vector<double> draws(n);
        for (int i = 0; i < n; ++i) draws[i] = sample_fn(g);
        std::sort(draws.begin(), draws.end());
        cache->monte_carlo = true;
        const int points = 2048;
        for (int i = 0; i < points; ++i) {
            const std::size_t idx = static_cast<std::size_t>(
                (i + 0.5) / points * (n - 1));
            cache->z.push_back(draws[idx]);
            cache->p.push_back((idx + 0.5) / n);
        }
    }
    return cache;
}

template <typename CdfFn>
double quantile_from_cache(const CompoundCache& cache, CdfFn&& cdf_fn, double p) {
    if (cache.monte_carlo) {
        const auto it = std::lower_bound(cache.p.begin(), cache.p.end(), p);
        if (it == cache.p.begin()) return cache.z.front();
        if (it == cache.p.end()) return cache.z.back();
        const std::size_t i = static_cast<std::size_t>(it - cache.p.begin());
        const double w = (p - cache.p[i - 1]) / (cache.p[i] - cache.p[i - 1]);
        return cache.z[i - 1] + w * (cache.z[i] - cache.z[i - 1]);
    }
    // Bracket from the table, then bisect on the quadrature cdf.
    double lo = cache.z.front(), hi = cache.z.back();
    const auto it = std::lower_bound(cache.p.begin(), cache.p.end(), p);
    if (it != cache.p.begin()) lo = cache.z[(it - cache.p.begin()) - 1];
    if (it != cache.p.end()) hi = cache.z[it - cache.p.begin()];
    while (cdf_fn(lo) > p && lo > 1e-300) lo *= 0.5;
    while (cdf_fn(hi) < p) {
        hi *= 2.0;
        if (hi > 1e18) throw ConvergenceFailure("quantile bracket diverged");
    }
    for (int i = 0; i < 80 && (hi - lo) > 1e-12 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (cdf_fn(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

inline KCompound make_k_compound(double shape, double rate, int looks) {
    if (shape <= 0 || rate <= 0 || looks < 1)
        throw std::invalid_argument("K-compound parameters out of range");
    KCompound m{shape, rate, looks, nullptr};
    auto cdf_fn = [=](double z) {
        return detail::compound_cdf(shape, looks, z, [&](double g) { return rate / g; });
    };
    auto sample_fn = [=](RngStream& g) {
        return sample_gamma(g, shape, rate) * sample_gamma(g, double(looks), double(looks));
    };
    m.cache = detail::build_compound_cache(cdf_fn, sample_fn, shape / rate);
    return m;
}

inline G0Compound make_g0_compound(double shape_g0, double gamma_g0, int looks) {
    if (shape_g0 <= 0 || gamma_g0 <= 0 || looks < 1)
        throw std::invalid_argument("G0-compound parameters out of range");
    G0Compound m{shape_g0, gamma_g0, looks, nullptr};
    auto cdf_fn = [=](double z) {
        return detail::compound_cdf(shape_g0, looks, z, [&](double g) { return g / gamma_g0; });
    };
    auto sample_fn = [=](RngStream& g) {
        return gamma_g0 / sample_gamma(g, shape_g0, 1.0) *
               sample_gamma(g, double(looks), double(looks));
    };
    const double mean_hint =
        shape_g0 > 1.0 ? gamma_g0 / (shape_g0 - 1.0) : gamma_g0 * 2.0;
    m.cache = detail::build_compound_cache(cdf_fn, sample_fn, mean_hint);
    return m;
}

// ---------------------------------------------------------------------------
// pdf / cdf / quantile / sample
// ---------------------------------------------------------------------------

inline double pdf(const ClutterModel& model, double x) {
    namespace bm = boost::math;
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                if (x < 0) return 0.0;
                return std::exp(-x / m.mean) / m.mean;
            } else if constexpr (std::is_same_v<T, Rayleigh>) {
                if (x < 0) return 0.0;
                const double s2 = m.scale * m.scale;
                return x / s2 * std::exp(-0.5 * x * x / s2);
            } else if constexpr (std::is_same_v<T, GammaModel>) {
                if (x < 0) return 0.0;
                return bm::gamma_p_derivative(m.shape, m.rate * x) * m.rate;
            } else if constexpr (std::is_same_v<T, SqrtGamma>) {
                if (x <= 0) return 0.0;
                return 2.0 * x * bm::gamma_p_derivative(m.shape, m.rate * x * x) * m.rate;
            } else if constexpr (std::is_same_v<T, WeibullModel>) {
                if (x < 0) return 0.0;
                const double t = std::pow(x / m.scale, m.shape);
                if (x == 0) return m.shape > 1 ? 0.0 : (m.shape == 1 ? 1.0 / m.scale : 0.0);
                return m.shape / m.scale * std::pow(x / m.scale, m.shape - 1.0) * std::exp(-t);
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                if (x <= 0) return 0.0;
                const double z = (std::log(x) - m.mu) / m.sigma;
                return detail::std_normal_pdf(z) / (x * m.sigma);
            } else if constexpr (std::is_same_v<T, KCompound>) {
                return detail::compound_pdf(m.shape, m.looks, x,
                                            [&](double g) { return m.rate / g; });
            } else if constexpr (std::is_same_v<T, G0Compound>) {
                return detail::compound_pdf(m.shape_g0, m.looks, x,
                                            [&](double g) { return g / m.gamma_g0; });
            } else if constexpr (std::is_same_v<T, BetaPrime>) {
                if (x < 0) return 0.0;
                return m.shape_g0 / m.gamma_g0 *
                       std::pow(1.0 + x / m.gamma_g0, -m.shape_g0 - 1.0);
            } else {  // Kde
                double acc = 0.0;
                for (double s : *m.samples)
                    acc += detail::std_normal_pdf((x - s) / m.bandwidth);
                return acc / (m.samples->size() * m.bandwidth);
            }
        },
        model);
}

inline double cdf(const ClutterModel& model, double x) {
    namespace bm = boost::math;
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                if (x <= 0) return 0.0;
                return -std::expm1(-x / m.mean);
            } else if constexpr (std::is_same_v<T, Rayleigh>) {
                if (x <= 0) return 0.0;
                return -std::expm1(-0.5 * x * x / (m.scale * m.scale));
            } else if constexpr (std::is_same_v<T, GammaModel>) {
                if (x <= 0) return 0.0;
                return bm::gamma_p(m.shape, m.rate * x);
            } else if constexpr (std::is_same_v<T, SqrtGamma>) {
                if (x <= 0) return 0.0;
                return bm::gamma_p(m.shape, m.rate * x * x);
            } else if constexpr (std::is_same_v<T, WeibullModel>) {
                if (x <= 0) return 0.0;
                return -std::expm1(-std::pow(x / m.scale, m.shape));
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                if (x <= 0) return 0.0;
                return detail::std_normal_cdf((std::log(x) - m.mu) / m.sigma);
            } else if constexpr (std::is_same_v<T, KCompound>) {
                return detail::compound_cdf(m.shape, m.looks, x,
                                            [&](double g) { return m.rate / g; });
            } else if constexpr (std::is_same_v<T, G0Compound>) {
                return detail::compound_cdf(m.shape_g0, m.looks, x,
                                            [&](double g) { return g / m.gamma_g0; });
            } else if constexpr (std::is_same_v<T, BetaPrime>) {
                if (x <= 0) return 0.0;
                return 1.0 - std::pow(1.0 + x / m.gamma_g0, -m.shape_g0);
            } else {  // Kde
                double acc = 0.0;
                for (double s : *m.samples)
                    acc += detail::std_normal_cdf((x - s) / m.bandwidth);
                return acc / m.samples->size();
            }
        },
        model);
}

inline double quantile(const ClutterModel& model, double p) {
    namespace bm = boost::math;
    if (!(p > 0.0 && p < 1.0)) throw OutOfSupport("quantile probability must be in (0,1)");
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return -m.mean * std::log1p(-p);
            } else if constexpr (std::is_same_v<T, Rayleigh>) {
                return m.scale * std::sqrt(-2.0 * std::log1p(-p));
            } else if constexpr (std::is_same_v<T, GammaModel>) {
                return bm::gamma_p_inv(m.shape, p) / m.rate;
            } else if constexpr (std::is_same_v<T, SqrtGamma>) {
                return std::sqrt(bm::gamma_p_inv(m.shape, p) / m.rate);
            } else if constexpr (std::is_same_v<T, WeibullModel>) {
                return m.scale * std::pow(-std::log1p(-p), 1.0 / m.shape);
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                return std::exp(m.mu + m.sigma * 1.4142135623730950488 * bm::erf_inv(2.0 * p - 1.0));
            } else if constexpr (std::is_same_v<T, KCompound>) {
                auto cdf_fn = [&](double z) {
                    return detail::compound_cdf(m.shape, m.looks, z,
                                                [&](double g) { return m.rate / g; });
                };
                return detail::quantile_from_cache(*m.cache, cdf_fn, p);
            } else if constexpr (std::is_same_v<T, G0Compound>) {
                auto cdf_fn = [&](double z) {
                    return detail::compound_cdf(m.shape_g0, m.looks, z,
                                                [&](double g) { return g / m.gamma_g0; });
                };
                return detail::quantile_from_cache(*m.cache, cdf_fn, p);
            } else if constexpr (std::is_same_v<T, BetaPrime>) {
                return m.gamma_g0 * (std::pow(1.0 - p, -1.0 / m.shape_g0) - 1.0);
            } else {  // Kde: bisection over the mixture cdf
                const auto& s = *m.samples;
                double lo = *std::min_element(s.begin(), s.end()) - 12.0 * m.bandwidth;
                double hi = *std::max_element(s.begin(), s.end()) + 12.0 * m.bandwidth;
                for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++i) {
                    const double mid = 0.5 * (lo + hi);
                    (cdf(ClutterModel(m), mid) < p ? lo : hi) = mid;
                }
                return 0.5 * (lo + hi);
            }
        },
        model);
}

inline double sample(const ClutterModel& model, RngStream& g) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return sample_exponential(g, m.mean);
            } else if constexpr (std::is_same_v<T, Rayleigh>) {
                return sample_rayleigh(g, m.scale);
            } else if constexpr (std::is_same_v<T, GammaModel>) {
                return sample_gamma(g, m.shape, m.rate);
            } else if constexpr (std::is_same_v<T, SqrtGamma>) {
                return std::sqrt(sample_gamma(g, m.shape, m.rate));
            } else if constexpr (std::is_same_v<T, WeibullModel>) {
                return sample_weibull(g, m.shape, m.scale);
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                return sample_lognormal(g, m.mu, m.sigma);
            } else if constexpr (std::is_same_v<T, KCompound>) {
                return sample_gamma(g, m.shape, m.rate) *
                       sample_gamma(g, double(m.looks), double(m.looks));
            } else if constexpr (std::is_same_v<T, G0Compound>) {
                return m.gamma_g0 / sample_gamma(g, m.shape_g0, 1.0) *
                       sample_gamma(g, double(m.looks), double(m.looks));
            } else if constexpr (std::is_same_v<T, BetaPrime>) {
                return m.gamma_g0 * (std::pow(g.uniform(), -1.0 / m.shape_g0) - 1.0);
            } else {  // Kde
                const auto& s = *m.samples;
                const std::size_t i = std::min<std::size_t>(
                    static_cast<std::size_t>(g.uniform() * s.size()), s.size() - 1);
                return s[i] + m.bandwidth * sample_normal(g);
            }
        },
        model);
}

/// Model mean where finite; infinity for heavy-tailed shapes, used by fitters.
inline double model_mean(const ClutterModel& model) {
    namespace bm = boost::math;
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Exponential>) return m.mean;
            else if constexpr (std::is_same_v<T, Rayleigh>) return m.scale * 1.2533141373155003;
            else if constexpr (std::is_same_v<T, GammaModel>) return m.shape / m.rate;
            else if constexpr (std::is_same_v<T, SqrtGamma>)
                return bm::tgamma(m.shape + 0.5) / bm::tgamma(m.shape) / std::sqrt(m.rate);
            else if constexpr (std::is_same_v<T, WeibullModel>)
                return m.scale * bm::tgamma(1.0 + 1.0 / m.shape);
            else if constexpr (std::is_same_v<T, LogNormal>)
                return std::exp(m.mu + 0.5 * m.sigma * m.sigma);
            else if constexpr (std::is_same_v<T, KCompound>) return m.shape / m.rate;
            else if constexpr (std::is_same_v<T, G0Compound>)
                return m.shape_g0 > 1.0 ? m.gamma_g0 / (m.shape_g0 - 1.0)
                                        : std::numeric_limits<double>::infinity();
            else if constexpr (std::is_same_v<T, BetaPrime>)
                return m.shape_g0 > 1.0 ? m.gamma_g0 / (m.shape_g0 - 1.0)
                                        : std::numeric_limits<double>::infinity();
            else {  // Kde
                double acc = 0.0;
                for (double s : *m.samples) acc += s;
                return acc / m.samples->size();
            }
        },
        model);
}

// ---------------------------------------------------------------------------
// Moment estimators
// ---------------------------------------------------------------------------

inline double fit_mean(const std::vector<double>& samples) {
    if (samples.empty()) throw EmptyInput("fit_mean needs at least one sample");
    return std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
}

/// ML mean and standard deviation with 1/N normalization.
inline std::pair<double, double> fit_mean_std(const std::vector<double>& samples) {
    if (samples.size() < 2) throw InsufficientSamples("fit_mean_std needs >= 2 samples");
    const double mu = fit_mean(samples);
    double ss = 0.0;
    for (double x : samples) ss += (x - mu) * (x - mu);
    return {mu, std::sqrt(ss / samples.size())};
}

// ---------------------------------------------------------------------------
// Threshold scaling factors
// ---------------------------------------------------------------------------

/// Exact scaling factor for the single-PUT cell-averaging statistic X/mu_hat
/// under iid exponential clutter with N reference pixels:
///   alpha = N * (PFA^(-1/N) - 1),  from  PFA = (1 + alpha/N)^(-N).
inline double alpha_ca_exponential(int n, double pfa) {
    if (!(pfa > 0.0 && pfa < 1.0)) throw InvalidPfa("pfa must be in (0,1)");
    if (n < 1) throw std::invalid_argument("boundary count must be >= 1");
    return n * (std::pow(pfa, -1.0 / n) - 1.0);
}

/// Generalization to an M-pixel PUT block: the CA statistic is then an
/// F(2M, 2N) variate, which reduces to the closed form above at M = 1.
inline double alpha_ca_exponential_block(int n, int m, double pfa) {
    if (!(pfa > 0.0 && pfa < 1.0)) throw InvalidPfa("pfa must be in (0,1)");
    if (n < 1 || m < 1) throw std::invalid_argument("pixel counts must be >= 1");
    if (m == 1) return alpha_ca_exponential(n, pfa);
    boost::math::fisher_f f(2.0 * m, 2.0 * n);
    return boost::math::quantile(f, 1.0 - pfa);
}

/// alpha as the (1 - pfa) quantile of the supplied statistic distribution.
inline double alpha_numeric(const ClutterModel& model, double pfa) {
    if (!(pfa > 0.0 && pfa < 1.0)) throw InvalidPfa("pfa must be in (0,1)");
    return quantile(model, 1.0 - pfa);
}

/// Standard-normal quantile of 1 - pfa, the conventional two-parameter
/// threshold when the normalized statistic is treated as Gaussian.
inline double alpha_two_param_gaussian(double pfa) {
    if (!(pfa > 0.0 && pfa < 1.0)) throw InvalidPfa("pfa must be in (0,1)");
    return 1.4142135623730950488 * boost::math::erf_inv(1.0 - 2.0 * pfa);
}

/// Detection probability of a target model against an absolute threshold.
inline double pd_for_target(const ClutterModel& target, double alpha) {
    return 1.0 - cdf(target, alpha);
}

// ---------------------------------------------------------------------------
// Two-model Neyman-Pearson detector
// ---------------------------------------------------------------------------

struct NpConfig {
    ClutterModel background;
    ClutterModel target;
    double prior_background = 0.5;
    double prior_target = 0.5;

    void validate() const {
        if (!(prior_background > 0 && prior_background < 1) ||
            !(prior_target > 0 && prior_target < 1) ||
            std::abs(prior_background + prior_target - 1.0) > 1e-12)
            throw std::invalid_argument("priors must lie in (0,1) and sum to 1");
    }
};

struct NpDecision {
    double ratio = 0.0;
    bool is_target = false;
};

inline NpDecision np_likelihood_ratio(const NpConfig& cfg, double x) {
    cfg.validate();
    const double pb = pdf(cfg.background, x);
    const double pt = pdf(cfg.target, x);
    if (pb <= 0.0 && pt <= 0.0) throw OutOfSupport("x outside both model supports");
    if (pb <= 0.0) return {std::numeric_limits<double>::infinity(), true};
    const double ratio = pt / pb;
    return {ratio, ratio > cfg.prior_background / cfg.prior_target};
}

// ---------------------------------------------------------------------------
// Kernel density estimation (Gaussian kernel)
// ---------------------------------------------------------------------------

/// Silverman's rule of thumb, 1.06 * sigma_hat * n^(-1/5).
inline double kde_auto_bandwidth(const std::vector<double>& samples) {
    const auto [mu, sigma] = fit_mean_std(samples);
    (void)mu;
    if (sigma <= 0.0) throw InsufficientSamples("KDE bandwidth undefined for constant samples");
    return 1.06 * sigma * std::pow(static_cast<double>(samples.size()), -0.2);
}

inline ClutterModel kde_fit(std::vector<double> samples, double bandwidth) {
    if (samples.size() < 2) throw InsufficientSamples("KDE needs >= 2 samples");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    Kde k;
    k.samples = std::make_shared<const std::vector<double>>(std::move(samples));
    k.bandwidth = bandwidth;
    return k;
}

inline ClutterModel kde_fit_auto(std::vector<double> samples) {
    const double h = kde_auto_bandwidth(samples);
    return kde_fit(std::move(samples), h);
}

// ---------------------------------------------------------------------------
// Family specs: a family name plus optional pinned parameters. Free
// parameters are filled in by fit_family(); fully pinned specs can be
// instantiated directly (the CLI model-spec syntax).
// ---------------------------------------------------------------------------

enum class Family {
    Exponential,
    Rayleigh,
    Gamma,
    SqrtGamma,
    Weibull,
    LogNormal,
    KCompound,
    G0Compound,
    BetaPrime,
    Kde
};

inline std::string family_name(Family f) {
    switch (f) {
        case Family::Exponential: return "exp";
        case Family::Rayleigh: return "rayleigh";
        case Family::Gamma: return "gamma";
        case Family::SqrtGamma: return "sqrtgamma";
        case Family::Weibull: return "weibull";
        case Family::LogNormal: return "lognormal";
        case Family::KCompound: return "k";
        case Family::G0Compound: return "g0";
        case Family::BetaPrime: return "betaprime";
        case Family::Kde: return "kde";
    }
    return "?";
}

struct FamilySpec {
    Family family = Family::Exponential;
    std::map<std::string, double> fixed;  // pinned parameters by name
    bool kde_auto = false;

    bool has(const std::string& k) const { return fixed.count(k) != 0; }
    double get(const std::string& k) const { return fixed.at(k); }
    double get_or(const std::string& k, double d) const {
        auto it = fixed.find(k);
        return it == fixed.end() ? d : it->second;
    }
};

/// Parse "weibull:shape=2,scale=1", "exp", "k:shape=4,rate=4,n=1",
/// "kde:bandwidth=auto", ...
inline FamilySpec parse_family_spec(const std::string& text) {
    FamilySpec spec;
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    if (name == "exp" || name == "exponential") spec.family = Family::Exponential;
    else if (name == "rayleigh") spec.family = Family::Rayleigh;
    else if (name == "gamma") spec.family = Family::Gamma;
    else if (name == "sqrtgamma") spec.family = Family::SqrtGamma;
    else if (name == "weibull") spec.family = Family::Weibull;
    else if (name == "lognormal") spec.family = Family::LogNormal;
    else if (name == "k") spec.family = Family::KCompound;
    else if (name == "g0") spec.family = Family::G0Compound;
    else if (name == "betaprime") spec.family = Family::BetaPrime;
    else if (name == "kde") spec.family = Family::Kde;
    else throw std::invalid_argument("unknown model family '" + name + "'");

    if (colon == std::string::npos) return spec;
    std::istringstream rest(text.substr(colon + 1));
    std::string pair;
    while (std::getline(rest, pair, ',')) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("malformed parameter '" + pair + "'");
        const std::string key = pair.substr(0, eq);
        const std::string val = pair.substr(eq + 1);
        if (key == "bandwidth" && val == "auto") {
            spec.kde_auto = true;
            continue;
        }
        try {
            spec.fixed[key] = std::stod(val);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad numeric value in '" + pair + "'");
        }
    }
    return spec;
}

/// Build a model from a fully pinned spec (no data involved).
inline ClutterModel instantiate(const FamilySpec& s) {
    switch (s.family) {
        case Family::Exponential: return Exponential{s.get_or("mean", 1.0)};
        case Family::Rayleigh: return Rayleigh{s.get_or("scale", 1.0)};
        case Family::Gamma: return GammaModel{s.get("shape"), s.get_or("rate", 1.0)};
        case Family::SqrtGamma: return SqrtGamma{s.get("shape"), s.get_or("rate", 1.0)};
        case Family::Weibull: return WeibullModel{s.get("shape"), s.get_or("scale", 1.0)};
        case Family::LogNormal: return LogNormal{s.get_or("mu", 0.0), s.get("sigma")};
        case Family::KCompound:
            return make_k_compound(s.get("shape"), s.get("rate"),
                                   static_cast<int>(s.get_or("n", 1)));
        case Family::G0Compound:
            return make_g0_compound(s.get("shape"), s.get("gamma"),
                                    static_cast<int>(s.get_or("n", 1)));
        case Family::BetaPrime: return BetaPrime{s.get("shape"), s.get("gamma")};
        case Family::Kde:
            throw std::invalid_argument("kde models must be fitted from samples");
    }
    throw std::invalid_argument("unknown family");
}

namespace detail {

/// Weibull shape MLE by bisection on the profile score, which is monotone
/// increasing in the shape parameter.
inline double weibull_shape_mle(const std::vector<double>& x) {
    double mean_log = 0.0;
    for (double v : x) mean_log += std::log(v);
    mean_log /= x.size();
    auto score = [&](double k) {
        double swk = 0.0, swklog = 0.0;
        for (double v : x) {
            const double w = std::pow(v, k);
            swk += w;
            swklog += w * std::log(v);
        }
        return swklog / swk - 1.0 / k - mean_log;
    };
    double lo = 0.02, hi = 200.0;
    if (score(lo) > 0.0 || score(hi) < 0.0)
        throw ConvergenceFailure("Weibull shape MLE bracket failed");
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (score(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Fit the free parameters of a family by moment/ML estimation; pinned
/// parameters in the spec are honored.
inline ClutterModel fit_family(const FamilySpec& s, const std::vector<double>& samples) {
    if (samples.size() < 2) throw InsufficientSamples("fitting needs >= 2 samples");
    const double m1 = fit_mean(samples);
    double m2 = 0.0;
    for (double x : samples) m2 += x * x;
    m2 /= samples.size();
    const double var = m2 - m1 * m1;

    switch (s.family) {
        case Family::Exponential:
            return Exponential{s.get_or("mean", m1)};
        case Family::Rayleigh:
            return Rayleigh{s.get_or("scale", std::sqrt(0.5 * m2))};
        case Family::Gamma: {
            if (var <= 0) throw ConvergenceFailure("gamma fit needs positive variance");
            const double shape = s.get_or("shape", m1 * m1 / var);
            const double rate = s.get_or("rate", shape / m1);
            return GammaModel{shape, rate};
        }
        case Family::SqrtGamma: {
            std::vector<double> sq(samples.size());
            std::transform(samples.begin(), samples.end(), sq.begin(),
                           [](double v) { return v * v; });
            FamilySpec gs{Family::Gamma, s.fixed, false};
            const auto g = std::get<GammaModel>(fit_family(gs, sq));
            return SqrtGamma{g.shape, g.rate};
        }
        case Family::Weibull: {
            for (double v : samples)
                if (v <= 0) throw ConvergenceFailure("Weibull fit needs positive samples");
            double shape;
            if (s.has("shape")) {
                shape = s.get("shape");
            } else {
                shape = detail::weibull_shape_mle(samples);
            }
            double scale;
            if (s.has("scale")) {
                scale = s.get("scale");
            } else {
                double acc = 0.0;
                for (double v : samples) acc += std::pow(v, shape);
                scale = std::pow(acc / samples.size(), 1.0 / shape);
            }
            return WeibullModel{shape, scale};
        }
        case Family::LogNormal: {
            std::vector<double> lx;
            lx.reserve(samples.size());
            for (double v : samples) {
                if (v <= 0) throw ConvergenceFailure("lognormal fit needs positive samples");
                lx.push_back(std::log(v));
            }
            const auto [mu, sigma] = fit_mean_std(lx);
            if (sigma <= 0) throw ConvergenceFailure("lognormal fit needs spread in log samples");
            return LogNormal{s.get_or("mu", mu), s.get_or("sigma", sigma)};
        }
        case Family::KCompound: {
            const int n = static_cast<int>(s.get_or("n", 1));
            // m2/m1^2 = (1 + 1/shape)(1 + 1/n) for unit-mean speckle.
            const double r = m2 / (m1 * m1);
            const double t = r * n / (n + 1.0) - 1.0;
            if (t <= 0) throw ConvergenceFailure("samples less dispersed than pure speckle");
            const double shape = s.get_or("shape", 1.0 / t);
            const double rate = s.get_or("rate", shape / m1);
            return make_k_compound(shape, rate, n);
        }
        case Family::G0Compound:
        case Family::BetaPrime: {
            const int n = s.family == Family::BetaPrime
                              ? 1
                              : static_cast<int>(s.get_or("n", 1));
            // m2/m1^2 = (shape-1)/(shape-2) * (1 + 1/n); needs shape > 2.
            const double rho = m2 / (m1 * m1) * n / (n + 1.0);
            if (rho <= 1.0)
                throw ConvergenceFailure("samples inconsistent with reciprocal-gamma texture");
            const double shape = s.get_or("shape", (2.0 * rho - 1.0) / (rho - 1.0));
            const double gamma0 = s.get_or("gamma", m1 * (shape - 1.0));
            if (s.family == Family::BetaPrime) return BetaPrime{shape, gamma0};
            return make_g0_compound(shape, gamma0, n);
        }
        case Family::Kde: {
            if (s.has("bandwidth") && !s.kde_auto)
                return kde_fit(samples, s.get("bandwidth"));
            return kde_fit_auto(samples);
        }
    }
    throw std::invalid_argument("unknown family");
}

inline std::string describe(const ClutterModel& model) {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            std::ostringstream os;
            if constexpr (std::is_same_v<T, Exponential>) os << "exp:mean=" << m.mean;
            else if constexpr (std::is_same_v<T, Rayleigh>) os << "rayleigh:scale=" << m.scale;
            else if constexpr (std::is_same_v<T, GammaModel>)
                os << "gamma:shape=" << m.shape << ",rate=" << m.rate;
            else if constexpr (std::is_same_v<T, SqrtGamma>)
                os << "sqrtgamma:shape=" << m.shape << ",rate=" << m.rate;
            else if constexpr (std::is_same_v<T, WeibullModel>)
                os << "weibull:shape=" << m.shape << ",scale=" << m.scale;
            else if constexpr (std::is_same_v<T, LogNormal>)
                os << "lognormal:mu=" << m.mu << ",sigma=" << m.sigma;
            else if constexpr (std::is_same_v<T, KCompound>)
                os << "k:shape=" << m.shape << ",rate=" << m.rate << ",n=" << m.looks;
            else if constexpr (std::is_same_v<T, G0Compound>)
                os << "g0:shape=" << m.shape_g0 << ",gamma=" << m.gamma_g0 << ",n=" << m.looks;
            else if constexpr (std::is_same_v<T, BetaPrime>)
                os << "betaprime:shape=" << m.shape_g0 << ",gamma=" << m.gamma_g0;
            else os << "kde:bandwidth=" << m.bandwidth;
            return os.str();
        },
        model);
}

}  // namespace cfarkit

#endif  // CFARKIT_MODELS_HPP
