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

#ifndef CFARKIT_DETECTOR_HPP
#define CFARKIT_DETECTOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfarkit/error.hpp"
#include "cfarkit/models.hpp"
#include "cfarkit/stencil.hpp"

namespace cfarkit {

enum class Strategy { CA, SOCA, GOCA, OS };
enum class Parameterization { One, Two };
enum class Law { Linear, Square, Log };

inline std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::CA: return "ca";
        case Strategy::SOCA: return "soca";
        case Strategy::GOCA: return "goca";
        case Strategy::OS: return "os";
    }
    return "?";
}

inline std::string to_string(Law l) {
    switch (l) {
        case Law::Linear: return "linear";
        case Law::Square: return "square";
        case Law::Log: return "log";
    }
    return "?";
}

struct DetectorConfig {
    Strategy strategy = Strategy::CA;
    double os_q = 0.75;  // order-statistic fraction in (0, 1]
    Parameterization parameterization = Parameterization::One;
    Law law = Law::Square;
    double pfa = 1e-3;
    std::optional<double> alpha_override;  // bypasses the pfa -> alpha solve
    ClutterModel background_family = Exponential{1.0};
    int put_block = 1;  // M, used when no stencil supplies it

    void validate() const {
        if (!(os_q > 0.0 && os_q <= 1.0)) throw std::invalid_argument("os_q must be in (0,1]");
        if (!(pfa > 0.0 && pfa < 1.0)) throw InvalidPfa("pfa must be in (0,1)");
        if (alpha_override && !(*alpha_override > 0.0))
            throw std::invalid_argument("alpha_override must be positive");
        if (put_block < 1) throw std::invalid_argument("put_block must be >= 1");
    }
};

/// Outcome of one pixel test. Ties resolve to background: strict inequality
/// keeps false-alarm control conservative where the statistic equals the
/// threshold exactly.
struct Decision {
    double statistic = 0.0;
    double threshold = 0.0;
    bool is_target = false;
};

inline Decision make_decision(double statistic, double threshold) {
    return {statistic, threshold, statistic > threshold};
}

/// Arithmetic mean of the pixels under test.
inline double put_statistic(std::span<const double> put_pixels) {
    if (put_pixels.empty()) throw EmptyInput("PUT block is empty");
    double acc = 0.0;
    for (double v : put_pixels) acc += v;
    return acc / static_cast<double>(put_pixels.size());
}

/// Cell-averaging test. Linear and square laws form the ratio against the
/// boundary mean; the log law tests the difference of log-domain estimates.
inline Decision decide_ca(double x_put, double mu_hat, double alpha, Law law = Law::Square) {
    if (law == Law::Log) return make_decision(x_put - mu_hat, alpha);
    if (!(mu_hat > 0.0)) throw NonPositiveBackground("boundary mean must be positive");
    return make_decision(x_put / mu_hat, alpha);
}

inline Decision decide_soca(double x_put, const std::array<double, 4>& window_means,
                            double alpha) {
    const double m = *std::min_element(window_means.begin(), window_means.end());
    if (!(m > 0.0)) throw NonPositiveBackground("all four window means must be positive");
    return make_decision(x_put / m, alpha);
}

inline Decision decide_goca(double x_put, const std::array<double, 4>& window_means,
                            double alpha) {
    if (!(*std::min_element(window_means.begin(), window_means.end()) > 0.0))
        throw NonPositiveBackground("all four window means must be positive");
    const double m = *std::max_element(window_means.begin(), window_means.end());
    return make_decision(x_put / m, alpha);
}

/// Rank index of the order statistic: the ceil(q*N)-th smallest value,
/// 1-based. The small epsilon keeps exact multiples stable against rounding.
inline int os_rank(int n, double q) {
    const int k = static_cast<int>(std::ceil(q * n - 1e-9));
    return std::clamp(k, 1, n);
}

inline Decision decide_os(double x_put, std::vector<double> boundary_pixels, double q,
                          double alpha) {
    if (boundary_pixels.empty()) throw EmptyInput("boundary ring is empty");
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("q must be in (0,1]");
    const int k = os_rank(static_cast<int>(boundary_pixels.size()), q);
    std::nth_element(boundary_pixels.begin(), boundary_pixels.begin() + (k - 1),
                     boundary_pixels.end());
    const double xq = boundary_pixels[k - 1];
    if (!(xq > 0.0)) throw NonPositiveBackground("order statistic must be positive");
    return make_decision(x_put / xq, alpha);
}

/// Two-parameter test with the multi-PUT correction sigma_eff = sigma/sqrt(M).
inline Decision decide_two_param(double x_put, double mu_hat, double sigma_hat, double alpha,
                                 int m = 1) {
    if (!(sigma_hat > 0.0)) throw ZeroSigma("sigma must be positive");
    if (m < 1) throw std::invalid_argument("PUT count must be >= 1");
    const double sigma_eff = sigma_hat / std::sqrt(static_cast<double>(m));
    return make_decision((x_put - mu_hat) / sigma_eff, alpha);
}

// ---------------------------------------------------------------------------
// Quadratic-discriminant view of the two-parameter detector: the background
// class score is 0.5*(x-mu)^2/sigma^2 + 0.5*ln(sigma^-2) - ln P(B). The
// squared two-parameter rule matches it except for the 0.5*ln(sigma^-2) term.
// ---------------------------------------------------------------------------

inline double qdf_background_discriminant(double x, double mu, double sigma, double prior_b) {
    if (!(sigma > 0.0)) throw ZeroSigma("sigma must be positive");
    if (!(prior_b > 0.0 && prior_b <= 1.0))
        throw std::invalid_argument("background prior must be in (0,1]");
    const double z = (x - mu) / sigma;
    return 0.5 * z * z + 0.5 * std::log(1.0 / (sigma * sigma)) - std::log(prior_b);
}

inline Decision qdf_decide(double score, double alpha_qdf) {
    return make_decision(score, alpha_qdf);
}

// ---------------------------------------------------------------------------
// Monte Carlo threshold calibration for strategies without a closed form:
// simulate the detector statistic under the background model and take the
// empirical (1 - pfa) quantile. Deterministic for a fixed seed.
// ---------------------------------------------------------------------------

struct CalibrationOptions {
    int trials = 200'000;
    std::uint64_t seed = 0xCA11B8A7Eull;
};

inline double calibrate_alpha_counts(Strategy strategy, double pfa, int n, int m,
                                     const std::array<int, 4>& window_sizes, int k,
                                     const ClutterModel& background,
                                     const CalibrationOptions& opt = {}) {
    if (!(pfa > 0.0 && pfa < 1.0)) throw InvalidPfa("pfa must be in (0,1)");
    if (n < 1 || m < 1) throw std::invalid_argument("pixel counts must be >= 1");
    RngStream g(opt.seed, 3);
    std::vector<double> stats(static_cast<std::size_t>(opt.trials));
    std::vector<double> ring(static_cast<std::size_t>(n));
    for (int t = 0; t < opt.trials; ++t) {
        double put = 0.0;
        for (int i = 0; i < m; ++i) put += sample(background, g);
        put /= m;
        for (int i = 0; i < n; ++i) ring[i] = sample(background, g);
        double denom = 0.0;
        switch (strategy) {
            case Strategy::CA: {
                double acc = 0.0;
                for (double v : ring) acc += v;
                denom = acc / n;
                break;
            }
            case Strategy::SOCA:
            case Strategy::GOCA: {
                std::array<double, 4> means{};
                int idx = 0;
                for (int w = 0; w < 4; ++w) {
                    double acc = 0.0;
                    for (int i = 0; i < window_sizes[w]; ++i) acc += ring[idx++];
                    means[w] = acc / window_sizes[w];
                }
                denom = strategy == Strategy::SOCA
                            ? *std::min_element(means.begin(), means.end())
                            : *std::max_element(means.begin(), means.end());
                break;
            }
            case Strategy::OS: {
                std::nth_element(ring.begin(), ring.begin() + (k - 1), ring.end());
                denom = ring[k - 1];
                break;
            }
        }
        stats[t] = put / denom;
    }
    std::sort(stats.begin(), stats.end());
    const double rank = (1.0 - pfa) * (stats.size() - 1);
    const std::size_t i0 = static_cast<std::size_t>(rank);
    const double w = rank - i0;
    const double hi = stats[std::min(i0 + 1, stats.size() - 1)];
    return stats[i0] * (1.0 - w) + hi * w;
}

inline double calibrate_alpha(const StencilSpec& stencil, const DetectorConfig& config,
                              const ClutterModel& background,
                              const CalibrationOptions& opt = {}) {
    config.validate();
    if (config.parameterization == Parameterization::Two)
        return config.alpha_override ? *config.alpha_override
                                     : alpha_two_param_gaussian(config.pfa);
    const int n = boundary_count(stencil);
    return calibrate_alpha_counts(config.strategy, config.pfa, n, stencil.put_count(),
                                  split_windows(stencil).counts(), os_rank(n, config.os_q),
                                  background, opt);
}

/// Ratio-space threshold scaling factor for a config against a stencil.
/// Closed form where one exists (cell averaging in exponential clutter);
/// Monte Carlo calibration otherwise. For the log law the returned value is
/// the log of the ratio-space factor.
inline double resolve_alpha(const StencilSpec& stencil, const DetectorConfig& config,
                            const CalibrationOptions& opt = {}) {
    config.validate();
    if (config.alpha_override) return *config.alpha_override;
    if (config.parameterization == Parameterization::Two)
        return alpha_two_param_gaussian(config.pfa);

    double ratio_alpha;
    const bool exponential_bg =
        std::holds_alternative<Exponential>(config.background_family);
    if (config.strategy == Strategy::CA && exponential_bg && config.law != Law::Linear) {
        ratio_alpha =
            alpha_ca_exponential_block(boundary_count(stencil), stencil.put_count(), config.pfa);
    } else {
        // One-parameter log statistics are logs of linear-domain ratios, so
        // calibration always runs in the linear domain of background_family.
        ratio_alpha = calibrate_alpha(stencil, config, config.background_family, opt);
    }
    return config.law == Law::Log ? std::log(ratio_alpha) : ratio_alpha;
}

}  // namespace cfarkit

#endif  // CFARKIT_DETECTOR_HPP
