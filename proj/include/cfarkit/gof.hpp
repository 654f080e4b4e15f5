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

#ifndef CFARKIT_GOF_HPP
#define CFARKIT_GOF_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cfarkit/error.hpp"
#include "cfarkit/models.hpp"

namespace cfarkit {

/// One-sample Cramer-von Mises statistic,
///   W^2 = 1/(12n) + sum_i (F(x_(i)) - (2i-1)/(2n))^2.
inline double cvm_distance(std::vector<double> samples, const ClutterModel& model) {
    if (samples.size() < 2) throw InsufficientSamples("CvM needs >= 2 samples");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    double acc = 1.0 / (12.0 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = cdf(model, samples[i]) - (2.0 * (i + 1) - 1.0) / (2.0 * n);
        acc += d * d;
    }
    return acc;
}

/// One-sample Anderson-Darling statistic,
///   A^2 = -n - (1/n) sum_i (2i-1) [ln u_(i) + ln(1 - u_(n+1-i))].
/// Weighted toward the tails, where u = F(x) approaches 0 or 1.
inline double anderson_darling(std::vector<double> samples, const ClutterModel& model) {
    if (samples.size() < 2) throw InsufficientSamples("Anderson-Darling needs >= 2 samples");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = cdf(model, samples[i]);
        if (u[i] <= 0.0 || u[i] >= 1.0)
            throw DegenerateCdf("model cdf hit 0 or 1 exactly at a sample");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += (2.0 * (i + 1) - 1.0) * (std::log(u[i]) + std::log1p(-u[n - 1 - i]));
    return -static_cast<double>(n) - acc / n;
}

/// k-sample Anderson-Darling statistic in the tie-adjusted form of the
/// Scholz-Stephens construction. Reduces to the continuous version when all
/// pooled values are distinct.
inline double ad_ksample(const std::vector<std::vector<double>>& groups) {
    const std::size_t k = groups.size();
    if (k < 2) throw InsufficientSamples("k-sample test needs >= 2 groups");
    std::vector<double> pooled;
    for (const auto& g : groups) {
        if (g.size() < 2) throw InsufficientSamples("each group needs >= 2 samples");
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    std::sort(pooled.begin(), pooled.end());
    const double N = static_cast<double>(pooled.size());

    // Distinct pooled values and their multiplicities.
    std::vector<double> distinct;
    std::vector<double> mult;
    for (double v : pooled) {
        if (distinct.empty() || v != distinct.back()) {
            distinct.push_back(v);
            mult.push_back(1.0);
        } else {
            mult.back() += 1.0;
        }
    }
    const std::size_t L = distinct.size();

    double total = 0.0;
    for (const auto& g : groups) {
        std::vector<double> sorted(g);
        std::sort(sorted.begin(), sorted.end());
        const double ni = static_cast<double>(sorted.size());
        double cum = 0.0;        // pooled count through value j (B_j)
        double cum_i = 0.0;      // group-i count through value j (M_ij)
        std::size_t pos = 0;
        double inner = 0.0;
        for (std::size_t j = 0; j < L; ++j) {
            double f_ij = 0.0;
            while (pos < sorted.size() && sorted[pos] == distinct[j]) {
                ++pos;
                f_ij += 1.0;
            }
            const double lj = mult[j];
            const double Bbar = cum + 0.5 * lj;
            const double Mbar = cum_i + 0.5 * f_ij;
            const double denom = Bbar * (N - Bbar) - N * lj / 4.0;
            if (denom > 0.0) {
                const double num = N * Mbar - ni * Bbar;
                inner += lj / N * num * num / denom;
            }
            cum += lj;
            cum_i += f_ij;
        }
        total += inner / ni;
    }
    return (N - 1.0) / N * total;
}

enum class GofStatistic { Cvm, AndersonDarling };

struct ModelScore {
    std::string spec_text;
    ClutterModel model;
    double score = 0.0;
    bool fitted = false;
    std::string error;
};

/// Fit each candidate family to the samples and rank by goodness-of-fit
/// distance, ascending. Candidates that fail to fit are reported at the end
/// with their error message.
inline std::vector<ModelScore> select_model(const std::vector<double>& samples,
                                            const std::vector<FamilySpec>& candidates,
                                            GofStatistic stat = GofStatistic::Cvm) {
    if (candidates.empty()) return {};
    if (samples.size() < 20) throw InsufficientSamples("model selection needs >= 20 samples");
    std::vector<ModelScore> out;
    for (const auto& spec : candidates) {
        ModelScore ms;
        ms.spec_text = family_name(spec.family);
        try {
            ms.model = fit_family(spec, samples);
            ms.spec_text = describe(ms.model);
            ms.score = stat == GofStatistic::Cvm ? cvm_distance(samples, ms.model)
                                                 : anderson_darling(samples, ms.model);
            ms.fitted = true;
        } catch (const Error& e) {
            ms.error = e.what();
        } catch (const std::exception& e) {
            ms.error = e.what();
        }
        out.push_back(std::move(ms));
    }
    std::stable_sort(out.begin(), out.end(), [](const ModelScore& a, const ModelScore& b) {
        if (a.fitted != b.fitted) return a.fitted;
        return a.score < b.score;
    });
    return out;
}

}  // namespace cfarkit

#endif  // CFARKIT_GOF_HPP
