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

#ifndef CFARKIT_LOSS_HPP
#define CFARKIT_LOSS_HPP

#include <cmath>

#include "cfarkit/detector.hpp"
#include "cfarkit/error.hpp"

namespace cfarkit {

// CFAR-loss bookkeeping for the universal single-hit loss curve: the curve's
// abscissa is chi / m_eff, where chi = -log10(PFA) and m_eff discounts the
// boundary ring by a detector-dependent constant k.

inline double chi(double pfa) {
    if (!(pfa > 0.0 && pfa < 1.0)) throw InvalidPfa("pfa must be in (0,1)");
    return -std::log10(pfa);
}

/// Tabulated k constants by detector method and law. Only the cell-averaging
/// and greatest-of variants are tabulated.
inline double k_lookup(Strategy method, Law law) {
    if (method == Strategy::CA) {
        switch (law) {
            case Law::Square: return 0.0;
            case Law::Linear: return 0.09;
            case Law::Log: return 0.65;
        }
    }
    if (method == Strategy::GOCA) {
        switch (law) {
            case Law::Square: return 0.37;
            case Law::Linear: return 0.5;
            case Law::Log: return 1.26;
        }
    }
    throw NotTabulated("no k value tabulated for " + to_string(method) + "/" + to_string(law));
}

/// Effective number of reference pixels, m_eff = (m + k) / (1 + k).
inline double effective_reference_count(int m, double k) {
    if (m < 1) throw std::invalid_argument("reference count must be >= 1");
    if (k < 0.0) throw std::invalid_argument("k must be >= 0");
    return (m + k) / (1.0 + k);
}

inline double cfar_ratio(double chi_value, double m_eff) {
    if (!(m_eff > 0.0)) throw std::invalid_argument("m_eff must be positive");
    return chi_value / m_eff;
}

/// Boundary-ring size needed by a log detector to match the loss of a linear
/// detector with n reference pixels: ceil(1.65*n - 0.65). Rounded up since a
/// pixel count is integral and rounding down reintroduces the loss.
inline int log_detector_boundary(int n_linear) {
    if (n_linear < 1) throw std::invalid_argument("reference count must be >= 1");
    return static_cast<int>(std::ceil(1.65 * n_linear - 0.65 - 1e-12));
}

}  // namespace cfarkit

#endif  // CFARKIT_LOSS_HPP
