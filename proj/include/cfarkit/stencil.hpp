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

#ifndef CFARKIT_STENCIL_HPP
#define CFARKIT_STENCIL_HPP

#include <array>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cfarkit/grid.hpp"

namespace cfarkit {

/// Sliding-window geometry: a block of pixels under test, a guard ring that
/// keeps target energy out of the statistics, and a boundary ring supplying
/// the reference pixels. PUT extents must be odd so the center is unambiguous;
/// the overall stencil is then odd on both axes by construction.
struct StencilSpec {
    int put_rows = 1;
    int put_cols = 1;
    int guard_width = 0;
    int boundary_width = 1;

    void validate() const {
        if (put_rows < 1 || put_cols < 1 || put_rows % 2 == 0 || put_cols % 2 == 0)
            throw std::invalid_argument("PUT extents must be odd positive integers");
        if (guard_width < 0) throw std::invalid_argument("guard width must be >= 0");
        if (boundary_width < 1) throw std::invalid_argument("boundary width must be >= 1");
    }

    int rows() const { return put_rows + 2 * (guard_width + boundary_width); }
    int cols() const { return put_cols + 2 * (guard_width + boundary_width); }
    int inner_rows() const { return put_rows + 2 * guard_width; }
    int inner_cols() const { return put_cols + 2 * guard_width; }
    int put_count() const { return put_rows * put_cols; }

    std::string describe() const {
        return std::to_string(put_rows) + "x" + std::to_string(put_cols) + "/g" +
               std::to_string(guard_width) + "/b" + std::to_string(boundary_width);
    }
};

/// Number of reference pixels in the boundary ring.
inline int boundary_count(const StencilSpec& spec) {
    spec.validate();
    return spec.rows() * spec.cols() - spec.inner_rows() * spec.inner_cols();
}

namespace detail {

inline bool in_boundary_ring(const StencilSpec& s, int r, int c) {
    const int b = s.boundary_width;
    return r < b || r >= s.rows() - b || c < b || c >= s.cols() - b;
}

inline bool in_put_block(const StencilSpec& s, int r, int c) {
    const int off_r = s.guard_width + s.boundary_width;
    const int off_c = s.guard_width + s.boundary_width;
    return r >= off_r && r < off_r + s.put_rows && c >= off_c && c < off_c + s.put_cols;
}

}  // namespace detail

/// Averaging kernels realizing the stencil as a linear filter:
///  - put_mean: 1/M on the PUT block, zero elsewhere
///  - boundary_mean: 1/N on the boundary ring, zero elsewhere
///  - whole_box / core_box: unit indicators of the full stencil and of the
///    PUT+guard block; boundary_mean = (whole_box - core_box) / N.
struct KernelSet {
    Grid<double> put_mean;
    Grid<double> boundary_mean;
    Grid<double> whole_box;
    Grid<double> core_box;
};

inline KernelSet build_kernels(const StencilSpec& spec) {
    spec.validate();
    const int R = spec.rows(), C = spec.cols();
    const int N = boundary_count(spec);
    const int M = spec.put_count();
    KernelSet k{Grid<double>(R, C), Grid<double>(R, C), Grid<double>(R, C), Grid<double>(R, C)};
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
            k.whole_box(r, c) = 1.0;
            const bool ring = detail::in_boundary_ring(spec, r, c);
            if (!ring) k.core_box(r, c) = 1.0;
            if (ring) k.boundary_mean(r, c) = 1.0 / N;
            if (detail::in_put_block(spec, r, c)) k.put_mean(r, c) = 1.0 / M;
        }
    return k;
}

/// The boundary ring partitioned into leading/lagging windows on the four
/// sides of the PUT. Corner rule: the top and bottom windows take their full
/// edges including corner blocks; left and right windows take the remaining
/// side strips. Offsets are (row, col) within the stencil.
struct SplitWindows {
    enum Side { Top = 0, Left = 1, Bottom = 2, Right = 3 };
    std::array<std::vector<std::pair<int, int>>, 4> windows;

    std::array<int, 4> counts() const {
        return {static_cast<int>(windows[0].size()), static_cast<int>(windows[1].size()),
                static_cast<int>(windows[2].size()), static_cast<int>(windows[3].size())};
    }
};

inline SplitWindows split_windows(const StencilSpec& spec) {
    spec.validate();
    const int R = spec.rows(), C = spec.cols(), b = spec.boundary_width;
    SplitWindows w;
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
            if (!detail::in_boundary_ring(spec, r, c)) continue;
            if (r < b)
                w.windows[SplitWindows::Top].emplace_back(r, c);
            else if (r >= R - b)
                w.windows[SplitWindows::Bottom].emplace_back(r, c);
            else if (c < b)
                w.windows[SplitWindows::Left].emplace_back(r, c);
            else
                w.windows[SplitWindows::Right].emplace_back(r, c);
        }
    return w;
}

/// Per-window averaging kernels for the split-window detectors.
inline std::array<Grid<double>, 4> split_window_kernels(const StencilSpec& spec) {
    const SplitWindows sw = split_windows(spec);
    std::array<Grid<double>, 4> out;
    for (int i = 0; i < 4; ++i) {
        out[i] = Grid<double>(spec.rows(), spec.cols());
        const double v = 1.0 / static_cast<double>(sw.windows[i].size());
        for (auto [r, c] : sw.windows[i]) out[i](r, c) = v;
    }
    return out;
}

/// Boundary-ring offsets relative to the stencil center, for direct
/// (non-kernel) passes such as order-statistics ranking.
inline std::vector<std::pair<int, int>> boundary_offsets(const StencilSpec& spec) {
    spec.validate();
    const int hr = (spec.rows() - 1) / 2, hc = (spec.cols() - 1) / 2;
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(boundary_count(spec)));
    for (int r = 0; r < spec.rows(); ++r)
        for (int c = 0; c < spec.cols(); ++c)
            if (detail::in_boundary_ring(spec, r, c)) out.emplace_back(r - hr, c - hc);
    return out;
}

/// PUT-block offsets relative to the stencil center.
inline std::vector<std::pair<int, int>> put_offsets(const StencilSpec& spec) {
    spec.validate();
    const int hr = (spec.rows() - 1) / 2, hc = (spec.cols() - 1) / 2;
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(spec.put_count()));
    for (int r = 0; r < spec.rows(); ++r)
        for (int c = 0; c < spec.cols(); ++c)
            if (detail::in_put_block(spec, r, c)) out.emplace_back(r - hr, c - hc);
    return out;
}

}  // namespace cfarkit

#endif  // CFARKIT_STENCIL_HPP
