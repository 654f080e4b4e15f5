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

#ifndef CFARKIT_ENGINE_HPP
#define CFARKIT_ENGINE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include <fftw3.h>

#include "cfarkit/detector.hpp"
#include "cfarkit/error.hpp"
#include "cfarkit/grid.hpp"
#include "cfarkit/raster.hpp"
#include "cfarkit/stencil.hpp"

namespace cfarkit {

enum class EngineMode { Spatial, Fft, Auto };
enum class BorderPolicy { Valid, Reflect };

struct RoiParams {
    std::int64_t min_size = 1;
    std::int64_t max_size = std::numeric_limits<std::int64_t>::max();
    double min_separation = 0.0;
};

struct EngineOptions {
    EngineMode mode = EngineMode::Auto;
    int threads = 0;                  // 0 = hardware concurrency
    int fft_crossover_area = 225;     // auto picks fft above this stencil area
    BorderPolicy border = BorderPolicy::Valid;
    bool auto_convert = false;        // convert input domain to match the law
    std::optional<RoiParams> roi;
    CalibrationOptions calibration;
};

namespace detail {

inline int effective_threads(int requested, std::int64_t work_rows) {
    int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    return static_cast<int>(std::min<std::int64_t>(t, std::max<std::int64_t>(work_rows, 1)));
}

template <typename Fn>
void parallel_rows(int row0, int row1, int threads, Fn&& fn) {
    const int n = row1 - row0;
    if (n <= 0) return;
    const int t = effective_threads(threads, n);
    if (t == 1) {
        fn(row0, row1);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(t);
    std::mutex err_mutex;
    std::exception_ptr first_error;
    for (int i = 0; i < t; ++i) {
        const int a = row0 + static_cast<int>(std::int64_t(n) * i / t);
        const int b = row0 + static_cast<int>(std::int64_t(n) * (i + 1) / t);
        pool.emplace_back([a, b, &fn, &err_mutex, &first_error] {
            try {
                fn(a, b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline Grid<double> reflect_pad(const Grid<double>& img, int pad_r, int pad_c) {
    const int H = img.rows(), W = img.cols();
    Grid<double> out(H + 2 * pad_r, W + 2 * pad_c);
    auto mirror = [](int i, int n) {
        // symmetric reflection without edge repetition: -1 -> 1, n -> n-2
        while (i < 0 || i >= n) {
            if (i < 0) i = -i;
            if (i >= n) i = 2 * n - 2 - i;
        }
        return i;
    };
    for (int r = 0; r < out.rows(); ++r)
        for (int c = 0; c < out.cols(); ++c)
            out(r, c) = img(mirror(r - pad_r, H), mirror(c - pad_c, W));
    return out;
}

}  // namespace detail

/// Region of an image where a kernel of the given dims fully fits.
inline Rect valid_region(int image_rows, int image_cols, int kernel_rows, int kernel_cols) {
    const int hr = (kernel_rows - 1) / 2, hc = (kernel_cols - 1) / 2;
    return Rect{hr, hc, image_rows - 2 * hr, image_cols - 2 * hc};
}

/// True 2-D convolution (kernel flipped), evaluated where the kernel fully
/// fits; other output pixels are left at zero. Reflect padding extends the
/// evaluation to the whole frame.
inline Grid<double> convolve_spatial(const Grid<double>& image, const Grid<double>& kernel,
                                     BorderPolicy border = BorderPolicy::Valid,
                                     int threads = 1) {
    const int kh = kernel.rows(), kw = kernel.cols();
    if (kh > image.rows() || kw > image.cols())
        throw KernelTooLarge("kernel exceeds image dimensions");
    if (kh % 2 == 0 || kw % 2 == 0)
        throw std::invalid_argument("kernel dims must be odd");
    if (border == BorderPolicy::Reflect) {
        const Grid<double> padded = detail::reflect_pad(image, (kh - 1) / 2, (kw - 1) / 2);
        Grid<double> full = convolve_spatial(padded, kernel, BorderPolicy::Valid, threads);
        Grid<double> out(image.rows(), image.cols());
        const int hr = (kh - 1) / 2, hc = (kw - 1) / 2;
        for (int r = 0; r < image.rows(); ++r)
            for (int c = 0; c < image.cols(); ++c) out(r, c) = full(r + hr, c + hc);
        return out;
    }

    const int hr = (kh - 1) / 2, hc = (kw - 1) / 2;
    // Flipped-kernel taps: weight ker(i,j) applies to image(r + hr - i, c + hc - j).
    struct Tap {
        int dr, dc;
        double w;
    };
    std::vector<Tap> taps;
    taps.reserve(static_cast<std::size_t>(kh) * kw);
    for (int i = 0; i < kh; ++i)
        for (int j = 0; j < kw; ++j)
            if (kernel(i, j) != 0.0) taps.push_back({hr - i, hc - j, kernel(i, j)});

    Grid<double> out(image.rows(), image.cols(), 0.0);
    const Rect v = valid_region(image.rows(), image.cols(), kh, kw);
    detail::parallel_rows(v.row0, v.row0 + v.rows, threads, [&](int r0, int r1) {
        for (int r = r0; r < r1; ++r)
            for (int c = v.col0; c < v.col0 + v.cols; ++c) {
                double acc = 0.0;
                for (const Tap& t : taps) acc += t.w * image(r + t.dr, c + t.dc);
                out(r, c) = acc;
            }
    });
    return out;
}

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Linear convolution via zero-padded transforms. Identical contract to the
/// spatial path within floating-point round-off.
inline Grid<double> convolve_fft_valid(const Grid<double>& image, const Grid<double>& kernel) {
    const int H = image.rows(), W = image.cols();
    const int kh = kernel.rows(), kw = kernel.cols();
    const int PH = H + kh - 1, PW = W + kw - 1;
    const int PWC = PW / 2 + 1;

    double* a = fftw_alloc_real(static_cast<std::size_t>(PH) * PW);
    double* b = fftw_alloc_real(static_cast<std::size_t>(PH) * PW);
    fftw_complex* fa = fftw_alloc_complex(static_cast<std::size_t>(PH) * PWC);
    fftw_complex* fb = fftw_alloc_complex(static_cast<std::size_t>(PH) * PWC);
    std::fill(a, a + static_cast<std::size_t>(PH) * PW, 0.0);
    std::fill(b, b + static_cast<std::size_t>(PH) * PW, 0.0);
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) a[static_cast<std::size_t>(r) * PW + c] = image(r, c);
    for (int r = 0; r < kh; ++r)
        for (int c = 0; c < kw; ++c) b[static_cast<std::size_t>(r) * PW + c] = kernel(r, c);

    fftw_plan pf_a, pf_b, pb;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        pf_a = fftw_plan_dft_r2c_2d(PH, PW, a, fa, FFTW_ESTIMATE);
        pf_b = fftw_plan_dft_r2c_2d(PH, PW, b, fb, FFTW_ESTIMATE);
        pb = fftw_plan_dft_c2r_2d(PH, PW, fa, a, FFTW_ESTIMATE);
    }
    fftw_execute(pf_a);
    fftw_execute(pf_b);
    const double scale = 1.0 / (static_cast<double>(PH) * PW);
    for (std::size_t i = 0; i < static_cast<std::size_t>(PH) * PWC; ++i) {
        const std::complex<double> va(fa[i][0], fa[i][1]);
        const std::complex<double> vb(fb[i][0], fb[i][1]);
        const std::complex<double> prod = va * vb * scale;
        fa[i][0] = prod.real();
        fa[i][1] = prod.imag();
    }
    fftw_execute(pb);

    Grid<double> out(H, W, 0.0);
    const Rect v = valid_region(H, W, kh, kw);
    const int hr = (kh - 1) / 2, hc = (kw - 1) / 2;
    for (int r = v.row0; r < v.row0 + v.rows; ++r)
        for (int c = v.col0; c < v.col0 + v.cols; ++c)
            out(r, c) = a[static_cast<std::size_t>(r + hr) * PW + (c + hc)];

    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(pf_a);
        fftw_destroy_plan(pf_b);
        fftw_destroy_plan(pb);
    }
    fftw_free(a);
    fftw_free(b);
    fftw_free(fa);
    fftw_free(fb);
    return out;
}

}  // namespace detail

inline Grid<double> convolve_fft(const Grid<double>& image, const Grid<double>& kernel,
                                 BorderPolicy border = BorderPolicy::Valid,
                                 int /*threads*/ = 1) {
    const int kh = kernel.rows(), kw = kernel.cols();
    if (kh > image.rows() || kw > image.cols())
        throw KernelTooLarge("kernel exceeds image dimensions");
    if (kh % 2 == 0 || kw % 2 == 0)
        throw std::invalid_argument("kernel dims must be odd");
    if (border == BorderPolicy::Reflect) {
        const Grid<double> padded = detail::reflect_pad(image, (kh - 1) / 2, (kw - 1) / 2);
        Grid<double> full = detail::convolve_fft_valid(padded, kernel);
        Grid<double> out(image.rows(), image.cols());
        const int hr = (kh - 1) / 2, hc = (kw - 1) / 2;
        for (int r = 0; r < image.rows(); ++r)
            for (int c = 0; c < image.cols(); ++c) out(r, c) = full(r + hr, c + hc);
        return out;
    }
    return detail::convolve_fft_valid(image, kernel);
}

struct LocalStats {
    Grid<double> mu;
    Grid<double> sigma;
    std::int64_t negative_clamps = 0;  // round-off clamps in the variance identity
};

/// Boundary-ring mean and ML standard deviation maps via the filter identity
/// sigma^2 = E[I^2] - E[I]^2. Catastrophic cancellation on near-constant
/// regions is clamped at zero and counted.
inline LocalStats local_stats(const Grid<double>& image, const KernelSet& kernels,
                              EngineMode mode = EngineMode::Spatial,
                              BorderPolicy border = BorderPolicy::Valid, int threads = 1) {
    Grid<double> squared(image.rows(), image.cols());
    for (int r = 0; r < image.rows(); ++r)
        for (int c = 0; c < image.cols(); ++c) squared(r, c) = image(r, c) * image(r, c);
    auto conv = [&](const Grid<double>& img, const Grid<double>& k) {
        return mode == EngineMode::Fft ? convolve_fft(img, k, border, threads)
                                       : convolve_spatial(img, k, border, threads);
    };
    LocalStats out{conv(image, kernels.boundary_mean), Grid<double>(image.rows(), image.cols()),
                   0};
    Grid<double> m2 = conv(squared, kernels.boundary_mean);
    for (int r = 0; r < image.rows(); ++r)
        for (int c = 0; c < image.cols(); ++c) {
            const double var = m2(r, c) - out.mu(r, c) * out.mu(r, c);
            if (var < 0.0) {
                ++out.negative_clamps;
                out.sigma(r, c) = 0.0;
            } else {
                out.sigma(r, c) = std::sqrt(var);
            }
        }
    return out;
}

struct Roi {
    int id = 0;
    double centroid_row = 0.0;
    double centroid_col = 0.0;
    std::int64_t pixel_count = 0;
    Rect bounding_box;
    double peak_statistic = 0.0;
    double mean_statistic = 0.0;
};

struct DetectionMap {
    Grid<double> statistic;
    Grid<double> threshold;
    Grid<std::uint8_t> mask;
    Rect valid;
    std::vector<Roi> rois;
    double alpha = 0.0;
    EngineMode engine_used = EngineMode::Spatial;
    std::int64_t sigma_clamps = 0;
};

/// 8-connected components of the mask, filtered by pixel count, then merged
/// when centroids fall within min_separation of each other.
inline std::vector<Roi> extract_rois(const Grid<std::uint8_t>& mask,
                                     const Grid<double>& statistic, const RoiParams& params) {
    const int H = mask.rows(), W = mask.cols();
    Grid<std::int32_t> label(H, W, -1);
    std::vector<Roi> components;
    std::vector<std::pair<int, int>> stack;

    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            if (!mask(r, c) || label(r, c) >= 0) continue;
            const int id = static_cast<int>(components.size());
            Roi roi;
            roi.bounding_box = {r, c, 1, 1};
            double sum_r = 0, sum_c = 0, sum_s = 0, peak = -std::numeric_limits<double>::infinity();
            int rmin = r, rmax = r, cmin = c, cmax = c;
            stack.clear();
            stack.emplace_back(r, c);
            label(r, c) = id;
            while (!stack.empty()) {
                const auto [cr, cc] = stack.back();
                stack.pop_back();
                ++roi.pixel_count;
                sum_r += cr;
                sum_c += cc;
                const double s = statistic.empty() ? 0.0 : statistic(cr, cc);
                sum_s += s;
                peak = std::max(peak, s);
                rmin = std::min(rmin, cr);
                rmax = std::max(rmax, cr);
                cmin = std::min(cmin, cc);
                cmax = std::max(cmax, cc);
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int nr = cr + dr, nc = cc + dc;
                        if (nr < 0 || nr >= H || nc < 0 || nc >= W) continue;
                        if (!mask(nr, nc) || label(nr, nc) >= 0) continue;
                        label(nr, nc) = id;
                        stack.emplace_back(nr, nc);
                    }
            }
            roi.centroid_row = sum_r / roi.pixel_count;
            roi.centroid_col = sum_c / roi.pixel_count;
            roi.mean_statistic = sum_s / roi.pixel_count;
            roi.peak_statistic = peak;
            roi.bounding_box = {rmin, cmin, rmax - rmin + 1, cmax - cmin + 1};
            components.push_back(roi);
        }

    std::vector<Roi> sized;
    for (const auto& roi : components)
        if (roi.pixel_count >= params.min_size && roi.pixel_count <= params.max_size)
            sized.push_back(roi);

    // Union-find merge on centroid distance, evaluated on the size-filtered set.
    std::vector<int> parent(sized.size());
    for (std::size_t i = 0; i < sized.size(); ++i) parent[i] = static_cast<int>(i);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < sized.size(); ++i)
        for (std::size_t j = i + 1; j < sized.size(); ++j) {
            const double dr = sized[i].centroid_row - sized[j].centroid_row;
            const double dc = sized[i].centroid_col - sized[j].centroid_col;
            if (std::sqrt(dr * dr + dc * dc) < params.min_separation)
                parent[find(static_cast<int>(j))] = find(static_cast<int>(i));
        }

    std::vector<Roi> merged;
    std::vector<int> root_to_out(sized.size(), -1);
    for (std::size_t i = 0; i < sized.size(); ++i) {
        const int root = find(static_cast<int>(i));
        if (root_to_out[root] < 0) {
            root_to_out[root] = static_cast<int>(merged.size());
            Roi fresh = sized[i];
            fresh.centroid_row *= fresh.pixel_count;  // accumulate weighted sums
            fresh.centroid_col *= fresh.pixel_count;
            fresh.mean_statistic *= fresh.pixel_count;
            merged.push_back(fresh);
        } else {
            Roi& dst = merged[root_to_out[root]];
            const Roi& src = sized[i];
            dst.centroid_row += src.centroid_row * src.pixel_count;
            dst.centroid_col += src.centroid_col * src.pixel_count;
            dst.mean_statistic += src.mean_statistic * src.pixel_count;
            dst.peak_statistic = std::max(dst.peak_statistic, src.peak_statistic);
            const int r0 = std::min(dst.bounding_box.row0, src.bounding_box.row0);
            const int c0 = std::min(dst.bounding_box.col0, src.bounding_box.col0);
            const int r1 = std::max(dst.bounding_box.row0 + dst.bounding_box.rows,
                                    src.bounding_box.row0 + src.bounding_box.rows);
            const int c1 = std::max(dst.bounding_box.col0 + dst.bounding_box.cols,
                                    src.bounding_box.col0 + src.bounding_box.cols);
            dst.bounding_box = {r0, c0, r1 - r0, c1 - c0};
            dst.pixel_count += src.pixel_count;
        }
    }
    for (std::size_t i = 0; i < merged.size(); ++i) {
        merged[i].centroid_row /= merged[i].pixel_count;
        merged[i].centroid_col /= merged[i].pixel_count;
        merged[i].mean_statistic /= merged[i].pixel_count;
        merged[i].id = static_cast<int>(i) + 1;
    }
    return merged;
}

namespace detail {

inline PixelDomain domain_for_law(Law law) {
    switch (law) {
        case Law::Linear: return PixelDomain::Magnitude;
        case Law::Square: return PixelDomain::Power;
        case Law::Log: return PixelDomain::LogPower;
    }
    throw std::invalid_argument("unknown law");
}

inline Grid<double> image_grid(const SarImage& img) {
    Grid<double> out(img.height, img.width);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) out(r, c) = img.at(r, c);
    return out;
}

}  // namespace detail

/// Whole-image CFAR detection. The statistic and threshold maps realize the
/// per-pixel decision rules through kernel filtering; the mask is the strict
/// statistic > threshold comparison inside the valid region.
inline DetectionMap run_detection(const SarImage& image, const StencilSpec& stencil,
                                  const DetectorConfig& config,
                                  const EngineOptions& options = {}) {
    config.validate();
    stencil.validate();

    SarImage working = image;
    const PixelDomain want = detail::domain_for_law(config.law);
    if (working.domain != want) {
        if (!options.auto_convert)
            throw DomainMismatch("image domain " + domain_tag(working.domain) +
                                 " does not match detector law " + to_string(config.law));
        working = convert_to(working, want);
    }
    if (stencil.rows() > working.height || stencil.cols() > working.width)
        throw KernelTooLarge("stencil exceeds image dimensions");
    if (config.parameterization == Parameterization::Two && config.strategy != Strategy::CA)
        throw UnsupportedConfig("two-parameter detection is defined for the CA strategy");

    const KernelSet kernels = build_kernels(stencil);
    const int M = stencil.put_count();
    EngineMode mode = options.mode;
    if (mode == EngineMode::Auto)
        mode = stencil.rows() * stencil.cols() > options.fft_crossover_area ? EngineMode::Fft
                                                                            : EngineMode::Spatial;
    if (config.strategy == Strategy::OS) mode = EngineMode::Spatial;  // rank is not linear

    auto conv = [&](const Grid<double>& img, const Grid<double>& k) {
        return mode == EngineMode::Fft ? convolve_fft(img, k, options.border, options.threads)
                                       : convolve_spatial(img, k, options.border, options.threads);
    };

    const Grid<double> pixels = detail::image_grid(working);
    const Rect valid = options.border == BorderPolicy::Reflect
                           ? Rect{0, 0, working.height, working.width}
                           : valid_region(working.height, working.width, stencil.rows(),
                                          stencil.cols());

    DetectionMap out;
    out.valid = valid;
    out.engine_used = mode;

    DetectorConfig alpha_cfg = config;
    alpha_cfg.put_block = M;
    out.alpha = resolve_alpha(stencil, alpha_cfg, options.calibration);

    Grid<double> statistic(working.height, working.width, 0.0);

    if (config.parameterization == Parameterization::Two) {
        LocalStats ls = local_stats(pixels, kernels, mode, options.border, options.threads);
        out.sigma_clamps = ls.negative_clamps;
        const Grid<double> put = conv(pixels, kernels.put_mean);
        const double inv_sqrt_m = std::sqrt(static_cast<double>(M));
        for (int r = valid.row0; r < valid.row0 + valid.rows; ++r)
            for (int c = valid.col0; c < valid.col0 + valid.cols; ++c) {
                const double sigma_eff = ls.sigma(r, c) / inv_sqrt_m;
                if (!(sigma_eff > 0.0)) throw ZeroSigma("zero boundary sigma in valid region");
                statistic(r, c) = (put(r, c) - ls.mu(r, c)) / sigma_eff;
            }
    } else if (config.strategy == Strategy::CA) {
        // The one-parameter log statistic is the log of the linear-domain
        // ratio, so both laws share the linear-domain mean maps.
        const bool log_law = config.law == Law::Log;
        Grid<double> lin = pixels;
        if (log_law)
            for (int r = 0; r < lin.rows(); ++r)
                for (int c = 0; c < lin.cols(); ++c) lin(r, c) = std::exp(lin(r, c));
        const Grid<double> put = conv(lin, kernels.put_mean);
        const Grid<double> bnd = conv(lin, kernels.boundary_mean);
        for (int r = valid.row0; r < valid.row0 + valid.rows; ++r)
            for (int c = valid.col0; c < valid.col0 + valid.cols; ++c) {
                if (!(bnd(r, c) > 0.0))
                    throw NonPositiveBackground("non-positive boundary mean in valid region");
                statistic(r, c) = log_law ? std::log(put(r, c)) - std::log(bnd(r, c))
                                          : put(r, c) / bnd(r, c);
            }
    } else if (config.strategy == Strategy::SOCA || config.strategy == Strategy::GOCA) {
        const bool log_law = config.law == Law::Log;
        Grid<double> lin = pixels;
        if (log_law)
            for (int r = 0; r < lin.rows(); ++r)
                for (int c = 0; c < lin.cols(); ++c) lin(r, c) = std::exp(lin(r, c));
        const Grid<double> put = conv(lin, kernels.put_mean);
        const auto window_kernels = split_window_kernels(stencil);
        std::array<Grid<double>, 4> means;
        for (int i = 0; i < 4; ++i) means[i] = conv(lin, window_kernels[i]);
        const bool smallest = config.strategy == Strategy::SOCA;
        for (int r = valid.row0; r < valid.row0 + valid.rows; ++r)
            for (int c = valid.col0; c < valid.col0 + valid.cols; ++c) {
                double lo = means[0](r, c), hi = means[0](r, c);
                for (int i = 1; i < 4; ++i) {
                    lo = std::min(lo, means[i](r, c));
                    hi = std::max(hi, means[i](r, c));
                }
                if (!(lo > 0.0))
                    throw NonPositiveBackground("non-positive window mean in valid region");
                const double ratio = put(r, c) / (smallest ? lo : hi);
                statistic(r, c) = log_law ? std::log(ratio) : ratio;
            }
    } else {  // OS: direct sliding-rank pass, no convolution form exists
        if (options.border == BorderPolicy::Reflect)
            throw UnsupportedConfig("OS detection supports the valid-border policy only");
        const bool log_law = config.law == Law::Log;
        Grid<double> lin = pixels;
        if (log_law)
            for (int r = 0; r < lin.rows(); ++r)
                for (int c = 0; c < lin.cols(); ++c) lin(r, c) = std::exp(lin(r, c));
        const auto ring = boundary_offsets(stencil);
        const auto put_off = put_offsets(stencil);
        const int k = os_rank(static_cast<int>(ring.size()), config.os_q);
        detail::parallel_rows(valid.row0, valid.row0 + valid.rows, options.threads,
                              [&](int r0, int r1) {
            std::vector<double> window(ring.size());
            for (int r = r0; r < r1; ++r)
                for (int c = valid.col0; c < valid.col0 + valid.cols; ++c) {
                    double put = 0.0;
                    for (auto [dr, dc] : put_off) put += lin(r + dr, c + dc);
                    put /= static_cast<double>(put_off.size());
                    for (std::size_t i = 0; i < ring.size(); ++i)
                        window[i] = lin(r + ring[i].first, c + ring[i].second);
                    std::nth_element(window.begin(), window.begin() + (k - 1), window.end());
                    const double xq = window[k - 1];
                    if (!(xq > 0.0))
                        throw NonPositiveBackground("non-positive order statistic");
                    const double ratio = put / xq;
                    statistic(r, c) = log_law ? std::log(ratio) : ratio;
                }
        });
    }

    out.statistic = std::move(statistic);
    out.threshold = Grid<double>(working.height, working.width, 0.0);
    out.mask = Grid<std::uint8_t>(working.height, working.width, 0);
    for (int r = valid.row0; r < valid.row0 + valid.rows; ++r)
        for (int c = valid.col0; c < valid.col0 + valid.cols; ++c) {
            out.threshold(r, c) = out.alpha;
            out.mask(r, c) = out.statistic(r, c) > out.alpha ? 1 : 0;
        }
    if (options.roi) out.rois = extract_rois(out.mask, out.statistic, *options.roi);
    return out;
}

// ---------------------------------------------------------------------------
// MASK file format: "MASK\n<width> <height>\n" then row-major 0/1 bytes.
// ---------------------------------------------------------------------------

inline void write_mask(const Grid<std::uint8_t>& mask, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open '" + path.string() + "' for writing");
    os << "MASK\n" << mask.cols() << ' ' << mask.rows() << '\n';
    for (std::int64_t i = 0; i < mask.size(); ++i)
        os.put(static_cast<char>(mask.data()[i] ? 1 : 0));
    if (!os) throw FormatError("write failed for '" + path.string() + "'");
}

inline Grid<std::uint8_t> read_mask(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open '" + path.string() + "'");
    std::string magic;
    if (!std::getline(is, magic) || magic != "MASK") throw FormatError("bad magic, expected MASK");
    int w = 0, h = 0;
    std::string header;
    if (!std::getline(is, header)) throw FormatError("missing header line");
    std::istringstream hs(header);
    if (!(hs >> w >> h) || w <= 0 || h <= 0) throw FormatError("malformed MASK header");
    Grid<std::uint8_t> mask(h, w);
    is.read(reinterpret_cast<char*>(mask.data()), mask.size());
    if (is.gcount() != mask.size()) throw SizeMismatch("payload shorter than header promises");
    if (is.peek() != std::char_traits<char>::eof())
        throw SizeMismatch("payload longer than header promises");
    return mask;
}

inline void write_roi_csv(const std::vector<Roi>& rois, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open '" + path.string() + "' for writing");
    os << "id,row,col,pixel_count,peak,mean\n";
    os.precision(10);
    for (const auto& r : rois)
        os << r.id << ',' << r.centroid_row << ',' << r.centroid_col << ',' << r.pixel_count
           << ',' << r.peak_statistic << ',' << r.mean_statistic << '\n';
}

/// Export a real-valued map as an F32R power-tagged raster. Written raw: a
/// statistic map may legitimately hold negative values (two-parameter and
/// log-law statistics), unlike a power image.
inline void store_map_f32r(const Grid<double>& map, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open '" + path.string() + "' for writing");
    os << "F32R\n" << map.cols() << ' ' << map.rows() << " 1 pow\n";
    for (std::int64_t i = 0; i < map.size(); ++i)
        detail::put_f32_le(os, static_cast<float>(map.data()[i]));
    if (!os) throw FormatError("write failed for '" + path.string() + "'");
}

}  // namespace cfarkit

#endif  // CFARKIT_ENGINE_HPP
