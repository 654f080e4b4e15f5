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

#ifndef CFARKIT_GOFBENCH_HPP
#define CFARKIT_GOFBENCH_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cfarkit/engine.hpp"
#include "cfarkit/simulator.hpp"

namespace cfarkit {

// Reproducible experiment driver. Every row carries the exact seed and
// sample counts it was computed from, so any number in a report can be
// recomputed from the echoed configuration.

struct CalibrationCell {
    std::string stencil;
    std::string strategy;
    std::string law;
    double requested_pfa = 0.0;
    double achieved_pfa = 0.0;
    double binomial_sigma = 0.0;
    std::int64_t valid_pixels = 0;
    std::int64_t false_alarms = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    double runtime_s = 0.0;
    bool within_3sigma = false;
    bool failed = false;
    std::string error;
};

struct RocPoint {
    double alpha = 0.0;
    double pfa = 0.0;
    double pd = 0.0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
};

struct ExperimentReport {
    std::string id;
    std::string config_echo;
    std::vector<CalibrationCell> calibration;
    std::vector<RocPoint> roc;

    void write_csv(const std::filesystem::path& path) const {
        std::ofstream os(path);
        if (!os) throw FormatError("cannot open '" + path.string() + "' for writing");
        os.precision(10);
        if (!calibration.empty()) {
            os << "stencil,strategy,law,requested_pfa,achieved_pfa,binomial_sigma,"
                  "valid_pixels,false_alarms,trials,seed,runtime_s,within_3sigma,error\n";
            for (const auto& c : calibration)
                os << c.stencil << ',' << c.strategy << ',' << c.law << ',' << c.requested_pfa
                   << ',' << c.achieved_pfa << ',' << c.binomial_sigma << ',' << c.valid_pixels
                   << ',' << c.false_alarms << ',' << c.trials << ',' << c.seed << ','
                   << c.runtime_s << ',' << (c.within_3sigma ? 1 : 0) << ',' << c.error << '\n';
        } else {
            os << "alpha,pfa,pd,seed,error\n";
            for (const auto& p : roc)
                os << p.alpha << ',' << p.pfa << ',' << p.pd << ',' << p.seed << ',' << p.error
                   << '\n';
        }
    }

    void write_summary(const std::filesystem::path& path) const {
        std::ofstream os(path);
        if (!os) throw FormatError("cannot open '" + path.string() + "' for writing");
        os << "experiment: " << id << "\n" << config_echo << "\n";
        int pass = 0, fail = 0;
        for (const auto& c : calibration) {
            const bool ok = !c.failed && c.within_3sigma;
            (ok ? pass : fail)++;
            os << (ok ? "PASS " : "FAIL ") << c.stencil << ' ' << c.strategy << '/' << c.law
               << " pfa=" << c.requested_pfa << " achieved=" << c.achieved_pfa << " (3sigma band +-"
               << 3.0 * c.binomial_sigma << ")";
            if (c.failed) os << " error: " << c.error;
            os << '\n';
        }
        if (!roc.empty()) os << "roc points: " << roc.size() << '\n';
        if (!calibration.empty()) os << "pass " << pass << " / " << (pass + fail) << '\n';
    }
};

/// Requested-versus-achieved PFA over homogeneous scenes. Cell order follows
/// the configuration order regardless of execution order.
inline ExperimentReport calibration_sweep(const std::vector<StencilSpec>& stencils,
                                          const std::vector<DetectorConfig>& configs,
                                          const std::vector<double>& pfas,
                                          const SceneSpec& scene, int trials,
                                          const EngineOptions& options = {}) {
    ExperimentReport report;
    report.id = "calibration_sweep";
    {
        std::ostringstream echo;
        echo << "scene " << scene.width << 'x' << scene.height << " looks=" << scene.looks
             << " seed=" << scene.seed << " trials=" << trials;
        report.config_echo = echo.str();
    }
    if (trials <= 0) return report;

    std::uint64_t cell_index = 0;
    for (const auto& stencil : stencils)
        for (const auto& base_cfg : configs)
            for (double pfa : pfas) {
                CalibrationCell cell;
                cell.stencil = stencil.describe();
                cell.strategy = to_string(base_cfg.strategy);
                cell.law = to_string(base_cfg.law);
                cell.requested_pfa = pfa;
                cell.trials = trials;
                cell.seed = mix64(scene.seed + kRngGamma * ++cell_index);
                const auto t0 = std::chrono::steady_clock::now();
                try {
                    DetectorConfig cfg = base_cfg;
                    cfg.pfa = pfa;
                    std::int64_t alarms = 0, pixels = 0;
                    for (int t = 0; t < trials; ++t) {
                        SceneSpec s = scene;
                        s.targets.clear();
                        s.seed = mix64(cell.seed + kRngGamma * static_cast<std::uint64_t>(t));
                        auto [img, truth] = gen_scene(s);
                        const DetectionMap map = run_detection(img, stencil, cfg, options);
                        const Rates rates = measure_rates(map.mask, truth, 0, map.valid);
                        alarms += rates.false_alarms;
                        pixels += rates.clutter_pixels;
                    }
                    cell.false_alarms = alarms;
                    cell.valid_pixels = pixels;
                    cell.achieved_pfa = pixels ? double(alarms) / pixels : 0.0;
                    cell.binomial_sigma = pixels ? std::sqrt(pfa * (1.0 - pfa) / pixels) : 0.0;
                    cell.within_3sigma =
                        std::abs(cell.achieved_pfa - pfa) <= 3.0 * cell.binomial_sigma;
                } catch (const std::exception& e) {
                    cell.failed = true;
                    cell.error = e.what();
                }
                cell.runtime_s = std::chrono::duration<double>(
                                     std::chrono::steady_clock::now() - t0)
                                     .count();
                report.calibration.push_back(std::move(cell));
            }
    return report;
}

/// Empirical (PFA, PD) pairs as the threshold scaling factor sweeps a grid.
inline ExperimentReport roc_points(const SceneSpec& scene, const StencilSpec& stencil,
                                   const DetectorConfig& base_cfg,
                                   const std::vector<double>& alpha_grid,
                                   const EngineOptions& options = {}, int guard_dilation = 0) {
    if (scene.targets.empty())
        throw std::invalid_argument("roc_points needs a scene with at least one target");
    ExperimentReport report;
    report.id = "roc_points";
    {
        std::ostringstream echo;
        echo << "scene " << scene.width << 'x' << scene.height << " looks=" << scene.looks
             << " seed=" << scene.seed << " targets=" << scene.targets.size()
             << " stencil=" << stencil.describe();
        report.config_echo = echo.str();
    }
    auto [img, truth] = gen_scene(scene);
    // One detection pass produces the statistic map; each grid point is a
    // re-threshold of that map, which also makes the sweep monotone by
    // construction.
    const DetectionMap map = run_detection(img, stencil, base_cfg, options);
    for (double alpha : alpha_grid) {
        RocPoint p;
        p.alpha = alpha;
        p.seed = scene.seed;
        try {
            Grid<std::uint8_t> mask(map.mask.rows(), map.mask.cols(), 0);
            for (int r = map.valid.row0; r < map.valid.row0 + map.valid.rows; ++r)
                for (int c = map.valid.col0; c < map.valid.col0 + map.valid.cols; ++c)
                    mask(r, c) = map.statistic(r, c) > alpha ? 1 : 0;
            const Rates rates = measure_rates(mask, truth, guard_dilation, map.valid);
            p.pfa = rates.pfa;
            p.pd = rates.pd;
        } catch (const std::exception& e) {
            p.failed = true;
            p.error = e.what();
        }
        report.roc.push_back(p);
    }
    return report;
}

}  // namespace cfarkit

#endif  // CFARKIT_GOFBENCH_HPP
