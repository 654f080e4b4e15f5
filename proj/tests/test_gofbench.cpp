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

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfarkit/gofbench.hpp"

using namespace cfarkit;
namespace fs = std::filesystem;

namespace {

SceneSpec small_scene(std::uint64_t seed) {
    SceneSpec s;
    s.width = 256;
    s.height = 256;
    s.looks = 1;
    s.background = Homogeneous{1.0};
    s.seed = seed;
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("calibration sweep") {
    const SceneSpec scene = small_scene(9001);
    DetectorConfig cfg;  // CA square-law, exponential background

    SECTION("zero trials gives an empty report") {
        const auto report = calibration_sweep({{1, 1, 1, 1}}, {cfg}, {1e-2}, scene, 0);
        REQUIRE(report.calibration.empty());
    }
    SECTION("achieved pfa sits inside the binomial band") {
        const auto report = calibration_sweep({{1, 1, 1, 2}}, {cfg}, {1e-2}, scene, 2);
        REQUIRE(report.calibration.size() == 1);
        const auto& cell = report.calibration[0];
        REQUIRE_FALSE(cell.failed);
        REQUIRE(cell.valid_pixels > 100'000);
        REQUIRE(cell.within_3sigma);
        REQUIRE(cell.seed != 0);
        REQUIRE(cell.runtime_s > 0.0);
    }
    SECTION("cell failures are recorded, not fatal") {
        DetectorConfig bad = cfg;
        bad.parameterization = Parameterization::Two;
        bad.strategy = Strategy::GOCA;  // unsupported combination
        const auto report = calibration_sweep({{1, 1, 1, 1}}, {bad}, {1e-2}, scene, 1);
        REQUIRE(report.calibration.size() == 1);
        REQUIRE(report.calibration[0].failed);
        REQUIRE_FALSE(report.calibration[0].error.empty());
    }
    SECTION("reports are deterministic and recomputable") {
        const auto a = calibration_sweep({{1, 1, 1, 1}}, {cfg}, {1e-2}, scene, 1);
        const auto b = calibration_sweep({{1, 1, 1, 1}}, {cfg}, {1e-2}, scene, 1);
        REQUIRE(a.calibration[0].achieved_pfa == b.calibration[0].achieved_pfa);
        REQUIRE(a.calibration[0].seed == b.calibration[0].seed);
    }
}

TEST_CASE("roc sweep") {
    SceneSpec scene = small_scene(9002);
    scene.targets = {{100, 100, 6, 6, 12.0}, {180, 60, 6, 6, 12.0}};
    const StencilSpec stencil{1, 1, 2, 2};
    DetectorConfig cfg;
    cfg.pfa = 1e-2;

    std::vector<double> alphas = {0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 1e9};
    const auto report = roc_points(scene, stencil, cfg, alphas, {}, 4);
    REQUIRE(report.roc.size() == alphas.size());

    SECTION("alpha 0 detects everything; huge alpha detects nothing") {
        REQUIRE(report.roc.front().pd == Catch::Approx(1.0));
        REQUIRE(report.roc.front().pfa == Catch::Approx(1.0));
        REQUIRE(report.roc.back().pd == Catch::Approx(0.0));
        REQUIRE(report.roc.back().pfa == Catch::Approx(0.0));
    }
    SECTION("both coordinates are monotone nonincreasing in alpha") {
        for (std::size_t i = 1; i < report.roc.size(); ++i) {
            REQUIRE(report.roc[i].pfa <= report.roc[i - 1].pfa);
            REQUIRE(report.roc[i].pd <= report.roc[i - 1].pd);
        }
    }
    SECTION("needs a target") {
        REQUIRE_THROWS_AS(roc_points(small_scene(1), stencil, cfg, alphas),
                          std::invalid_argument);
    }
}

TEST_CASE("report files") {
    const fs::path dir = fs::temp_directory_path() / "cfarkit_bench_tests";
    fs::create_directories(dir);
    const SceneSpec scene = small_scene(9003);
    DetectorConfig cfg;
    const auto report = calibration_sweep({{1, 1, 1, 1}}, {cfg}, {1e-2}, scene, 1);

    report.write_csv(dir / "report.csv");
    report.write_summary(dir / "summary.txt");

    const std::string csv = slurp(dir / "report.csv");
    REQUIRE(csv.find("stencil,strategy,law,requested_pfa") == 0);
    REQUIRE(csv.find("1x1/g1/b1") != std::string::npos);

    const std::string summary = slurp(dir / "summary.txt");
    REQUIRE(summary.find("calibration_sweep") != std::string::npos);
    REQUIRE(summary.find("PASS") != std::string::npos);
    REQUIRE(summary.find("pass 1 / 1") != std::string::npos);

    SECTION("csv bytes are identical across runs") {
        const auto again = calibration_sweep({{1, 1, 1, 1}}, {cfg}, {1e-2}, scene, 1);
        again.write_csv(dir / "report2.csv");
        // runtime column differs run to run; compare everything else
        auto strip_runtime = [](std::string text) {
            std::istringstream is(text);
            std::string line, out;
            while (std::getline(is, line)) {
                // runtime_s is the 11th comma-separated field
                int commas = 0;
                std::string kept;
                std::string field;
                std::istringstream ls(line);
                while (std::getline(ls, field, ',')) {
                    if (commas != 10) kept += field + ",";
                    ++commas;
                }
                out += kept + "\n";
            }
            return out;
        };
        REQUIRE(strip_runtime(slurp(dir / "report.csv")) ==
                strip_runtime(slurp(dir / "report2.csv")));
    }
}
