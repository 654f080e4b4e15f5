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

// Command-line front door: detect, simulate, alpha, loss, fit, bench.
// Exit codes: 0 success, 2 usage error, 3 data/processing error.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfarkit/cfarkit.hpp"

namespace fs = std::filesystem;
using namespace cfarkit;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

StencilSpec parse_stencil_flags(const std::string& put, int guard, int boundary) {
    const auto x = put.find('x');
    if (x == std::string::npos) throw UsageError("--put expects RxC, e.g. 3x3");
    StencilSpec spec;
    try {
        spec.put_rows = std::stoi(put.substr(0, x));
        spec.put_cols = std::stoi(put.substr(x + 1));
    } catch (const std::exception&) {
        throw UsageError("--put expects RxC, e.g. 3x3");
    }
    spec.guard_width = guard;
    spec.boundary_width = boundary;
    spec.validate();
    return spec;
}

/// "RxC:guard:boundary" form used by list-valued bench flags.
StencilSpec parse_stencil_compact(const std::string& text) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw UsageError("stencil expects RxC:guard:boundary, e.g. 3x3:1:2");
    return parse_stencil_flags(text.substr(0, c1),
                               std::stoi(text.substr(c1 + 1, c2 - c1 - 1)),
                               std::stoi(text.substr(c2 + 1)));
}

Strategy parse_strategy(const std::string& name) {
    if (name == "ca") return Strategy::CA;
    if (name == "soca") return Strategy::SOCA;
    if (name == "goca") return Strategy::GOCA;
    if (name == "os") return Strategy::OS;
    throw UsageError("unknown method '" + name + "' (ca|soca|goca|os)");
}

Law parse_law(const std::string& name) {
    if (name == "linear") return Law::Linear;
    if (name == "square") return Law::Square;
    if (name == "log") return Law::Log;
    throw UsageError("unknown law '" + name + "' (linear|square|log)");
}

EngineMode parse_engine(const std::string& name) {
    if (name == "spatial") return EngineMode::Spatial;
    if (name == "fft") return EngineMode::Fft;
    if (name == "auto") return EngineMode::Auto;
    throw UsageError("unknown engine '" + name + "' (spatial|fft|auto)");
}

std::vector<TargetSpec> parse_targets(const std::string& text) {
    std::vector<TargetSpec> out;
    if (text.empty()) return out;
    std::istringstream groups(text);
    std::string group;
    while (std::getline(groups, group, ';')) {
        TargetSpec t;
        if (std::sscanf(group.c_str(), "%d,%d,%d,%d,%lf", &t.row, &t.col, &t.extent_rows,
                        &t.extent_cols, &t.multiplier) != 5)
            throw UsageError("--targets expects row,col,rows,cols,mult[;...]");
        out.push_back(t);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw UsageError(std::string(flag) + " expects a comma-separated number list");
        }
    }
    if (out.empty()) throw UsageError(std::string(flag) + " expects at least one value");
    return out;
}

void check_pfa(double pfa) {
    if (!(pfa > 0.0 && pfa < 1.0)) throw UsageError("pfa must be in (0,1)");
}

/// Key=value config merge, one pair per line, '#' comments. File values are
/// appended only for flags absent from the command line, so precedence is
/// defaults < config file < flags.
std::vector<std::string> merge_config_args(std::vector<std::string> args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        }
    }
    if (config_path.empty()) return args;
    std::ifstream is(config_path);
    if (!is) throw UsageError("cannot open config file '" + config_path + "'");
    auto flag_present = [&](const std::string& flag) {
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line is not key=value: '" + line + "'");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (!flag_present("--" + key)) {
            args.push_back("--" + key);
            if (!value.empty()) args.push_back(value);
        }
    }
    return args;
}

// ---- subcommand option bags -------------------------------------------------

struct DetectArgs {
    std::string input, put = "1x1";
    int guard = 0, boundary = 1;
    std::string method = "ca", params = "one", law = "square", engine = "auto",
                border = "valid";
    double os_q = 0.75;
    double pfa = 1e-3;
    std::string background = "exp:mean=1";
    bool auto_convert = false;
    int threads = 0;
    std::string out_mask, out_roi, out_statistic, out_threshold, preview;
    std::int64_t roi_min_size = 1;
    std::int64_t roi_max_size = std::numeric_limits<std::int64_t>::max();
    double roi_min_sep = 0.0;
};

int cmd_detect(const DetectArgs& a, bool alpha_given, double alpha_value) {
    const StencilSpec stencil = parse_stencil_flags(a.put, a.guard, a.boundary);
    DetectorConfig cfg;
    cfg.strategy = parse_strategy(a.method);
    cfg.os_q = a.os_q;
    if (a.params != "one" && a.params != "two") throw UsageError("--params expects one|two");
    cfg.parameterization = a.params == "two" ? Parameterization::Two : Parameterization::One;
    cfg.law = parse_law(a.law);
    if (alpha_given)
        cfg.alpha_override = alpha_value;
    else
        check_pfa(a.pfa);
    cfg.pfa = a.pfa;
    cfg.background_family = instantiate(parse_family_spec(a.background));

    EngineOptions opt;
    opt.mode = parse_engine(a.engine);
    opt.threads = a.threads;
    opt.auto_convert = a.auto_convert;
    if (a.border == "reflect")
        opt.border = BorderPolicy::Reflect;
    else if (a.border != "valid")
        throw UsageError("--border expects valid|reflect");
    if (!a.out_roi.empty()) opt.roi = RoiParams{a.roi_min_size, a.roi_max_size, a.roi_min_sep};

    const SarImage image = load_raster(a.input);
    const DetectionMap map = run_detection(image, stencil, cfg, opt);

    write_mask(map.mask, a.out_mask);
    if (!a.out_roi.empty()) write_roi_csv(map.rois, a.out_roi);
    if (!a.out_statistic.empty()) store_map_f32r(map.statistic, a.out_statistic);
    if (!a.out_threshold.empty()) store_map_f32r(map.threshold, a.out_threshold);
    if (!a.preview.empty()) write_pgm_preview(image, a.preview);

    std::int64_t detections = 0;
    for (std::int64_t i = 0; i < map.mask.size(); ++i) detections += map.mask.data()[i];
    std::printf("alpha=%.6f engine=%s valid=%dx%d detections=%lld\n", map.alpha,
                map.engine_used == EngineMode::Fft ? "fft" : "spatial", map.valid.cols,
                map.valid.rows, static_cast<long long>(detections));
    return 0;
}

struct SimulateArgs {
    std::string out, truth, preview;
    int width = 0, height = 0, looks = 1;
    std::string background = "homog:c=1";
    std::string targets;
    std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateArgs& a) {
    SceneSpec spec;
    spec.width = a.width;
    spec.height = a.height;
    spec.looks = a.looks;
    spec.background = parse_background_spec(a.background);
    spec.targets = parse_targets(a.targets);
    spec.seed = a.seed;
    spec.validate();
    auto [img, truth] = gen_scene(spec);
    store_raster(img, a.out);
    if (!a.truth.empty()) write_mask(truth.mask, a.truth);
    if (!a.preview.empty()) write_pgm_preview(img, a.preview);
    std::printf("scene %dx%d looks=%d seed=%llu written to %s\n", spec.width, spec.height,
                spec.looks, static_cast<unsigned long long>(spec.seed), a.out.c_str());
    return 0;
}

struct AlphaArgs {
    std::string model = "exp:mean=1";
    std::string strategy = "ca";
    int n = 0, m = 1;
    double pfa = 0.0, q = 0.75;
    int trials = 400000;
};

int cmd_alpha(const AlphaArgs& a) {
    check_pfa(a.pfa);
    if (a.n < 1) throw UsageError("--n must be >= 1");
    const FamilySpec family = parse_family_spec(a.model);
    const Strategy strategy = parse_strategy(a.strategy);
    double alpha;
    if (strategy == Strategy::CA && family.family == Family::Exponential) {
        alpha = alpha_ca_exponential_block(a.n, a.m, a.pfa);
    } else if (strategy == Strategy::CA || strategy == Strategy::OS) {
        const ClutterModel bg = instantiate(family);
        alpha = calibrate_alpha_counts(strategy, a.pfa, a.n, a.m, {0, 0, 0, 0},
                                       os_rank(a.n, a.q), bg, {a.trials, 0xCA11B8A7Eull});
    } else {
        throw UsageError("alpha supports --strategy ca|os; use bench for split windows");
    }
    std::printf("%.4f\n", alpha);
    return 0;
}

struct LossArgs {
    std::string method = "ca", law = "square";
    double pfa = 0.0;
    int m = 0;
};

int cmd_loss(const LossArgs& a) {
    check_pfa(a.pfa);
    if (a.m < 1) throw UsageError("--m must be >= 1");
    const double x = chi(a.pfa);
    const double k = k_lookup(parse_strategy(a.method), parse_law(a.law));
    const double m_eff = effective_reference_count(a.m, k);
    std::printf("chi=%.6g\nk=%.6g\nm_eff=%.6g\nratio=%.6g\nn_log=%d\n", x, k, m_eff,
                cfar_ratio(x, m_eff), log_detector_boundary(a.m));
    return 0;
}

struct FitArgs {
    std::string input;
    std::string candidates = "exp,weibull,lognormal";
    std::string stat = "cvm";
    std::int64_t max_samples = 0;  // 0 = all pixels
};

int cmd_fit(const FitArgs& a) {
    const SarImage img = load_raster(a.input);
    std::vector<double> samples(img.pixels.begin(), img.pixels.end());
    if (a.max_samples > 0 && static_cast<std::int64_t>(samples.size()) > a.max_samples) {
        // deterministic thinning keeps the subset reproducible
        const std::size_t stride = samples.size() / a.max_samples;
        std::vector<double> thin;
        for (std::size_t i = 0; i < samples.size(); i += stride) thin.push_back(samples[i]);
        samples = std::move(thin);
    }
    std::vector<FamilySpec> specs;
    std::istringstream is(a.candidates);
    std::string item;
    while (std::getline(is, item, ',')) specs.push_back(parse_family_spec(item));
    GofStatistic stat = GofStatistic::Cvm;
    if (a.stat == "ad")
        stat = GofStatistic::AndersonDarling;
    else if (a.stat != "cvm")
        throw UsageError("--stat expects cvm|ad");

    const auto ranked = select_model(samples, specs, stat);
    int rank = 1;
    for (const auto& ms : ranked) {
        if (ms.fitted)
            std::printf("%d %s %.8g\n", rank, ms.spec_text.c_str(), ms.score);
        else
            std::printf("- %s fit-failed: %s\n", ms.spec_text.c_str(), ms.error.c_str());
        ++rank;
    }
    return 0;
}

struct BenchArgs {
    std::string mode = "calibration";
    std::string stencils = "3x3:1:2";
    std::string methods = "ca";
    std::string law = "square";
    std::string pfas = "1e-2,1e-3";
    std::string alphas = "1,2,4,8";
    std::string background = "homog:c=1";
    std::string targets;
    int width = 512, height = 512, looks = 1, trials = 1, guard_dilation = 2;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    int threads = 0;
};

int cmd_bench(const BenchArgs& a) {
    SceneSpec scene;
    scene.width = a.width;
    scene.height = a.height;
    scene.looks = a.looks;
    scene.background = parse_background_spec(a.background);
    scene.seed = a.seed;
    EngineOptions opt;
    opt.threads = a.threads;

    fs::create_directories(a.out_dir);
    ExperimentReport report;
    if (a.mode == "calibration") {
        std::vector<StencilSpec> stencils;
        std::istringstream is(a.stencils);
        std::string item;
        while (std::getline(is, item, ',')) stencils.push_back(parse_stencil_compact(item));
        std::vector<DetectorConfig> configs;
        std::istringstream ms(a.methods);
        while (std::getline(ms, item, ',')) {
            DetectorConfig cfg;
            cfg.strategy = parse_strategy(item);
            cfg.law = parse_law(a.law);
            configs.push_back(cfg);
        }
        report = calibration_sweep(stencils, configs, parse_double_list(a.pfas, "--pfas"),
                                   scene, a.trials, opt);
    } else if (a.mode == "roc") {
        scene.targets = parse_targets(a.targets);
        if (scene.targets.empty()) throw UsageError("--mode roc needs --targets");
        DetectorConfig cfg;
        cfg.strategy = parse_strategy(a.methods);
        cfg.law = parse_law(a.law);
        report = roc_points(scene, parse_stencil_compact(a.stencils), cfg,
                            parse_double_list(a.alphas, "--alphas"), opt, a.guard_dilation);
    } else {
        throw UsageError("--mode expects calibration|roc");
    }
    report.write_csv(fs::path(a.out_dir) / "report.csv");
    report.write_summary(fs::path(a.out_dir) / "summary.txt");
    std::printf("report written to %s\n", a.out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cfarkit: sliding-window CFAR detection toolkit for SAR rasters"};
    app.require_subcommand(1);

    DetectArgs det;
    bool det_alpha_given = false;
    double det_alpha_value = 0.0;
    auto* detect = app.add_subcommand("detect", "run CFAR detection over an F32R raster");
    std::string det_config;
    detect->add_option("--config", det_config, "key=value config file (flags win)");
    detect->add_option("--input", det.input, "input F32R raster")->required();
    detect->add_option("--put", det.put, "PUT block as RxC (odd)");
    detect->add_option("--guard", det.guard, "guard ring width");
    detect->add_option("--boundary", det.boundary, "boundary ring width");
    detect->add_option("--method", det.method, "ca|soca|goca|os");
    detect->add_option("--os-q", det.os_q, "order-statistic fraction in (0,1]");
    detect->add_option("--params", det.params, "one|two");
    detect->add_option("--law", det.law, "linear|square|log");
    auto* pfa_opt =
        detect->add_option("--pfa", det.pfa, "requested probability of false alarm");
    auto* alpha_opt = detect->add_option_function<double>(
        "--alpha",
        [&](double v) {
            det_alpha_value = v;
            det_alpha_given = true;
        },
        "threshold scaling factor override");
    pfa_opt->excludes(alpha_opt);
    alpha_opt->excludes(pfa_opt);
    detect->add_option("--background", det.background, "background model spec");
    detect->add_option("--engine", det.engine, "spatial|fft|auto");
    detect->add_option("--border", det.border, "valid|reflect");
    detect->add_flag("--auto-convert", det.auto_convert, "convert input domain to the law");
    detect->add_option("--threads", det.threads, "worker threads (0 = cores)")
        ->envname("CFARKIT_THREADS");
    detect->add_option("--out-mask", det.out_mask, "output MASK file")->required();
    detect->add_option("--out-roi", det.out_roi, "output ROI CSV");
    detect->add_option("--roi-min-size", det.roi_min_size, "drop smaller components");
    detect->add_option("--roi-max-size", det.roi_max_size, "drop larger components");
    detect->add_option("--roi-min-sep", det.roi_min_sep, "merge centroids closer than this");
    detect->add_option("--out-statistic", det.out_statistic, "statistic map as F32R");
    detect->add_option("--out-threshold", det.out_threshold, "threshold map as F32R");
    detect->add_option("--preview", det.preview, "8-bit dB preview PGM of the input");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "generate a ground-truthed clutter scene");
    std::string sim_config;
    simulate->add_option("--config", sim_config, "key=value config file (flags win)");
    simulate->add_option("--out", sim.out, "output F32R raster")->required();
    simulate->add_option("--truth", sim.truth, "output truth MASK file");
    simulate->add_option("--width", sim.width, "scene width")->required();
    simulate->add_option("--height", sim.height, "scene height")->required();
    simulate->add_option("--looks", sim.looks, "look count");
    simulate->add_option("--background", sim.background,
                         "homog:c=|hetero:shape=,rate=|exthetero:shape=,gamma=");
    simulate->add_option("--targets", sim.targets, "row,col,rows,cols,mult[;...]");
    simulate->add_option("--seed", sim.seed, "rng seed (required: no entropy default)")
        ->required();
    simulate->add_option("--preview", sim.preview, "8-bit dB preview PGM");

    AlphaArgs alp;
    auto* alpha = app.add_subcommand("alpha", "threshold scaling factor for a configuration");
    std::string alpha_config;
    alpha->add_option("--config", alpha_config, "key=value config file (flags win)");
    alpha->add_option("--model", alp.model, "background model spec");
    alpha->add_option("--strategy", alp.strategy, "ca|os");
    alpha->add_option("--n", alp.n, "boundary reference pixel count")->required();
    alpha->add_option("--m", alp.m, "PUT pixel count");
    alpha->add_option("--pfa", alp.pfa, "requested probability of false alarm")->required();
    alpha->add_option("--q", alp.q, "order-statistic fraction");
    alpha->add_option("--trials", alp.trials, "Monte Carlo calibration trials");

    LossArgs los;
    auto* loss = app.add_subcommand("loss", "CFAR-loss bookkeeping for a configuration");
    std::string loss_config;
    loss->add_option("--config", loss_config, "key=value config file (flags win)");
    loss->add_option("--method", los.method, "ca|goca");
    loss->add_option("--law", los.law, "square|linear|log");
    loss->add_option("--pfa", los.pfa, "probability of false alarm")->required();
    loss->add_option("--m", los.m, "boundary reference pixel count")->required();

    FitArgs fit;
    auto* fitcmd = app.add_subcommand("fit", "rank clutter models against raster pixels");
    std::string fit_config;
    fitcmd->add_option("--config", fit_config, "key=value config file (flags win)");
    fitcmd->add_option("--input", fit.input, "input F32R raster")->required();
    fitcmd->add_option("--candidates", fit.candidates, "comma list of family specs");
    fitcmd->add_option("--stat", fit.stat, "cvm|ad");
    fitcmd->add_option("--max-samples", fit.max_samples, "thin to at most this many pixels");

    BenchArgs ben;
    auto* bench = app.add_subcommand("bench", "calibration and ROC experiment reports");
    std::string bench_config;
    bench->add_option("--config", bench_config, "key=value config file (flags win)");
    bench->add_option("--mode", ben.mode, "calibration|roc");
    bench->add_option("--stencils", ben.stencils, "RxC:guard:boundary[,...]");
    bench->add_option("--methods", ben.methods, "ca|soca|goca|os[,...]");
    bench->add_option("--law", ben.law, "linear|square|log");
    bench->add_option("--pfas", ben.pfas, "comma list of pfa values");
    bench->add_option("--alphas", ben.alphas, "comma list of alpha values (roc)");
    bench->add_option("--background", ben.background, "scene background spec");
    bench->add_option("--targets", ben.targets, "targets for roc mode");
    bench->add_option("--width", ben.width, "scene width");
    bench->add_option("--height", ben.height, "scene height");
    bench->add_option("--looks", ben.looks, "look count");
    bench->add_option("--trials", ben.trials, "scenes per calibration cell");
    bench->add_option("--guard-dilation", ben.guard_dilation,
                      "truth dilation for pfa counting");
    bench->add_option("--seed", ben.seed, "rng seed (required: no entropy default)")
        ->required();
    bench->add_option("--out-dir", ben.out_dir, "report output directory");
    bench->add_option("--threads", ben.threads, "worker threads (0 = cores)")
        ->envname("CFARKIT_THREADS");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = merge_config_args(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (detect->parsed()) return cmd_detect(det, det_alpha_given, det_alpha_value);
        if (simulate->parsed()) return cmd_simulate(sim);
        if (alpha->parsed()) return cmd_alpha(alp);
        if (loss->parsed()) return cmd_loss(los);
        if (fitcmd->parsed()) return cmd_fit(fit);
        if (bench->parsed()) return cmd_bench(ben);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const InvalidPfa& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
