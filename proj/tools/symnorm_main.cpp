// symnorm: turnstile-stream symmetric-norm estimation toolkit.
//
// Subcommands: profile, levels, estimate, tradeoff, bench, accept.
// The SYMNORM_SEED environment variable overrides any --seed flag.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "symnorm/acceptance.hpp"
#include "symnorm/concentration.hpp"
#include "symnorm/estimator.hpp"
#include "symnorm/experiment.hpp"
#include "symnorm/generators.hpp"
#include "symnorm/seeds.hpp"

using nlohmann::json;
using namespace symnorm;

namespace {

json parse_json_arg(const std::string& arg) {
    if (!arg.empty() && arg[0] == '@') {
        std::ifstream f(arg.substr(1));
        if (!f) throw std::runtime_error("cannot open " + arg.substr(1));
        return json::parse(f);
    }
    return json::parse(arg);
}

uint64_t apply_seed_env(uint64_t seed) {
    if (const char* env = std::getenv("SYMNORM_SEED")) return std::strtoull(env, nullptr, 10);
    return seed;
}

void write_output(const std::string& path, const json& doc) {
    if (path.empty() || path == "-") {
        std::cout << doc.dump(2) << "\n";
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << doc.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symmetric-norm streaming toolkit"};
    app.require_subcommand(1);

    // profile ---------------------------------------------------------------
    auto* profile = app.add_subcommand("profile", "Monte-Carlo concentration profile");
    std::string p_norm, p_out;
    size_t p_n = 1024, p_samples = 4000, p_grid = 0;
    uint64_t p_seed = 1;
    int p_threads = 0;
    profile->add_option("--norm", p_norm, "norm JSON (or @file)")->required();
    profile->add_option("--n", p_n, "ambient dimension");
    profile->add_option("--samples", p_samples, "sphere samples per grid point");
    profile->add_option("--grid", p_grid, "grid points (0 = ratio-2)");
    profile->add_option("--seed", p_seed, "root seed");
    profile->add_option("--threads", p_threads, "worker threads (0 = auto)");
    profile->add_option("--out", p_out, "output file (default stdout)");

    // levels ----------------------------------------------------------------
    auto* levels = app.add_subcommand("levels", "level-vector estimation");
    std::string l_stream, l_out, l_lab;
    double l_gamma = 0.5, l_beta = 0.01, l_eps = 0.2, l_delta = 0.01;
    double l_x = -1.0;
    int l_passes = 1;
    size_t l_n = 0;
    uint64_t l_m = 0, l_seed = 1;
    levels->add_option("--stream", l_stream, "stream file")->required();
    levels->add_option("--n", l_n, "dimension")->required();
    levels->add_option("--m", l_m, "magnitude bound (0 = n^3)");
    levels->add_option("--alpha-gamma", l_gamma, "base parameter gamma");
    levels->add_option("--beta", l_beta, "importance parameter");
    levels->add_option("--eps", l_eps, "precision");
    levels->add_option("--delta", l_delta, "failure budget");
    levels->add_option("--passes", l_passes, "1 or 2");
    levels->add_option("--x", l_x, "fixed boundary draw in [1/2,1] (one-pass)");
    levels->add_option("--seed", l_seed, "root seed");
    levels->add_option("--lab", l_lab, "lab-scale JSON (or @file)");
    levels->add_option("--out", l_out, "output file");

    // estimate ----------------------------------------------------------------
    auto* estimate = app.add_subcommand("estimate", "(1 +/- eps) norm estimate");
    std::string e_stream, e_norm, e_out, e_lab, e_profile;
    double e_eps = 0.2, e_delta = 0.0, e_mmc = 0.0, e_x = -1.0;
    double e_c1 = 1.0, e_c2 = 1.0, e_c3 = 1.0;
    bool e_oracle = false;
    size_t e_n = 0;
    uint64_t e_m = 0, e_seed = 1;
    estimate->add_option("--stream", e_stream, "stream file")->required();
    estimate->add_option("--norm", e_norm, "norm JSON (or @file)")->required();
    estimate->add_option("--n", e_n, "dimension")->required();
    estimate->add_option("--m", e_m, "magnitude bound (0 = n^3)");
    estimate->add_option("--eps", e_eps, "target accuracy");
    estimate->add_option("--delta", e_delta, "failure budget (0 = 0.01*eps/n)");
    estimate->add_option("--mmc", e_mmc, "mmc bound (skips profiling)");
    estimate->add_option("--profile", e_profile, "profile JSON file for mmc");
    estimate->add_option("--c1", e_c1, "eps' constant");
    estimate->add_option("--c2", e_c2, "beta' constant");
    estimate->add_option("--c3", e_c3, "gamma constant");
    estimate->add_option("--x", e_x, "fixed boundary draw");
    estimate->add_flag("--oracle", e_oracle, "also compute the exact norm");
    estimate->add_option("--seed", e_seed, "root seed");
    estimate->add_option("--lab-scale", e_lab, "lab-scale JSON (or @file)");
    estimate->add_option("--out", e_out, "output file");

    // tradeoff ----------------------------------------------------------------
    auto* tradeoff = app.add_subcommand("tradeoff", "D-approximation estimate");
    std::string t_stream, t_norm, t_out, t_lab;
    double t_D = 4.0, t_eps = 0.3, t_gamma = 0.5, t_delta = 0.01, t_mmc = 0.0, t_x = -1.0;
    bool t_oracle = false;
    size_t t_n = 0;
    uint64_t t_m = 0, t_seed = 1;
    tradeoff->add_option("--stream", t_stream, "stream file")->required();
    tradeoff->add_option("--norm", t_norm, "norm JSON (or @file)")->required();
    tradeoff->add_option("--n", t_n, "dimension")->required();
    tradeoff->add_option("--m", t_m, "magnitude bound");
    tradeoff->add_option("--D", t_D, "approximation factor >= 1.1")->required();
    tradeoff->add_option("--eps", t_eps, "constant precision in (0,1/2)");
    tradeoff->add_option("--gamma", t_gamma, "base parameter");
    tradeoff->add_option("--delta", t_delta, "failure budget");
    tradeoff->add_option("--mmc", t_mmc, "mmc bound (0 = profile)");
    tradeoff->add_option("--x", t_x, "fixed boundary draw");
    tradeoff->add_flag("--oracle", t_oracle, "also compute the exact norm");
    tradeoff->add_option("--seed", t_seed, "root seed");
    tradeoff->add_option("--lab-scale", t_lab, "lab-scale JSON (or @file)");
    tradeoff->add_option("--out", t_out, "output file");

    // bench -------------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "run a config-driven experiment");
    std::string b_config, b_out_dir = ".";
    bench->add_option("--config", b_config, "experiment config JSON file")->required();
    bench->add_option("--out-dir", b_out_dir, "output directory");

    // accept ------------------------------------------------------------------
    auto* accept = app.add_subcommand("accept", "run the acceptance suite");
    std::string a_out = "acceptance-out";
    bool a_quick = false;
    uint64_t a_seed = 0x5eedULL;
    int a_threads = 0;
    accept->add_option("--out-dir", a_out, "output directory");
    accept->add_flag("--quick", a_quick, "reduced-trial smoke run");
    accept->add_option("--seed", a_seed, "root seed");
    accept->add_option("--threads", a_threads, "worker threads (0 = auto)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*profile) {
            auto norm = make_norm(parse_json_arg(p_norm), p_n);
            auto prof = compute_mmc(*norm, p_n, p_grid, p_samples, apply_seed_env(p_seed),
                                    p_threads);
            write_output(p_out, profile_to_json(prof));
        } else if (*levels) {
            auto ups = read_stream_file(l_stream);
            uint64_t m = l_m ? l_m : default_magnitude_bound(l_n);
            uint64_t seed = apply_seed_env(l_seed);
            LevelLab lab;
            if (!l_lab.empty()) lab = lab_from_json(parse_json_arg(l_lab));
            LevelEstimate le;
            if (l_passes == 2) {
                TwoPassConfig cfg;
                cfg.alpha = 1.0 + l_gamma;
                cfg.beta = l_beta;
                cfg.eps = l_eps;
                cfg.delta = l_delta;
                cfg.lab = lab;
                le = estimate_levels_two_pass(ups, l_n, m, cfg, seed);
            } else {
                Level1Config cfg;
                cfg.gamma = l_gamma;
                cfg.beta = l_beta;
                cfg.eps = l_eps;
                cfg.delta = l_delta;
                cfg.lab = lab;
                if (l_x >= 0) cfg.x_override = l_x;
                le = run_level1(ups, l_n, m, cfg, seed);
            }
            write_output(l_out, level_estimate_to_json(le, true));
        } else if (*estimate) {
            auto ups = read_stream_file(e_stream);
            uint64_t m = e_m ? e_m : default_magnitude_bound(e_n);
            uint64_t seed = apply_seed_env(e_seed);
            auto norm = make_norm(parse_json_arg(e_norm), e_n);
            EstimatorConfig cfg;
            cfg.eps = e_eps;
            cfg.delta = e_delta;
            cfg.c1 = e_c1;
            cfg.c2 = e_c2;
            cfg.c3 = e_c3;
            if (e_x >= 0) cfg.x_override = e_x;
            if (!e_lab.empty()) cfg.lab = lab_from_json(parse_json_arg(e_lab));
            if (e_mmc > 0) {
                cfg.mmc = e_mmc;
            } else if (!e_profile.empty()) {
                auto prof = profile_from_json(parse_json_arg("@" + e_profile));
                cfg.mmc = prof.max_mc;
                cfg.mmc_is_heuristic = prof.any_heuristic;
            } else {
                auto prof = compute_mmc(*norm, e_n, 0, 1000,
                                        seeds::derive(seed, {seeds::label("autoprofile")}),
                                        cfg.lab.threads);
                cfg.mmc = prof.max_mc;
                cfg.mmc_is_heuristic = prof.any_heuristic;
            }
            auto res = one_pass_symmetric_norm(ups, *norm, e_n, m, cfg, seed);
            json out{{"estimate", res.value},
                     {"parameters", res.params},
                     {"diagnostics", level_estimate_to_json(res.levels)}};
            if (e_oracle) {
                if (e_n > kOracleDimCap)
                    throw std::runtime_error("exact oracle capped at n <= 2^20");
                FrequencyVector v = replay(ups, e_n, m);
                out["exact"] = norm->evaluate_dense(v.abs_values());
            }
            write_output(e_out, out);
        } else if (*tradeoff) {
            auto ups = read_stream_file(t_stream);
            uint64_t m = t_m ? t_m : default_magnitude_bound(t_n);
            uint64_t seed = apply_seed_env(t_seed);
            auto norm = make_norm(parse_json_arg(t_norm), t_n);
            TradeoffConfig cfg;
            cfg.D = t_D;
            cfg.eps = t_eps;
            cfg.gamma = t_gamma;
            cfg.delta = t_delta;
            if (t_x >= 0) cfg.x_override = t_x;
            if (!t_lab.empty()) cfg.lab = lab_from_json(parse_json_arg(t_lab));
            if (t_mmc > 0) {
                cfg.mmc = t_mmc;
            } else {
                auto prof = compute_mmc(*norm, t_n, 0, 1000,
                                        seeds::derive(seed, {seeds::label("autoprofile")}),
                                        cfg.lab.threads);
                cfg.mmc = prof.max_mc * (prof.any_heuristic ? 2.0 : 1.0);
            }
            auto res = tradeoff_estimate(ups, *norm, t_n, m, cfg, seed);
            json out{{"estimate", res.recentred},
                     {"h_raw", res.h_raw},
                     {"counter_count", res.counter_count},
                     {"parameters", res.params},
                     {"diagnostics", level_estimate_to_json(res.levels)}};
            if (t_oracle) {
                if (t_n > kOracleDimCap)
                    throw std::runtime_error("exact oracle capped at n <= 2^20");
                FrequencyVector v = replay(ups, t_n, m);
                out["exact"] = norm->evaluate_dense(v.abs_values());
            }
            write_output(t_out, out);
        } else if (*bench) {
            json cfg = parse_json_arg("@" + b_config);
            if (const char* env = std::getenv("SYMNORM_SEED")) {
                json& e = cfg.contains("experiment") ? cfg["experiment"] : cfg;
                e["seed"] = std::strtoull(env, nullptr, 10);
            }
            auto report = run_experiment(cfg);
            std::filesystem::create_directories(b_out_dir);
            std::ofstream jf(b_out_dir + "/report.json");
            jf << report.to_json().dump(2) << "\n";
            std::ofstream cf(b_out_dir + "/report.csv", std::ios::binary);
            cf << report.to_csv();
            std::cout << "success_rate " << report.success_rate << ", geomean_ratio "
                      << report.geomean_ratio << ", counters " << report.counter_count
                      << ", wall_ms " << report.wall_ms << "\n";
        } else if (*accept) {
            AcceptanceOptions opts;
            opts.quick = a_quick;
            opts.seed = apply_seed_env(a_seed);
            opts.threads = a_threads;
            return run_acceptance_suite(a_out, opts);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
