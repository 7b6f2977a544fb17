#include "symnorm/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "symnorm/concentration.hpp"
#include "symnorm/seeds.hpp"
#include "symnorm/stream.hpp"

namespace symnorm {

using seeds::derive;
using seeds::label;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Setup {
    int trials = 0;
    uint64_t seed = 0;
    int threads = 0;
    bool oracle = true;
    std::optional<std::pair<double, double>> band;
    size_t n = 0;
    uint64_t m = 0;
    std::optional<StreamSpec> spec;
    std::vector<StreamUpdate> fixed_stream;
    std::shared_ptr<const SymmetricNorm> norm;
    std::string kind;  // "estimate" | "tradeoff"
    EstimatorConfig est;
    TradeoffConfig tr;
};

Setup parse_setup(const nlohmann::json& root) {
    const nlohmann::json& cfg = root.contains("experiment") ? root.at("experiment") : root;
    Setup s;
    s.trials = cfg.value("trials", 0);
    if (s.trials < 0) throw std::invalid_argument("trials must be nonnegative");
    s.seed = cfg.value("seed", uint64_t{0});
    s.threads = cfg.value("threads", 0);
    s.oracle = cfg.value("oracle", true);
    if (cfg.contains("band")) {
        auto b = cfg.at("band");
        s.band = std::make_pair(b.at(0).get<double>(), b.at(1).get<double>());
    }
    if (cfg.contains("stream_file")) {
        s.fixed_stream = read_stream_file(cfg.at("stream_file").get<std::string>());
        s.n = cfg.at("n").get<size_t>();
        s.m = cfg.value("m", uint64_t{0});
    } else {
        s.spec = stream_spec_from_json(cfg);
        s.n = s.spec->n;
        s.m = s.spec->magnitude_bound;
    }
    if (s.m == 0) s.m = default_magnitude_bound(s.n);
    s.norm = make_norm(cfg, s.n);

    const nlohmann::json& est = cfg.at("estimator");
    s.kind = est.value("kind", std::string("estimate"));
    if (s.kind == "estimate") {
        s.est.eps = est.value("eps", 0.2);
        s.est.delta = est.value("delta", 0.0);
        s.est.mmc = est.value("mmc", 0.0);
        s.est.c1 = est.value("c1", 1.0);
        s.est.c2 = est.value("c2", 1.0);
        s.est.c3 = est.value("c3", 1.0);
        s.est.c_R = est.value("c_R", 1.0);
        s.est.c_beta = est.value("c_beta", 1.0);
        if (est.contains("x")) s.est.x_override = est.at("x").get<double>();
        if (est.contains("lab")) s.est.lab = lab_from_json(est.at("lab"));
        if (s.est.mmc <= 0) {
            // No calibration supplied: profile the norm up front.
            auto prof = compute_mmc(*s.norm, s.n, 0, 1000,
                                    derive(s.seed, {label("autoprofile")}), s.threads);
            s.est.mmc = prof.max_mc;
            s.est.mmc_is_heuristic = prof.any_heuristic;
        }
    } else if (s.kind == "tradeoff") {
        s.tr.D = est.at("D").get<double>();
        s.tr.mmc = est.value("mmc", 0.0);
        s.tr.eps = est.value("eps", 0.3);
        s.tr.gamma = est.value("gamma", 0.5);
        s.tr.delta = est.value("delta", 0.01);
        s.tr.c4 = est.value("c4", 1.0);
        s.tr.c5 = est.value("c5", 1.0);
        s.tr.c_R = est.value("c_R", 1.0);
        s.tr.recenter_lambda = est.value("recenter_lambda", 0.35);
        if (est.contains("x")) s.tr.x_override = est.at("x").get<double>();
        if (est.contains("lab")) s.tr.lab = lab_from_json(est.at("lab"));
        if (s.tr.mmc <= 0) {
            auto prof = compute_mmc(*s.norm, s.n, 0, 1000,
                                    derive(s.seed, {label("autoprofile")}), s.threads);
            s.tr.mmc = prof.max_mc * (prof.any_heuristic ? 2.0 : 1.0);
        }
    } else {
        throw std::invalid_argument("unknown estimator kind: " + s.kind);
    }
    return s;
}

}  // namespace

ExperimentReport run_experiment(const nlohmann::json& config) {
    Setup s = parse_setup(config);

    ExperimentReport report;
    report.config = config;
    report.records.resize(static_cast<size_t>(s.trials));
    double t0 = now_ms();

    std::atomic<size_t> counter_count{0};
    auto run_trial = [&](int t) {
        TrialRecord rec;
        rec.trial = t;
        rec.seed = derive(s.seed, {label("trial"), static_cast<uint64_t>(t)});
        double tt0 = now_ms();

        std::vector<StreamUpdate> stream;
        if (s.spec) {
            StreamSpec spec = *s.spec;
            spec.seed = derive(rec.seed, {label("stream")});
            stream = generate_stream(spec);
        } else {
            stream = s.fixed_stream;
        }

        if (s.kind == "estimate") {
            auto res = one_pass_symmetric_norm(stream, *s.norm, s.n, s.m, s.est,
                                               derive(rec.seed, {label("sketch")}));
            rec.estimate = res.value;
            counter_count.store(res.levels.counter_count);
        } else {
            auto res = tradeoff_estimate(stream, *s.norm, s.n, s.m, s.tr,
                                         derive(rec.seed, {label("sketch")}));
            rec.estimate = res.h_raw;
            counter_count.store(res.counter_count);
        }

        if (s.oracle) {
            if (s.n > kOracleDimCap)
                throw std::invalid_argument("exact oracle capped at n <= 2^20; disable it");
            FrequencyVector v = replay(stream, s.n, s.m);
            auto mags = v.abs_values();
            rec.exact = s.norm->evaluate_dense(mags);
            if (*rec.exact > 0) rec.ratio = rec.estimate / *rec.exact;
            if (s.band && rec.ratio)
                rec.pass = *rec.ratio >= s.band->first && *rec.ratio <= s.band->second;
        }
        rec.wall_ms = now_ms() - tt0;
        report.records[static_cast<size_t>(t)] = rec;
    };

    unsigned hw = s.threads > 0 ? static_cast<unsigned>(s.threads)
                                : std::max(1u, std::thread::hardware_concurrency());
    // Trials already parallelize internally across sketch repetitions; only
    // spread trials over threads when the sketch work is single-threaded.
    if (hw <= 1 || s.trials <= 1) {
        for (int t = 0; t < s.trials; ++t) run_trial(t);
    } else {
        std::atomic<int> next{0};
        std::vector<std::future<void>> futs;
        unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(s.trials));
        for (unsigned wkr = 0; wkr < workers; ++wkr)
            futs.push_back(std::async(std::launch::async, [&] {
                for (int t = next.fetch_add(1); t < s.trials; t = next.fetch_add(1))
                    run_trial(t);
            }));
        for (auto& f : futs) f.get();
    }

    size_t band_count = 0, band_pass = 0, ratio_count = 0;
    double log_sum = 0.0;
    for (const auto& r : report.records) {
        if (r.pass) {
            ++band_count;
            if (*r.pass) ++band_pass;
        }
        if (r.ratio && *r.ratio > 0) {
            ++ratio_count;
            log_sum += std::log(*r.ratio);
        }
    }
    report.success_rate = band_count ? static_cast<double>(band_pass) / band_count : 0.0;
    report.geomean_ratio = ratio_count ? std::exp(log_sum / ratio_count) : 0.0;
    report.counter_count = counter_count.load();
    report.wall_ms = now_ms() - t0;
    return report;
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json jr{{"trial", r.trial},
                          {"seed", r.seed},
                          {"estimate", r.estimate},
                          {"wall_ms", r.wall_ms}};
        if (r.exact) jr["exact"] = *r.exact;
        if (r.ratio) jr["ratio"] = *r.ratio;
        if (r.pass) jr["pass"] = *r.pass;
        recs.push_back(jr);
    }
    return {{"config", config},
            {"records", recs},
            {"aggregate",
             {{"success_rate", success_rate},
              {"geomean_ratio", geomean_ratio},
              {"counter_count", counter_count},
              {"wall_ms", wall_ms}}}};
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream out;
    out << "trial,seed,estimate,exact,ratio,pass\r\n";
    out.precision(17);
    for (const auto& r : records) {
        out << r.trial << ',' << r.seed << ',' << r.estimate << ',';
        if (r.exact) out << *r.exact;
        out << ',';
        if (r.ratio) out << *r.ratio;
        out << ',';
        if (r.pass) out << (*r.pass ? 1 : 0);
        out << "\r\n";
    }
    return out.str();
}

bool validate_schema(const nlohmann::json& doc, const nlohmann::json& schema,
                     std::string* error) {
    auto fail = [&](const std::string& msg) {
        if (error) *error = msg;
        return false;
    };
    if (schema.contains("type")) {
        std::string t = schema.at("type").get<std::string>();
        bool ok = (t == "object" && doc.is_object()) || (t == "array" && doc.is_array()) ||
                  (t == "string" && doc.is_string()) ||
                  (t == "number" && doc.is_number()) ||
                  (t == "integer" && doc.is_number_integer()) ||
                  (t == "boolean" && doc.is_boolean());
        if (!ok) return fail("type mismatch: expected " + t);
    }
    if (schema.contains("required"))
        for (const auto& key : schema.at("required"))
            if (!doc.contains(key.get<std::string>()))
                return fail("missing required key: " + key.get<std::string>());
    if (schema.contains("properties") && doc.is_object())
        for (auto& [key, sub] : schema.at("properties").items())
            if (doc.contains(key) && !validate_schema(doc.at(key), sub, error))
                return false;
    if (schema.contains("items") && doc.is_array())
        for (const auto& item : doc)
            if (!validate_schema(item, schema.at("items"), error)) return false;
    return true;
}

nlohmann::json experiment_report_schema() {
    return nlohmann::json::parse(R"({
      "type": "object",
      "required": ["config", "records", "aggregate"],
      "properties": {
        "records": {
          "type": "array",
          "items": {
            "type": "object",
            "required": ["trial", "seed", "estimate", "wall_ms"],
            "properties": {
              "trial": {"type": "integer"},
              "estimate": {"type": "number"},
              "exact": {"type": "number"},
              "ratio": {"type": "number"},
              "pass": {"type": "boolean"},
              "wall_ms": {"type": "number"}
            }
          }
        },
        "aggregate": {
          "type": "object",
          "required": ["success_rate", "geomean_ratio", "counter_count", "wall_ms"],
          "properties": {
            "success_rate": {"type": "number"},
            "geomean_ratio": {"type": "number"},
            "counter_count": {"type": "integer"},
            "wall_ms": {"type": "number"}
          }
        }
      }
    })");
}

}  // namespace symnorm
