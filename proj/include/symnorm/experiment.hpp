#ifndef SYMNORM_EXPERIMENT_HPP
#define SYMNORM_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "symnorm/estimator.hpp"
#include "symnorm/generators.hpp"

namespace symnorm {

/// Exact oracles densify the frequency vector; bounded to keep memory sane.
constexpr size_t kOracleDimCap = size_t{1} << 20;

struct TrialRecord {
    int trial = 0;
    uint64_t seed = 0;
    double estimate = 0.0;
    std::optional<double> exact;
    std::optional<double> ratio;
    std::optional<bool> pass;
    double wall_ms = 0.0;
};

struct ExperimentReport {
    nlohmann::json config;  // full echo
    std::vector<TrialRecord> records;
    double success_rate = 0.0;   // over trials with a pass flag
    double geomean_ratio = 0.0;  // over trials with an exact value
    size_t counter_count = 0;
    double wall_ms = 0.0;

    nlohmann::json to_json() const;
    std::string to_csv() const;  // RFC 4180, stable column schema
};

/// Runs seeded trials of an estimator against a stream spec (or file),
/// comparing to the brute-force oracle when enabled. Deterministic given the
/// config: trials are merged in trial order regardless of scheduling.
ExperimentReport run_experiment(const nlohmann::json& config);

/// Minimal structural JSON-schema check (type/required/properties/items).
bool validate_schema(const nlohmann::json& doc, const nlohmann::json& schema,
                     std::string* error = nullptr);

/// The schema the JSON reports are validated against (shipped file content).
nlohmann::json experiment_report_schema();

}  // namespace symnorm

#endif
