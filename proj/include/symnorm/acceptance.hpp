#ifndef SYMNORM_ACCEPTANCE_HPP
#define SYMNORM_ACCEPTANCE_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace symnorm {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string details;
    double wall_ms = 0.0;
};

struct AcceptanceOptions {
    bool quick = false;          // reduced trial counts, marked "smoke"
    uint64_t seed = 0x5eedULL;
    int threads = 0;
    std::optional<double> c_R_override;  // sabotage hook for the suite's own tests
    std::vector<int> only;               // subset of criterion ids; empty = all
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            std::ostream& log);

/// Runs every criterion, prints one pass/fail line each, writes
/// acceptance.json and acceptance.txt under out_dir. Nonzero on any failure.
int run_acceptance_suite(const std::string& out_dir, const AcceptanceOptions& opts);

}  // namespace symnorm

#endif
