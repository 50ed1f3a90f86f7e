#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mixclust {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::uint64_t seed = 1;
};

/// Number of acceptance criteria known to run_criterion.
constexpr int kCriterionCount = 12;

/// Runs one acceptance criterion (1-based id). Throws ValidationError on an
/// unknown id.
CriterionResult run_criterion(int id, const VerifyOptions& opts = {});

/// Runs the listed criteria (all when `ids` is empty), sharing the expensive
/// experiment sweeps between the criteria that read them.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts = {},
                                            const std::vector<int>& ids = {});

/// "[PASS] 3 lower bound: ... (0.12 s)"
std::string format_result(const CriterionResult& r);

}  // namespace mixclust
