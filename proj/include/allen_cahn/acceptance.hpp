#pragma once

#include "allen_cahn/harness.hpp"

namespace ac {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    Json data;
};

inline constexpr int kCriterionCount = 10;

/// Runs one numbered end-to-end check (1..10).
CriterionResult run_criterion(int id);
/// Runs the listed criteria in order (all of them when empty).
std::vector<CriterionResult> run_criteria(const std::vector<int>& ids);
/// "criterion N: PASS|FAIL name (detail)"
std::string format_line(const CriterionResult& r);

}  // namespace ac
