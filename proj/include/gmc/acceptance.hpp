#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gmc {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

inline constexpr int kCriterionCount = 11;

const char* criterion_name(int id);
// exceptions thrown inside a check count as a failure and land in detail
CriterionResult run_criterion(int id, std::uint64_t seed = 0);

}  // namespace gmc
