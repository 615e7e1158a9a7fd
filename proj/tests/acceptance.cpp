#include "gmc/acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <vector>

// usage: acceptance [seed] [id...]
int main(int argc, char** argv)
{
    std::uint64_t seed = 0;
    std::vector<int> ids;
    if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);
    for (int i = 2; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    if (ids.empty())
        for (int id = 1; id <= gmc::kCriterionCount; ++id) ids.push_back(id);

    int failed = 0;
    for (int id : ids) {
        const auto r = gmc::run_criterion(id, seed);
        std::printf("%s criterion %2d %-20s %7.1fs  %s\n", r.passed ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.seconds, r.detail.c_str());
        std::fflush(stdout);
        failed += !r.passed;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
    return failed ? 1 : 0;
}
