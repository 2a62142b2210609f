// Runs every ship criterion and prints one pass/fail line per criterion.
// Exits nonzero if any criterion fails, so ctest treats it as one gate.

#include "cupcode/acceptance.hpp"

#include <cstdio>

int main() {
    std::vector<cupcode::CriterionResult> results = cupcode::run_acceptance();
    bool all = true;
    for (const cupcode::CriterionResult& r : results) {
        all = all && r.pass;
        std::printf("%-4s %s (%.2fs) %s — %s\n", r.id.c_str(), r.pass ? "PASS" : "FAIL",
                    r.seconds, r.title.c_str(), r.detail.c_str());
    }
    std::printf("acceptance: %s\n", all ? "PASS" : "FAIL");
    return all ? 0 : 1;
}
