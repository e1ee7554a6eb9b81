#include <cstdio>
#include <cstdlib>
#include <string>

#include "aigcfl/validate.hpp"

// Release gate: prints one line per check and exits nonzero if any fails.
int main(int argc, char** argv) {
    int threads = 4;
    if (argc > 1) threads = std::max(1, std::atoi(argv[1]));
    auto results = aigcfl::run_acceptance_checks(threads);
    int failed = 0;
    for (const auto& r : results) {
        std::printf("%s %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        std::fflush(stdout);
        if (!r.pass) ++failed;
    }
    std::printf("%d/%d checks passed\n", static_cast<int>(results.size()) - failed,
                static_cast<int>(results.size()));
    return failed == 0 ? 0 : 1;
}
