#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bidop {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Fast invariant checks on the estimator and waveform chain, all noiseless.
// Everything random is drawn from `seed`.
std::vector<CheckResult> run_validation(std::uint64_t seed, std::size_t n_random = 200);

}  // namespace bidop
