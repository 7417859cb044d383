#pragma once

#include <cstdint>

#include "seqramp/trainer.hpp"

namespace seqramp {

// Two-sided approximate randomization test over aligned per-instance
// reports: each iteration swaps every instance's outputs with probability
// 0.5 and recomputes the metric difference;
// p = (#{|diff_perm| >= |diff_obs|} + 1) / (iterations + 1).
double approx_randomization(const EvalReport& a, const EvalReport& b, const std::string& metric,
                            int iterations, std::uint64_t seed);

} // namespace seqramp
