#pragma once

#include <optional>
#include <span>

#include "seqramp/model.hpp"
#include "seqramp/selectors.hpp"

namespace seqramp {

struct MrtConfig {
    int sample_count = 10;      // S
    int baseline_count = 10;    // S'
    double temperature = 0.005; // sharpness of the sample-normalized distribution
    bool neg_reward = false;    // map reward 0 to -1 (parsing)
};

struct ScoredPair {
    std::vector<int> source;
    HopeFearPair pair;
};

// Mean negative log-likelihood of the references under teacher forcing.
NodeId mle_loss(SeqModel& model, Tape& tape,
                std::span<const std::pair<std::vector<int>, std::vector<int>>> batch);

// Expected negative reward under the temperature-sharpened distribution
// normalized over the (de-duplicated) sample set; gradients flow through the
// normalization. Rewards are shifted by the baseline b = -mean(baseline
// rewards); with neg_reward every zero reward becomes -1 first, on both
// lists. Returns nullopt for an empty sample set.
std::optional<NodeId> mrt_loss(SeqModel& model, Tape& tape, const std::vector<int>& x,
                               std::span<const Hypothesis> samples, std::vector<double> rewards,
                               std::vector<double> baseline_rewards, const MrtConfig& cfg);

// Sequence ramp loss: mean over instances of pi(fear) - pi(hope), the
// probabilities being exp of the summed token log-probabilities. Callers
// pass contributing instances only; skipped ones do not count toward the
// mean. Returns nullopt for an empty batch.
std::optional<NodeId> ramp_loss(SeqModel& model, Tape& tape, std::span<const ScoredPair> batch);

// Token-level ramp loss: per instance, -(sum_j tau+_j log pi(hope_j) +
// sum_j tau-_j log pi(fear_j)), each sequence teacher-forced on its own
// prefix. Positions with tau = 0 contribute exactly zero gradient.
std::optional<NodeId> ramp_token_loss(SeqModel& model, Tape& tape,
                                      std::span<const ScoredPair> batch);

} // namespace seqramp
