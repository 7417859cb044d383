#include "seqramp/objectives.hpp"

#include <stdexcept>

namespace seqramp {

namespace {

NodeId sum_nodes(Tape& tape, std::span<const NodeId> nodes) {
    return tape.sum(tape.concat_cols(nodes));
}

NodeId sequence_logprob(SeqModel& model, Tape& tape, const std::vector<int>& x,
                        const std::vector<int>& y) {
    std::vector<NodeId> picks = model.score_sequence_nodes(tape, x, y);
    return sum_nodes(tape, picks);
}

} // namespace

NodeId mle_loss(SeqModel& model, Tape& tape,
                std::span<const std::pair<std::vector<int>, std::vector<int>>> batch) {
    if (batch.empty()) throw std::invalid_argument("mle_loss: empty batch");
    std::vector<NodeId> totals;
    totals.reserve(batch.size());
    for (const auto& [x, y] : batch) totals.push_back(sequence_logprob(model, tape, x, y));
    return tape.scale(sum_nodes(tape, totals), -1.0 / static_cast<double>(batch.size()));
}

std::optional<NodeId> mrt_loss(SeqModel& model, Tape& tape, const std::vector<int>& x,
                               std::span<const Hypothesis> samples, std::vector<double> rewards,
                               std::vector<double> baseline_rewards, const MrtConfig& cfg) {
    if (samples.empty()) return std::nullopt;
    if (samples.size() != rewards.size())
        throw std::invalid_argument("mrt_loss: rewards not aligned with samples");
    if (!(cfg.temperature > 0.0)) throw std::invalid_argument("mrt_loss: temperature must be > 0");

    if (cfg.neg_reward) {
        for (double& r : rewards)
            if (r == 0.0) r = -1.0;
        for (double& r : baseline_rewards)
            if (r == 0.0) r = -1.0;
    }
    double baseline = 0.0;
    if (!baseline_rewards.empty()) {
        double sum = 0.0;
        for (double r : baseline_rewards) sum += r;
        baseline = -sum / static_cast<double>(baseline_rewards.size());
    }

    std::vector<NodeId> logprobs;
    logprobs.reserve(samples.size());
    for (const Hypothesis& h : samples) logprobs.push_back(sequence_logprob(model, tape, x, h.tokens));

    NodeId q = tape.softmax_rows(tape.scale(tape.concat_cols(logprobs), cfg.temperature));

    Tensor shifted(static_cast<int>(samples.size()), 1);
    for (std::size_t s = 0; s < samples.size(); ++s) shifted.values[s] = rewards[s] + baseline;

    return tape.scale(tape.matmul(q, tape.leaf(std::move(shifted))), -1.0);
}

std::optional<NodeId> ramp_loss(SeqModel& model, Tape& tape, std::span<const ScoredPair> batch) {
    if (batch.empty()) return std::nullopt;
    std::vector<NodeId> terms;
    terms.reserve(batch.size());
    for (const ScoredPair& inst : batch) {
        NodeId hope_p = tape.exp(sequence_logprob(model, tape, inst.source, inst.pair.hope.tokens));
        // An identical pair cancels exactly when both sides share one node.
        NodeId fear_p =
            inst.pair.fear.tokens == inst.pair.hope.tokens
                ? hope_p
                : tape.exp(sequence_logprob(model, tape, inst.source, inst.pair.fear.tokens));
        terms.push_back(tape.sub(fear_p, hope_p));
    }
    return tape.scale(sum_nodes(tape, terms), 1.0 / static_cast<double>(batch.size()));
}

std::optional<NodeId> ramp_token_loss(SeqModel& model, Tape& tape,
                                      std::span<const ScoredPair> batch) {
    if (batch.empty()) return std::nullopt;
    std::vector<NodeId> terms;
    terms.reserve(batch.size());
    for (const ScoredPair& inst : batch) {
        const HopeFearPair& pair = inst.pair;
        if (pair.tau_hope.size() != pair.hope.tokens.size() ||
            pair.tau_fear.size() != pair.fear.tokens.size())
            throw std::invalid_argument("ramp_token_loss: polarity length mismatch");

        std::vector<NodeId> hope_picks = model.score_sequence_nodes(tape, inst.source, pair.hope.tokens);
        std::vector<NodeId> fear_picks = model.score_sequence_nodes(tape, inst.source, pair.fear.tokens);

        std::vector<double> tau_h(pair.tau_hope.begin(), pair.tau_hope.end());
        std::vector<double> tau_f(pair.tau_fear.begin(), pair.tau_fear.end());
        NodeId hope_sum = tape.sum(
            tape.mul(tape.concat_cols(hope_picks), tape.leaf(Tensor::row(std::move(tau_h)))));
        NodeId fear_sum = tape.sum(
            tape.mul(tape.concat_cols(fear_picks), tape.leaf(Tensor::row(std::move(tau_f)))));
        // Encouraged tokens enter as their NLL, discouraged ones with the
        // opposite sign, so fear-only tokens lose probability mass.
        terms.push_back(tape.scale(tape.add(hope_sum, fear_sum), -1.0));
    }
    return tape.scale(sum_nodes(tape, terms), 1.0 / static_cast<double>(batch.size()));
}

} // namespace seqramp
