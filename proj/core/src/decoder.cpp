#include "seqramp/decoder.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <set>
#include <stdexcept>

#include "seqramp/vocab.hpp"

namespace seqramp {

namespace {

struct BeamItem {
    SeqModel::DecoderState state;
    std::vector<int> tokens;
    std::vector<double> logps;
    double total = 0.0;
    int prev = Vocab::kBos;
};

Hypothesis finish(const BeamItem& item, double eos_logp) {
    Hypothesis h;
    h.tokens = item.tokens;
    h.tokens.push_back(Vocab::kEos);
    h.token_logps = item.logps;
    h.token_logps.push_back(eos_logp);
    h.total_logp = item.total + eos_logp;
    return h;
}

bool hyp_less(const Hypothesis& a, const Hypothesis& b) {
    if (a.total_logp != b.total_logp) return a.total_logp > b.total_logp;
    return a.tokens < b.tokens;
}

} // namespace

KBestList beam_search(SeqModel& model, const std::vector<int>& x, int beam_size, int k,
                      int max_len, int input_id) {
    if (k < 1 || beam_size < k) throw std::invalid_argument("beam_search: need beam_size >= k >= 1");
    if (max_len < 1) throw std::invalid_argument("beam_search: max_len must be >= 1");

    Tape tape;
    tape.set_recording(false);
    SeqModel::EncodedInput enc = model.encode(tape, x);
    const int vt = model.config().tgt_vocab_size;

    std::vector<BeamItem> live;
    live.push_back(BeamItem{SeqModel::DecoderState{enc.init_state}, {}, {}, 0.0, Vocab::kBos});

    std::vector<Hypothesis> completed;

    for (int step = 0; step < max_len && !live.empty(); ++step) {
        const bool force_eos = (step == max_len - 1);

        // Expand every live item one token.
        struct Cand {
            double total;
            int item;
            int token;
            double logp;
        };
        std::vector<Cand> cands;
        cands.reserve(live.size() * (force_eos ? 1 : static_cast<std::size_t>(vt)));
        std::vector<SeqModel::DecoderState> next_states(live.size());
        for (std::size_t i = 0; i < live.size(); ++i) {
            SeqModel::StepResult res = model.decode_step(tape, enc, live[i].state, live[i].prev);
            next_states[i] = res.state;
            const Tensor& row = tape.value(res.log_probs);
            if (force_eos) {
                const double lp = row.values[Vocab::kEos];
                cands.push_back(Cand{live[i].total + lp, static_cast<int>(i), Vocab::kEos, lp});
            } else {
                for (int t = 0; t < vt; ++t)
                    cands.push_back(Cand{live[i].total + row.values[t], static_cast<int>(i), t,
                                         row.values[t]});
            }
        }
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            if (a.total != b.total) return a.total > b.total;
            if (a.item != b.item) return a.item < b.item;
            return a.token < b.token;
        });

        std::vector<BeamItem> next_live;
        next_live.reserve(static_cast<std::size_t>(beam_size));
        for (const Cand& c : cands) {
            if (c.token == Vocab::kEos) {
                completed.push_back(finish(live[c.item], c.logp));
            } else if (static_cast<int>(next_live.size()) < beam_size) {
                BeamItem item;
                item.state = next_states[c.item];
                item.tokens = live[c.item].tokens;
                item.tokens.push_back(c.token);
                item.logps = live[c.item].logps;
                item.logps.push_back(c.logp);
                item.total = c.total;
                item.prev = c.token;
                next_live.push_back(std::move(item));
            }
        }
        live = std::move(next_live);

        // Extending a hypothesis can only lower its raw log-probability, so
        // once the k-th completed score beats every live prefix we are done.
        if (static_cast<int>(completed.size()) >= k && !live.empty()) {
            std::vector<double> totals;
            totals.reserve(completed.size());
            for (const Hypothesis& h : completed) totals.push_back(h.total_logp);
            std::nth_element(totals.begin(), totals.begin() + (k - 1), totals.end(),
                             std::greater<double>());
            if (live.front().total <= totals[k - 1]) break;
        }
    }

    std::sort(completed.begin(), completed.end(), hyp_less);
    if (static_cast<int>(completed.size()) > k) completed.resize(static_cast<std::size_t>(k));

    assert([&] {
        std::set<std::vector<int>> seen;
        for (const Hypothesis& h : completed)
            if (!seen.insert(h.tokens).second) return false;
        return true;
    }());

    KBestList out;
    out.input_id = input_id;
    out.hyps = std::move(completed);
    return out;
}

std::vector<Hypothesis> sample_sequences(SeqModel& model, const std::vector<int>& x,
                                         int sample_count, bool dedup, int max_len, Rng& rng) {
    if (sample_count < 1) throw std::invalid_argument("sample_sequences: need sample_count >= 1");
    if (max_len < 1) throw std::invalid_argument("sample_sequences: max_len must be >= 1");

    Tape tape;
    tape.set_recording(false);
    SeqModel::EncodedInput enc = model.encode(tape, x);
    const int vt = model.config().tgt_vocab_size;

    std::vector<Hypothesis> out;
    std::set<std::vector<int>> seen;
    std::vector<double> probs(static_cast<std::size_t>(vt));

    for (int s = 0; s < sample_count; ++s) {
        Hypothesis h;
        SeqModel::DecoderState state{enc.init_state};
        int prev = Vocab::kBos;
        for (int step = 0; step < max_len; ++step) {
            SeqModel::StepResult res = model.decode_step(tape, enc, state, prev);
            const Tensor& row = tape.value(res.log_probs);
            int tok;
            if (step == max_len - 1) {
                tok = Vocab::kEos;
            } else {
                for (int t = 0; t < vt; ++t) probs[static_cast<std::size_t>(t)] = std::exp(row.values[t]);
                tok = rng.categorical(probs);
            }
            h.tokens.push_back(tok);
            h.token_logps.push_back(row.values[tok]);
            h.total_logp += row.values[tok];
            if (tok == Vocab::kEos) break;
            state = res.state;
            prev = tok;
        }
        if (dedup) {
            if (!seen.insert(h.tokens).second) continue;
        }
        out.push_back(std::move(h));
    }
    return out;
}

} // namespace seqramp
