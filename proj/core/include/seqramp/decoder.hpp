#pragma once

#include "seqramp/hypothesis.hpp"
#include "seqramp/model.hpp"
#include "seqramp/rng.hpp"

namespace seqramp {

// Beam-search k-best decoding. Hypotheses are EOS-terminated; at max_len the
// EOS is forced, so the result is never empty. No length normalization:
// complete hypotheses compete by raw log-probability.
KBestList beam_search(SeqModel& model, const std::vector<int>& x, int beam_size, int k,
                      int max_len, int input_id = -1);

// Draws sample_count sequences token by token from the model distribution.
// With dedup, exact duplicate token sequences are removed (first kept), so
// the result may be shorter than sample_count.
std::vector<Hypothesis> sample_sequences(SeqModel& model, const std::vector<int>& x,
                                         int sample_count, bool dedup, int max_len, Rng& rng);

} // namespace seqramp
