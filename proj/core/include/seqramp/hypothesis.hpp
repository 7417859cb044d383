#pragma once

#include <vector>

namespace seqramp {

// A decoded output: EOS-terminated token ids with the log-probability of
// every token and their sum.
struct Hypothesis {
    std::vector<int> tokens;
    std::vector<double> token_logps;
    double total_logp = 0.0;

    bool operator==(const Hypothesis& o) const { return tokens == o.tokens; }
};

// Sorted, de-duplicated candidate set for one input. Scores are
// non-increasing down the list and token sequences are pairwise distinct.
struct KBestList {
    int input_id = -1;
    std::vector<Hypothesis> hyps;

    bool empty() const { return hyps.empty(); }
    const Hypothesis& best() const { return hyps.front(); }
};

} // namespace seqramp
