#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>

#include "seqramp/hypothesis.hpp"
#include "seqramp/metrics.hpp"

namespace seqramp {

enum class SelectorVariant {
    Ramp,       // hope and fear both searched
    Ramp1,      // hope fixed to the model prediction
    Ramp2,      // fear fixed to the model prediction
    RampMinus,  // fear is a hope w.r.t. the irrelevant document
    Ramp1Minus, // Ramp1 with the RampMinus fear
    RampDelta2, // Ramp under the bipolar document metric
    Perc1,      // hope is the reference
    Perc2,      // hope is the best-metric candidate
};

const char* to_string(SelectorVariant v);

struct SelectorConfig {
    SelectorVariant variant = SelectorVariant::Ramp;
    double alpha = 10.0; // metric weight against the model score
    bool token_level = false;
};

// Token polarities for the token-level ramp update: hope tokens absent from
// the fear output get +1, fear tokens absent from the hope output get -1,
// shared token types get 0 on both sides.
std::pair<std::vector<int>, std::vector<int>> token_polarity(const std::vector<int>& hope,
                                                             const std::vector<int>& fear);

struct HopeFearPair {
    Hypothesis hope;
    Hypothesis fear;
    std::vector<int> tau_hope; // in {0, 1}, filled when token_level
    std::vector<int> tau_fear; // in {0, -1}

    void fill_polarity();
};

// Last found hope/fear outputs per input, consulted when the current k-best
// list has none. Entries are only ever replaced by newly found outputs.
class HopeFearCache {
  public:
    struct Entry {
        std::optional<Hypothesis> hope;
        std::optional<Hypothesis> fear;
    };

    const Entry* find(int input_id) const;
    void put_hope(int input_id, Hypothesis h);
    void put_fear(int input_id, Hypothesis h);
    std::size_t size() const { return entries_.size(); }
    void clear() { entries_.clear(); }

    void save(const std::string& path) const;
    void load(const std::string& path);

  private:
    std::unordered_map<int, Entry> entries_;
};

// Hope/fear selection for parsing: hope is the most probable candidate with
// reward 1, fear the most probable with reward 0. The reward callback is
// invoked lazily in rank order, so at most k candidates are judged. A side
// that is missing falls back to the cache; if it is still missing the
// instance is skipped (nullopt).
std::optional<HopeFearPair> select_parsing(const KBestList& kbest,
                                           const std::function<int(const Hypothesis&)>& reward_of,
                                           HopeFearCache* cache, const SelectorConfig& cfg);

struct WeakDocContext {
    const NGramIndex* dplus = nullptr;
    const NGramIndex* dminus = nullptr;
    int source_len = 1;
    double length_ratio = 1.0;
};

// Hope/fear selection for document-supervised MT. Scores are log pi(y|x);
// the argmax of score -/+ alpha * (1 - delta) runs over the k-best list with
// ties broken toward higher model score, then lower rank.
HopeFearPair select_weak_mt(const KBestList& kbest, const WeakDocContext& ctx,
                            const SelectorConfig& cfg);

// Hope/fear selection for fully supervised MT with the smoothed sentence
// BLEU reward. scored_ref must be the teacher-forced reference for Perc1.
HopeFearPair select_full_mt(const KBestList& kbest, const std::vector<int>& ref,
                            const Hypothesis* scored_ref, const SelectorConfig& cfg);

} // namespace seqramp
