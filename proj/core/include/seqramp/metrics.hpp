#pragma once

#include <set>
#include <string>
#include <unordered_set>
#include <vector>

namespace seqramp {

// Answers are finite sets of strings; comparison is order-insensitive.
using Answer = std::set<std::string>;

// Per-order sets of the distinct n-grams occurring in a document, for the
// membership test used by the document-match reward.
class NGramIndex {
  public:
    NGramIndex() = default;
    NGramIndex(int doc_id, const std::vector<int>& tokens, int max_order);

    int doc_id() const { return doc_id_; }
    int max_order() const { return max_order_; }
    bool contains(int order, const std::string& key) const;

    static std::string gram_key(const std::vector<int>& tokens, std::size_t start, int order);

  private:
    int doc_id_ = -1;
    int max_order_ = 0;
    std::vector<std::unordered_set<std::string>> grams_;
};

// 1 iff the answers are equal as sets, else 0.
int answer_feedback(const Answer& a, const Answer& gold);

// Average n-gram precision of y against the document, times the input-length
// brevity penalty min(1, ratio * |y| / source_len). Orders longer than y
// contribute precision 0; empty y scores 0.
double delta1(const std::vector<int>& y, const NGramIndex& doc, int source_len,
              double length_ratio);

// Bipolar document match: 0.5 * (delta1(y, d+) - delta1(y, d-) + 1).
double delta2(const std::vector<int>& y, const NGramIndex& dplus, const NGramIndex& dminus,
              int source_len, double length_ratio);

// Smoothed per-sentence BLEU: clipped n-gram precisions with add-1 smoothing
// for orders above 1, times exp(min(0, 1 - |ref|/|y|)). Empty y scores 0.
double bleu_plus1(const std::vector<int>& y, const std::vector<int>& ref, int max_order = 4);

// Standard corpus-level BLEU (aggregated clipped counts, geometric mean,
// corpus brevity penalty), reported as a percentage.
double corpus_bleu(const std::vector<std::vector<int>>& hyps,
                   const std::vector<std::vector<int>>& refs, int max_order = 4);

struct F1Result {
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
};

// Recall over all instances, precision over non-empty answers, and their
// harmonic mean.
F1Result answer_f1(const std::vector<std::pair<Answer, Answer>>& results);

} // namespace seqramp
