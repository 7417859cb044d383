#include "seqramp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

#include "seqramp/common.hpp"

namespace seqramp {

std::string NGramIndex::gram_key(const std::vector<int>& tokens, std::size_t start, int order) {
    std::string key(static_cast<std::size_t>(order) * sizeof(int), '\0');
    std::memcpy(key.data(), tokens.data() + start, static_cast<std::size_t>(order) * sizeof(int));
    return key;
}

NGramIndex::NGramIndex(int doc_id, const std::vector<int>& tokens, int max_order)
    : doc_id_(doc_id), max_order_(max_order) {
    if (max_order < 1) throw std::invalid_argument("NGramIndex: max_order must be >= 1");
    grams_.resize(static_cast<std::size_t>(max_order));
    for (int n = 1; n <= max_order; ++n) {
        if (static_cast<std::size_t>(n) > tokens.size()) break;
        auto& set = grams_[static_cast<std::size_t>(n - 1)];
        for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i)
            set.insert(gram_key(tokens, i, n));
    }
}

bool NGramIndex::contains(int order, const std::string& key) const {
    if (order < 1 || order > max_order_) return false;
    return grams_[static_cast<std::size_t>(order - 1)].count(key) > 0;
}

int answer_feedback(const Answer& a, const Answer& gold) { return a == gold ? 1 : 0; }

double delta1(const std::vector<int>& y, const NGramIndex& doc, int source_len,
              double length_ratio) {
    if (source_len < 1) throw std::invalid_argument("delta1: source_len must be >= 1");
    if (!(length_ratio > 0.0)) throw std::invalid_argument("delta1: length_ratio must be > 0");
    if (y.empty()) return 0.0;
    const int N = doc.max_order();
    double precision_sum = 0.0;
    for (int n = 1; n <= N; ++n) {
        const int total = static_cast<int>(y.size()) - n + 1;
        if (total <= 0) continue; // order longer than y contributes 0
        int hits = 0;
        for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= y.size(); ++i)
            if (doc.contains(n, NGramIndex::gram_key(y, i, n))) ++hits;
        precision_sum += static_cast<double>(hits) / static_cast<double>(total);
    }
    const double bp =
        std::min(1.0, length_ratio * static_cast<double>(y.size()) / static_cast<double>(source_len));
    return precision_sum / static_cast<double>(N) * bp;
}

double delta2(const std::vector<int>& y, const NGramIndex& dplus, const NGramIndex& dminus,
              int source_len, double length_ratio) {
    return 0.5 * (delta1(y, dplus, source_len, length_ratio) -
                  delta1(y, dminus, source_len, length_ratio) + 1.0);
}

namespace {

std::unordered_map<std::string, int> gram_counts(const std::vector<int>& tokens, int order) {
    std::unordered_map<std::string, int> counts;
    if (static_cast<std::size_t>(order) > tokens.size()) return counts;
    for (std::size_t i = 0; i + static_cast<std::size_t>(order) <= tokens.size(); ++i)
        ++counts[NGramIndex::gram_key(tokens, i, order)];
    return counts;
}

// Clipped matches and hypothesis total for one order.
std::pair<long, long> clipped_counts(const std::vector<int>& hyp, const std::vector<int>& ref,
                                     int order) {
    auto hc = gram_counts(hyp, order);
    if (hc.empty()) return {0, 0};
    auto rc = gram_counts(ref, order);
    long matched = 0;
    long total = 0;
    for (const auto& [key, c] : hc) {
        total += c;
        auto it = rc.find(key);
        if (it != rc.end()) matched += std::min(c, it->second);
    }
    return {matched, total};
}

} // namespace

double bleu_plus1(const std::vector<int>& y, const std::vector<int>& ref, int max_order) {
    if (ref.empty()) throw std::invalid_argument("bleu_plus1: empty reference");
    if (max_order < 1) throw std::invalid_argument("bleu_plus1: max_order must be >= 1");
    if (y.empty()) return 0.0;
    double log_prec = 0.0;
    for (int n = 1; n <= max_order; ++n) {
        auto [matched, total] = clipped_counts(y, ref, n);
        const double smooth = n > 1 ? 1.0 : 0.0;
        const double num = static_cast<double>(matched) + smooth;
        const double den = static_cast<double>(total) + smooth;
        if (num == 0.0) return 0.0; // unigram precision is unsmoothed
        log_prec += std::log(num / den);
    }
    const double bp = std::exp(
        std::min(0.0, 1.0 - static_cast<double>(ref.size()) / static_cast<double>(y.size())));
    return std::exp(log_prec / static_cast<double>(max_order)) * bp;
}

double corpus_bleu(const std::vector<std::vector<int>>& hyps,
                   const std::vector<std::vector<int>>& refs, int max_order) {
    if (hyps.size() != refs.size())
        throw DataError("corpus_bleu: hypothesis and reference counts differ");
    if (hyps.empty()) throw DataError("corpus_bleu: empty hypothesis set");
    std::vector<long> matched(static_cast<std::size_t>(max_order), 0);
    std::vector<long> total(static_cast<std::size_t>(max_order), 0);
    long hyp_len = 0, ref_len = 0;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
        hyp_len += static_cast<long>(hyps[i].size());
        ref_len += static_cast<long>(refs[i].size());
        for (int n = 1; n <= max_order; ++n) {
            auto [m, t] = clipped_counts(hyps[i], refs[i], n);
            matched[static_cast<std::size_t>(n - 1)] += m;
            total[static_cast<std::size_t>(n - 1)] += t;
        }
    }
    double log_prec = 0.0;
    for (int n = 0; n < max_order; ++n) {
        if (matched[static_cast<std::size_t>(n)] == 0) return 0.0;
        log_prec += std::log(static_cast<double>(matched[static_cast<std::size_t>(n)]) /
                             static_cast<double>(total[static_cast<std::size_t>(n)]));
    }
    double bp = 1.0;
    if (hyp_len < ref_len)
        bp = std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
    return std::exp(log_prec / static_cast<double>(max_order)) * bp * 100.0;
}

F1Result answer_f1(const std::vector<std::pair<Answer, Answer>>& results) {
    if (results.empty()) throw std::invalid_argument("answer_f1: empty result list");
    int correct = 0, non_empty = 0;
    for (const auto& [answer, gold] : results) {
        if (!answer.empty()) ++non_empty;
        correct += answer_feedback(answer, gold);
    }
    F1Result r;
    r.recall = static_cast<double>(correct) / static_cast<double>(results.size());
    r.precision = non_empty > 0 ? static_cast<double>(correct) / static_cast<double>(non_empty) : 0.0;
    r.f1 = (r.recall + r.precision) > 0.0 ? 2.0 * r.recall * r.precision / (r.recall + r.precision)
                                          : 0.0;
    return r;
}

} // namespace seqramp
