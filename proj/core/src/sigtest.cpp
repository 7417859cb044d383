#include "seqramp/sigtest.hpp"

#include <cmath>

#include "seqramp/common.hpp"
#include "seqramp/rng.hpp"
#include "seqramp/tasks.hpp"
#include "seqramp/vocab.hpp"

namespace seqramp {

namespace {

double f1_of(const std::vector<std::pair<Answer, Answer>>& results) {
    return answer_f1(results).f1;
}

} // namespace

double approx_randomization(const EvalReport& a, const EvalReport& b, const std::string& metric,
                            int iterations, std::uint64_t seed) {
    if (iterations < 1) throw UsageError("sigtest needs at least one iteration");
    if (a.rows.size() != b.rows.size())
        throw DataError("sigtest: reports have different instance counts");
    const std::size_t n = a.rows.size();

    if (metric == "f1") {
        std::vector<std::pair<Answer, Answer>> ra, rb;
        ra.reserve(n);
        rb.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (a.rows[i].gold != b.rows[i].gold || a.rows[i].correct < 0 || b.rows[i].correct < 0)
                throw DataError("sigtest: reports are not aligned parsing reports");
            ra.emplace_back(parse_answer_field(a.rows[i].answer),
                            parse_answer_field(a.rows[i].gold));
            rb.emplace_back(parse_answer_field(b.rows[i].answer),
                            parse_answer_field(b.rows[i].gold));
        }
        const double observed = std::abs(f1_of(ra) - f1_of(rb));
        Rng rng = Rng(seed).substream("sigtest");
        int at_least = 0;
        std::vector<std::pair<Answer, Answer>> pa = ra, pb = rb;
        for (int it = 0; it < iterations; ++it) {
            for (std::size_t i = 0; i < n; ++i) {
                const bool swap = rng.uniform01() < 0.5;
                pa[i] = swap ? rb[i] : ra[i];
                pb[i] = swap ? ra[i] : rb[i];
            }
            if (std::abs(f1_of(pa) - f1_of(pb)) >= observed) ++at_least;
        }
        return (static_cast<double>(at_least) + 1.0) / (static_cast<double>(iterations) + 1.0);
    }

    if (metric == "bleu") {
        Vocab v;
        std::vector<std::vector<int>> ha, hb, refs;
        ha.reserve(n);
        hb.reserve(n);
        refs.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (a.rows[i].ref != b.rows[i].ref)
                throw DataError("sigtest: reports are not aligned MT reports");
            std::vector<int> x, y, r;
            for (const std::string& t : split_tokens(a.rows[i].hyp)) x.push_back(v.add(t));
            for (const std::string& t : split_tokens(b.rows[i].hyp)) y.push_back(v.add(t));
            for (const std::string& t : split_tokens(a.rows[i].ref)) r.push_back(v.add(t));
            ha.push_back(std::move(x));
            hb.push_back(std::move(y));
            refs.push_back(std::move(r));
        }
        const double observed = std::abs(corpus_bleu(ha, refs) - corpus_bleu(hb, refs));
        Rng rng = Rng(seed).substream("sigtest");
        int at_least = 0;
        std::vector<std::vector<int>> pa = ha, pb = hb;
        for (int it = 0; it < iterations; ++it) {
            for (std::size_t i = 0; i < n; ++i) {
                const bool swap = rng.uniform01() < 0.5;
                pa[i] = swap ? hb[i] : ha[i];
                pb[i] = swap ? ha[i] : hb[i];
            }
            if (std::abs(corpus_bleu(pa, refs) - corpus_bleu(pb, refs)) >= observed) ++at_least;
        }
        return (static_cast<double>(at_least) + 1.0) / (static_cast<double>(iterations) + 1.0);
    }

    throw UsageError("sigtest metric must be f1 or bleu, got '" + metric + "'");
}

} // namespace seqramp
