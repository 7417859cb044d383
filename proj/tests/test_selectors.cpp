#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "seqramp/common.hpp"
#include "seqramp/rng.hpp"
#include "seqramp/selectors.hpp"
#include "seqramp/vocab.hpp"

using namespace seqramp;

namespace {

Hypothesis hyp(std::vector<int> tokens, double total) {
    Hypothesis h;
    h.tokens = std::move(tokens);
    h.total_logp = total;
    h.token_logps.assign(h.tokens.size(), total / static_cast<double>(h.tokens.size()));
    return h;
}

KBestList make_kbest(std::vector<Hypothesis> hyps, int input_id = 0) {
    KBestList kb;
    kb.input_id = input_id;
    kb.hyps = std::move(hyps);
    return kb;
}

KBestList random_kbest(Rng& rng, int max_k) {
    const int k = rng.uniform_int(1, max_k);
    std::vector<Hypothesis> hyps;
    std::vector<double> scores;
    for (int i = 0; i < k; ++i) scores.push_back(-rng.uniform(0.0, 8.0));
    std::sort(scores.begin(), scores.end(), std::greater<double>());
    for (int i = 0; i < k; ++i) {
        std::vector<int> tokens;
        const int len = rng.uniform_int(1, 6);
        for (int j = 0; j < len; ++j) tokens.push_back(rng.uniform_int(4, 9));
        tokens.push_back(Vocab::kEos);
        hyps.push_back(hyp(std::move(tokens), scores[i]));
    }
    return make_kbest(std::move(hyps));
}

// Exhaustive argmax over the list with the documented tie-breaking: the
// augmented objective first, then higher model score, then lower rank.
const Hypothesis& oracle_argmax(const KBestList& kb, const std::vector<double>& objective) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kb.hyps.size(); ++i) {
        if (objective[i] > objective[best] ||
            (objective[i] == objective[best] &&
             kb.hyps[i].total_logp > kb.hyps[best].total_logp))
            best = i;
    }
    return kb.hyps[best];
}

} // namespace

TEST_CASE("token polarity matches the worked example") {
    // hope "a small house", fear "the house"
    const int a = 10, small = 11, house = 12, the = 13;
    auto [tau_hope, tau_fear] = token_polarity({a, small, house}, {the, house});
    CHECK(tau_hope == std::vector<int>{1, 1, 0});
    CHECK(tau_fear == std::vector<int>{-1, 0});
}

TEST_CASE("token polarity trivial cases") {
    SUBCASE("identical sequences go all zero") {
        auto [th, tf] = token_polarity({4, 5, 6}, {4, 5, 6});
        CHECK(th == std::vector<int>{0, 0, 0});
        CHECK(tf == std::vector<int>{0, 0, 0});
    }
    SUBCASE("disjoint token sets keep full polarity") {
        auto [th, tf] = token_polarity({4, 5}, {6, 7, 8});
        CHECK(th == std::vector<int>{1, 1});
        CHECK(tf == std::vector<int>{-1, -1, -1});
    }
    SUBCASE("repeated shared types are zeroed at every occurrence") {
        auto [th, tf] = token_polarity({4, 4, 5}, {4, 6});
        CHECK(th == std::vector<int>{0, 0, 1});
        CHECK(tf == std::vector<int>{0, -1});
    }
    SUBCASE("empty sequences are rejected") {
        CHECK_THROWS_AS(token_polarity({}, {4}), std::invalid_argument);
    }
}

TEST_CASE("token polarity swap symmetry") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> a, b;
        for (int i = 0, n = rng.uniform_int(1, 6); i < n; ++i) a.push_back(rng.uniform_int(4, 8));
        for (int i = 0, n = rng.uniform_int(1, 6); i < n; ++i) b.push_back(rng.uniform_int(4, 8));
        auto [ta, tb] = token_polarity(a, b);
        auto [tb2, ta2] = token_polarity(b, a);
        // swapping arguments swaps the zero patterns; signs follow the side
        REQUIRE(ta.size() == ta2.size());
        for (std::size_t i = 0; i < ta.size(); ++i) CHECK((ta[i] == 0) == (ta2[i] == 0));
        for (std::size_t i = 0; i < tb.size(); ++i) CHECK((tb[i] == 0) == (tb2[i] == 0));
    }
}

TEST_CASE("parsing selection on rewards [0,1,0]") {
    KBestList kb = make_kbest({hyp({4, 2}, -0.5), hyp({5, 2}, -1.0), hyp({6, 2}, -2.0)});
    auto reward = [](const Hypothesis& h) { return h.tokens[0] == 5 ? 1 : 0; };
    SelectorConfig cfg;
    cfg.variant = SelectorVariant::Ramp;
    auto pair = select_parsing(kb, reward, nullptr, cfg);
    REQUIRE(pair.has_value());
    CHECK(pair->hope.tokens == std::vector<int>{5, 2}); // rank 2
    CHECK(pair->fear.tokens == std::vector<int>{4, 2}); // rank 1

    SUBCASE("ramp1 takes the model prediction as hope") {
        cfg.variant = SelectorVariant::Ramp1;
        auto p = select_parsing(kb, reward, nullptr, cfg);
        REQUIRE(p.has_value());
        CHECK(p->hope.tokens == std::vector<int>{4, 2});
        CHECK(p->fear.tokens == std::vector<int>{4, 2});
    }
    SUBCASE("ramp2 takes the model prediction as fear") {
        cfg.variant = SelectorVariant::Ramp2;
        auto p = select_parsing(kb, reward, nullptr, cfg);
        REQUIRE(p.has_value());
        CHECK(p->hope.tokens == std::vector<int>{5, 2});
        CHECK(p->fear.tokens == std::vector<int>{4, 2});
    }
}

TEST_CASE("parsing selection skips, caches and falls back") {
    SelectorConfig cfg;
    cfg.variant = SelectorVariant::Ramp;
    auto all_wrong = [](const Hypothesis&) { return 0; };
    auto all_right = [](const Hypothesis&) { return 1; };

    SUBCASE("all rewards 0 with an empty cache skips the instance") {
        HopeFearCache cache;
        KBestList kb = make_kbest({hyp({4, 2}, -0.5)});
        CHECK(!select_parsing(kb, all_wrong, &cache, cfg).has_value());
    }
    SUBCASE("a cached hope fills the missing side") {
        HopeFearCache cache;
        KBestList early = make_kbest({hyp({7, 2}, -0.2)}, 42);
        auto first = select_parsing(early, all_right, &cache, cfg);
        CHECK(!first.has_value()); // fear side missing, only hope cached
        KBestList later = make_kbest({hyp({4, 2}, -0.5)}, 42);
        auto pair = select_parsing(later, all_wrong, &cache, cfg);
        REQUIRE(pair.has_value());
        CHECK(pair->hope.tokens == std::vector<int>{7, 2}); // from cache
        CHECK(pair->fear.tokens == std::vector<int>{4, 2}); // fresh
    }
    SUBCASE("found outputs overwrite the cache, absent ones never clear it") {
        HopeFearCache cache;
        cache.put_hope(1, hyp({9, 2}, -3.0));
        KBestList kb = make_kbest({hyp({5, 2}, -0.1)}, 1);
        auto pair = select_parsing(kb, all_right, &cache, cfg);
        CHECK(!pair.has_value()); // no fear anywhere
        const auto* entry = cache.find(1);
        REQUIRE(entry != nullptr);
        REQUIRE(entry->hope.has_value());
        CHECK(entry->hope->tokens == std::vector<int>{5, 2}); // overwritten by the fresh find
        CHECK(!entry->fear.has_value());
    }
    SUBCASE("empty k-best list is rejected") {
        CHECK_THROWS_AS(select_parsing(KBestList{}, all_wrong, nullptr, cfg),
                        std::invalid_argument);
    }
}

TEST_CASE("hope/fear cache round-trips through disk") {
    HopeFearCache cache;
    cache.put_hope(3, hyp({4, 5, 2}, -1.25));
    cache.put_fear(3, hyp({6, 2}, -2.5));
    cache.put_fear(9, hyp({7, 7, 2}, -0.75));
    const std::string path =
        (std::filesystem::temp_directory_path() / "seqramp_cache_test.tsv").string();
    cache.save(path);
    HopeFearCache loaded;
    loaded.load(path);
    REQUIRE(loaded.size() == 2);
    const auto* e = loaded.find(3);
    REQUIRE(e != nullptr);
    REQUIRE(e->hope.has_value());
    CHECK(e->hope->tokens == std::vector<int>{4, 5, 2});
    CHECK(e->hope->total_logp == doctest::Approx(-1.25));
    REQUIRE(e->fear.has_value());
    CHECK(e->fear->tokens == std::vector<int>{6, 2});
    std::remove(path.c_str());
}

TEST_CASE("weak MT selection limits") {
    std::vector<int> match_plus{4, 5, 6, 2};
    std::vector<int> match_minus{7, 8, 2};
    KBestList kb = make_kbest({hyp(match_minus, -0.5), hyp(match_plus, -1.5), hyp({9, 2}, -3.0)});
    NGramIndex dplus(0, {4, 5, 6}, 2);
    NGramIndex dminus(1, {7, 8}, 2);
    WeakDocContext ctx{&dplus, &dminus, 3, 1.0};

    SelectorConfig cfg;
    cfg.variant = SelectorVariant::Ramp;
    SUBCASE("alpha -> 0 collapses hope and fear onto the model prediction") {
        cfg.alpha = 0.0;
        HopeFearPair p = select_weak_mt(kb, ctx, cfg);
        CHECK(p.hope.tokens == match_minus);
        CHECK(p.fear.tokens == match_minus);
    }
    SUBCASE("large alpha makes the metric dominate") {
        cfg.alpha = 1000.0;
        HopeFearPair p = select_weak_mt(kb, ctx, cfg);
        CHECK(p.hope.tokens == match_plus); // argmax delta1(., d+)
    }
    SUBCASE("bipolar variants require the irrelevant document") {
        cfg.variant = SelectorVariant::RampMinus;
        WeakDocContext no_minus{&dplus, nullptr, 3, 1.0};
        CHECK_THROWS_AS(select_weak_mt(kb, no_minus, cfg), UsageError);
    }
    SUBCASE("ramp- fear is a hope w.r.t. the irrelevant document") {
        cfg.variant = SelectorVariant::RampMinus;
        cfg.alpha = 1000.0;
        HopeFearPair p = select_weak_mt(kb, ctx, cfg);
        CHECK(p.hope.tokens == match_plus);
        CHECK(p.fear.tokens == match_minus);
    }
}

TEST_CASE("full MT selection fixed points") {
    std::vector<int> ref{4, 5, 6, 7, 2};
    Hypothesis scored_ref = hyp(ref, -0.9);
    KBestList kb = make_kbest({hyp({4, 5, 2}, -0.4), hyp({4, 5, 6, 7, 2}, -1.1), hyp({8, 2}, -2.0)});

    SelectorConfig cfg;
    SUBCASE("perc1 pairs the reference against the prediction") {
        cfg.variant = SelectorVariant::Perc1;
        HopeFearPair p = select_full_mt(kb, ref, &scored_ref, cfg);
        CHECK(p.hope.tokens == ref);
        CHECK(p.fear.tokens == kb.best().tokens);
    }
    SUBCASE("perc2 picks the best-metric candidate as hope") {
        cfg.variant = SelectorVariant::Perc2;
        HopeFearPair p = select_full_mt(kb, ref, nullptr, cfg);
        CHECK(p.hope.tokens == std::vector<int>{4, 5, 6, 7, 2});
        CHECK(p.fear.tokens == kb.best().tokens);
    }
    SUBCASE("perc2 degenerates when the prediction has the best metric") {
        KBestList peaked = make_kbest({hyp(ref, -0.1), hyp({8, 2}, -5.0)});
        cfg.variant = SelectorVariant::Perc2;
        HopeFearPair p = select_full_mt(peaked, ref, nullptr, cfg);
        CHECK(p.hope.tokens == p.fear.tokens);
    }
}

TEST_CASE("selector brute-force equivalence over random k-best lists") {
    Rng rng(2718);
    int trials = 0;
    for (int trial = 0; trial < 100; ++trial) {
        KBestList kb = random_kbest(rng, 8);
        const double alpha = rng.uniform(0.1, 20.0);
        NGramIndex dplus(0, {4, 5, 6, 7}, 2);
        NGramIndex dminus(1, {8, 9}, 2);
        WeakDocContext ctx{&dplus, &dminus, rng.uniform_int(1, 6), 1.0};
        std::vector<int> ref;
        for (int i = 0, n = rng.uniform_int(1, 5); i < n; ++i) ref.push_back(rng.uniform_int(4, 9));
        ref.push_back(Vocab::kEos);

        auto obj = [&](double sign, auto&& delta) {
            std::vector<double> v;
            for (const Hypothesis& h : kb.hyps)
                v.push_back(h.total_logp + sign * alpha * (1.0 - delta(h)));
            return v;
        };
        auto d1p = [&](const Hypothesis& h) {
            return delta1(h.tokens, dplus, ctx.source_len, ctx.length_ratio);
        };
        auto d1m = [&](const Hypothesis& h) {
            return delta1(h.tokens, dminus, ctx.source_len, ctx.length_ratio);
        };
        auto d2 = [&](const Hypothesis& h) {
            return delta2(h.tokens, dplus, dminus, ctx.source_len, ctx.length_ratio);
        };
        auto bl = [&](const Hypothesis& h) { return bleu_plus1(h.tokens, ref); };

        SelectorConfig cfg;
        cfg.alpha = alpha;

        // weak MT variants
        for (SelectorVariant v : {SelectorVariant::Ramp, SelectorVariant::RampMinus,
                                  SelectorVariant::Ramp1Minus, SelectorVariant::Ramp2,
                                  SelectorVariant::RampDelta2}) {
            cfg.variant = v;
            HopeFearPair got = select_weak_mt(kb, ctx, cfg);
            Hypothesis want_hope, want_fear;
            switch (v) {
                case SelectorVariant::Ramp:
                    want_hope = oracle_argmax(kb, obj(-1.0, d1p));
                    want_fear = oracle_argmax(kb, obj(+1.0, d1p));
                    break;
                case SelectorVariant::RampMinus:
                    want_hope = oracle_argmax(kb, obj(-1.0, d1p));
                    want_fear = oracle_argmax(kb, obj(-1.0, d1m));
                    break;
                case SelectorVariant::Ramp1Minus:
                    want_hope = kb.best();
                    want_fear = oracle_argmax(kb, obj(-1.0, d1m));
                    break;
                case SelectorVariant::Ramp2:
                    want_hope = oracle_argmax(kb, obj(-1.0, d1p));
                    want_fear = kb.best();
                    break;
                default:
                    want_hope = oracle_argmax(kb, obj(-1.0, d2));
                    want_fear = oracle_argmax(kb, obj(+1.0, d2));
                    break;
            }
            CHECK(got.hope.tokens == want_hope.tokens);
            CHECK(got.fear.tokens == want_fear.tokens);
        }

        // full MT variants
        Hypothesis scored_ref = hyp(ref, -1.0);
        for (SelectorVariant v : {SelectorVariant::Ramp, SelectorVariant::Ramp1,
                                  SelectorVariant::Ramp2, SelectorVariant::Perc1,
                                  SelectorVariant::Perc2}) {
            cfg.variant = v;
            HopeFearPair got = select_full_mt(kb, ref, &scored_ref, cfg);
            Hypothesis want_hope, want_fear;
            switch (v) {
                case SelectorVariant::Ramp:
                    want_hope = oracle_argmax(kb, obj(-1.0, bl));
                    want_fear = oracle_argmax(kb, obj(+1.0, bl));
                    break;
                case SelectorVariant::Ramp1:
                    want_hope = kb.best();
                    want_fear = oracle_argmax(kb, obj(+1.0, bl));
                    break;
                case SelectorVariant::Ramp2:
                    want_hope = oracle_argmax(kb, obj(-1.0, bl));
                    want_fear = kb.best();
                    break;
                case SelectorVariant::Perc1:
                    want_hope = scored_ref;
                    want_fear = kb.best();
                    break;
                default: {
                    std::vector<double> metric;
                    for (const Hypothesis& h : kb.hyps) metric.push_back(bl(h));
                    want_hope = oracle_argmax(kb, metric);
                    want_fear = kb.best();
                    break;
                }
            }
            CHECK(got.hope.tokens == want_hope.tokens);
            CHECK(got.fear.tokens == want_fear.tokens);
        }

        // parsing variants against an exhaustive scan
        auto reward = [&](const Hypothesis& h) { return static_cast<int>(h.tokens.size() % 2); };
        for (SelectorVariant v :
             {SelectorVariant::Ramp, SelectorVariant::Ramp1, SelectorVariant::Ramp2}) {
            cfg.variant = v;
            auto got = select_parsing(kb, reward, nullptr, cfg);
            const Hypothesis* want_hope = nullptr;
            const Hypothesis* want_fear = nullptr;
            for (const Hypothesis& h : kb.hyps) {
                if (!want_hope && reward(h) == 1) want_hope = &h;
                if (!want_fear && reward(h) == 0) want_fear = &h;
            }
            if (v == SelectorVariant::Ramp1) want_hope = &kb.best();
            if (v == SelectorVariant::Ramp2) want_fear = &kb.best();
            if (!want_hope || !want_fear) {
                CHECK(!got.has_value());
            } else {
                REQUIRE(got.has_value());
                CHECK(got->hope.tokens == want_hope->tokens);
                CHECK(got->fear.tokens == want_fear->tokens);
            }
        }
        ++trials;
    }
    CHECK(trials == 100);
}

TEST_CASE("selection is invariant under joint rescaling of scores and alpha") {
    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        KBestList kb = random_kbest(rng, 6);
        NGramIndex dplus(0, {4, 5, 6}, 2);
        NGramIndex dminus(1, {7, 8}, 2);
        WeakDocContext ctx{&dplus, &dminus, 3, 1.0};
        SelectorConfig cfg;
        cfg.variant = SelectorVariant::Ramp;
        cfg.alpha = rng.uniform(0.5, 5.0);
        HopeFearPair base = select_weak_mt(kb, ctx, cfg);

        const double c = rng.uniform(1.5, 4.0);
        KBestList scaled = kb;
        for (Hypothesis& h : scaled.hyps) h.total_logp *= c;
        SelectorConfig cfg2 = cfg;
        cfg2.alpha = cfg.alpha * c;
        HopeFearPair same = select_weak_mt(scaled, ctx, cfg2);
        CHECK(same.hope.tokens == base.hope.tokens);
        CHECK(same.fear.tokens == base.fear.tokens);
    }
}

TEST_CASE("selected outputs always come from the k-best list") {
    Rng rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        KBestList kb = random_kbest(rng, 5);
        NGramIndex dplus(0, {4, 5}, 2);
        NGramIndex dminus(1, {6, 7}, 2);
        WeakDocContext ctx{&dplus, &dminus, 2, 1.0};
        SelectorConfig cfg;
        cfg.variant = SelectorVariant::RampDelta2;
        cfg.alpha = rng.uniform(0.1, 10.0);
        HopeFearPair p = select_weak_mt(kb, ctx, cfg);
        auto member = [&](const Hypothesis& h) {
            for (const Hypothesis& cand : kb.hyps)
                if (cand.tokens == h.tokens) return true;
            return false;
        };
        CHECK(member(p.hope));
        CHECK(member(p.fear));
    }
}
