#include "seqramp/selectors.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "seqramp/common.hpp"

namespace seqramp {

const char* to_string(SelectorVariant v) {
    switch (v) {
        case SelectorVariant::Ramp: return "ramp";
        case SelectorVariant::Ramp1: return "ramp1";
        case SelectorVariant::Ramp2: return "ramp2";
        case SelectorVariant::RampMinus: return "ramp-";
        case SelectorVariant::Ramp1Minus: return "ramp1-";
        case SelectorVariant::RampDelta2: return "ramp-d2";
        case SelectorVariant::Perc1: return "perc1";
        case SelectorVariant::Perc2: return "perc2";
    }
    return "?";
}

std::pair<std::vector<int>, std::vector<int>> token_polarity(const std::vector<int>& hope,
                                                             const std::vector<int>& fear) {
    if (hope.empty() || fear.empty())
        throw std::invalid_argument("token_polarity: sequences must be non-empty");
    std::unordered_set<int> hope_types(hope.begin(), hope.end());
    std::unordered_set<int> fear_types(fear.begin(), fear.end());
    std::vector<int> tau_hope(hope.size());
    std::vector<int> tau_fear(fear.size());
    for (std::size_t j = 0; j < hope.size(); ++j)
        tau_hope[j] = fear_types.count(hope[j]) ? 0 : 1;
    for (std::size_t j = 0; j < fear.size(); ++j)
        tau_fear[j] = hope_types.count(fear[j]) ? 0 : -1;
    return {std::move(tau_hope), std::move(tau_fear)};
}

void HopeFearPair::fill_polarity() {
    auto [th, tf] = token_polarity(hope.tokens, fear.tokens);
    tau_hope = std::move(th);
    tau_fear = std::move(tf);
}

const HopeFearCache::Entry* HopeFearCache::find(int input_id) const {
    auto it = entries_.find(input_id);
    return it == entries_.end() ? nullptr : &it->second;
}

void HopeFearCache::put_hope(int input_id, Hypothesis h) {
    entries_[input_id].hope = std::move(h);
}

void HopeFearCache::put_fear(int input_id, Hypothesis h) {
    entries_[input_id].fear = std::move(h);
}

namespace {

void write_hyp(std::ostream& os, const std::optional<Hypothesis>& h) {
    if (!h) {
        os << "-\t-";
        return;
    }
    for (std::size_t i = 0; i < h->tokens.size(); ++i) {
        if (i) os << " ";
        os << h->tokens[i];
    }
    os << "\t";
    os.precision(17);
    for (std::size_t i = 0; i < h->token_logps.size(); ++i) {
        if (i) os << " ";
        os << h->token_logps[i];
    }
}

std::optional<Hypothesis> read_hyp(const std::string& toks, const std::string& logps) {
    if (toks == "-") return std::nullopt;
    Hypothesis h;
    std::istringstream ts(toks);
    int t;
    while (ts >> t) h.tokens.push_back(t);
    std::istringstream ps(logps);
    double p;
    while (ps >> p) {
        h.token_logps.push_back(p);
        h.total_logp += p;
    }
    if (h.tokens.size() != h.token_logps.size())
        throw DataError("hope/fear cache entry is malformed");
    return h;
}

} // namespace

void HopeFearCache::save(const std::string& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot write cache: " + path);
    for (const auto& [id, entry] : entries_) {
        os << id << "\t";
        write_hyp(os, entry.hope);
        os << "\t";
        write_hyp(os, entry.fear);
        os << "\n";
    }
}

void HopeFearCache::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open cache: " + path);
    entries_.clear();
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() != 5) throw DataError("hope/fear cache line is malformed: " + path);
        Entry e;
        e.hope = read_hyp(fields[1], fields[2]);
        e.fear = read_hyp(fields[3], fields[4]);
        entries_[std::stoi(fields[0])] = std::move(e);
    }
}

std::optional<HopeFearPair> select_parsing(const KBestList& kbest,
                                           const std::function<int(const Hypothesis&)>& reward_of,
                                           HopeFearCache* cache, const SelectorConfig& cfg) {
    if (kbest.empty()) throw std::invalid_argument("select_parsing: empty k-best list");
    const bool search_hope = cfg.variant != SelectorVariant::Ramp1;
    const bool search_fear = cfg.variant != SelectorVariant::Ramp2;
    if (cfg.variant != SelectorVariant::Ramp && cfg.variant != SelectorVariant::Ramp1 &&
        cfg.variant != SelectorVariant::Ramp2)
        throw UsageError(std::string("select_parsing: variant ") + to_string(cfg.variant) +
                         " is not a parsing variant");

    std::optional<Hypothesis> hope;
    std::optional<Hypothesis> fear;
    // Rewards are judged lazily in rank order: the scan stops as soon as every
    // searched side is filled, so at most k candidates are executed.
    for (const Hypothesis& h : kbest.hyps) {
        if ((!search_hope || hope) && (!search_fear || fear)) break;
        const int r = reward_of(h);
        if (search_hope && !hope && r == 1) hope = h;
        if (search_fear && !fear && r == 0) fear = h;
    }

    if (cache) {
        if (hope && search_hope) cache->put_hope(kbest.input_id, *hope);
        if (fear && search_fear) cache->put_fear(kbest.input_id, *fear);
    }

    if (!search_hope) hope = kbest.best();
    if (!search_fear) fear = kbest.best();

    if (cache) {
        const HopeFearCache::Entry* e = cache->find(kbest.input_id);
        if (!hope && e && e->hope) hope = e->hope;
        if (!fear && e && e->fear) fear = e->fear;
    }
    if (!hope || !fear) return std::nullopt;

    HopeFearPair pair{*hope, *fear, {}, {}};
    if (cfg.token_level) pair.fill_polarity();
    return pair;
}

namespace {

// argmax over the k-best list of score + sign * alpha * (1 - delta(h)),
// ties toward higher model score, then lower rank.
const Hypothesis& argmax_augmented(const KBestList& kbest, double alpha, double sign,
                                   const std::function<double(const Hypothesis&)>& delta) {
    std::size_t best = 0;
    double best_obj = 0.0;
    for (std::size_t i = 0; i < kbest.hyps.size(); ++i) {
        const Hypothesis& h = kbest.hyps[i];
        const double obj = h.total_logp + sign * alpha * (1.0 - delta(h));
        if (i == 0 || obj > best_obj ||
            (obj == best_obj && h.total_logp > kbest.hyps[best].total_logp)) {
            best = i;
            best_obj = obj;
        }
    }
    return kbest.hyps[best];
}

} // namespace

HopeFearPair select_weak_mt(const KBestList& kbest, const WeakDocContext& ctx,
                            const SelectorConfig& cfg) {
    if (kbest.empty()) throw std::invalid_argument("select_weak_mt: empty k-best list");
    if (ctx.dplus == nullptr) throw std::invalid_argument("select_weak_mt: missing d+ index");
    const bool needs_dminus = cfg.variant == SelectorVariant::RampMinus ||
                              cfg.variant == SelectorVariant::Ramp1Minus ||
                              cfg.variant == SelectorVariant::RampDelta2;
    if (needs_dminus && ctx.dminus == nullptr)
        throw UsageError(std::string("select_weak_mt: variant ") + to_string(cfg.variant) +
                         " requires an irrelevant document");

    auto d1_plus = [&](const Hypothesis& h) {
        return delta1(h.tokens, *ctx.dplus, ctx.source_len, ctx.length_ratio);
    };
    auto d1_minus = [&](const Hypothesis& h) {
        return delta1(h.tokens, *ctx.dminus, ctx.source_len, ctx.length_ratio);
    };
    auto d2 = [&](const Hypothesis& h) {
        return delta2(h.tokens, *ctx.dplus, *ctx.dminus, ctx.source_len, ctx.length_ratio);
    };

    HopeFearPair pair;
    switch (cfg.variant) {
        case SelectorVariant::Ramp:
            pair.hope = argmax_augmented(kbest, cfg.alpha, -1.0, d1_plus);
            pair.fear = argmax_augmented(kbest, cfg.alpha, +1.0, d1_plus);
            break;
        case SelectorVariant::RampMinus:
            pair.hope = argmax_augmented(kbest, cfg.alpha, -1.0, d1_plus);
            pair.fear = argmax_augmented(kbest, cfg.alpha, -1.0, d1_minus);
            break;
        case SelectorVariant::Ramp1Minus:
            pair.hope = kbest.best();
            pair.fear = argmax_augmented(kbest, cfg.alpha, -1.0, d1_minus);
            break;
        case SelectorVariant::Ramp2:
            pair.hope = argmax_augmented(kbest, cfg.alpha, -1.0, d1_plus);
            pair.fear = kbest.best();
            break;
        case SelectorVariant::RampDelta2:
            pair.hope = argmax_augmented(kbest, cfg.alpha, -1.0, d2);
            pair.fear = argmax_augmented(kbest, cfg.alpha, +1.0, d2);
            break;
        default:
            throw UsageError(std::string("select_weak_mt: variant ") + to_string(cfg.variant) +
                             " is not a weak MT variant");
    }
    if (cfg.token_level) pair.fill_polarity();
    return pair;
}

HopeFearPair select_full_mt(const KBestList& kbest, const std::vector<int>& ref,
                            const Hypothesis* scored_ref, const SelectorConfig& cfg) {
    if (kbest.empty()) throw std::invalid_argument("select_full_mt: empty k-best list");
    if (ref.empty()) throw std::invalid_argument("select_full_mt: empty reference");

    auto bleu = [&](const Hypothesis& h) { return bleu_plus1(h.tokens, ref); };

    HopeFearPair pair;
    switch (cfg.variant) {
        case SelectorVariant::Ramp:
            pair.hope = argmax_augmented(kbest, cfg.alpha, -1.0, bleu);
            pair.fear = argmax_augmented(kbest, cfg.alpha, +1.0, bleu);
            break;
        case SelectorVariant::Ramp1:
            pair.hope = kbest.best();
            pair.fear = argmax_augmented(kbest, cfg.alpha, +1.0, bleu);
            break;
        case SelectorVariant::Ramp2:
            pair.hope = argmax_augmented(kbest, cfg.alpha, -1.0, bleu);
            pair.fear = kbest.best();
            break;
        case SelectorVariant::Perc1:
            if (scored_ref == nullptr)
                throw std::invalid_argument("select_full_mt: perc1 needs the scored reference");
            pair.hope = *scored_ref;
            pair.fear = kbest.best();
            break;
        case SelectorVariant::Perc2: {
            // argmax of the metric alone; ties toward higher model score, then
            // lower rank.
            std::size_t best = 0;
            double best_metric = -1.0;
            for (std::size_t i = 0; i < kbest.hyps.size(); ++i) {
                const double m = bleu(kbest.hyps[i]);
                if (m > best_metric ||
                    (m == best_metric &&
                     kbest.hyps[i].total_logp > kbest.hyps[best].total_logp)) {
                    best = i;
                    best_metric = m;
                }
            }
            pair.hope = kbest.hyps[best];
            pair.fear = kbest.best();
            break;
        }
        default:
            throw UsageError(std::string("select_full_mt: variant ") + to_string(cfg.variant) +
                             " is not a full MT variant");
    }
    if (cfg.token_level) pair.fill_polarity();
    return pair;
}

} // namespace seqramp
