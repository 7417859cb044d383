#include "seqramp/tasks.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "seqramp/common.hpp"
#include "seqramp/rng.hpp"
#include "seqramp/vocab.hpp"

namespace seqramp {

std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

std::string format_answer(const Answer& a) {
    std::string out;
    bool first = true;
    for (const std::string& v : a) {
        if (!first) out += '|';
        out += v;
        first = false;
    }
    return out;
}

Answer parse_answer_field(const std::string& field) {
    Answer a;
    if (field.empty()) return a;
    std::size_t start = 0;
    while (true) {
        std::size_t bar = field.find('|', start);
        a.insert(field.substr(start, bar == std::string::npos ? bar : bar - start));
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    return a;
}

// ---------------------------------------------------------------------------
// ToyDatabase
// ---------------------------------------------------------------------------

void ToyDatabase::add(const std::string& entity, const std::string& attribute,
                      const std::string& value) {
    triples_.push_back({entity, attribute, value});
    by_entity_attr_[{entity, attribute}] = value;
    by_attr_value_[{attribute, value}].push_back(entity);
}

Answer ToyDatabase::execute(const std::vector<std::string>& parse) const {
    Answer out;
    if (parse.empty()) return out;
    const std::string& cmd = parse[0];
    if (cmd == "lookup" && parse.size() == 3) {
        auto it = by_entity_attr_.find({parse[1], parse[2]});
        if (it == by_entity_attr_.end()) return out; // unknown entity or attribute
        out.insert(it->second);
        return out;
    }
    if ((cmd == "find" || cmd == "count") && parse.size() == 3) {
        auto it = by_attr_value_.find({parse[1], parse[2]});
        if (cmd == "find") {
            if (it != by_attr_value_.end())
                out.insert(it->second.begin(), it->second.end());
            return out; // empty when nothing matches
        }
        const std::size_t n = it == by_attr_value_.end() ? 0 : it->second.size();
        out.insert(std::to_string(n));
        return out;
    }
    if (cmd == "find2" && parse.size() == 5) {
        auto a = by_attr_value_.find({parse[1], parse[2]});
        auto b = by_attr_value_.find({parse[3], parse[4]});
        if (a == by_attr_value_.end() || b == by_attr_value_.end()) return out;
        std::set<std::string> right(b->second.begin(), b->second.end());
        for (const std::string& e : a->second)
            if (right.count(e)) out.insert(e);
        return out;
    }
    return out; // malformed queries are data, not failures
}

void ToyDatabase::save(const std::string& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot write database: " + path);
    for (const auto& t : triples_) os << t[0] << "\t" << t[1] << "\t" << t[2] << "\n";
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    return fields;
}

[[noreturn]] void malformed(const std::string& path, std::size_t line_no, const std::string& what) {
    throw DataError(path + ":" + std::to_string(line_no + 1) + ": " + what);
}

std::vector<int> parse_id_list(const std::string& field, const std::string& path,
                               std::size_t line_no) {
    std::vector<int> out;
    if (field.empty()) return out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = field.find(',', start);
        const std::string part =
            field.substr(start, comma == std::string::npos ? comma : comma - start);
        try {
            out.push_back(std::stoi(part));
        } catch (const std::exception&) {
            malformed(path, line_no, "bad document id '" + part + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string format_id_list(const std::vector<int>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(ids[i]);
    }
    return out;
}

} // namespace

ToyDatabase ToyDatabase::load(const std::string& path) {
    ToyDatabase db;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split_fields(lines[i]);
        if (fields.size() != 3) malformed(path, i, "expected entity<TAB>attribute<TAB>value");
        db.add(fields[0], fields[1], fields[2]);
    }
    return db;
}

// ---------------------------------------------------------------------------
// Parsing task generator
// ---------------------------------------------------------------------------

namespace {

struct AttrSpec {
    std::string name;
    std::vector<std::string> values;
};

const std::vector<AttrSpec>& attribute_specs() {
    static const std::vector<AttrSpec> specs{
        {"color",
         {"red", "blue", "green", "yellow", "black", "white", "purple", "orange", "pink", "gray"}},
        {"size", {"tiny", "small", "medium", "big", "huge", "giant"}},
        {"shape", {"cube", "ball", "cone", "ring", "slab", "disc", "rod", "plate"}},
        {"material", {"wood", "metal", "glass", "stone", "cloth", "clay", "rubber"}},
    };
    return specs;
}

struct QueryDraw {
    std::vector<std::string> question;
    std::vector<std::string> parse;
};

std::vector<std::string> fill_template(const std::string& tpl,
                                       const std::map<std::string, std::string>& slots) {
    std::vector<std::string> out;
    for (const std::string& tok : split_tokens(tpl)) {
        auto it = slots.find(tok);
        out.push_back(it == slots.end() ? tok : it->second);
    }
    return out;
}

class ParsingGenerator {
  public:
    ParsingGenerator(std::uint64_t seed, const ParsingSizes& sizes)
        : sizes_(sizes), rng_(Rng(seed).substream("parsing")) {
        build_db();
    }

    ParsingTask run() {
        ParsingTask task;
        task.db = db_;
        task.supervised = make_supervised();
        make_eval_splits(task.dev, task.test);
        task.weak = make_weak(sizes_.weak);
        return task;
    }

  private:
    void build_db() {
        for (int e = 0; e < sizes_.entities; ++e) {
            const std::string entity = "e" + std::to_string(e);
            for (const AttrSpec& spec : attribute_specs()) {
                const std::string& val =
                    spec.values[static_cast<std::size_t>(rng_.uniform_int(
                        0, static_cast<int>(spec.values.size()) - 1))];
                db_.add(entity, spec.name, val);
            }
        }
    }

    std::string random_entity() {
        return "e" + std::to_string(rng_.uniform_int(0, sizes_.entities - 1));
    }

    const AttrSpec& random_attr() {
        const auto& specs = attribute_specs();
        return specs[static_cast<std::size_t>(
            rng_.uniform_int(0, static_cast<int>(specs.size()) - 1))];
    }

    // The supervised split only sees the first half of each template list;
    // the held-out phrasings appear in the weak and evaluation splits, which
    // is where answer feedback has room to correct the parser.
    std::string pick_template(const std::vector<std::string>& tpls) {
        const int hi = seen_templates_only_ ? static_cast<int>(tpls.size()) / 2 - 1
                                            : static_cast<int>(tpls.size()) - 1;
        return tpls[static_cast<std::size_t>(rng_.uniform_int(0, hi))];
    }

    QueryDraw draw_lookup(const std::string& entity, const std::string& attr) {
        static const std::vector<std::string> tpls{
            "what ATTR is ENT",      "tell me the ATTR of ENT", "which ATTR does ENT have",
            "state the ATTR of ENT", "give the ATTR of ENT",    "what is the ATTR of ENT",
        };
        QueryDraw d;
        d.question = fill_template(pick_template(tpls), {{"ATTR", attr}, {"ENT", entity}});
        d.parse = {"lookup", entity, attr};
        return d;
    }

    QueryDraw draw_find(const std::string& attr, const std::string& val) {
        static const std::vector<std::string> tpls{
            "which things are VAL",
            "list all VAL things",
            "find the VAL ones",
            "show every VAL thing",
            "name the things that are VAL",
            "point out the VAL items",
        };
        QueryDraw d;
        d.question = fill_template(pick_template(tpls), {{"VAL", val}});
        d.parse = {"find", attr, val};
        return d;
    }

    QueryDraw draw_count(const std::string& attr, const std::string& val) {
        static const std::vector<std::string> tpls{
            "how many things are VAL",
            "count the VAL things",
            "what number of things are VAL",
            "how many VAL things exist",
            "give the total of VAL things",
            "tally the VAL items",
        };
        QueryDraw d;
        d.question = fill_template(pick_template(tpls), {{"VAL", val}});
        d.parse = {"count", attr, val};
        return d;
    }

    QueryDraw draw_find2(const std::string& a1, const std::string& v1, const std::string& a2,
                         const std::string& v2) {
        static const std::vector<std::string> tpls{
            "which things are V1 and V2",
            "list all V1 V2 things",
            "find the V1 V2 ones",
            "show every V1 V2 thing",
            "name the things that are V1 and V2",
            "point out the V1 V2 items",
        };
        QueryDraw d;
        d.question = fill_template(pick_template(tpls), {{"V1", v1}, {"V2", v2}});
        d.parse = {"find2", a1, v1, a2, v2};
        return d;
    }

    QueryDraw draw_typed(int type) {
        switch (type) {
            case 0: {
                return draw_lookup(random_entity(), random_attr().name);
            }
            case 1: {
                const AttrSpec& a = random_attr();
                return draw_find(a.name,
                                 a.values[static_cast<std::size_t>(rng_.uniform_int(
                                     0, static_cast<int>(a.values.size()) - 1))]);
            }
            case 2: {
                const AttrSpec& a = random_attr();
                return draw_count(a.name,
                                  a.values[static_cast<std::size_t>(rng_.uniform_int(
                                      0, static_cast<int>(a.values.size()) - 1))]);
            }
            default: {
                const auto& specs = attribute_specs();
                int i = rng_.uniform_int(0, static_cast<int>(specs.size()) - 1);
                int j = rng_.uniform_int(0, static_cast<int>(specs.size()) - 2);
                if (j >= i) ++j;
                const AttrSpec& a1 = specs[static_cast<std::size_t>(i)];
                const AttrSpec& a2 = specs[static_cast<std::size_t>(j)];
                return draw_find2(
                    a1.name,
                    a1.values[static_cast<std::size_t>(
                        rng_.uniform_int(0, static_cast<int>(a1.values.size()) - 1))],
                    a2.name,
                    a2.values[static_cast<std::size_t>(
                        rng_.uniform_int(0, static_cast<int>(a2.values.size()) - 1))]);
            }
        }
    }

    // Draws an answerable query of a weighted random type whose question
    // string is fresh.
    QueryDraw draw_fresh(const std::vector<double>& type_weights) {
        for (int attempt = 0; attempt < 20000; ++attempt) {
            const int type = rng_.categorical(type_weights);
            QueryDraw d = draw_typed(type);
            if (db_.execute(d.parse).empty()) continue;
            const std::string key = join_tokens(d.question);
            if (used_questions_.insert(key).second) return d;
        }
        throw DataError("parsing generator exhausted the question space; request fewer instances");
    }

    ParsingInstance to_instance(const QueryDraw& d, bool keep_parse) {
        ParsingInstance inst;
        inst.question = d.question;
        if (keep_parse) inst.parse = d.parse;
        inst.answer = db_.execute(d.parse);
        if (inst.answer.empty())
            throw DataError("parsing generator produced an empty gold answer");
        return inst;
    }

    std::vector<ParsingInstance> make_supervised() {
        seen_templates_only_ = true;
        std::vector<ParsingInstance> out;
        // coverage first: every entity in a lookup, every matched
        // (attribute, value) in a find, and every attribute pair in a
        // conjunction, so all parse tokens and shapes are observed
        for (int e = 0; e < sizes_.entities && static_cast<int>(out.size()) < sizes_.supervised;
             ++e) {
            const std::string entity = "e" + std::to_string(e);
            QueryDraw d = draw_lookup(entity, random_attr().name);
            if (!used_questions_.insert(join_tokens(d.question)).second) continue;
            out.push_back(to_instance(d, true));
        }
        for (const AttrSpec& spec : attribute_specs()) {
            for (const std::string& val : spec.values) {
                if (static_cast<int>(out.size()) >= sizes_.supervised) break;
                if (db_.execute({"find", spec.name, val}).empty()) continue;
                QueryDraw d = draw_find(spec.name, val);
                if (!used_questions_.insert(join_tokens(d.question)).second) continue;
                out.push_back(to_instance(d, true));
            }
        }
        const auto& specs = attribute_specs();
        for (std::size_t i = 0; i < specs.size(); ++i) {
            for (std::size_t j = 0; j < specs.size(); ++j) {
                if (i == j || static_cast<int>(out.size()) >= sizes_.supervised) continue;
                for (int attempt = 0; attempt < 50; ++attempt) {
                    const AttrSpec& a1 = specs[i];
                    const AttrSpec& a2 = specs[j];
                    QueryDraw d = draw_find2(
                        a1.name,
                        a1.values[static_cast<std::size_t>(
                            rng_.uniform_int(0, static_cast<int>(a1.values.size()) - 1))],
                        a2.name,
                        a2.values[static_cast<std::size_t>(
                            rng_.uniform_int(0, static_cast<int>(a2.values.size()) - 1))]);
                    if (db_.execute(d.parse).empty()) continue;
                    if (!used_questions_.insert(join_tokens(d.question)).second) continue;
                    out.push_back(to_instance(d, true));
                    break;
                }
            }
        }
        // biased fill: lookups dominate, conjunctions and counts stay rare
        // enough to leave headroom for the weak phase
        const std::vector<double> weights{0.35, 0.1, 0.2, 0.35};
        while (static_cast<int>(out.size()) < sizes_.supervised)
            out.push_back(to_instance(draw_fresh(weights), true));
        seen_templates_only_ = false;
        return out;
    }

    // Dev and test are drawn jointly under the distinct-answer constraint and
    // assigned proportionally, so both splits share one type composition.
    // Per-type quotas keep the composition from collapsing onto the type
    // with the richest answer space; they are dropped if the space cannot
    // fill them.
    void make_eval_splits(std::vector<ParsingInstance>& dev, std::vector<ParsingInstance>& test) {
        const std::vector<double> weights{0.25, 0.25, 0.25, 0.25};
        const int total = sizes_.dev + sizes_.test;
        const std::vector<double> shares{0.34, 0.22, 0.08, 0.36};
        std::vector<int> quota(4);
        for (int t = 0; t < 4; ++t) quota[static_cast<std::size_t>(t)] =
            static_cast<int>(shares[static_cast<std::size_t>(t)] * total) + 1;
        std::vector<int> taken(4, 0);
        bool quotas_active = true;
        int attempts = 0;
        while (static_cast<int>(dev.size() + test.size()) < total) {
            if (++attempts > 400000)
                throw DataError("parsing generator cannot satisfy the distinct-answer constraint");
            if (quotas_active && attempts > 150000) quotas_active = false;
            const int type = rng_.categorical(weights);
            if (quotas_active && taken[static_cast<std::size_t>(type)] >=
                                     quota[static_cast<std::size_t>(type)])
                continue;
            QueryDraw d = draw_typed(type);
            const std::string qkey = join_tokens(d.question);
            if (used_questions_.count(qkey)) continue;
            const Answer answer = db_.execute(d.parse);
            if (answer.empty()) continue;
            const std::string pkey = join_tokens(d.parse);
            const std::string akey = format_answer(answer);
            auto seen = eval_parse_answer_.find(pkey);
            if (seen == eval_parse_answer_.end()) {
                if (eval_answers_.count(akey)) continue; // would alias another parse
                eval_parse_answer_[pkey] = akey;
                eval_answers_.insert(akey);
            }
            used_questions_.insert(qkey);
            ++taken[static_cast<std::size_t>(type)];
            ParsingInstance inst;
            inst.question = d.question;
            inst.parse = d.parse;
            inst.answer = answer;
            const int accepted = static_cast<int>(dev.size() + test.size());
            const bool to_dev =
                static_cast<long>(dev.size()) * total < static_cast<long>(sizes_.dev) * (accepted + 1);
            if (to_dev && static_cast<int>(dev.size()) < sizes_.dev) dev.push_back(std::move(inst));
            else if (static_cast<int>(test.size()) < sizes_.test) test.push_back(std::move(inst));
            else dev.push_back(std::move(inst));
        }
    }

    std::vector<ParsingInstance> make_weak(int count) {
        const std::vector<double> weights{0.25, 0.25, 0.25, 0.25};
        std::vector<ParsingInstance> out;
        out.reserve(static_cast<std::size_t>(count));
        // the gold parse is executed for its answer and then withheld
        while (static_cast<int>(out.size()) < count)
            out.push_back(to_instance(draw_fresh(weights), false));
        return out;
    }

    ParsingSizes sizes_;
    Rng rng_;
    ToyDatabase db_;
    bool seen_templates_only_ = false;
    std::unordered_set<std::string> used_questions_;
    std::map<std::string, std::string> eval_parse_answer_;
    std::unordered_set<std::string> eval_answers_;
};

} // namespace

ParsingTask generate_parsing_task(std::uint64_t seed, const ParsingSizes& sizes) {
    if (sizes.supervised <= 0 || sizes.weak <= 0 || sizes.dev <= 0 || sizes.test <= 0 ||
        sizes.entities <= 0)
        throw std::invalid_argument("generate_parsing_task: sizes must be positive");
    return ParsingGenerator(seed, sizes).run();
}

// ---------------------------------------------------------------------------
// Weak MT task generator
// ---------------------------------------------------------------------------

namespace {

class WeakMtGenerator {
  public:
    WeakMtGenerator(std::uint64_t seed, const WeakMtSizes& sizes)
        : sizes_(sizes), rng_(Rng(seed).substream("weakmt")) {
        build_lexicon();
    }

    WeakMtTask run() {
        WeakMtTask task;
        task.lexicon = lex_;
        task.pretrain = make_pretrain();
        double src_len = 0.0, tgt_len = 0.0;
        for (const SupervisedPair& p : task.pretrain) {
            src_len += static_cast<double>(p.source.size());
            tgt_len += static_cast<double>(p.target.size());
        }
        task.length_ratio = tgt_len / src_len;

        make_weak_and_docs(task);
        task.dev = make_eval_split(sizes_.dev);
        task.test = make_eval_split(sizes_.test);
        return task;
    }

  private:
    void build_lexicon() {
        lex_.source_words.resize(static_cast<std::size_t>(sizes_.vocab));
        lex_.target_words.resize(static_cast<std::size_t>(sizes_.vocab));
        lex_.flip_to.assign(static_cast<std::size_t>(sizes_.vocab), -1);
        for (int i = 0; i < sizes_.vocab; ++i) {
            lex_.source_words[static_cast<std::size_t>(i)] = "s" + std::to_string(i);
            lex_.target_words[static_cast<std::size_t>(i)] = "t" + std::to_string(i);
        }
        // 20% of the vocabulary flips to another word's general translation
        // in-domain (a cyclic derangement over the flipped subset)
        const int flips = std::max(2, sizes_.vocab / 5);
        std::vector<int> ids(static_cast<std::size_t>(sizes_.vocab));
        for (int i = 0; i < sizes_.vocab; ++i) ids[static_cast<std::size_t>(i)] = i;
        rng_.shuffle(ids);
        flipped_.assign(ids.begin(), ids.begin() + flips);
        std::sort(flipped_.begin(), flipped_.end());
        for (std::size_t i = 0; i < flipped_.size(); ++i) {
            const int from = flipped_[i];
            const int to = flipped_[(i + 1) % flipped_.size()];
            lex_.flip_to[static_cast<std::size_t>(from)] = to;
        }
    }

    int draw_word(double flip_weight) {
        std::vector<double> w(static_cast<std::size_t>(sizes_.vocab), 1.0);
        for (int f : flipped_) w[static_cast<std::size_t>(f)] = flip_weight;
        return rng_.categorical(w);
    }

    std::vector<int> draw_sentence(int min_len, int max_len, double flip_weight) {
        std::vector<int> out(static_cast<std::size_t>(rng_.uniform_int(min_len, max_len)));
        for (int& w : out) w = draw_word(flip_weight);
        return out;
    }

    std::vector<std::string> source_of(const std::vector<int>& words) {
        std::vector<std::string> out;
        out.reserve(words.size());
        for (int w : words) out.push_back(lex_.source_words[static_cast<std::size_t>(w)]);
        return out;
    }

    std::vector<std::string> translate(const std::vector<int>& words, bool in_domain) {
        std::vector<std::string> out;
        out.reserve(words.size());
        for (int w : words) {
            int t = w;
            if (in_domain && lex_.flip_to[static_cast<std::size_t>(w)] >= 0)
                t = lex_.flip_to[static_cast<std::size_t>(w)];
            out.push_back(lex_.target_words[static_cast<std::size_t>(t)]);
        }
        return out;
    }

    std::vector<int> fresh_sentence(int min_len, int max_len, double flip_weight,
                                    bool require_flip) {
        for (int attempt = 0; attempt < 20000; ++attempt) {
            std::vector<int> s = draw_sentence(min_len, max_len, flip_weight);
            if (require_flip) {
                bool has = false;
                for (int w : s) has = has || lex_.flip_to[static_cast<std::size_t>(w)] >= 0;
                if (!has) continue;
            }
            const std::string key = join_tokens(source_of(s));
            if (used_sources_.insert(key).second) return s;
        }
        throw DataError("weak MT generator exhausted the sentence space; request fewer instances");
    }

    std::vector<SupervisedPair> make_pretrain() {
        std::vector<SupervisedPair> out;
        out.reserve(static_cast<std::size_t>(sizes_.pretrain));
        // flipped-source words are rare out of domain but must each appear,
        // so the model knows them without being confident about them
        for (int f : flipped_) {
            std::vector<int> s = fresh_sentence(3, 9, 0.0, false);
            s[static_cast<std::size_t>(rng_.uniform_int(0, static_cast<int>(s.size()) - 1))] = f;
            used_sources_.insert(join_tokens(source_of(s)));
            out.push_back(SupervisedPair{source_of(s), translate(s, false)});
        }
        while (static_cast<int>(out.size()) < sizes_.pretrain) {
            std::vector<int> s = fresh_sentence(3, 9, 0.12, false);
            out.push_back(SupervisedPair{source_of(s), translate(s, false)});
        }
        return out;
    }

    void make_weak_and_docs(WeakMtTask& task) {
        // negative pool: shuffled bags of general-sense translations drawn
        // from the in-domain source distribution
        std::vector<DocumentEntry> docs;
        const int pool_base = sizes_.weak;
        for (int p = 0; p < sizes_.negative_docs; ++p) {
            std::vector<std::string> bag;
            for (int s = 0; s < 3; ++s) {
                std::vector<int> sent = draw_sentence(3, 8, 2.5);
                for (const std::string& t : translate(sent, false)) bag.push_back(t);
            }
            rng_.shuffle(bag);
            docs.push_back(DocumentEntry{pool_base + p, bag});
        }

        std::vector<std::vector<int>> sentences;
        sentences.reserve(static_cast<std::size_t>(sizes_.weak));
        for (int i = 0; i < sizes_.weak; ++i) sentences.push_back(fresh_sentence(3, 8, 2.5, true));

        for (int i = 0; i < sizes_.weak; ++i) {
            WeakMtInstance inst;
            inst.source = source_of(sentences[static_cast<std::size_t>(i)]);
            inst.reference = translate(sentences[static_cast<std::size_t>(i)], true);

            // relevant document: the reference's tokens mixed with two other
            // in-domain sentences, shuffled until the reference sequence
            // itself does not appear in any training-visible field
            std::vector<std::string> bag = inst.reference;
            for (int n = 0; n < 2; ++n) {
                const int j = rng_.uniform_int(0, sizes_.weak - 1);
                for (const std::string& t :
                     translate(sentences[static_cast<std::size_t>(j)], true))
                    bag.push_back(t);
            }
            const std::string ref_run = join_tokens(inst.reference);
            for (int attempt = 0; attempt < 100; ++attempt) {
                rng_.shuffle(bag);
                if (join_tokens(bag).find(ref_run) == std::string::npos) break;
            }
            docs.push_back(DocumentEntry{i, bag});
            inst.dplus_ids = {i};

            for (int n = 0; n < 8; ++n)
                inst.dminus_pool.push_back(pool_base +
                                           rng_.uniform_int(0, sizes_.negative_docs - 1));
            task.weak.push_back(std::move(inst));
        }
        std::sort(docs.begin(), docs.end(),
                  [](const DocumentEntry& a, const DocumentEntry& b) { return a.id < b.id; });
        task.docs = std::move(docs);
    }

    std::vector<SupervisedPair> make_eval_split(int count) {
        std::vector<SupervisedPair> out;
        out.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            std::vector<int> s = fresh_sentence(3, 8, 2.5, true);
            out.push_back(SupervisedPair{source_of(s), translate(s, true)});
        }
        return out;
    }

    WeakMtSizes sizes_;
    Rng rng_;
    WeakMtLexicon lex_;
    std::vector<int> flipped_;
    std::unordered_set<std::string> used_sources_;
};

} // namespace

WeakMtTask generate_weakmt_task(std::uint64_t seed, const WeakMtSizes& sizes) {
    if (sizes.pretrain <= 0 || sizes.weak <= 0 || sizes.dev <= 0 || sizes.test <= 0 ||
        sizes.vocab < 10 || sizes.negative_docs <= 0)
        throw std::invalid_argument("generate_weakmt_task: sizes must be positive");
    return WeakMtGenerator(seed, sizes).run();
}

// ---------------------------------------------------------------------------
// Corpus files
// ---------------------------------------------------------------------------

void save_supervised(const std::string& path, const std::vector<SupervisedPair>& pairs) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot write corpus: " + path);
    for (const SupervisedPair& p : pairs)
        os << join_tokens(p.source) << "\t" << join_tokens(p.target) << "\n";
}

std::vector<SupervisedPair> load_supervised(const std::string& path) {
    std::vector<SupervisedPair> out;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split_fields(lines[i]);
        if (fields.size() != 2) malformed(path, i, "expected src<TAB>tgt");
        SupervisedPair p{split_tokens(fields[0]), split_tokens(fields[1])};
        if (p.source.empty() || p.target.empty()) malformed(path, i, "empty side");
        out.push_back(std::move(p));
    }
    return out;
}

void save_parsing(const std::string& path, const std::vector<ParsingInstance>& instances) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot write corpus: " + path);
    for (const ParsingInstance& inst : instances)
        os << join_tokens(inst.question) << "\t" << join_tokens(inst.parse) << "\t"
           << format_answer(inst.answer) << "\n";
}

std::vector<ParsingInstance> load_parsing(const std::string& path) {
    std::vector<ParsingInstance> out;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split_fields(lines[i]);
        if (fields.size() != 3) malformed(path, i, "expected question<TAB>parse<TAB>answer");
        ParsingInstance inst;
        inst.question = split_tokens(fields[0]);
        inst.parse = split_tokens(fields[1]);
        inst.answer = parse_answer_field(fields[2]);
        if (inst.question.empty()) malformed(path, i, "empty question");
        out.push_back(std::move(inst));
    }
    return out;
}

void save_weak(const std::string& path, const std::vector<WeakMtInstance>& instances) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot write corpus: " + path);
    for (const WeakMtInstance& inst : instances)
        os << join_tokens(inst.source) << "\t" << join_tokens(inst.reference) << "\t"
           << format_id_list(inst.dplus_ids) << "\t" << format_id_list(inst.dminus_pool) << "\n";
}

std::vector<WeakMtInstance> load_weak(const std::string& path) {
    std::vector<WeakMtInstance> out;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split_fields(lines[i]);
        if (fields.size() != 4) malformed(path, i, "expected src<TAB>ref<TAB>d+ids<TAB>d-pool");
        WeakMtInstance inst;
        inst.source = split_tokens(fields[0]);
        inst.reference = split_tokens(fields[1]);
        inst.dplus_ids = parse_id_list(fields[2], path, i);
        inst.dminus_pool = parse_id_list(fields[3], path, i);
        if (inst.source.empty()) malformed(path, i, "empty source");
        if (inst.dplus_ids.empty()) malformed(path, i, "no relevant documents");
        out.push_back(std::move(inst));
    }
    return out;
}

void save_documents(const std::string& path, const std::vector<DocumentEntry>& docs) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot write documents: " + path);
    for (const DocumentEntry& d : docs) os << d.id << "\t" << join_tokens(d.tokens) << "\n";
}

std::vector<DocumentEntry> load_documents(const std::string& path) {
    std::vector<DocumentEntry> out;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split_fields(lines[i]);
        if (fields.size() != 2) malformed(path, i, "expected id<TAB>tokens");
        DocumentEntry d;
        try {
            d.id = std::stoi(fields[0]);
        } catch (const std::exception&) {
            malformed(path, i, "bad document id '" + fields[0] + "'");
        }
        d.tokens = split_tokens(fields[1]);
        out.push_back(std::move(d));
    }
    return out;
}

void TaskManifest::save(const std::string& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot write manifest: " + path);
    os << "task=" << task << "\n";
    os << "seed=" << seed << "\n";
    for (const auto& [k, v] : sizes) os << "size_" << k << "=" << v << "\n";
    os.precision(17);
    os << "length_ratio=" << length_ratio << "\n";
}

TaskManifest TaskManifest::load(const std::string& path) {
    TaskManifest m;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty() || line[0] == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) malformed(path, i, "expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "task") m.task = value;
        else if (key == "seed") m.seed = std::stoull(value);
        else if (key == "length_ratio") m.length_ratio = std::stod(value);
        else if (key.rfind("size_", 0) == 0) m.sizes[key.substr(5)] = std::stol(value);
        else malformed(path, i, "unknown manifest key '" + key + "'");
    }
    return m;
}

void write_parsing_task_dir(const std::string& dir, std::uint64_t seed, const ParsingSizes& sizes) {
    std::filesystem::create_directories(dir);
    ParsingTask task = generate_parsing_task(seed, sizes);
    const auto p = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };
    task.db.save(p("db.tsv"));
    save_parsing(p("sup.tsv"), task.supervised);
    save_parsing(p("weak.tsv"), task.weak);
    save_parsing(p("dev.tsv"), task.dev);
    save_parsing(p("test.tsv"), task.test);

    std::vector<std::vector<std::string>> src_sents, tgt_sents;
    double src_len = 0.0, tgt_len = 0.0;
    for (const auto* split : {&task.supervised, &task.weak, &task.dev, &task.test})
        for (const ParsingInstance& inst : *split) src_sents.push_back(inst.question);
    for (const ParsingInstance& inst : task.supervised) {
        tgt_sents.push_back(inst.parse);
        src_len += static_cast<double>(inst.question.size());
        tgt_len += static_cast<double>(inst.parse.size());
    }
    for (const auto* split : {&task.dev, &task.test})
        for (const ParsingInstance& inst : *split) tgt_sents.push_back(inst.parse);
    Vocab::from_corpus(src_sents).save(p("vocab.src"));
    Vocab::from_corpus(tgt_sents).save(p("vocab.tgt"));

    TaskManifest m;
    m.task = "parsing";
    m.seed = seed;
    m.sizes = {{"supervised", sizes.supervised},
               {"weak", sizes.weak},
               {"dev", sizes.dev},
               {"test", sizes.test},
               {"entities", sizes.entities}};
    m.length_ratio = tgt_len / src_len;
    m.save(p("manifest.cfg"));
}

void write_weakmt_task_dir(const std::string& dir, std::uint64_t seed, const WeakMtSizes& sizes) {
    std::filesystem::create_directories(dir);
    WeakMtTask task = generate_weakmt_task(seed, sizes);
    const auto p = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };
    save_supervised(p("sup.tsv"), task.pretrain);
    save_weak(p("weak.tsv"), task.weak);
    save_supervised(p("dev.tsv"), task.dev);
    save_supervised(p("test.tsv"), task.test);
    save_documents(p("docs.tsv"), task.docs);

    std::vector<std::vector<std::string>> src_sents, tgt_sents;
    for (const SupervisedPair& pr : task.pretrain) {
        src_sents.push_back(pr.source);
        tgt_sents.push_back(pr.target);
    }
    for (const WeakMtInstance& inst : task.weak) src_sents.push_back(inst.source);
    for (const auto* split : {&task.dev, &task.test})
        for (const SupervisedPair& pr : *split) src_sents.push_back(pr.source);
    for (const DocumentEntry& d : task.docs) tgt_sents.push_back(d.tokens);
    Vocab::from_corpus(src_sents).save(p("vocab.src"));
    Vocab::from_corpus(tgt_sents).save(p("vocab.tgt"));

    TaskManifest m;
    m.task = "weakmt";
    m.seed = seed;
    m.sizes = {{"pretrain", sizes.pretrain}, {"weak", sizes.weak},
               {"dev", sizes.dev},           {"test", sizes.test},
               {"vocab", sizes.vocab},       {"negative_docs", sizes.negative_docs}};
    m.length_ratio = task.length_ratio;
    m.save(p("manifest.cfg"));
}

} // namespace seqramp
