#include "seqramp/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "seqramp/checkpoint.hpp"
#include "seqramp/common.hpp"
#include "seqramp/decoder.hpp"
#include "seqramp/objectives.hpp"
#include "seqramp/optim.hpp"
#include "seqramp/tasks.hpp"
#include "seqramp/vocab.hpp"

namespace seqramp {

int best_validation_index(std::span<const double> metrics) {
    if (metrics.empty()) return -1;
    int best = 0;
    for (int i = 1; i < static_cast<int>(metrics.size()); ++i)
        if (metrics[static_cast<std::size_t>(i)] > metrics[static_cast<std::size_t>(best)]) best = i;
    return best;
}

void RunLog::save(const std::string& dir) const {
    namespace fs = std::filesystem;
    {
        std::ofstream os(fs::path(dir) / "runlog.tsv", std::ios::trunc);
        if (!os) throw DataError("cannot write runlog under " + dir);
        os.precision(17);
        os << "validation\tupdates\tdev_metric\tcheckpoint_id\n";
        for (const ValidationRecord& r : validations)
            os << r.validation << "\t" << r.updates << "\t" << r.dev_metric << "\t"
               << r.checkpoint_id << "\n";
    }
    {
        std::ofstream os(fs::path(dir) / "summary.tsv", std::ios::trunc);
        if (!os) throw DataError("cannot write summary under " + dir);
        os.precision(17);
        os << "best_validation\ttest_metric\twall_seconds\n";
        os << (best_index >= 0 ? validations[static_cast<std::size_t>(best_index)].validation : 0)
           << "\t" << final_test_metric << "\t" << wall_seconds << "\n";
    }
}

namespace {

namespace fs = std::filesystem;

int group_of_parse(const std::vector<std::string>& parse) {
    if (parse.empty()) return -1;
    if (parse[0] == "lookup") return 0;
    if (parse[0] == "find") return 1;
    if (parse[0] == "count") return 2;
    if (parse[0] == "find2") return 3;
    return -1;
}

struct EncodedParsing {
    std::vector<int> x;
    std::vector<int> y; // gold parse + EOS, empty for weak instances
    Answer answer;
    int group = -1;
};

struct EncodedPair {
    std::vector<int> x;
    std::vector<int> y; // reference + EOS
};

struct EncodedWeak {
    std::vector<int> x;
    std::vector<int> dplus_ids;
    std::vector<int> dminus_pool;
};

struct TaskData {
    Vocab src_vocab;
    Vocab tgt_vocab;
    TaskManifest manifest;

    ToyDatabase db;
    std::vector<EncodedParsing> p_train, p_dev, p_test;

    std::vector<EncodedPair> s_train, s_dev, s_test;
    std::vector<EncodedWeak> w_train;
    std::map<int, NGramIndex> doc_index;
};

std::vector<int> encode_with_eos(const Vocab& v, const std::vector<std::string>& tokens) {
    std::vector<int> ids = v.encode(tokens);
    ids.push_back(Vocab::kEos);
    return ids;
}

EncodedParsing encode_parsing(const TaskData& d, const ParsingInstance& inst) {
    EncodedParsing e;
    e.x = d.src_vocab.encode(inst.question);
    if (!inst.parse.empty()) e.y = encode_with_eos(d.tgt_vocab, inst.parse);
    e.answer = inst.answer;
    e.group = group_of_parse(inst.parse);
    return e;
}

TaskData load_task_data(const ExperimentConfig& cfg) {
    TaskData d;
    const auto p = [&](const char* name) { return (fs::path(cfg.data_dir) / name).string(); };
    d.src_vocab = Vocab::load(p("vocab.src"));
    d.tgt_vocab = Vocab::load(p("vocab.tgt"));
    d.manifest = TaskManifest::load(p("manifest.cfg"));
    const Objective obj = cfg.parsed_objective();

    if (cfg.task == "parsing") {
        d.db = ToyDatabase::load(p("db.tsv"));
        const char* train_file = obj.kind == ObjectiveKind::Mle ? "sup.tsv" : "weak.tsv";
        for (const ParsingInstance& inst : load_parsing(p(train_file)))
            d.p_train.push_back(encode_parsing(d, inst));
        for (const ParsingInstance& inst : load_parsing(p("dev.tsv")))
            d.p_dev.push_back(encode_parsing(d, inst));
        for (const ParsingInstance& inst : load_parsing(p("test.tsv")))
            d.p_test.push_back(encode_parsing(d, inst));
        if (obj.kind == ObjectiveKind::Mle)
            for (const EncodedParsing& e : d.p_train)
                if (e.y.empty()) throw DataError("supervised parsing split has instances without parses");
        return d;
    }

    // MT tasks share the supervised/dev/test formats
    for (const SupervisedPair& pr : load_supervised(p("dev.tsv")))
        d.s_dev.push_back({d.src_vocab.encode(pr.source), encode_with_eos(d.tgt_vocab, pr.target)});
    for (const SupervisedPair& pr : load_supervised(p("test.tsv")))
        d.s_test.push_back({d.src_vocab.encode(pr.source), encode_with_eos(d.tgt_vocab, pr.target)});

    const bool weak_training = cfg.task == "weakmt" && obj.kind != ObjectiveKind::Mle;
    if (weak_training) {
        for (const WeakMtInstance& inst : load_weak(p("weak.tsv"))) {
            EncodedWeak w;
            w.x = d.src_vocab.encode(inst.source);
            w.dplus_ids = inst.dplus_ids;
            w.dminus_pool = inst.dminus_pool;
            if (w.dminus_pool.empty()) w.dminus_pool = w.dplus_ids;
            d.w_train.push_back(std::move(w));
        }
        for (const DocumentEntry& doc : load_documents(p("docs.tsv")))
            d.doc_index.emplace(doc.id,
                                NGramIndex(doc.id, d.tgt_vocab.encode(doc.tokens), cfg.metric_order));
        for (const EncodedWeak& w : d.w_train) {
            for (int id : w.dplus_ids)
                if (!d.doc_index.count(id))
                    throw DataError("weak corpus references unknown document id " + std::to_string(id));
            for (int id : w.dminus_pool)
                if (!d.doc_index.count(id))
                    throw DataError("weak corpus references unknown document id " + std::to_string(id));
        }
    } else {
        for (const SupervisedPair& pr : load_supervised(p("sup.tsv")))
            d.s_train.push_back(
                {d.src_vocab.encode(pr.source), encode_with_eos(d.tgt_vocab, pr.target)});
    }
    return d;
}

// Strips the trailing EOS and any reserved ids, then maps back to tokens.
std::vector<std::string> surface_tokens(const Vocab& v, const std::vector<int>& ids) {
    std::vector<std::string> out;
    for (int id : ids) {
        if (id == Vocab::kEos) break;
        out.push_back(v.token(id));
    }
    return out;
}

std::vector<int> strip_eos(const std::vector<int>& ids) {
    std::vector<int> out;
    for (int id : ids) {
        if (id == Vocab::kEos) break;
        out.push_back(id);
    }
    return out;
}

class Trainer {
  public:
    explicit Trainer(const ExperimentConfig& cfg)
        : cfg_(cfg),
          obj_(cfg.parsed_objective()),
          data_(load_task_data(cfg)),
          model_(ModelConfig{cfg.embed_dim, cfg.hidden_dim, data_.src_vocab.size(),
                             data_.tgt_vocab.size()}),
          params_(model_.parameters()),
          master_(cfg.seed),
          shuffle_rng_(master_.substream("shuffle")),
          sample_rng_(master_.substream("sample")),
          doc_rng_(master_.substream("docpick")) {
        length_ratio_ = cfg.length_ratio > 0.0 ? cfg.length_ratio : data_.manifest.length_ratio;
        if (!(length_ratio_ > 0.0)) length_ratio_ = 1.0;
    }

    RunLog run(const ValidationCallback& on_validation) {
        const auto t0 = std::chrono::steady_clock::now();
        if (obj_.kind == ObjectiveKind::Mle) {
            Rng init = master_.substream("init");
            model_.init_params(init);
        } else {
            load_checkpoint(cfg_.init_checkpoint, params_);
        }
        fs::create_directories(cfg_.out_dir);

        const bool per_input = obj_.kind == ObjectiveKind::Mrt;
        const int batch_size = per_input ? 1 : cfg_.minibatch;
        const long updates_per_val =
            static_cast<long>(cfg_.validation_interval) * (per_input ? cfg_.minibatch : 1);

        RunLog log;
        double best_metric = -std::numeric_limits<double>::infinity();
        long updates = 0;
        for (int v = 1; v <= cfg_.max_validations; ++v) {
            for (long u = 0; u < updates_per_val; ++u) {
                run_update(batch_size);
                ++updates;
            }
            const double dev = evaluate_metric(dev_view());
            save_checkpoint(out_file("ckpt_latest.bin"), params_);
            if (cache_ && cfg_.cache_enabled) cache_->save(out_file("cache.tsv"));
            if (dev > best_metric) {
                best_metric = dev;
                save_checkpoint(out_file("ckpt_best.bin"), params_);
            }
            log.validations.push_back(ValidationRecord{v, updates, dev, v});
            if (on_validation) on_validation(log.validations.back());
        }

        std::vector<double> metrics;
        for (const ValidationRecord& r : log.validations) metrics.push_back(r.dev_metric);
        log.best_index = best_validation_index(metrics);

        load_checkpoint(out_file("ckpt_best.bin"), params_);
        log.final_test_metric = evaluate_metric(test_view());
        log.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        log.save(cfg_.out_dir);
        return log;
    }

  private:
    struct SplitView {
        const std::vector<EncodedParsing>* parsing = nullptr;
        const std::vector<EncodedPair>* pairs = nullptr;
    };

    SplitView dev_view() const {
        SplitView s;
        if (cfg_.task == "parsing") s.parsing = &data_.p_dev;
        else s.pairs = &data_.s_dev;
        return s;
    }
    SplitView test_view() const {
        SplitView s;
        if (cfg_.task == "parsing") s.parsing = &data_.p_test;
        else s.pairs = &data_.s_test;
        return s;
    }

    std::string out_file(const char* name) const {
        return (fs::path(cfg_.out_dir) / name).string();
    }

    std::size_t train_size() const {
        if (cfg_.task == "parsing") return data_.p_train.size();
        if (!data_.w_train.empty()) return data_.w_train.size();
        return data_.s_train.size();
    }

    std::size_t next_index() {
        const std::size_t n = train_size();
        if (n == 0) throw DataError("training split is empty");
        if (cursor_ >= order_.size()) {
            order_.resize(n);
            std::iota(order_.begin(), order_.end(), 0);
            shuffle_rng_.shuffle(order_);
            cursor_ = 0;
        }
        return order_[cursor_++];
    }

    Answer execute_hyp(const Hypothesis& h) const {
        return data_.db.execute(surface_tokens(data_.tgt_vocab, h.tokens));
    }

    void ensure_cache() {
        if (!cache_) cache_ = std::make_unique<HopeFearCache>();
    }

    void run_update(int batch_size) {
        switch (obj_.kind) {
            case ObjectiveKind::Mle: return update_mle(batch_size);
            case ObjectiveKind::Mrt: return update_mrt();
            case ObjectiveKind::Ramp:
            case ObjectiveKind::Perc: return update_ramp(batch_size);
        }
    }

    void update_mle(int batch_size) {
        std::vector<std::pair<std::vector<int>, std::vector<int>>> batch;
        batch.reserve(static_cast<std::size_t>(batch_size));
        for (int b = 0; b < batch_size; ++b) {
            const std::size_t i = next_index();
            if (cfg_.task == "parsing") {
                const EncodedParsing& e = data_.p_train[i];
                batch.emplace_back(e.x, e.y);
            } else {
                const EncodedPair& e = data_.s_train[i];
                batch.emplace_back(e.x, e.y);
            }
        }
        Tape tape;
        NodeId loss = mle_loss(model_, tape, batch);
        tape.backward(loss);
        sgd_step(params_, cfg_.learning_rate, cfg_.clip_norm);
    }

    SelectorConfig selector_config() const {
        SelectorConfig sc;
        sc.variant = obj_.variant;
        sc.alpha = cfg_.alpha_ramp;
        sc.token_level = obj_.token_level;
        return sc;
    }

    void update_ramp(int batch_size) {
        std::vector<ScoredPair> contributing;
        contributing.reserve(static_cast<std::size_t>(batch_size));
        for (int b = 0; b < batch_size; ++b) {
            const std::size_t i = next_index();
            if (cfg_.task == "parsing") {
                const EncodedParsing& e = data_.p_train[i];
                KBestList kbest = beam_search(model_, e.x, cfg_.train_beam, cfg_.kbest,
                                              cfg_.max_len, static_cast<int>(i));
                if (cfg_.cache_enabled) ensure_cache();
                auto reward = [&](const Hypothesis& h) {
                    return answer_feedback(execute_hyp(h), e.answer);
                };
                auto pair = select_parsing(kbest, reward,
                                           cfg_.cache_enabled ? cache_.get() : nullptr,
                                           selector_config());
                if (pair) contributing.push_back(ScoredPair{e.x, std::move(*pair)});
            } else if (cfg_.task == "weakmt") {
                const EncodedWeak& e = data_.w_train[i];
                KBestList kbest = beam_search(model_, e.x, cfg_.train_beam, cfg_.kbest,
                                              cfg_.max_len, static_cast<int>(i));
                const int dp = e.dplus_ids[static_cast<std::size_t>(
                    doc_rng_.uniform_int(0, static_cast<int>(e.dplus_ids.size()) - 1))];
                const int dm = e.dminus_pool[static_cast<std::size_t>(
                    doc_rng_.uniform_int(0, static_cast<int>(e.dminus_pool.size()) - 1))];
                WeakDocContext ctx{&data_.doc_index.at(dp), &data_.doc_index.at(dm),
                                   static_cast<int>(e.x.size()), length_ratio_};
                contributing.push_back(ScoredPair{e.x, select_weak_mt(kbest, ctx, selector_config())});
            } else {
                const EncodedPair& e = data_.s_train[i];
                KBestList kbest = beam_search(model_, e.x, cfg_.train_beam, cfg_.kbest,
                                              cfg_.max_len, static_cast<int>(i));
                Hypothesis scored_ref;
                const Hypothesis* ref_ptr = nullptr;
                if (obj_.variant == SelectorVariant::Perc1) {
                    scored_ref.tokens = e.y;
                    scored_ref.token_logps = model_.score_sequence(e.x, e.y);
                    for (double lp : scored_ref.token_logps) scored_ref.total_logp += lp;
                    ref_ptr = &scored_ref;
                }
                contributing.push_back(
                    ScoredPair{e.x, select_full_mt(kbest, e.y, ref_ptr, selector_config())});
            }
        }
        if (contributing.empty()) return; // whole batch skipped
        Tape tape;
        auto loss = obj_.token_level ? ramp_token_loss(model_, tape, contributing)
                                     : ramp_loss(model_, tape, contributing);
        if (!loss) return;
        tape.backward(*loss);
        sgd_step(params_, cfg_.learning_rate, cfg_.clip_norm);
    }

    void update_mrt() {
        const std::size_t i = next_index();
        const std::vector<int>* x = nullptr;
        std::function<double(const Hypothesis&)> reward_fn;
        if (cfg_.task == "parsing") {
            const EncodedParsing& e = data_.p_train[i];
            x = &e.x;
            reward_fn = [this, &e](const Hypothesis& h) {
                return static_cast<double>(answer_feedback(execute_hyp(h), e.answer));
            };
        } else if (cfg_.task == "weakmt") {
            const EncodedWeak& e = data_.w_train[i];
            x = &e.x;
            const int dp = e.dplus_ids[static_cast<std::size_t>(
                doc_rng_.uniform_int(0, static_cast<int>(e.dplus_ids.size()) - 1))];
            const int dm = e.dminus_pool[static_cast<std::size_t>(
                doc_rng_.uniform_int(0, static_cast<int>(e.dminus_pool.size()) - 1))];
            const NGramIndex* dpi = &data_.doc_index.at(dp);
            const NGramIndex* dmi = &data_.doc_index.at(dm);
            const int len = static_cast<int>(e.x.size());
            if (obj_.mrt_metric == 2) {
                reward_fn = [this, dpi, dmi, len](const Hypothesis& h) {
                    return delta2(strip_eos(h.tokens), *dpi, *dmi, len, length_ratio_);
                };
            } else {
                reward_fn = [this, dpi, len](const Hypothesis& h) {
                    return delta1(strip_eos(h.tokens), *dpi, len, length_ratio_);
                };
            }
        } else {
            const EncodedPair& e = data_.s_train[i];
            x = &e.x;
            const std::vector<int> ref = strip_eos(e.y);
            reward_fn = [this, ref](const Hypothesis& h) {
                return bleu_plus1(strip_eos(h.tokens), ref, cfg_.metric_order);
            };
        }

        std::vector<Hypothesis> samples =
            sample_sequences(model_, *x, cfg_.sample_count, true, cfg_.max_len, sample_rng_);
        std::vector<double> rewards;
        rewards.reserve(samples.size());
        for (const Hypothesis& h : samples) rewards.push_back(reward_fn(h));
        std::vector<double> baseline_rewards;
        if (cfg_.baseline_count > 0) {
            std::vector<Hypothesis> base = sample_sequences(model_, *x, cfg_.baseline_count, false,
                                                            cfg_.max_len, sample_rng_);
            for (const Hypothesis& h : base) baseline_rewards.push_back(reward_fn(h));
        }

        MrtConfig mc;
        mc.sample_count = cfg_.sample_count;
        mc.baseline_count = cfg_.baseline_count;
        mc.temperature = cfg_.mrt_temperature;
        mc.neg_reward = obj_.neg_reward;
        Tape tape;
        auto loss = mrt_loss(model_, tape, *x, samples, std::move(rewards),
                             std::move(baseline_rewards), mc);
        if (!loss) return;
        tape.backward(*loss);
        sgd_step(params_, cfg_.learning_rate, cfg_.clip_norm);
    }

    double evaluate_metric(const SplitView& split) {
        if (split.parsing) {
            std::vector<std::pair<Answer, Answer>> results;
            results.reserve(split.parsing->size());
            for (const EncodedParsing& e : *split.parsing) {
                KBestList kb = beam_search(model_, e.x, cfg_.test_beam, 1, cfg_.max_len);
                results.emplace_back(execute_hyp(kb.best()), e.answer);
            }
            return answer_f1(results).f1;
        }
        std::vector<std::vector<int>> hyps, refs;
        hyps.reserve(split.pairs->size());
        for (const EncodedPair& e : *split.pairs) {
            KBestList kb = beam_search(model_, e.x, cfg_.test_beam, 1, cfg_.max_len);
            hyps.push_back(strip_eos(kb.best().tokens));
            refs.push_back(strip_eos(e.y));
        }
        return corpus_bleu(hyps, refs, cfg_.metric_order);
    }

    ExperimentConfig cfg_;
    Objective obj_;
    TaskData data_;
    SeqModel model_;
    std::vector<Parameter*> params_;
    Rng master_;
    Rng shuffle_rng_;
    Rng sample_rng_;
    Rng doc_rng_;
    double length_ratio_ = 1.0;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
    std::unique_ptr<HopeFearCache> cache_;
};

} // namespace

RunLog train(const ExperimentConfig& cfg, const ValidationCallback& on_validation) {
    validate_config(cfg);
    return Trainer(cfg).run(on_validation);
}

// ---------------------------------------------------------------------------
// Evaluation reports
// ---------------------------------------------------------------------------

namespace {

std::string field_or_dash(const std::string& s) { return s.empty() ? "-" : s; }
std::string dash_to_empty(const std::string& s) { return s == "-" ? "" : s; }

void compute_report_metric(EvalReport& report) {
    bool parsing = false;
    for (const EvalRow& r : report.rows) parsing = parsing || r.correct >= 0;
    if (parsing) {
        report.metric_name = "f1";
        std::vector<std::pair<Answer, Answer>> results;
        for (const EvalRow& r : report.rows)
            results.emplace_back(parse_answer_field(r.answer), parse_answer_field(r.gold));
        report.f1 = answer_f1(results);
        report.metric = report.f1.f1;
        return;
    }
    report.metric_name = "bleu";
    Vocab v;
    std::vector<std::vector<int>> hyps, refs;
    for (const EvalRow& r : report.rows) {
        std::vector<int> h, rr;
        for (const std::string& t : split_tokens(r.hyp)) h.push_back(v.add(t));
        for (const std::string& t : split_tokens(r.ref)) rr.push_back(v.add(t));
        hyps.push_back(std::move(h));
        refs.push_back(std::move(rr));
    }
    report.metric = corpus_bleu(hyps, refs);
}

} // namespace

void EvalReport::save(const std::string& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot write report: " + path);
    os << "id\tsrc_len\tgroup\tcorrect\tanswer\tgold\thyp\tref\n";
    for (const EvalRow& r : rows) {
        os << r.id << "\t" << r.source_len << "\t" << r.group << "\t";
        if (r.correct < 0) os << "-";
        else os << r.correct;
        os << "\t" << field_or_dash(r.answer) << "\t" << field_or_dash(r.gold) << "\t"
           << field_or_dash(r.hyp) << "\t" << field_or_dash(r.ref) << "\n";
    }
}

EvalReport EvalReport::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open report: " + path);
    EvalReport report;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line.rfind("id\t", 0) != 0)
                throw DataError(path + ": missing report header row");
            continue;
        }
        std::vector<std::string> f;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            f.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (f.size() != 8)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 8 columns");
        EvalRow r;
        try {
            r.id = std::stoi(f[0]);
            r.source_len = std::stoi(f[1]);
            r.group = std::stoi(f[2]);
            r.correct = f[3] == "-" ? -1 : std::stoi(f[3]);
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(line_no) + ": malformed numeric field");
        }
        r.answer = dash_to_empty(f[4]);
        r.gold = dash_to_empty(f[5]);
        r.hyp = dash_to_empty(f[6]);
        r.ref = dash_to_empty(f[7]);
        report.rows.push_back(std::move(r));
    }
    if (report.rows.empty()) throw DataError(path + ": report has no rows");
    compute_report_metric(report);
    return report;
}

EvalReport evaluate(const ExperimentConfig& cfg, const std::string& checkpoint,
                    const std::string& split) {
    TaskData data = load_task_data(cfg);
    SeqModel model(ModelConfig{cfg.embed_dim, cfg.hidden_dim, data.src_vocab.size(),
                               data.tgt_vocab.size()});
    std::vector<Parameter*> params = model.parameters();
    load_checkpoint(checkpoint, params);

    EvalReport report;
    if (cfg.task == "parsing") {
        std::vector<EncodedParsing> instances;
        if (split == "dev") instances = data.p_dev;
        else if (split == "test") instances = data.p_test;
        else
            for (const ParsingInstance& inst : load_parsing(split))
                instances.push_back(encode_parsing(data, inst));
        for (std::size_t i = 0; i < instances.size(); ++i) {
            const EncodedParsing& e = instances[i];
            KBestList kb = beam_search(model, e.x, cfg.test_beam, 1, cfg.max_len);
            const std::vector<std::string> parse = surface_tokens(data.tgt_vocab, kb.best().tokens);
            const Answer answer = data.db.execute(parse);
            EvalRow r;
            r.id = static_cast<int>(i);
            r.source_len = static_cast<int>(e.x.size());
            r.group = e.group;
            r.correct = answer_feedback(answer, e.answer);
            r.answer = format_answer(answer);
            r.gold = format_answer(e.answer);
            r.hyp = join_tokens(parse);
            r.ref = join_tokens(surface_tokens(data.tgt_vocab, e.y));
            report.rows.push_back(std::move(r));
        }
    } else {
        std::vector<EncodedPair> instances;
        if (split == "dev") instances = data.s_dev;
        else if (split == "test") instances = data.s_test;
        else
            for (const SupervisedPair& pr : load_supervised(split))
                instances.push_back({data.src_vocab.encode(pr.source),
                                     encode_with_eos(data.tgt_vocab, pr.target)});
        for (std::size_t i = 0; i < instances.size(); ++i) {
            const EncodedPair& e = instances[i];
            KBestList kb = beam_search(model, e.x, cfg.test_beam, 1, cfg.max_len);
            EvalRow r;
            r.id = static_cast<int>(i);
            r.source_len = static_cast<int>(e.x.size());
            r.hyp = join_tokens(surface_tokens(data.tgt_vocab, kb.best().tokens));
            r.ref = join_tokens(surface_tokens(data.tgt_vocab, e.y));
            report.rows.push_back(std::move(r));
        }
    }
    compute_report_metric(report);
    return report;
}

} // namespace seqramp
