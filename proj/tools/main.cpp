#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqramp/checkpoint.hpp"
#include "seqramp/common.hpp"
#include "seqramp/config.hpp"
#include "seqramp/decoder.hpp"
#include "seqramp/report.hpp"
#include "seqramp/sigtest.hpp"
#include "seqramp/tasks.hpp"
#include "seqramp/trainer.hpp"
#include "seqramp/vocab.hpp"

namespace {

using namespace seqramp;

ExperimentConfig config_with_overrides(const std::string& path,
                                       const std::vector<std::string>& overrides) {
    ExperimentConfig cfg = load_config(path);
    for (const std::string& kv : overrides) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("override must be key=value, got '" + kv + "'");
        apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

int run_gen_data(const std::string& task, const std::string& out, std::uint64_t seed,
                 const std::vector<std::string>& overrides) {
    if (task == "parsing") {
        ParsingSizes sizes;
        for (const std::string& kv : overrides) {
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos) throw UsageError("size override must be key=value");
            const std::string key = kv.substr(0, eq);
            const int value = std::stoi(kv.substr(eq + 1));
            if (key == "supervised") sizes.supervised = value;
            else if (key == "weak") sizes.weak = value;
            else if (key == "dev") sizes.dev = value;
            else if (key == "test") sizes.test = value;
            else if (key == "entities") sizes.entities = value;
            else throw UsageError("unknown parsing size key: " + key);
        }
        write_parsing_task_dir(out, seed, sizes);
    } else if (task == "weakmt") {
        WeakMtSizes sizes;
        for (const std::string& kv : overrides) {
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos) throw UsageError("size override must be key=value");
            const std::string key = kv.substr(0, eq);
            const int value = std::stoi(kv.substr(eq + 1));
            if (key == "pretrain") sizes.pretrain = value;
            else if (key == "weak") sizes.weak = value;
            else if (key == "dev") sizes.dev = value;
            else if (key == "test") sizes.test = value;
            else if (key == "vocab") sizes.vocab = value;
            else if (key == "negative_docs") sizes.negative_docs = value;
            else throw UsageError("unknown weakmt size key: " + key);
        }
        write_weakmt_task_dir(out, seed, sizes);
    } else {
        throw UsageError("gen-data task must be parsing or weakmt, got '" + task + "'");
    }
    std::cout << "wrote " << task << " task to " << out << "\n";
    return 0;
}

int run_train(const std::string& config_path, const std::vector<std::string>& overrides) {
    ExperimentConfig cfg = config_with_overrides(config_path, overrides);
    std::cout << "task=" << cfg.task << " objective=" << cfg.objective << " seed=" << cfg.seed
              << "\n";
    RunLog log = train(cfg, [](const ValidationRecord& r) {
        std::printf("validation %d  updates %ld  dev %.6f\n", r.validation, r.updates,
                    r.dev_metric);
        std::fflush(stdout);
    });
    std::printf("best validation %d  test %.6f  wall %.1fs\n",
                log.best_index >= 0
                    ? log.validations[static_cast<std::size_t>(log.best_index)].validation
                    : 0,
                log.final_test_metric, log.wall_seconds);
    return 0;
}

int run_decode(const std::string& config_path, const std::vector<std::string>& overrides,
               const std::string& checkpoint, const std::string& input, const std::string& out,
               int kbest) {
    ExperimentConfig cfg = config_with_overrides(config_path, overrides);
    namespace fs = std::filesystem;
    Vocab src = Vocab::load((fs::path(cfg.data_dir) / "vocab.src").string());
    Vocab tgt = Vocab::load((fs::path(cfg.data_dir) / "vocab.tgt").string());
    SeqModel model(ModelConfig{cfg.embed_dim, cfg.hidden_dim, src.size(), tgt.size()});
    std::vector<Parameter*> params = model.parameters();
    load_checkpoint(checkpoint, params);

    std::ifstream is(input);
    if (!is) throw DataError("cannot open input: " + input);
    std::ofstream os(out, std::ios::trunc);
    if (!os) throw DataError("cannot write output: " + out);
    os << "id\trank\tlogprob\ttokens\n";
    os.precision(17);
    std::string line;
    int id = 0;
    const int beam = std::max(cfg.test_beam, kbest);
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::vector<std::string> tokens = split_tokens(line);
        if (tokens.empty()) continue;
        KBestList kb = beam_search(model, src.encode(tokens), beam, kbest, cfg.max_len, id);
        for (std::size_t r = 0; r < kb.hyps.size(); ++r) {
            std::vector<std::string> words;
            for (int t : kb.hyps[r].tokens) {
                if (t == Vocab::kEos) break;
                words.push_back(tgt.token(t));
            }
            os << id << "\t" << r + 1 << "\t" << kb.hyps[r].total_logp << "\t"
               << join_tokens(words) << "\n";
        }
        ++id;
    }
    std::cout << "decoded " << id << " inputs to " << out << "\n";
    return 0;
}

int run_evaluate(const std::string& config_path, const std::vector<std::string>& overrides,
                 const std::string& checkpoint, const std::string& split, const std::string& out) {
    ExperimentConfig cfg = config_with_overrides(config_path, overrides);
    EvalReport report = evaluate(cfg, checkpoint, split);
    report.save(out);
    if (report.metric_name == "f1")
        std::printf("instances %zu  recall %.6f  precision %.6f  F1 %.6f\n", report.rows.size(),
                    report.f1.recall, report.f1.precision, report.f1.f1);
    else
        std::printf("instances %zu  BLEU %.4f\n", report.rows.size(), report.metric);
    return 0;
}

int run_sigtest(const std::string& a_path, const std::string& b_path, const std::string& metric,
                int iterations, std::uint64_t seed) {
    EvalReport a = EvalReport::load(a_path);
    EvalReport b = EvalReport::load(b_path);
    const double p = approx_randomization(a, b, metric, iterations, seed);
    std::printf("metric %s  A %.6f  B %.6f  p-value %.6f\n", metric.c_str(), a.metric, b.metric,
                p);
    return 0;
}

int run_report(const std::string& input, const std::string& by, int buckets,
               const std::string& out) {
    EvalReport report = EvalReport::load(input);
    std::vector<BucketRow> rows;
    if (by == "length") rows = length_bucket_report(report, buckets);
    else if (by == "group") rows = group_bucket_report(report);
    else throw UsageError("report --by must be length or group, got '" + by + "'");
    save_bucket_report(out, rows);
    for (const BucketRow& r : rows)
        std::printf("%-12s count %4d  metric %.4f  len_ratio %.4f\n", r.label.c_str(), r.count,
                    r.metric, r.length_ratio);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"seqramp: metric-augmented sequence-to-sequence training"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-data", "generate a synthetic task directory");
    std::string gen_task, gen_out;
    std::uint64_t gen_seed = 1;
    std::vector<std::string> gen_sizes;
    gen->add_option("--task", gen_task, "parsing or weakmt")->required();
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--size", gen_sizes, "size override key=value (repeatable)");

    auto* tr = app.add_subcommand("train", "run a training experiment");
    std::string tr_config;
    std::vector<std::string> tr_set;
    tr->add_option("--config", tr_config, "experiment config file")->required();
    tr->add_option("--set", tr_set, "config override key=value (repeatable)");

    auto* dec = app.add_subcommand("decode", "k-best decode a text file");
    std::string dec_config, dec_ckpt, dec_input, dec_out;
    std::vector<std::string> dec_set;
    int dec_k = 1;
    dec->add_option("--config", dec_config)->required();
    dec->add_option("--checkpoint", dec_ckpt)->required();
    dec->add_option("--input", dec_input)->required();
    dec->add_option("--out", dec_out)->required();
    dec->add_option("--kbest", dec_k);
    dec->add_option("--set", dec_set, "config override key=value (repeatable)");

    auto* ev = app.add_subcommand("evaluate", "decode a split and score it");
    std::string ev_config, ev_ckpt, ev_split, ev_out;
    std::vector<std::string> ev_set;
    ev->add_option("--config", ev_config)->required();
    ev->add_option("--checkpoint", ev_ckpt)->required();
    ev->add_option("--split", ev_split, "dev, test, or a corpus path")->required();
    ev->add_option("--out", ev_out, "per-instance report TSV")->required();
    ev->add_option("--set", ev_set, "config override key=value (repeatable)");

    auto* sig = app.add_subcommand("sigtest", "approximate randomization test");
    std::string sig_a, sig_b, sig_metric = "f1";
    int sig_iter = 10000;
    std::uint64_t sig_seed = 1;
    sig->add_option("--a", sig_a, "report A")->required();
    sig->add_option("--b", sig_b, "report B")->required();
    sig->add_option("--metric", sig_metric, "f1 or bleu");
    sig->add_option("--iterations", sig_iter);
    sig->add_option("--seed", sig_seed);

    auto* rep = app.add_subcommand("report", "bucketed metric report");
    std::string rep_input, rep_by = "length", rep_out;
    int rep_buckets = 4;
    rep->add_option("--input", rep_input, "per-instance report TSV")->required();
    rep->add_option("--by", rep_by, "length or group");
    rep->add_option("--buckets", rep_buckets);
    rep->add_option("--out", rep_out, "bucket TSV")->required();

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return run_gen_data(gen_task, gen_out, gen_seed, gen_sizes);
        if (tr->parsed()) return run_train(tr_config, tr_set);
        if (dec->parsed())
            return run_decode(dec_config, dec_set, dec_ckpt, dec_input, dec_out, dec_k);
        if (ev->parsed()) return run_evaluate(ev_config, ev_set, ev_ckpt, ev_split, ev_out);
        if (sig->parsed()) return run_sigtest(sig_a, sig_b, sig_metric, sig_iter, sig_seed);
        if (rep->parsed()) return run_report(rep_input, rep_by, rep_buckets, rep_out);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const seqramp::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const seqramp::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
