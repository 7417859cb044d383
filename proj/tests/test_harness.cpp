#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "seqramp/common.hpp"
#include "seqramp/config.hpp"
#include "seqramp/report.hpp"
#include "seqramp/rng.hpp"
#include "seqramp/sigtest.hpp"
#include "seqramp/tasks.hpp"
#include "seqramp/trainer.hpp"

using namespace seqramp;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
    std::string sub(const char* name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is);
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

EvalReport parsing_report(const std::vector<std::pair<std::string, std::string>>& answer_gold) {
    EvalReport r;
    for (std::size_t i = 0; i < answer_gold.size(); ++i) {
        EvalRow row;
        row.id = static_cast<int>(i);
        row.source_len = static_cast<int>(i % 7) + 1;
        row.correct = answer_gold[i].first == answer_gold[i].second ? 1 : 0;
        row.answer = answer_gold[i].first;
        row.gold = answer_gold[i].second;
        row.hyp = "h" + std::to_string(i);
        r.rows.push_back(std::move(row));
    }
    r.metric_name = "f1";
    return r;
}

} // namespace

TEST_CASE("objective parsing") {
    CHECK(parse_objective("mle").kind == ObjectiveKind::Mle);
    CHECK(parse_objective("mrt_neg").neg_reward);
    CHECK(parse_objective("mrt_d2").mrt_metric == 2);
    CHECK(parse_objective("ramp_minus_t").token_level);
    CHECK(parse_objective("ramp_minus_t").variant == SelectorVariant::RampMinus);
    CHECK(parse_objective("perc2").kind == ObjectiveKind::Perc);
    CHECK_THROWS_AS(parse_objective("mle_t"), UsageError);
    CHECK_THROWS_AS(parse_objective("nonsense"), UsageError);
}

TEST_CASE("config file round-trip with overrides and comments") {
    TempDir tmp("seqramp_cfg_test");
    {
        std::ofstream os(tmp.file("exp.cfg"));
        os << "# experiment\n";
        os << "task=parsing\n";
        os << "objective=ramp_t\n";
        os << "data_dir=/data\n";
        os << "out_dir=/out\n";
        os << "init_checkpoint=/ckpt.bin\n";
        os << "kbest=5   # inline comment\n";
        os << "train_beam = 6\n";
        os << "seed=17\n";
    }
    ExperimentConfig cfg = load_config(tmp.file("exp.cfg"));
    CHECK(cfg.task == "parsing");
    CHECK(cfg.objective == "ramp_t");
    CHECK(cfg.kbest == 5);
    CHECK(cfg.train_beam == 6);
    CHECK(cfg.seed == 17);
    CHECK(cfg.minibatch == 80);     // parsing default
    CHECK(cfg.test_beam == 12);     // parsing default
    CHECK(cfg.learning_rate == 0.1);

    apply_override(cfg, "minibatch", "16");
    CHECK(cfg.minibatch == 16);
    CHECK_THROWS_AS(apply_override(cfg, "bogus_key", "1"), UsageError);
    CHECK_THROWS_AS(apply_override(cfg, "kbest", "not_a_number"), UsageError);

    save_config(cfg, tmp.file("saved.cfg"));
    ExperimentConfig again = load_config(tmp.file("saved.cfg"));
    CHECK(again.minibatch == 16);
    CHECK(again.objective == "ramp_t");
}

TEST_CASE("per-task defaults mirror the experimental protocol") {
    ExperimentConfig p = default_config("parsing", "ramp");
    CHECK(p.kbest == 10);
    CHECK(p.minibatch == 80);
    CHECK(p.test_beam == 12);
    CHECK(p.sample_count == 10);
    CHECK(p.baseline_count == 10);
    CHECK(p.learning_rate == 0.1);
    CHECK(p.max_len == 200);
    CHECK(p.mrt_temperature == 0.005);

    ExperimentConfig w = default_config("weakmt", "ramp_minus");
    CHECK(w.kbest == 16);
    CHECK(w.alpha_ramp == 10.0);
    CHECK(w.learning_rate == 0.005);
    CHECK(w.sample_count == 16);
    CHECK(default_config("weakmt", "mrt_d1").learning_rate == 0.05);

    CHECK(default_config("fullmt", "ramp").learning_rate == 0.001);
    CHECK(default_config("fullmt", "mrt").learning_rate == 0.01);
}

TEST_CASE("config validation rejects illegal combinations") {
    ExperimentConfig cfg = default_config("parsing", "ramp");
    cfg.data_dir = "/data";
    cfg.out_dir = "/out";
    SUBCASE("non-MLE objectives need a pretrained model") {
        CHECK_THROWS_AS(validate_config(cfg), UsageError);
        cfg.init_checkpoint = "/ckpt.bin";
        CHECK_NOTHROW(validate_config(cfg));
    }
    SUBCASE("objective must be legal for the task") {
        cfg.init_checkpoint = "/ckpt.bin";
        cfg.objective = "perc1"; // needs references
        CHECK_THROWS_AS(validate_config(cfg), UsageError);
        cfg.objective = "ramp_minus"; // needs documents
        CHECK_THROWS_AS(validate_config(cfg), UsageError);
        cfg.task = "weakmt";
        CHECK_NOTHROW(validate_config(cfg));
        cfg.objective = "mrt_neg";
        CHECK_THROWS_AS(validate_config(cfg), UsageError);
    }
    SUBCASE("beam must cover the k-best size") {
        cfg.init_checkpoint = "/ckpt.bin";
        cfg.train_beam = cfg.kbest - 1;
        CHECK_THROWS_AS(validate_config(cfg), UsageError);
    }
}

TEST_CASE("best checkpoint selection picks the first argmax") {
    CHECK(best_validation_index(std::vector<double>{1.0, 3.0, 2.0}) == 1);
    CHECK(best_validation_index(std::vector<double>{2.0, 2.0, 1.0}) == 0);
    CHECK(best_validation_index(std::vector<double>{}) == -1);
}

TEST_CASE("significance of a report against itself is 1") {
    EvalReport a = parsing_report({{"x", "x"}, {"y", "z"}, {"w", "w"}});
    CHECK(approx_randomization(a, a, "f1", 200, 9) == 1.0);
}

TEST_CASE("significance rejects zero iterations and misaligned reports") {
    EvalReport a = parsing_report({{"x", "x"}});
    CHECK_THROWS_AS(approx_randomization(a, a, "f1", 0, 9), UsageError);
    EvalReport b = parsing_report({{"x", "x"}, {"y", "y"}});
    CHECK_THROWS_AS(approx_randomization(a, b, "f1", 10, 9), DataError);
    EvalReport c = parsing_report({{"x", "q"}});
    CHECK_THROWS_AS(approx_randomization(a, c, "f1", 10, 9), DataError); // different golds
    CHECK_THROWS_AS(approx_randomization(a, a, "accuracy", 10, 9), UsageError);
}

TEST_CASE("significance tracks exact enumeration on 10 instances") {
    // A is correct on 8 of 10, B on 4 of 10, golds shared
    std::vector<std::pair<std::string, std::string>> rows_a, rows_b;
    for (int i = 0; i < 10; ++i) {
        const std::string gold = "g" + std::to_string(i);
        rows_a.emplace_back(i < 8 ? gold : "bad", gold);
        rows_b.emplace_back(i < 4 ? gold : "bad", gold);
    }
    EvalReport a = parsing_report(rows_a);
    EvalReport b = parsing_report(rows_b);

    // exact distribution over all 2^10 swap patterns
    auto f1_correct = [](const std::vector<int>& correct) {
        int c = 0;
        for (int v : correct) c += v;
        const double recall = static_cast<double>(c) / 10.0;
        const double precision = recall; // all answers non-empty here
        return (recall + precision) > 0 ? 2 * recall * precision / (recall + precision) : 0.0;
    };
    std::vector<int> ca, cb;
    for (int i = 0; i < 10; ++i) {
        ca.push_back(i < 8 ? 1 : 0);
        cb.push_back(i < 4 ? 1 : 0);
    }
    const double observed = std::abs(f1_correct(ca) - f1_correct(cb));
    int at_least = 0;
    for (int mask = 0; mask < 1024; ++mask) {
        std::vector<int> pa = ca, pb = cb;
        for (int i = 0; i < 10; ++i)
            if (mask & (1 << i)) std::swap(pa[static_cast<std::size_t>(i)], pb[static_cast<std::size_t>(i)]);
        if (std::abs(f1_correct(pa) - f1_correct(pb)) >= observed - 1e-12) ++at_least;
    }
    const double exact = static_cast<double>(at_least) / 1024.0;

    const int iterations = 20000;
    const double approx = approx_randomization(a, b, "f1", iterations, 123);
    const double se = std::sqrt(exact * (1.0 - exact) / iterations);
    CHECK(std::abs(approx - exact) <= 3.0 * se + 2.0 / iterations);
}

TEST_CASE("evaluation report round-trips through disk") {
    TempDir tmp("seqramp_report_test");
    EvalReport r;
    for (int i = 0; i < 5; ++i) {
        EvalRow row;
        row.id = i;
        row.source_len = i + 3;
        row.group = i % 2;
        row.hyp = "t1 t2 t3";
        row.ref = i % 2 ? "t1 t2 t3" : "t1 t4 t5 t6";
        r.rows.push_back(row);
    }
    r.save(tmp.file("r.tsv"));
    EvalReport loaded = EvalReport::load(tmp.file("r.tsv"));
    REQUIRE(loaded.rows.size() == 5);
    CHECK(loaded.metric_name == "bleu");
    CHECK(loaded.rows[1].ref == "t1 t2 t3");
    CHECK(loaded.rows[0].group == 0);

    SUBCASE("malformed report lines carry their line number") {
        std::ofstream os(tmp.file("bad.tsv"));
        os << "id\tsrc_len\tgroup\tcorrect\tanswer\tgold\thyp\tref\n";
        os << "0\t3\n";
        os.close();
        CHECK_THROWS_WITH_AS(EvalReport::load(tmp.file("bad.tsv")), doctest::Contains("bad.tsv:2"),
                             DataError);
    }
}

TEST_CASE("length buckets split uniform lengths at the quartiles") {
    EvalReport r;
    for (int len = 1; len <= 100; ++len) {
        EvalRow row;
        row.id = len;
        row.source_len = len;
        row.hyp = "a b c d";
        row.ref = "a b c d";
        r.rows.push_back(row);
    }
    std::vector<BucketRow> buckets = length_bucket_report(r, 4);
    REQUIRE(buckets.size() == 4);
    CHECK(buckets[0].label == "len<=25");
    CHECK(buckets[1].label == "26-50");
    CHECK(buckets[2].label == "51-75");
    CHECK(buckets[3].label == "len>75");
    int total = 0;
    for (const BucketRow& b : buckets) {
        CHECK(b.count == 25);
        total += b.count;
        CHECK(b.metric == doctest::Approx(100.0)); // identity hypotheses
        CHECK(b.length_ratio == doctest::Approx(1.0));
    }
    CHECK(total == 100);
}

TEST_CASE("group buckets follow the group ids") {
    EvalReport r;
    for (int i = 0; i < 12; ++i) {
        EvalRow row;
        row.id = i;
        row.source_len = 4;
        row.group = i % 3;
        row.hyp = "a b c d";
        row.ref = i % 3 == 2 ? "a b c d" : "a x y z";
        r.rows.push_back(row);
    }
    std::vector<BucketRow> buckets = group_bucket_report(r);
    REQUIRE(buckets.size() == 3);
    CHECK(buckets[0].count == 4);
    CHECK(buckets[2].metric == doctest::Approx(100.0));
    CHECK(buckets[0].metric < 100.0);
}

TEST_CASE("training end to end: determinism, checkpoints and reports") {
    TempDir tmp("seqramp_train_test");
    ParsingSizes sizes;
    sizes.supervised = 30;
    sizes.weak = 60;
    sizes.dev = 15;
    sizes.test = 15;
    sizes.entities = 20;
    write_parsing_task_dir(tmp.sub("data"), 3, sizes);

    ExperimentConfig mle = default_config("parsing", "mle");
    mle.data_dir = tmp.sub("data");
    mle.out_dir = tmp.sub("mle_a");
    mle.embed_dim = 10;
    mle.hidden_dim = 14;
    mle.minibatch = 8;
    mle.validation_interval = 8;
    mle.max_validations = 3;
    mle.max_len = 10;
    mle.test_beam = 4;
    mle.seed = 5;

    RunLog a = train(mle);
    REQUIRE(a.validations.size() == 3);
    CHECK(fs::exists(fs::path(mle.out_dir) / "ckpt_best.bin"));
    CHECK(fs::exists(fs::path(mle.out_dir) / "ckpt_latest.bin"));
    CHECK(fs::exists(fs::path(mle.out_dir) / "runlog.tsv"));

    SUBCASE("identical config and seed reproduce the run log exactly") {
        ExperimentConfig again = mle;
        again.out_dir = tmp.sub("mle_b");
        RunLog b = train(again);
        CHECK(slurp(tmp.sub("mle_a") + "/runlog.tsv") == slurp(tmp.sub("mle_b") + "/runlog.tsv"));
        CHECK(a.final_test_metric == b.final_test_metric);
        REQUIRE(a.validations.size() == b.validations.size());
        for (std::size_t i = 0; i < a.validations.size(); ++i)
            CHECK(std::abs(a.validations[i].dev_metric - b.validations[i].dev_metric) <= 1e-12);
    }

    SUBCASE("the reported test metric comes from the best-dev checkpoint") {
        std::vector<double> metrics;
        for (const ValidationRecord& r : a.validations) metrics.push_back(r.dev_metric);
        CHECK(a.best_index == best_validation_index(metrics));
        EvalReport test_report =
            evaluate(mle, tmp.sub("mle_a") + "/ckpt_best.bin", "test");
        CHECK(test_report.metric == doctest::Approx(a.final_test_metric).epsilon(1e-12));
    }

    SUBCASE("evaluate twice produces identical bytes") {
        EvalReport r1 = evaluate(mle, tmp.sub("mle_a") + "/ckpt_best.bin", "dev");
        r1.save(tmp.file("eval1.tsv"));
        EvalReport r2 = evaluate(mle, tmp.sub("mle_a") + "/ckpt_best.bin", "dev");
        r2.save(tmp.file("eval2.tsv"));
        CHECK(slurp(tmp.file("eval1.tsv")) == slurp(tmp.file("eval2.tsv")));
    }

    SUBCASE("weak training runs from the pretrained checkpoint") {
        ExperimentConfig ramp = default_config("parsing", "ramp_t");
        ramp.data_dir = tmp.sub("data");
        ramp.out_dir = tmp.sub("ramp");
        ramp.init_checkpoint = tmp.sub("mle_a") + "/ckpt_best.bin";
        ramp.embed_dim = 10;
        ramp.hidden_dim = 14;
        ramp.minibatch = 6;
        ramp.kbest = 4;
        ramp.train_beam = 4;
        ramp.test_beam = 4;
        ramp.validation_interval = 4;
        ramp.max_validations = 2;
        ramp.max_len = 10;
        ramp.seed = 7;
        RunLog r = train(ramp);
        CHECK(r.validations.size() == 2);
        CHECK(fs::exists(fs::path(ramp.out_dir) / "cache.tsv"));
    }

    SUBCASE("a missing pretraining checkpoint is rejected") {
        ExperimentConfig ramp = default_config("parsing", "ramp");
        ramp.data_dir = tmp.sub("data");
        ramp.out_dir = tmp.sub("ramp_missing");
        CHECK_THROWS_AS(train(ramp), UsageError);
    }
}

TEST_CASE("weak MT training runs end to end") {
    TempDir tmp("seqramp_wtrain_test");
    WeakMtSizes sizes;
    sizes.pretrain = 60;
    sizes.weak = 40;
    sizes.dev = 12;
    sizes.test = 12;
    sizes.vocab = 16;
    sizes.negative_docs = 8;
    write_weakmt_task_dir(tmp.sub("data"), 13, sizes);

    ExperimentConfig mle = default_config("weakmt", "mle");
    mle.data_dir = tmp.sub("data");
    mle.out_dir = tmp.sub("mle");
    mle.embed_dim = 8;
    mle.hidden_dim = 12;
    mle.minibatch = 8;
    mle.validation_interval = 6;
    mle.max_validations = 2;
    mle.max_len = 12;
    mle.test_beam = 4;
    mle.seed = 11;
    RunLog base = train(mle);
    CHECK(base.validations.size() == 2);

    for (const char* objective : {"ramp_minus", "ramp_d2_t", "mrt_d2"}) {
        ExperimentConfig cfg = default_config("weakmt", objective);
        cfg.data_dir = tmp.sub("data");
        cfg.out_dir = tmp.sub(objective);
        cfg.init_checkpoint = tmp.sub("mle") + "/ckpt_best.bin";
        cfg.embed_dim = 8;
        cfg.hidden_dim = 12;
        cfg.minibatch = 4;
        cfg.kbest = 3;
        cfg.train_beam = 3;
        cfg.test_beam = 4;
        cfg.sample_count = 3;
        cfg.baseline_count = 2;
        cfg.validation_interval = 2;
        cfg.max_validations = 1;
        cfg.max_len = 12;
        cfg.seed = 19;
        RunLog log = train(cfg);
        CHECK(log.validations.size() == 1);
        CHECK(log.final_test_metric >= 0.0);
    }
}

TEST_CASE("full MT training accepts perceptron objectives") {
    TempDir tmp("seqramp_ftrain_test");
    WeakMtSizes sizes;
    sizes.pretrain = 50;
    sizes.weak = 10;
    sizes.dev = 10;
    sizes.test = 10;
    sizes.vocab = 14;
    sizes.negative_docs = 5;
    write_weakmt_task_dir(tmp.sub("data"), 29, sizes);

    ExperimentConfig mle = default_config("fullmt", "mle");
    mle.data_dir = tmp.sub("data");
    mle.out_dir = tmp.sub("mle");
    mle.embed_dim = 8;
    mle.hidden_dim = 10;
    mle.minibatch = 8;
    mle.validation_interval = 4;
    mle.max_validations = 1;
    mle.max_len = 12;
    mle.test_beam = 4;
    mle.seed = 3;
    train(mle);

    for (const char* objective : {"perc1", "perc2", "mrt"}) {
        ExperimentConfig cfg = default_config("fullmt", objective);
        cfg.data_dir = tmp.sub("data");
        cfg.out_dir = tmp.sub(objective);
        cfg.init_checkpoint = tmp.sub("mle") + "/ckpt_best.bin";
        cfg.embed_dim = 8;
        cfg.hidden_dim = 10;
        cfg.minibatch = 4;
        cfg.kbest = 3;
        cfg.train_beam = 3;
        cfg.test_beam = 4;
        cfg.sample_count = 3;
        cfg.baseline_count = 2;
        cfg.validation_interval = 2;
        cfg.max_validations = 1;
        cfg.max_len = 12;
        cfg.seed = 23;
        RunLog log = train(cfg);
        CHECK(log.validations.size() == 1);
    }
}
