#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "seqramp/config.hpp"
#include "seqramp/metrics.hpp"

namespace seqramp {

struct ValidationRecord {
    int validation = 0; // 1-based
    long updates = 0;
    double dev_metric = 0.0;
    int checkpoint_id = 0;
};

struct RunLog {
    std::vector<ValidationRecord> validations;
    int best_index = -1; // into validations
    double final_test_metric = 0.0;
    double wall_seconds = 0.0;

    // runlog.tsv holds the per-validation records; the test metric and wall
    // clock go to summary.tsv so identical runs produce identical runlogs.
    void save(const std::string& dir) const;
};

// First argmax over the recorded dev metrics.
int best_validation_index(std::span<const double> metrics);

// Runs the configured objective end to end: decode/select/loss/step cycles
// with periodic validation, best-checkpoint selection and a final test
// evaluation from the best checkpoint. Writes checkpoints, runlog.tsv and
// summary.tsv under cfg.out_dir. The callback, when given, fires after each
// validation.
using ValidationCallback = std::function<void(const ValidationRecord&)>;
RunLog train(const ExperimentConfig& cfg, const ValidationCallback& on_validation = nullptr);

struct EvalRow {
    int id = 0;
    int source_len = 0;
    int group = -1;          // optional group id, -1 when absent
    int correct = -1;        // parsing only
    std::string answer;      // parsing: canonical executed answer
    std::string gold;        // parsing: canonical gold answer
    std::string hyp;         // space-joined hypothesis tokens
    std::string ref;         // space-joined reference tokens (MT)
};

struct EvalReport {
    std::string metric_name; // "f1" or "bleu"
    double metric = 0.0;
    F1Result f1;
    std::vector<EvalRow> rows;

    void save(const std::string& path) const;
    static EvalReport load(const std::string& path);
};

// Decodes the split ("dev", "test", or an explicit corpus path) with the
// test beam and scores it with the task metric.
EvalReport evaluate(const ExperimentConfig& cfg, const std::string& checkpoint,
                    const std::string& split);

} // namespace seqramp
