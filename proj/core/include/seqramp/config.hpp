#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqramp/selectors.hpp"

namespace seqramp {

enum class ObjectiveKind { Mle, Mrt, Ramp, Perc };

// Parsed objective tag, e.g. "ramp_minus_t" or "mrt_d2". The token-level
// suffix "_t" applies to any ramp variant.
struct Objective {
    std::string name;
    ObjectiveKind kind = ObjectiveKind::Mle;
    SelectorVariant variant = SelectorVariant::Ramp;
    bool token_level = false;
    bool neg_reward = false; // mrt_neg
    int mrt_metric = 0;      // 0 task feedback / BLEU+1, 1 delta1, 2 delta2
};

Objective parse_objective(const std::string& name);

struct ExperimentConfig {
    std::string task;      // parsing | weakmt | fullmt
    std::string objective = "mle";
    std::string data_dir;
    std::string out_dir;
    std::string init_checkpoint; // pretrained model, required for non-MLE

    int embed_dim = 32;
    int hidden_dim = 64;
    int minibatch = 80;          // M
    int kbest = 10;              // k
    int train_beam = 10;         // beam for the training k-best decode
    int test_beam = 12;          // beam for validation and test decoding
    int sample_count = 10;       // S
    int baseline_count = 10;     // S'
    double mrt_temperature = 0.005;
    double alpha_ramp = 10.0;
    double learning_rate = 0.1;
    double clip_norm = 1.0;
    int validation_interval = 50; // batches between validations
    int max_validations = 30;
    int max_len = 200;
    int metric_order = 4; // N for document match and BLEU
    double length_ratio = 0.0; // 0 = take the generated value from the manifest
    std::uint64_t seed = 1;
    bool cache_enabled = true; // hope/fear cache (parsing only)

    Objective parsed_objective() const { return parse_objective(objective); }
};

// Paper-mirroring defaults per task and objective family.
ExperimentConfig default_config(const std::string& task, const std::string& objective);

// Flat UTF-8 key=value file; '#' starts a comment.
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

// Applies one "key=value" override.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Throws UsageError when the configuration is inconsistent (illegal
// objective for the task, non-positive counts, missing pretraining model).
void validate_config(const ExperimentConfig& cfg);

} // namespace seqramp
