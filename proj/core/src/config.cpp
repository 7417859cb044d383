#include "seqramp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "seqramp/common.hpp"

namespace seqramp {

Objective parse_objective(const std::string& name) {
    Objective o;
    o.name = name;
    std::string base = name;
    if (base.size() > 2 && base.rfind("_t") == base.size() - 2) {
        o.token_level = true;
        base = base.substr(0, base.size() - 2);
    }
    if (base == "mle") {
        if (o.token_level) throw UsageError("unknown objective: " + name);
        o.kind = ObjectiveKind::Mle;
        return o;
    }
    if (base == "mrt" || base == "mrt_neg" || base == "mrt_d1" || base == "mrt_d2") {
        if (o.token_level) throw UsageError("unknown objective: " + name);
        o.kind = ObjectiveKind::Mrt;
        o.neg_reward = base == "mrt_neg";
        o.mrt_metric = base == "mrt_d1" ? 1 : base == "mrt_d2" ? 2 : 0;
        return o;
    }
    if (base == "perc1" || base == "perc2") {
        if (o.token_level) throw UsageError("unknown objective: " + name);
        o.kind = ObjectiveKind::Perc;
        o.variant = base == "perc1" ? SelectorVariant::Perc1 : SelectorVariant::Perc2;
        return o;
    }
    o.kind = ObjectiveKind::Ramp;
    if (base == "ramp") o.variant = SelectorVariant::Ramp;
    else if (base == "ramp1") o.variant = SelectorVariant::Ramp1;
    else if (base == "ramp2") o.variant = SelectorVariant::Ramp2;
    else if (base == "ramp_minus") o.variant = SelectorVariant::RampMinus;
    else if (base == "ramp1_minus") o.variant = SelectorVariant::Ramp1Minus;
    else if (base == "ramp_d2") o.variant = SelectorVariant::RampDelta2;
    else throw UsageError("unknown objective: " + name);
    return o;
}

ExperimentConfig default_config(const std::string& task, const std::string& objective) {
    ExperimentConfig cfg;
    cfg.task = task;
    cfg.objective = objective;
    const Objective obj = parse_objective(objective); // validates the name
    if (task == "parsing") {
        cfg.kbest = 10;
        cfg.train_beam = 10;
        cfg.test_beam = 12;
        cfg.minibatch = 80;
        cfg.learning_rate = 0.1;
        cfg.sample_count = 10;
        cfg.baseline_count = 10;
        cfg.max_len = 200;
    } else if (task == "weakmt") {
        cfg.kbest = 16;
        cfg.train_beam = 16;
        cfg.test_beam = 16;
        cfg.minibatch = 40;
        cfg.learning_rate = obj.kind == ObjectiveKind::Mrt ? 0.05 : 0.005;
        cfg.sample_count = 16;
        cfg.baseline_count = 10;
        cfg.alpha_ramp = 10.0;
        cfg.max_len = 80;
        cfg.cache_enabled = false;
    } else if (task == "fullmt") {
        cfg.kbest = 16;
        cfg.train_beam = 16;
        cfg.test_beam = 16;
        cfg.minibatch = 40;
        cfg.learning_rate = obj.kind == ObjectiveKind::Mrt ? 0.01 : 0.001;
        cfg.sample_count = 16;
        cfg.baseline_count = 10;
        cfg.alpha_ramp = 10.0;
        cfg.max_len = 80;
        cfg.cache_enabled = false;
    } else {
        throw UsageError("unknown task: " + task);
    }
    return cfg;
}

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw UsageError("config key " + key + " expects a boolean, got '" + v + "'");
}

} // namespace

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "task") cfg.task = value;
        else if (key == "objective") cfg.objective = value;
        else if (key == "data_dir") cfg.data_dir = value;
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "init_checkpoint") cfg.init_checkpoint = value;
        else if (key == "embed_dim") cfg.embed_dim = std::stoi(value);
        else if (key == "hidden_dim") cfg.hidden_dim = std::stoi(value);
        else if (key == "minibatch") cfg.minibatch = std::stoi(value);
        else if (key == "kbest") cfg.kbest = std::stoi(value);
        else if (key == "train_beam") cfg.train_beam = std::stoi(value);
        else if (key == "test_beam") cfg.test_beam = std::stoi(value);
        else if (key == "sample_count") cfg.sample_count = std::stoi(value);
        else if (key == "baseline_count") cfg.baseline_count = std::stoi(value);
        else if (key == "mrt_temperature") cfg.mrt_temperature = std::stod(value);
        else if (key == "alpha_ramp") cfg.alpha_ramp = std::stod(value);
        else if (key == "learning_rate") cfg.learning_rate = std::stod(value);
        else if (key == "clip_norm") cfg.clip_norm = std::stod(value);
        else if (key == "validation_interval") cfg.validation_interval = std::stoi(value);
        else if (key == "max_validations") cfg.max_validations = std::stoi(value);
        else if (key == "max_len") cfg.max_len = std::stoi(value);
        else if (key == "metric_order") cfg.metric_order = std::stoi(value);
        else if (key == "length_ratio") cfg.length_ratio = std::stod(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "cache_enabled") cfg.cache_enabled = parse_bool(value, key);
        else throw UsageError("unknown config key: " + key);
    } catch (const std::invalid_argument&) {
        throw UsageError("config key " + key + " has a malformed value '" + value + "'");
    } catch (const std::out_of_range&) {
        throw UsageError("config key " + key + " has an out-of-range value '" + value + "'");
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open config: " + path);
    // first pass: find task/objective so defaults resolve before overrides
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    std::size_t line_no = 0;
    std::string task, objective = "mle";
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        // trim
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        line = line.substr(start);
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        std::size_t vstart = value.find_first_not_of(" \t");
        value = vstart == std::string::npos ? "" : value.substr(vstart);
        if (key == "task") task = value;
        if (key == "objective") objective = value;
        entries.emplace_back(key, value);
    }
    if (task.empty()) throw UsageError("config is missing the task key: " + path);
    ExperimentConfig cfg = default_config(task, objective);
    for (const auto& [k, v] : entries) apply_override(cfg, k, v);
    return cfg;
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot write config: " + path);
    os.precision(17);
    os << "task=" << cfg.task << "\n";
    os << "objective=" << cfg.objective << "\n";
    os << "data_dir=" << cfg.data_dir << "\n";
    os << "out_dir=" << cfg.out_dir << "\n";
    os << "init_checkpoint=" << cfg.init_checkpoint << "\n";
    os << "embed_dim=" << cfg.embed_dim << "\n";
    os << "hidden_dim=" << cfg.hidden_dim << "\n";
    os << "minibatch=" << cfg.minibatch << "\n";
    os << "kbest=" << cfg.kbest << "\n";
    os << "train_beam=" << cfg.train_beam << "\n";
    os << "test_beam=" << cfg.test_beam << "\n";
    os << "sample_count=" << cfg.sample_count << "\n";
    os << "baseline_count=" << cfg.baseline_count << "\n";
    os << "mrt_temperature=" << cfg.mrt_temperature << "\n";
    os << "alpha_ramp=" << cfg.alpha_ramp << "\n";
    os << "learning_rate=" << cfg.learning_rate << "\n";
    os << "clip_norm=" << cfg.clip_norm << "\n";
    os << "validation_interval=" << cfg.validation_interval << "\n";
    os << "max_validations=" << cfg.max_validations << "\n";
    os << "max_len=" << cfg.max_len << "\n";
    os << "metric_order=" << cfg.metric_order << "\n";
    os << "length_ratio=" << cfg.length_ratio << "\n";
    os << "seed=" << cfg.seed << "\n";
    os << "cache_enabled=" << (cfg.cache_enabled ? "true" : "false") << "\n";
}

void validate_config(const ExperimentConfig& cfg) {
    const Objective obj = cfg.parsed_objective();
    static const std::set<std::string> parsing_objectives{
        "mle", "mrt", "mrt_neg", "ramp", "ramp1", "ramp2", "ramp_t", "ramp1_t", "ramp2_t"};
    static const std::set<std::string> weakmt_objectives{
        "mle",        "mrt_d1",       "mrt_d2",  "ramp",       "ramp2",
        "ramp_minus", "ramp1_minus",  "ramp_d2", "ramp_t",     "ramp2_t",
        "ramp_minus_t", "ramp1_minus_t", "ramp_d2_t"};
    static const std::set<std::string> fullmt_objectives{
        "mle",  "mrt",    "ramp",  "ramp1",  "ramp2", "ramp_t",
        "ramp1_t", "ramp2_t", "perc1", "perc2"};

    const std::set<std::string>* legal = nullptr;
    if (cfg.task == "parsing") legal = &parsing_objectives;
    else if (cfg.task == "weakmt") legal = &weakmt_objectives;
    else if (cfg.task == "fullmt") legal = &fullmt_objectives;
    else throw UsageError("unknown task: " + cfg.task);
    if (!legal->count(cfg.objective))
        throw UsageError("objective " + cfg.objective + " is not defined for task " + cfg.task);

    if (cfg.data_dir.empty()) throw UsageError("data_dir is required");
    if (cfg.out_dir.empty()) throw UsageError("out_dir is required");
    if (obj.kind != ObjectiveKind::Mle && cfg.init_checkpoint.empty())
        throw UsageError("objective " + cfg.objective + " requires init_checkpoint (a pretrained model)");
    if (cfg.embed_dim <= 0 || cfg.hidden_dim <= 0) throw UsageError("model dimensions must be positive");
    if (cfg.minibatch <= 0) throw UsageError("minibatch must be positive");
    if (cfg.kbest < 1 || cfg.train_beam < cfg.kbest)
        throw UsageError("need train_beam >= kbest >= 1");
    if (cfg.test_beam < 1) throw UsageError("test_beam must be positive");
    if (cfg.sample_count < 1) throw UsageError("sample_count must be positive");
    if (cfg.baseline_count < 0) throw UsageError("baseline_count must be non-negative");
    if (!(cfg.mrt_temperature > 0.0)) throw UsageError("mrt_temperature must be positive");
    if (!(cfg.alpha_ramp >= 0.0)) throw UsageError("alpha_ramp must be non-negative");
    if (!(cfg.learning_rate > 0.0)) throw UsageError("learning_rate must be positive");
    if (!(cfg.clip_norm > 0.0)) throw UsageError("clip_norm must be positive");
    if (cfg.validation_interval <= 0) throw UsageError("validation_interval must be positive");
    if (cfg.max_validations <= 0) throw UsageError("max_validations must be positive");
    if (cfg.max_len < 2) throw UsageError("max_len must be at least 2");
    if (cfg.metric_order < 1) throw UsageError("metric_order must be at least 1");
}

} // namespace seqramp
