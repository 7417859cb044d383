#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "seqramp/metrics.hpp"

namespace seqramp {

std::vector<std::string> split_tokens(const std::string& line);
std::string join_tokens(const std::vector<std::string>& tokens);

// Answers serialize as sorted values joined by '|'; the empty set is the
// empty string.
std::string format_answer(const Answer& a);
Answer parse_answer_field(const std::string& field);

// ---------------------------------------------------------------------------
// Executable-query semantic parsing
// ---------------------------------------------------------------------------

struct ParsingInstance {
    std::vector<std::string> question;
    std::vector<std::string> parse; // empty for weak instances
    Answer answer;
};

// Deterministic (entity, attribute, value) table with a pure interpreter for
// the linearized query language:
//   lookup ENT ATTR            -> { value of (ENT, ATTR) }
//   find ATTR VAL              -> { entities with ATTR = VAL }
//   count ATTR VAL             -> { "<n>" }
//   find2 ATTR VAL ATTR VAL    -> { entities matching both }
// Malformed token sequences execute to the empty answer.
class ToyDatabase {
  public:
    void add(const std::string& entity, const std::string& attribute, const std::string& value);
    Answer execute(const std::vector<std::string>& parse) const;

    const std::vector<std::array<std::string, 3>>& triples() const { return triples_; }

    void save(const std::string& path) const;
    static ToyDatabase load(const std::string& path);

  private:
    std::vector<std::array<std::string, 3>> triples_;
    std::map<std::pair<std::string, std::string>, std::string> by_entity_attr_;
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> by_attr_value_;
};

struct ParsingSizes {
    int supervised = 200;
    int weak = 2000;
    int dev = 300;
    int test = 300;
    int entities = 100;
};

struct ParsingTask {
    ToyDatabase db;
    std::vector<ParsingInstance> supervised;
    std::vector<ParsingInstance> weak; // parse field withheld
    std::vector<ParsingInstance> dev;
    std::vector<ParsingInstance> test;
};

ParsingTask generate_parsing_task(std::uint64_t seed, const ParsingSizes& sizes);

// ---------------------------------------------------------------------------
// Document-supervised machine translation
// ---------------------------------------------------------------------------

struct SupervisedPair {
    std::vector<std::string> source;
    std::vector<std::string> target;
};

struct WeakMtInstance {
    std::vector<std::string> source;
    std::vector<std::string> reference; // evaluation only, never used in training
    std::vector<int> dplus_ids;
    std::vector<int> dminus_pool;
};

struct DocumentEntry {
    int id = -1;
    std::vector<std::string> tokens;
};

// Source word -> general translation, with an in-domain sense flip for a
// subset of the vocabulary (flip_to[i] >= 0 names the flipped target index).
struct WeakMtLexicon {
    std::vector<std::string> source_words;
    std::vector<std::string> target_words;
    std::vector<int> flip_to;

    bool flipped(int word) const { return flip_to[static_cast<std::size_t>(word)] >= 0; }
};

struct WeakMtSizes {
    int pretrain = 2000;
    int weak = 1000;
    int dev = 300;
    int test = 300;
    int vocab = 50;
    int negative_docs = 60;
};

struct WeakMtTask {
    WeakMtLexicon lexicon;
    std::vector<SupervisedPair> pretrain; // out-of-domain, general senses only
    std::vector<WeakMtInstance> weak;
    std::vector<SupervisedPair> dev;
    std::vector<SupervisedPair> test;
    std::vector<DocumentEntry> docs;
    double length_ratio = 1.0;
};

WeakMtTask generate_weakmt_task(std::uint64_t seed, const WeakMtSizes& sizes);

// ---------------------------------------------------------------------------
// Corpus files (UTF-8 TSV)
// ---------------------------------------------------------------------------

void save_supervised(const std::string& path, const std::vector<SupervisedPair>& pairs);
std::vector<SupervisedPair> load_supervised(const std::string& path);

void save_parsing(const std::string& path, const std::vector<ParsingInstance>& instances);
std::vector<ParsingInstance> load_parsing(const std::string& path);

void save_weak(const std::string& path, const std::vector<WeakMtInstance>& instances);
std::vector<WeakMtInstance> load_weak(const std::string& path);

void save_documents(const std::string& path, const std::vector<DocumentEntry>& docs);
std::vector<DocumentEntry> load_documents(const std::string& path);

struct TaskManifest {
    std::string task;
    std::uint64_t seed = 0;
    std::map<std::string, long> sizes;
    double length_ratio = 1.0;

    void save(const std::string& path) const;
    static TaskManifest load(const std::string& path);
};

// Generates a task and writes every file the trainer needs (corpora, vocabs,
// database or documents, manifest) into dir.
void write_parsing_task_dir(const std::string& dir, std::uint64_t seed, const ParsingSizes& sizes);
void write_weakmt_task_dir(const std::string& dir, std::uint64_t seed, const WeakMtSizes& sizes);

} // namespace seqramp
