#include "seqramp/vocab.hpp"

#include <fstream>
#include <map>
#include <stdexcept>

#include "seqramp/common.hpp"

namespace seqramp {

Vocab::Vocab() {
    for (const char* t : {"<pad>", "<s>", "</s>", "<unk>"}) add(t);
}

int Vocab::add(const std::string& token) {
    auto it = ids_.find(token);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(tokens_.size());
    tokens_.push_back(token);
    ids_.emplace(token, id);
    return id;
}

int Vocab::id(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(int id) const {
    if (id < 0 || id >= size()) throw std::out_of_range("Vocab::token: id out of range");
    return tokens_[static_cast<std::size_t>(id)];
}

bool Vocab::contains(const std::string& token) const { return ids_.count(token) > 0; }

std::vector<int> Vocab::encode(const std::vector<std::string>& tokens) const {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(id(t));
    return out;
}

std::vector<std::string> Vocab::decode(const std::vector<int>& ids) const {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (int i : ids) out.push_back(token(i));
    return out;
}

void Vocab::save(const std::string& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot write vocab: " + path);
    for (const auto& t : tokens_) os << t << "\n";
}

Vocab Vocab::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open vocab: " + path);
    Vocab v;
    std::string line;
    int idx = 0;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (idx < 4) {
            if (line != v.tokens_[static_cast<std::size_t>(idx)])
                throw DataError("vocab is missing reserved tokens: " + path);
        } else {
            if (v.contains(line)) throw DataError("duplicate vocab token '" + line + "' in " + path);
            v.add(line);
        }
        ++idx;
    }
    if (idx < 4) throw DataError("vocab is missing reserved tokens: " + path);
    return v;
}

Vocab Vocab::from_corpus(const std::vector<std::vector<std::string>>& sentences) {
    // Sorted insertion keeps the file independent of sentence order.
    std::map<std::string, bool> seen;
    for (const auto& s : sentences)
        for (const auto& t : s) seen.emplace(t, true);
    Vocab v;
    for (const auto& [tok, _] : seen) v.add(tok);
    return v;
}

} // namespace seqramp
