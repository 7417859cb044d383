#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace seqramp {

// Token <-> id bijection with fixed reserved ids.
class Vocab {
  public:
    static constexpr int kPad = 0;
    static constexpr int kBos = 1;
    static constexpr int kEos = 2;
    static constexpr int kUnk = 3;

    Vocab();

    // Returns the token's id, adding it if absent.
    int add(const std::string& token);
    // Returns kUnk for unknown tokens.
    int id(const std::string& token) const;
    const std::string& token(int id) const;
    bool contains(const std::string& token) const;
    int size() const { return static_cast<int>(tokens_.size()); }

    std::vector<int> encode(const std::vector<std::string>& tokens) const;
    std::vector<std::string> decode(const std::vector<int>& ids) const;

    // One token per line, line number = id, reserved tokens first.
    void save(const std::string& path) const;
    static Vocab load(const std::string& path);

    static Vocab from_corpus(const std::vector<std::vector<std::string>>& sentences);

  private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> ids_;
};

} // namespace seqramp
