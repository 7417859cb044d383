#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace seqramp {

// Seeded random stream. All randomness in a run flows from one master seed;
// independent components derive their own stream via substream(name), so
// re-seeding one component never shifts another.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    Rng substream(std::string_view name) const;
    Rng substream(std::string_view name, std::uint64_t index) const;

    std::uint64_t next_u64();
    double uniform01();
    double uniform(double lo, double hi);
    // Inclusive bounds.
    int uniform_int(int lo, int hi);

    // Draws an index proportional to weights (need not be normalized).
    int categorical(std::span<const double> weights);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(0, static_cast<int>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

} // namespace seqramp
