#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "bpv/u128.hpp"

namespace bpv {

// Deterministic random source. Every bounded draw goes through rejection
// sampling on the raw mt19937_64 stream, so sequences are identical across
// platforms and standard-library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    u128 next_u128();

    // Uniform in [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound);

    // Fair coin.
    bool coin();

    // Independent substream derived from this stream's construction seed and
    // a label; unaffected by how much has been drawn so far.
    Rng fork(std::string_view label) const;

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

    // Uniform random permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n);

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace bpv
