#include "bpv/rng.hpp"

#include <numeric>

namespace bpv {

namespace {

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t Rng::next_u64() { return engine_(); }

u128 Rng::next_u128() {
    u128 hi = next_u64();
    u128 lo = next_u64();
    return (hi << 64) | lo;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    // Rejection sampling keeps the draw unbiased: discard values below
    // 2^64 mod bound, then reduce.
    std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t raw;
    do {
        raw = next_u64();
    } while (raw < threshold);
    return raw % bound;
}

bool Rng::coin() { return (next_u64() & 1u) != 0; }

Rng Rng::fork(std::string_view label) const {
    return Rng(splitmix64(seed_ ^ fnv1a64(label)));
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order);
    return order;
}

}  // namespace bpv
