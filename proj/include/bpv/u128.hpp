#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace bpv {

// 128-bit unsigned integer used for ballot identification numbers.
using u128 = unsigned __int128;

std::string u128_to_string(u128 value);

// Strict decimal parse: digits only, no leading zeros (except "0"), must fit
// in 128 bits.
std::optional<u128> u128_from_string(std::string_view text);

// The secret per-voter identification number. Uniqueness is enforced by the
// registry that issues these, not per value.
struct BallotId {
    u128 value = 0;

    friend bool operator==(const BallotId& a, const BallotId& b) { return a.value == b.value; }
    friend std::strong_ordering operator<=>(const BallotId& a, const BallotId& b) {
        if (a.value < b.value) return std::strong_ordering::less;
        if (a.value > b.value) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
};

inline std::string to_string(const BallotId& id) { return u128_to_string(id.value); }

struct BallotIdHash {
    std::size_t operator()(const BallotId& id) const noexcept {
        auto lo = static_cast<std::uint64_t>(id.value);
        auto hi = static_cast<std::uint64_t>(id.value >> 64);
        std::uint64_t x = lo ^ (hi * 0x9e3779b97f4a7c15ULL);
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        return static_cast<std::size_t>(x);
    }
};

}  // namespace bpv
