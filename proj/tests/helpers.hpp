#pragma once

// Shared test machinery: the brute-force counting oracle and the randomized
// honest-scenario generator. The oracle counts straight from the configured
// intents and never touches the tally pipeline it checks.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bpv/agents.hpp"
#include "bpv/rng.hpp"

namespace bpvtest {

struct OracleCount {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t participants = 0;
};

// A voter takes part iff she has an intent and her box-route half gets
// delivered; callers use this on honest scenarios only.
inline OracleCount oracle_tally(const bpv::ScenarioConfig& config) {
    OracleCount oracle;
    for (const auto& name : config.params.candidates) oracle.counts[name] = 0;
    for (const auto& [name, behavior] : config.voters) {
        if (!behavior.intent) continue;
        if (behavior.attendance == bpv::Attendance::abstain) continue;
        if (behavior.late_grid) continue;
        ++oracle.participants;
        for (const auto& candidate : behavior.intent->voted_for) {
            oracle.counts.at(candidate) += 1;
        }
    }
    return oracle;
}

inline bool report_matches_oracle(const bpv::ElectionReport& report, const OracleCount& oracle) {
    if (report.total_valid_ballots != oracle.participants) return false;
    for (const auto& [name, votes] : report.counts) {
        if (oracle.counts.at(name) != votes) return false;
    }
    return true;
}

struct GeneratorOptions {
    std::size_t min_voters = 5;
    std::size_t max_voters = 50;
    std::size_t min_candidates = 2;
    std::size_t max_candidates = 8;
    bpv::ElectoralMode mode = bpv::ElectoralMode::subset;
    bpv::VariantFlags variants;
    std::optional<bpv::StuffingConfig> stuffing;
};

// Honest scenario: faithful proxies, mixed attendance, randomized intents.
// Voter and candidate names are long and unique so privacy projections can
// be checked by substring absence.
inline bpv::ScenarioConfig make_honest_scenario(std::uint64_t seed,
                                                const GeneratorOptions& options = {}) {
    bpv::Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    // Intents and attendance come from independent substreams so scenarios
    // that differ only in variant flags keep the same votes.
    bpv::Rng intent_rng = rng.fork("intents");
    bpv::Rng attend_rng = rng.fork("attendance");
    bpv::ScenarioConfig config;
    config.seed = seed;
    config.variants = options.variants;

    auto span = [&](std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
    };
    auto tag = [&](std::size_t i) {
        std::string text = std::to_string(i) + "-";
        for (int k = 0; k < 6; ++k) {
            text.push_back(static_cast<char>('a' + rng.below(26)));
        }
        return text;
    };

    const std::size_t candidate_count = span(options.min_candidates, options.max_candidates);
    for (std::size_t i = 0; i < candidate_count; ++i) {
        config.params.candidates.push_back("contender-" + tag(i));
    }
    config.params.mode = options.mode;
    config.params.seats = 1 + static_cast<int>(rng.below(candidate_count));
    config.params.encoding =
        options.variants.numerical ? bpv::GrilleEncoding::numerical : bpv::GrilleEncoding::bits;
    config.params.embellishment_enabled = options.variants.embellishment;

    const std::size_t voter_count = span(options.min_voters, options.max_voters);
    for (std::size_t i = 0; i < voter_count; ++i) {
        config.roll.push_back("elector-" + tag(i));
    }
    const std::size_t proxy_count = 2 + voter_count / 3;
    for (std::size_t i = 0; i < proxy_count; ++i) {
        config.proxy_pool.push_back("courier-" + tag(i));
    }
    for (const auto& proxy : config.proxy_pool) {
        config.proxies.emplace(proxy, bpv::ProxyBehavior{proxy, bpv::Conduct::faithful, {}});
    }

    auto random_intent = [&]() {
        bpv::VoteIntent intent;
        switch (config.params.mode) {
            case bpv::ElectoralMode::subset:
                for (const auto& candidate : config.params.candidates) {
                    if (intent_rng.coin()) intent.voted_for.insert(candidate);
                }
                break;
            case bpv::ElectoralMode::first_past_the_post: {
                auto pick = intent_rng.below(candidate_count + 1);
                if (pick < candidate_count) {
                    intent.voted_for.insert(config.params.candidates[pick]);
                }
                break;
            }
            case bpv::ElectoralMode::plurality_at_large: {
                auto picks = intent_rng.below(static_cast<std::uint64_t>(config.params.seats) + 1);
                auto order = intent_rng.permutation(candidate_count);
                for (std::uint64_t k = 0; k < picks; ++k) {
                    intent.voted_for.insert(config.params.candidates[order[k]]);
                }
                break;
            }
        }
        return intent;
    };
    auto random_proxy = [&]() { return config.proxy_pool[attend_rng.below(proxy_count)]; };

    for (const auto& name : config.roll) {
        bpv::VoterBehavior behavior;
        behavior.name = name;
        behavior.intent = random_intent();
        if (options.variants.two_proxy) {
            switch (attend_rng.below(3)) {
                case 0: behavior.attendance = bpv::Attendance::in_person; break;
                case 1:
                    behavior.attendance = bpv::Attendance::by_proxy;
                    behavior.proxy = random_proxy();
                    break;
                default: {
                    behavior.attendance = bpv::Attendance::two_proxy;
                    auto first = attend_rng.below(proxy_count);
                    auto second = (first + 1 + attend_rng.below(proxy_count - 1)) % proxy_count;
                    behavior.two_proxies = {config.proxy_pool[first], config.proxy_pool[second]};
                    break;
                }
            }
        } else if (attend_rng.coin()) {
            behavior.attendance = bpv::Attendance::in_person;
        } else {
            behavior.attendance = bpv::Attendance::by_proxy;
            behavior.proxy = random_proxy();
        }
        config.voters.emplace(name, std::move(behavior));
    }

    if (options.variants.id_swap) {
        for (std::size_t i = 0; i + 1 < voter_count; i += 2) {
            auto& a = config.voters.at(config.roll[i]);
            auto& b = config.voters.at(config.roll[i + 1]);
            a.id_swap_partner = b.name;
            b.id_swap_partner = a.name;
        }
    }

    config.stuffing = options.stuffing;
    return config;
}

}  // namespace bpvtest
