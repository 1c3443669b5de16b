#include "bpv/ballot.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace bpv {

namespace {

constexpr std::string_view kDecoyAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
constexpr std::size_t kDecoyNameLength = 8;

std::string random_decoy_name(Rng& rng) {
    std::string name;
    name.reserve(kDecoyNameLength);
    for (std::size_t i = 0; i < kDecoyNameLength; ++i) {
        name.push_back(kDecoyAlphabet[rng.below(kDecoyAlphabet.size())]);
    }
    return name;
}

}  // namespace

std::string_view to_string(ElectoralMode mode) {
    switch (mode) {
        case ElectoralMode::subset: return "subset";
        case ElectoralMode::first_past_the_post: return "first-past-the-post";
        case ElectoralMode::plurality_at_large: return "plurality-at-large";
    }
    return "unknown";
}

std::string_view to_string(GrilleEncoding encoding) {
    return encoding == GrilleEncoding::bits ? "bits" : "numerical";
}

std::optional<ElectoralMode> mode_from_string(std::string_view text) {
    if (text == "subset") return ElectoralMode::subset;
    if (text == "first-past-the-post" || text == "fptp") return ElectoralMode::first_past_the_post;
    if (text == "plurality-at-large") return ElectoralMode::plurality_at_large;
    return std::nullopt;
}

std::optional<GrilleEncoding> encoding_from_string(std::string_view text) {
    if (text == "bits") return GrilleEncoding::bits;
    if (text == "numerical") return GrilleEncoding::numerical;
    return std::nullopt;
}

std::string trim(std::string_view text) {
    const auto* ws = " \t\r\n";
    auto begin = text.find_first_not_of(ws);
    if (begin == std::string_view::npos) return "";
    auto end = text.find_last_not_of(ws);
    return std::string(text.substr(begin, end - begin + 1));
}

void ElectionParams::validate() const {
    if (candidates.empty()) throw ParamsError("no candidates");
    std::set<std::string> seen;
    for (const auto& name : candidates) {
        std::string normalized = trim(name);
        if (normalized.empty()) throw ParamsError("empty candidate name");
        if (normalized != name) throw ParamsError("candidate name not trimmed: '" + name + "'");
        if (name.find('\t') != std::string::npos || name.find('\n') != std::string::npos) {
            throw ParamsError("candidate name contains tab or newline: '" + name + "'");
        }
        if (!seen.insert(name).second) throw ParamsError("duplicate candidate name: '" + name + "'");
    }
    if (seats < 1) throw ParamsError("seats must be at least 1");
    if (mode == ElectoralMode::plurality_at_large &&
        static_cast<std::size_t>(seats) > candidates.size()) {
        throw ParamsError("plurality-at-large seats exceed candidate count");
    }
}

std::optional<std::size_t> ElectionParams::candidate_index(std::string_view name) const {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i] == name) return i;
    }
    return std::nullopt;
}

std::size_t ElectionParams::grid_length() const {
    return mode == ElectoralMode::subset ? 2 * candidates.size() : candidates.size();
}

void check_intent(const VoteIntent& intent, const ElectionParams& params) {
    for (const auto& name : intent.voted_for) {
        if (!params.candidate_index(name)) {
            throw IntentError("intent names unknown candidate: '" + name + "'");
        }
    }
    switch (params.mode) {
        case ElectoralMode::subset:
            break;  // any subset, including empty and full
        case ElectoralMode::first_past_the_post:
            if (intent.voted_for.size() > 1) {
                throw IntentError("first-past-the-post allows at most one vote");
            }
            break;
        case ElectoralMode::plurality_at_large:
            if (intent.voted_for.size() > static_cast<std::size_t>(params.seats)) {
                throw IntentError("plurality-at-large allows at most as many votes as seats");
            }
            break;
    }
}

BallotPaper make_ballot(const VoteIntent& intent, const ElectionParams& params, Rng& rng,
                        BallotId id) {
    params.validate();
    check_intent(intent, params);

    const std::size_t length = params.grid_length();

    std::vector<std::string> names(params.candidates.begin(), params.candidates.end());
    if (params.mode == ElectoralMode::subset) {
        // Decoy rows hide how many for-votes the grille carries.
        std::set<std::string> taken(names.begin(), names.end());
        while (names.size() < length) {
            std::string decoy = random_decoy_name(rng);
            if (taken.insert(decoy).second) names.push_back(decoy);
        }
    }

    auto order = rng.permutation(length);
    std::vector<std::string> rows(length);
    for (std::size_t i = 0; i < length; ++i) rows[i] = std::move(names[order[i]]);

    std::vector<std::uint8_t> bits(length, 0);
    for (std::size_t i = 0; i < length; ++i) {
        if (params.candidate_index(rows[i])) {
            bits[i] = intent.voted_for.count(rows[i]) ? 1 : 0;
        } else {
            bits[i] = rng.coin() ? 1 : 0;
        }
    }

    Grid grid;
    grid.id = id;
    grid.names = std::move(rows);

    Grille grille;
    grille.id = id;

    if (params.encoding == GrilleEncoding::numerical) {
        std::vector<std::uint32_t> codes;
        std::unordered_set<std::uint32_t> used;
        codes.reserve(length);
        while (codes.size() < length) {
            auto code = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << 32));
            if (used.insert(code).second) codes.push_back(code);
        }
        grid.code_numbers = std::move(codes);
        grille.encoding = GrilleEncoding::numerical;
        for (std::size_t i = 0; i < length; ++i) {
            if (bits[i]) grille.codes.push_back((*grid.code_numbers)[i]);
        }
    } else {
        grille.bits = std::move(bits);
    }

    grid.checksum = checksum_of(grille);
    if (params.embellishment_enabled) grid.embellishment = embellishment_of(grille);
    return BallotPaper{std::move(grid), std::move(grille)};
}

std::uint64_t checksum_of(const Grille& grille) {
    if (grille.encoding == GrilleEncoding::numerical) return grille.codes.size();
    return static_cast<std::uint64_t>(
        std::count(grille.bits.begin(), grille.bits.end(), std::uint8_t{1}));
}

std::uint64_t embellishment_of(const Grille& grille) {
    std::uint64_t sum = 0;
    if (grille.encoding == GrilleEncoding::numerical) {
        for (auto code : grille.codes) sum += code;
        return sum;
    }
    for (std::size_t i = 0; i < grille.bits.size(); ++i) {
        if (grille.bits[i]) sum += i + 1;
    }
    return sum;
}

GridClassification grid_classify(const Grid& grid, const ElectionParams& params) {
    GridClassification result;
    if (grid.names.empty()) {
        result.kind = GridClass::malformed;
        return result;
    }
    std::map<std::string, int> candidate_counts;
    for (const auto& row : grid.names) {
        if (params.candidate_index(row)) ++candidate_counts[row];
    }
    for (const auto& [name, count] : candidate_counts) {
        if (count > 1) {
            result.kind = GridClass::malformed;
            return result;
        }
    }
    for (const auto& candidate : params.candidates) {
        if (!candidate_counts.count(candidate)) result.missing.insert(candidate);
    }
    result.kind = result.missing.empty() ? GridClass::complete : GridClass::missing_candidates;
    return result;
}

std::string_view to_string(MismatchReason reason) {
    switch (reason) {
        case MismatchReason::length: return "length";
        case MismatchReason::checksum: return "checksum";
        case MismatchReason::embellishment: return "embellishment";
        case MismatchReason::unknown_code: return "unknown-code";
        case MismatchReason::cardinality: return "cardinality";
        case MismatchReason::malformed_grid: return "malformed-grid";
        case MismatchReason::encoding: return "encoding";
    }
    return "unknown";
}

namespace {

MatchVerdict mismatch(MismatchReason reason) {
    MatchVerdict verdict;
    verdict.matched = false;
    verdict.reason = reason;
    return verdict;
}

}  // namespace

MatchVerdict match_pair(const Grid& grid, const Grille& grille, const ElectionParams& params) {
    if (grid.id != grille.id) throw UsageError("grid and grille ids differ");

    if (grille.encoding != params.encoding) return mismatch(MismatchReason::encoding);

    std::set<std::size_t> marked_rows;
    if (params.encoding == GrilleEncoding::bits) {
        if (grille.bits.size() != grid.names.size()) return mismatch(MismatchReason::length);
        if (checksum_of(grille) != grid.checksum) return mismatch(MismatchReason::checksum);
        if (params.embellishment_enabled && grid.embellishment &&
            embellishment_of(grille) != *grid.embellishment) {
            return mismatch(MismatchReason::embellishment);
        }
        for (std::size_t i = 0; i < grille.bits.size(); ++i) {
            if (grille.bits[i]) marked_rows.insert(i);
        }
    } else {
        if (!grid.code_numbers || grid.code_numbers->size() != grid.names.size()) {
            return mismatch(MismatchReason::encoding);
        }
        if (checksum_of(grille) != grid.checksum) return mismatch(MismatchReason::checksum);
        if (params.embellishment_enabled && grid.embellishment &&
            embellishment_of(grille) != *grid.embellishment) {
            return mismatch(MismatchReason::embellishment);
        }
        std::unordered_map<std::uint32_t, std::size_t> row_of_code;
        for (std::size_t i = 0; i < grid.code_numbers->size(); ++i) {
            row_of_code.emplace((*grid.code_numbers)[i], i);
        }
        for (auto code : grille.codes) {
            auto it = row_of_code.find(code);
            if (it == row_of_code.end()) return mismatch(MismatchReason::unknown_code);
            // A repeated code has no second row to claim.
            if (!marked_rows.insert(it->second).second) {
                return mismatch(MismatchReason::unknown_code);
            }
        }
    }

    auto classification = grid_classify(grid, params);
    if (classification.kind == GridClass::malformed) {
        return mismatch(MismatchReason::malformed_grid);
    }

    MatchVerdict verdict;
    verdict.matched = true;
    for (auto row : marked_rows) {
        const auto& name = grid.names[row];
        if (params.candidate_index(name)) verdict.intent.voted_for.insert(name);
    }

    std::size_t cap = params.candidates.size();
    if (params.mode == ElectoralMode::first_past_the_post) cap = 1;
    if (params.mode == ElectoralMode::plurality_at_large) {
        cap = static_cast<std::size_t>(params.seats);
    }
    if (verdict.intent.voted_for.size() > cap) return mismatch(MismatchReason::cardinality);
    return verdict;
}

std::vector<std::string> purge(const BallotPaper& paper, const ElectionParams& params) {
    auto verdict = match_pair(paper.grid, paper.grille, params);
    if (!verdict.matched) {
        throw UsageError("cannot purge an unmatched ballot paper");
    }
    std::vector<std::string> names;
    for (const auto& candidate : params.candidates) {
        if (verdict.intent.voted_for.count(candidate)) names.push_back(candidate);
    }
    return names;
}

}  // namespace bpv
