#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bpv/errors.hpp"
#include "bpv/rng.hpp"
#include "bpv/u128.hpp"

namespace bpv {

enum class ElectoralMode { subset, first_past_the_post, plurality_at_large };
enum class GrilleEncoding { bits, numerical };

std::string_view to_string(ElectoralMode mode);
std::string_view to_string(GrilleEncoding encoding);
std::optional<ElectoralMode> mode_from_string(std::string_view text);
std::optional<GrilleEncoding> encoding_from_string(std::string_view text);

std::string trim(std::string_view text);

struct ElectionParams {
    std::vector<std::string> candidates;
    int seats = 1;
    ElectoralMode mode = ElectoralMode::subset;
    GrilleEncoding encoding = GrilleEncoding::bits;
    bool embellishment_enabled = false;

    // ParamsError when candidate names are not pairwise distinct and
    // non-empty after trimming, seats < 1, or plurality-at-large seats
    // exceed the candidate count.
    void validate() const;

    std::optional<std::size_t> candidate_index(std::string_view name) const;

    // Rows per well-formed grid: candidates plus an equal number of decoy
    // names in subset mode, candidates only in the fixed-vote modes.
    std::size_t grid_length() const;
};

struct VoteIntent {
    std::set<std::string> voted_for;

    friend bool operator==(const VoteIntent&, const VoteIntent&) = default;
};

// IntentError if the intent names an unknown candidate or exceeds the mode's
// cardinality bound (at most one vote in first-past-the-post, at most
// `seats` in plurality-at-large; any subset otherwise).
void check_intent(const VoteIntent& intent, const ElectionParams& params);

// The name-list half of a ballot paper, submitted through the registering
// authority together with the checksum. Grids that violate well-formedness
// are representable; they are classified, not rejected (see grid_classify).
struct Grid {
    BallotId id;
    std::vector<std::string> names;
    std::uint64_t checksum = 0;
    std::optional<std::uint64_t> embellishment;
    std::optional<std::vector<std::uint32_t>> code_numbers;  // numerical encoding only
};

// The marks half, delivered to the ballot box in person or by proxy.
struct Grille {
    BallotId id;
    GrilleEncoding encoding = GrilleEncoding::bits;
    std::vector<std::uint8_t> bits;       // each 0 or 1
    std::vector<std::uint32_t> codes;     // numerical encoding, pairwise distinct
};

struct BallotPaper {
    Grid grid;
    Grille grille;
};

// Builds a complete ballot paper for the intent: all candidate names, decoy
// rows with independent coin-flip marks in subset mode, a private uniform
// row order, checksum and (when enabled) embellishment filled in. Numerical
// encoding additionally assigns distinct random code numbers per row and
// lists the codes of the marked rows.
BallotPaper make_ballot(const VoteIntent& intent, const ElectionParams& params, Rng& rng,
                        BallotId id);

// Number of 1 marks; code-list length in numerical encoding.
std::uint64_t checksum_of(const Grille& grille);

// 1-based position sum of the marked rows; sum of the listed code numbers in
// numerical encoding. Detects every checksum-preserving single swap.
std::uint64_t embellishment_of(const Grille& grille);

enum class GridClass { complete, missing_candidates, malformed };

struct GridClassification {
    GridClass kind = GridClass::complete;
    std::set<std::string> missing;  // populated for missing_candidates
};

// complete: every candidate appears exactly once. missing_candidates: some
// absent, none duplicated (read as not voting for the omitted names).
// malformed: a candidate row duplicated or the name list empty.
GridClassification grid_classify(const Grid& grid, const ElectionParams& params);

enum class MismatchReason {
    length,
    checksum,
    embellishment,
    unknown_code,
    cardinality,
    malformed_grid,
    encoding,
};
std::string_view to_string(MismatchReason reason);

struct MatchVerdict {
    bool matched = false;
    VoteIntent intent;                                   // decoded intent when matched
    MismatchReason reason = MismatchReason::length;      // meaningful when !matched

    friend bool operator==(const MatchVerdict&, const MatchVerdict&) = default;
};

// Joins the two halves. Checks, in order: length, checksum, embellishment
// (when enabled and the grid carries one), unknown codes (numerical), grid
// well-formedness, then decodes the intent from candidate rows (decoy rows
// ignored) and checks the mode's cardinality bound on the decoded intent.
// UsageError when grid.id != grille.id.
MatchVerdict match_pair(const Grid& grid, const Grille& grille, const ElectionParams& params);

// Voted-for candidate names only, in canonical candidate-list order: no id,
// no decoys, no permutation information. UsageError when the pair does not
// match.
std::vector<std::string> purge(const BallotPaper& paper, const ElectionParams& params);

}  // namespace bpv
