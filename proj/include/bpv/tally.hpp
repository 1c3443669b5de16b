#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bpv/ballot.hpp"
#include "bpv/registration.hpp"

namespace bpv {

enum class IdStatus {
    counted,
    invalid_duplicate_grille,
    invalid_missing_grid,
    invalid_missing_grille,
    invalid_checksum,
    invalid_mismatch,
    invalid_embellishment,
    unused,
};
std::string_view to_string(IdStatus status);
bool is_invalidated(IdStatus status);

struct ElectionReport {
    std::vector<std::pair<std::string, std::uint64_t>> counts;  // canonical candidate order
    std::uint64_t total_valid_ballots = 0;
    std::vector<std::pair<BallotId, IdStatus>> ledger;          // ascending by id
    std::uint64_t discarded_sheets = 0;
    std::optional<std::vector<std::vector<std::string>>> purged_ballots;
};

// Structured text document with fixed field order and sorting, byte-exact.
std::string report_to_text(const ElectionReport& report);

// The same content as line-delimited JSON records, one per line.
std::vector<std::string> report_to_records(const ElectionReport& report);

struct TallyOptions {
    // Grid halves may arrive through the box (two-proxy flow); a lone box
    // grid is used as-is, identical copies collapse, conflicting distinct
    // grids invalidate the id.
    bool box_grids = false;
    // Default-grille flow: the box carries grids and the authority carries
    // the grilles; the duplicate rule applies to the box-borne half.
    bool swapped_routes = false;
    bool publish_purged = false;
};

class TallyOutcome {
  public:
    TallyOutcome(ElectionReport report, std::map<BallotId, VoteIntent> decoded)
        : report_(std::move(report)), decoded_(std::move(decoded)) {}

    const ElectionReport& report() const { return report_; }

    // True iff the id was counted with exactly the claimed intent. Available
    // only before the ledger is made public; TimingError afterwards.
    bool prove_vote(BallotId id, const VoteIntent& claimed) const;

    const ElectionReport& publish();
    bool published() const { return published_; }

  private:
    ElectionReport report_;
    std::map<BallotId, VoteIntent> decoded_;
    bool published_ = false;
};

// The committee's full pipeline: parse sheets, drop noise, apply every
// invalidation rule, pair the halves, count for-votes, assemble the ledger.
// The sheet scan runs under OpenMP; tally_serial is the serial reference
// with identical output, kept for testing and benchmarking.
TallyOutcome tally(const std::vector<std::string>& payloads, const HandoverPackage& handover,
                   const ElectionParams& params, const TallyOptions& options = {});
TallyOutcome tally_serial(const std::vector<std::string>& payloads,
                          const HandoverPackage& handover, const ElectionParams& params,
                          const TallyOptions& options = {});

}  // namespace bpv
