#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bpv/ballot.hpp"
#include "bpv/rng.hpp"

namespace bpv {

using LogicalTime = std::int64_t;

enum class DefaultBallotPolicy { none, default_grid, default_grille };

// What the registering authority hands the committee at poll close: every
// issued id plus, per id, the latest pre-deadline submission. Carries no
// voter names. The grille map is populated only under the swapped-route
// default-grille flow, where the authority holds the marks half instead.
struct HandoverPackage {
    std::set<BallotId> valid_ids;
    std::map<BallotId, Grid> grids;
    std::map<BallotId, Grille> grilles;
};

// Canonical text form: a valid_ids block (ascending, hiding issuance order)
// followed by the per-id ballot-half blocks, ascending, blank-line separated.
std::string to_text(const HandoverPackage& package);

// Identical shape whether or not the submission was accepted, so a forger
// learns nothing about id validity from the acknowledgment.
struct SubmissionAck {
    LogicalTime received_at = 0;
};

// The registering authority: assigns hidden ids to the roll, collects the
// authority-route ballot halves before the deadline, seals at poll close.
// The voter-to-id assignment never leaves this object through any
// committee-facing operation.
class Registry {
  public:
    // Fresh uniformly random 128-bit id per roll member; collisions redrawn.
    // RollError on duplicate roll names.
    static Registry register_voters(const std::vector<std::string>& roll, Rng& rng,
                                    LogicalTime deadline,
                                    DefaultBallotPolicy policy = DefaultBallotPolicy::none);

    // Private id delivery to one voter. UsageError for names not on the roll.
    BallotId id_of(const std::string& voter) const;

    // Accepts anything: unknown ids and post-deadline submissions are
    // swallowed silently and never reach the handover. Resubmission is
    // allowed; the latest pre-deadline grid wins. SealedError once sealed.
    SubmissionAck submit_grid(BallotId id, Grid grid, LogicalTime at);

    // Swapped-route counterpart; VariantError unless the default-grille
    // policy is active.
    SubmissionAck submit_grille(BallotId id, Grille grille, LogicalTime at);

    // Delivered to the voter with her id: all candidate names plus decoys in
    // a private random order, checksum not yet filled in (the voter marks
    // her grille first, then confirms or replaces the grid). VariantError
    // unless the default-grid policy is active.
    Grid make_default_grid(BallotId id, const ElectionParams& params, Rng& rng) const;

    // Swapped-route variant: a 0/1 vector of twice the candidate count with
    // exactly one 1 per candidate, private random order. The authority keeps
    // the issued default as that id's grille unless the voter substitutes
    // her own. VariantError unless the default-grille policy is active.
    Grille make_default_grille(BallotId id, const ElectionParams& params, Rng& rng);

    // Seals the registry and builds the handover; idempotent once sealed.
    // TimingError while the poll is still open: the committee must not
    // learn the valid ids early.
    const HandoverPackage& seal_and_handover(bool poll_closed);

    LogicalTime deadline() const { return deadline_; }
    bool sealed() const { return sealed_; }
    std::size_t voter_count() const { return assignment_.size(); }
    DefaultBallotPolicy policy() const { return policy_; }

    // Count of unknown-id or post-deadline submissions silently absorbed.
    std::uint64_t swallowed_submissions() const { return swallowed_; }

  private:
    Registry() = default;

    bool issued(BallotId id) const { return issued_.count(id) != 0; }

    std::map<std::string, BallotId> assignment_;
    std::set<BallotId> issued_;
    std::map<BallotId, std::vector<std::pair<LogicalTime, Grid>>> grid_inbox_;
    std::map<BallotId, std::vector<std::pair<LogicalTime, Grille>>> grille_inbox_;
    LogicalTime deadline_ = 0;
    DefaultBallotPolicy policy_ = DefaultBallotPolicy::none;
    bool sealed_ = false;
    std::uint64_t swallowed_ = 0;
    std::optional<HandoverPackage> handover_;
};

}  // namespace bpv
