#include "bpv/registration.hpp"

#include "bpv/textio.hpp"

namespace bpv {

std::string to_text(const HandoverPackage& package) {
    std::string out = "handover\nvalid_ids\n";
    for (const auto& id : package.valid_ids) {
        out += to_string(id);
        out.push_back('\n');
    }
    out += "grids\n";
    bool first = true;
    for (const auto& [id, grid] : package.grids) {
        if (!first) out.push_back('\n');
        first = false;
        out += to_text(grid);
    }
    if (!package.grilles.empty()) {
        out += "grilles\n";
        first = true;
        for (const auto& [id, grille] : package.grilles) {
            if (!first) out.push_back('\n');
            first = false;
            out += to_text(grille);
        }
    }
    out += "end\n";
    return out;
}

Registry Registry::register_voters(const std::vector<std::string>& roll, Rng& rng,
                                   LogicalTime deadline, DefaultBallotPolicy policy) {
    Registry registry;
    registry.deadline_ = deadline;
    registry.policy_ = policy;
    for (const auto& voter : roll) {
        if (registry.assignment_.count(voter)) {
            throw RollError("duplicate roll name: '" + voter + "'");
        }
        BallotId id;
        do {
            id = BallotId{rng.next_u128()};
        } while (!registry.issued_.insert(id).second);
        registry.assignment_.emplace(voter, id);
    }
    return registry;
}

BallotId Registry::id_of(const std::string& voter) const {
    auto it = assignment_.find(voter);
    if (it == assignment_.end()) throw UsageError("not on the roll: '" + voter + "'");
    return it->second;
}

SubmissionAck Registry::submit_grid(BallotId id, Grid grid, LogicalTime at) {
    if (sealed_) throw SealedError("registry is sealed");
    if (issued(id) && at <= deadline_) {
        grid_inbox_[id].emplace_back(at, std::move(grid));
    } else {
        ++swallowed_;
    }
    return SubmissionAck{at};
}

SubmissionAck Registry::submit_grille(BallotId id, Grille grille, LogicalTime at) {
    if (sealed_) throw SealedError("registry is sealed");
    if (policy_ != DefaultBallotPolicy::default_grille) {
        throw VariantError("grille submissions require the default-grille flow");
    }
    if (issued(id) && at <= deadline_) {
        grille_inbox_[id].emplace_back(at, std::move(grille));
    } else {
        ++swallowed_;
    }
    return SubmissionAck{at};
}

Grid Registry::make_default_grid(BallotId id, const ElectionParams& params, Rng& rng) const {
    if (policy_ != DefaultBallotPolicy::default_grid) {
        throw VariantError("default grids are not part of this election");
    }
    if (!issued(id)) throw UsageError("default grid requested for an unissued id");
    ElectionParams layout = params;
    layout.mode = ElectoralMode::subset;  // fixed 2m layout regardless of tally mode
    auto paper = make_ballot(VoteIntent{}, layout, rng, id);
    Grid grid = std::move(paper.grid);
    grid.checksum = 0;
    grid.embellishment.reset();
    return grid;
}

Grille Registry::make_default_grille(BallotId id, const ElectionParams& params, Rng& rng) {
    if (policy_ != DefaultBallotPolicy::default_grille) {
        throw VariantError("default grilles are not part of this election");
    }
    if (!issued(id)) throw UsageError("default grille requested for an unissued id");
    const std::size_t m = params.candidates.size();
    Grille grille;
    grille.id = id;
    grille.bits.assign(2 * m, 0);
    for (std::size_t i = 0; i < m; ++i) grille.bits[i] = 1;
    rng.shuffle(grille.bits);
    // The authority keeps what it issued until the voter substitutes.
    grille_inbox_[id].emplace_back(LogicalTime{0}, grille);
    return grille;
}

const HandoverPackage& Registry::seal_and_handover(bool poll_closed) {
    if (handover_) return *handover_;
    if (!poll_closed) {
        throw TimingError("handover before poll close would reveal the valid ids early");
    }
    sealed_ = true;
    HandoverPackage package;
    package.valid_ids = issued_;
    for (const auto& [id, submissions] : grid_inbox_) {
        // Latest pre-deadline wins; ties on time resolve to the last received.
        const auto* best = &submissions.front();
        for (const auto& entry : submissions) {
            if (entry.first >= best->first) best = &entry;
        }
        package.grids.emplace(id, best->second);
    }
    for (const auto& [id, submissions] : grille_inbox_) {
        const auto* best = &submissions.front();
        for (const auto& entry : submissions) {
            if (entry.first >= best->first) best = &entry;
        }
        package.grilles.emplace(id, best->second);
    }
    handover_ = std::move(package);
    return *handover_;
}

}  // namespace bpv
