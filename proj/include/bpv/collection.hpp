#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bpv/errors.hpp"
#include "bpv/rng.hpp"

namespace bpv {

// One physical paper pushed through the slot: canonical ballot text or
// arbitrary scrawl. Who inserted it is simulator bookkeeping only, stripped
// from everything the committee can see. A name scrawled on the paper
// itself (a deanonymizing proxy printing the email header) travels with the
// payload and is committee-visible once the box is opened.
struct Sheet {
    std::string payload;
    std::string inserted_by;
    std::optional<std::string> deanonymized_as;
};

// What the committee reads after opening the box.
struct ClosedSheet {
    std::string payload;
    std::optional<std::string> deanonymized_as;
};

// Append-only while open; contents unreadable until closed. Nothing is ever
// taken out.
class BallotBox {
  public:
    enum class State { sealed_empty, open_for_insertion, closed };

    // Sealing ceremony: a fresh box, open for insertion. The optional cap
    // bounds how many sheets one participant may insert; by default there is
    // no access control at all.
    static BallotBox open_box(std::optional<std::size_t> per_participant_cap = std::nullopt);

    // Unconditional append: no identity or content filtering. Returns false
    // only when the per-participant cap rejects the insertion. StateError
    // unless open.
    bool insert(Sheet sheet);

    // The only way contents ever leave the box, and only once: opening it.
    // The seeded shuffle models the physical mixing of papers; inserter
    // names are stripped. StateError unless open.
    std::vector<ClosedSheet> close_box(Rng& rng);

    std::size_t sheet_count() const { return sheet_total_; }
    State state() const { return state_; }

  private:
    State state_ = State::sealed_empty;
    std::optional<std::size_t> cap_;
    std::vector<Sheet> sheets_;
    std::map<std::string, std::size_t> inserted_counts_;
    std::size_t sheet_total_ = 0;
};

// Audit dump of opened contents, one length-prefixed record per sheet, in
// post-mixing order.
std::string contents_dump(const std::vector<ClosedSheet>& sheets);

std::vector<std::string> payload_strings(const std::vector<ClosedSheet>& sheets);

}  // namespace bpv
