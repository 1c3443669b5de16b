#include "bpv/collection.hpp"

namespace bpv {

BallotBox BallotBox::open_box(std::optional<std::size_t> per_participant_cap) {
    BallotBox box;
    box.state_ = State::open_for_insertion;
    box.cap_ = per_participant_cap;
    return box;
}

bool BallotBox::insert(Sheet sheet) {
    if (state_ != State::open_for_insertion) {
        throw StateError("ballot box is not open for insertion");
    }
    if (cap_) {
        auto& count = inserted_counts_[sheet.inserted_by];
        if (count >= *cap_) return false;
        ++count;
    }
    sheets_.push_back(std::move(sheet));
    ++sheet_total_;
    return true;
}

std::vector<ClosedSheet> BallotBox::close_box(Rng& rng) {
    if (state_ != State::open_for_insertion) {
        throw StateError("ballot box is not open");
    }
    state_ = State::closed;
    rng.shuffle(sheets_);
    std::vector<ClosedSheet> closed;
    closed.reserve(sheets_.size());
    for (auto& sheet : sheets_) {
        closed.push_back(ClosedSheet{std::move(sheet.payload), std::move(sheet.deanonymized_as)});
    }
    sheets_.clear();
    sheets_.shrink_to_fit();
    return closed;
}

std::string contents_dump(const std::vector<ClosedSheet>& sheets) {
    std::size_t total = 16;
    for (const auto& sheet : sheets) total += sheet.payload.size() + 48;
    std::string out;
    out.reserve(total);
    out += "box\n";
    for (const auto& sheet : sheets) {
        out += "sheet bytes=";
        out += std::to_string(sheet.payload.size());
        if (sheet.deanonymized_as) {
            out += " scrawled-name=";
            out += *sheet.deanonymized_as;
        }
        out.push_back('\n');
        out += sheet.payload;
        out.push_back('\n');
    }
    out += "end\n";
    return out;
}

std::vector<std::string> payload_strings(const std::vector<ClosedSheet>& sheets) {
    std::vector<std::string> payloads;
    payloads.reserve(sheets.size());
    for (const auto& sheet : sheets) payloads.push_back(sheet.payload);
    return payloads;
}

}  // namespace bpv
