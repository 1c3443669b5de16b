#include "bpv/tally.hpp"

#include <algorithm>
#include <unordered_set>

#include "bpv/textio.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bpv {

std::string_view to_string(IdStatus status) {
    switch (status) {
        case IdStatus::counted: return "counted";
        case IdStatus::invalid_duplicate_grille: return "invalid-duplicate-grille";
        case IdStatus::invalid_missing_grid: return "invalid-missing-grid";
        case IdStatus::invalid_missing_grille: return "invalid-missing-grille";
        case IdStatus::invalid_checksum: return "invalid-checksum";
        case IdStatus::invalid_mismatch: return "invalid-mismatch";
        case IdStatus::invalid_embellishment: return "invalid-embellishment";
        case IdStatus::unused: return "unused";
    }
    return "unknown";
}

bool is_invalidated(IdStatus status) {
    return status != IdStatus::counted && status != IdStatus::unused;
}

std::string report_to_text(const ElectionReport& report) {
    std::string out = "report\ncounts\n";
    for (const auto& [name, votes] : report.counts) {
        out += name;
        out.push_back('\t');
        out += std::to_string(votes);
        out.push_back('\n');
    }
    out += "total_valid=" + std::to_string(report.total_valid_ballots) + "\n";
    out += "ledger\n";
    for (const auto& [id, status] : report.ledger) {
        out += to_string(id);
        out.push_back('\t');
        out += to_string(status);
        out.push_back('\n');
    }
    out += "discarded=" + std::to_string(report.discarded_sheets) + "\n";
    if (report.purged_ballots) {
        out += "purged\n";
        for (const auto& ballot : *report.purged_ballots) {
            for (std::size_t i = 0; i < ballot.size(); ++i) {
                if (i) out.push_back(',');
                out += ballot[i];
            }
            out.push_back('\n');
        }
    }
    out += "end\n";
    return out;
}

std::vector<std::string> report_to_records(const ElectionReport& report) {
    std::vector<std::string> records;
    records.reserve(report.counts.size() + report.ledger.size() + 2);
    for (const auto& [name, votes] : report.counts) {
        records.push_back("{\"record\":\"count\",\"candidate\":\"" + json_escape(name) +
                          "\",\"votes\":" + std::to_string(votes) + "}");
    }
    for (const auto& [id, status] : report.ledger) {
        records.push_back("{\"record\":\"ledger\",\"id\":\"" + to_string(id) + "\",\"status\":\"" +
                          std::string(to_string(status)) + "\"}");
    }
    records.push_back("{\"record\":\"summary\",\"total_valid\":" +
                      std::to_string(report.total_valid_ballots) +
                      ",\"discarded\":" + std::to_string(report.discarded_sheets) + "}");
    if (report.purged_ballots) {
        for (const auto& ballot : *report.purged_ballots) {
            std::string names;
            for (std::size_t i = 0; i < ballot.size(); ++i) {
                if (i) names += ",";
                names += "\"" + json_escape(ballot[i]) + "\"";
            }
            records.push_back("{\"record\":\"purged\",\"names\":[" + names + "]}");
        }
    }
    return records;
}

bool TallyOutcome::prove_vote(BallotId id, const VoteIntent& claimed) const {
    if (published_) {
        throw TimingError("vote proving is only possible before all ids are made public");
    }
    auto it = decoded_.find(id);
    return it != decoded_.end() && it->second == claimed;
}

const ElectionReport& TallyOutcome::publish() {
    published_ = true;
    return report_;
}

namespace {

// One surviving sheet from the scan: a readable ballot half whose id is on
// the valid list and whose kind matches the active route.
struct Survivor {
    std::size_t index = 0;
    std::optional<Grid> grid;
    std::optional<Grille> grille;
};

struct ScanResult {
    std::uint64_t discarded = 0;
    std::vector<Survivor> survivors;  // ascending by original payload index
};

struct RouteFilter {
    bool accept_grilles;
    bool accept_grids;
};

RouteFilter route_filter(const TallyOptions& options) {
    if (options.swapped_routes) return {false, true};
    return {true, options.box_grids};
}

// Classifies one payload; returns a survivor or bumps the discard count.
void scan_one(const std::string& payload, std::size_t index,
              const std::unordered_set<BallotId, BallotIdHash>& valid_ids,
              const RouteFilter& filter, ScanResult& out) {
    ParsedSheet sheet = parse_sheet(payload);
    switch (sheet.kind) {
        case SheetKind::unreadable:
            ++out.discarded;
            return;
        case SheetKind::grille:
            if (!filter.accept_grilles || !valid_ids.count(sheet.grille->id)) {
                ++out.discarded;
                return;
            }
            out.survivors.push_back(Survivor{index, std::nullopt, std::move(sheet.grille)});
            return;
        case SheetKind::grid:
            if (!filter.accept_grids || !valid_ids.count(sheet.grid->id)) {
                ++out.discarded;
                return;
            }
            out.survivors.push_back(Survivor{index, std::move(sheet.grid), std::nullopt});
            return;
    }
}

ScanResult scan_sheets_serial(const std::vector<std::string>& payloads,
                              const std::unordered_set<BallotId, BallotIdHash>& valid_ids,
                              const RouteFilter& filter) {
    ScanResult result;
    for (std::size_t i = 0; i < payloads.size(); ++i) {
        scan_one(payloads[i], i, valid_ids, filter, result);
    }
    return result;
}

// Data-parallel scan. Per-thread partial results are merged by original
// payload index, so the outcome is byte-identical to the serial reference
// regardless of thread count.
ScanResult scan_sheets_parallel(const std::vector<std::string>& payloads,
                                const std::unordered_set<BallotId, BallotIdHash>& valid_ids,
                                const RouteFilter& filter) {
#ifdef _OPENMP
    int threads = omp_get_max_threads();
#else
    int threads = 1;
#endif
    std::vector<ScanResult> partials(static_cast<std::size_t>(threads));

#pragma omp parallel num_threads(threads)
    {
#ifdef _OPENMP
        int tid = omp_get_thread_num();
#else
        int tid = 0;
#endif
        ScanResult& local = partials[static_cast<std::size_t>(tid)];
#pragma omp for schedule(static)
        for (long i = 0; i < static_cast<long>(payloads.size()); ++i) {
            auto index = static_cast<std::size_t>(i);
            scan_one(payloads[index], index, valid_ids, filter, local);
        }
    }

    ScanResult merged;
    for (auto& partial : partials) {
        merged.discarded += partial.discarded;
        merged.survivors.insert(merged.survivors.end(),
                                std::make_move_iterator(partial.survivors.begin()),
                                std::make_move_iterator(partial.survivors.end()));
    }
    std::sort(merged.survivors.begin(), merged.survivors.end(),
              [](const Survivor& a, const Survivor& b) { return a.index < b.index; });
    return merged;
}

struct PerId {
    std::vector<Grille> grilles;
    std::vector<Grid> box_grids;
};

TallyOutcome assemble(ScanResult&& scan, const HandoverPackage& handover,
                      const ElectionParams& params, const TallyOptions& options) {
    std::map<BallotId, PerId> table;
    for (auto& survivor : scan.survivors) {
        auto& slot = survivor.grid ? table[survivor.grid->id] : table[survivor.grille->id];
        if (survivor.grid) {
            slot.box_grids.push_back(std::move(*survivor.grid));
        } else {
            slot.grilles.push_back(std::move(*survivor.grille));
        }
    }

    ElectionReport report;
    report.discarded_sheets = scan.discarded;
    std::map<BallotId, VoteIntent> decoded;
    std::vector<std::uint64_t> votes(params.candidates.size(), 0);
    std::vector<std::vector<std::string>> purged;

    auto count_matched = [&](BallotId id, const Grid& grid, const Grille& grille) -> IdStatus {
        auto verdict = match_pair(grid, grille, params);
        if (!verdict.matched) {
            switch (verdict.reason) {
                case MismatchReason::checksum: return IdStatus::invalid_checksum;
                case MismatchReason::embellishment: return IdStatus::invalid_embellishment;
                default: return IdStatus::invalid_mismatch;
            }
        }
        for (const auto& name : verdict.intent.voted_for) {
            votes[*params.candidate_index(name)] += 1;
        }
        if (options.publish_purged) {
            purged.push_back(purge(BallotPaper{grid, grille}, params));
        }
        decoded.emplace(id, std::move(verdict.intent));
        return IdStatus::counted;
    };

    for (const auto& id : handover.valid_ids) {
        PerId empty;
        const PerId* slot = &empty;
        if (auto it = table.find(id); it != table.end()) slot = &it->second;
        IdStatus status;

        if (options.swapped_routes) {
            const Grille* ra_grille = nullptr;
            if (auto it = handover.grilles.find(id); it != handover.grilles.end()) {
                ra_grille = &it->second;
            }
            if (slot->box_grids.size() >= 2) {
                status = IdStatus::invalid_duplicate_grille;
            } else if (slot->box_grids.empty()) {
                status = ra_grille ? IdStatus::invalid_missing_grid : IdStatus::unused;
            } else if (!ra_grille) {
                status = IdStatus::invalid_missing_grille;
            } else {
                status = count_matched(id, slot->box_grids.front(), *ra_grille);
            }
        } else {
            const Grid* ra_grid = nullptr;
            if (auto it = handover.grids.find(id); it != handover.grids.end()) {
                ra_grid = &it->second;
            }
            // Identical box copies of one grid collapse; distinct ones conflict.
            std::vector<const Grid*> distinct;
            std::vector<std::string> seen;
            for (const auto& grid : slot->box_grids) {
                auto text = to_text(grid);
                if (std::find(seen.begin(), seen.end(), text) == seen.end()) {
                    seen.push_back(std::move(text));
                    distinct.push_back(&grid);
                }
            }
            if (ra_grid) {
                auto text = to_text(*ra_grid);
                if (std::find(seen.begin(), seen.end(), text) == seen.end()) {
                    distinct.push_back(ra_grid);
                }
            }

            if (slot->grilles.size() >= 2) {
                // Unconditional, even for byte-identical duplicates.
                status = IdStatus::invalid_duplicate_grille;
            } else if (slot->grilles.empty()) {
                status = distinct.empty() ? IdStatus::unused : IdStatus::invalid_missing_grille;
            } else if (distinct.empty()) {
                status = IdStatus::invalid_missing_grid;
            } else if (distinct.size() > 1) {
                status = IdStatus::invalid_mismatch;
            } else {
                status = count_matched(id, *distinct.front(), slot->grilles.front());
            }
        }

        report.ledger.emplace_back(id, status);
        if (status == IdStatus::counted) ++report.total_valid_ballots;
    }

    for (std::size_t i = 0; i < params.candidates.size(); ++i) {
        report.counts.emplace_back(params.candidates[i], votes[i]);
    }
    if (options.publish_purged) {
        // Canonical sorted order, not submission order.
        std::sort(purged.begin(), purged.end());
        report.purged_ballots = std::move(purged);
    }
    return TallyOutcome(std::move(report), std::move(decoded));
}

std::unordered_set<BallotId, BallotIdHash> valid_id_set(const HandoverPackage& handover) {
    std::unordered_set<BallotId, BallotIdHash> ids;
    ids.reserve(handover.valid_ids.size() * 2);
    for (const auto& id : handover.valid_ids) ids.insert(id);
    return ids;
}

}  // namespace

TallyOutcome tally(const std::vector<std::string>& payloads, const HandoverPackage& handover,
                   const ElectionParams& params, const TallyOptions& options) {
    params.validate();
    auto valid_ids = valid_id_set(handover);
    auto scan = scan_sheets_parallel(payloads, valid_ids, route_filter(options));
    return assemble(std::move(scan), handover, params, options);
}

TallyOutcome tally_serial(const std::vector<std::string>& payloads,
                          const HandoverPackage& handover, const ElectionParams& params,
                          const TallyOptions& options) {
    params.validate();
    auto valid_ids = valid_id_set(handover);
    auto scan = scan_sheets_serial(payloads, valid_ids, route_filter(options));
    return assemble(std::move(scan), handover, params, options);
}

}  // namespace bpv
