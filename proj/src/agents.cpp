#include "bpv/agents.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "bpv/textio.hpp"

namespace bpv {

std::string_view to_string(Attendance attendance) {
    switch (attendance) {
        case Attendance::in_person: return "in-person";
        case Attendance::by_proxy: return "by-proxy";
        case Attendance::two_proxy: return "two-proxy";
        case Attendance::abstain: return "abstain";
    }
    return "unknown";
}

std::string_view to_string(Conduct conduct) {
    switch (conduct) {
        case Conduct::faithful: return "faithful";
        case Conduct::no_show: return "no-show";
        case Conduct::deanonymize: return "deanonymize";
        case Conduct::leak_id: return "leak-id";
        case Conduct::swap_grille_preserving_checksum: return "swap-grille-preserving-checksum";
        case Conduct::random_alteration: return "random-alteration";
        case Conduct::delegate_to: return "delegate-to";
    }
    return "unknown";
}

std::string_view to_string(VoterOutcome outcome) {
    switch (outcome) {
        case VoterOutcome::counted_as_intended: return "counted-as-intended";
        case VoterOutcome::counted_altered: return "counted-altered";
        case VoterOutcome::invalidated: return "invalidated";
        case VoterOutcome::absent: return "absent";
    }
    return "unknown";
}

std::string to_string(const RoleRef& role) {
    switch (role.kind) {
        case RoleRef::Kind::ra: return "ra";
        case RoleRef::Kind::ec: return "ec";
        case RoleRef::Kind::public_: return "public";
        case RoleRef::Kind::proxy: return "proxy:" + role.proxy_name;
    }
    return "unknown";
}

std::optional<RoleRef> role_from_string(std::string_view text) {
    if (text == "ra") return RoleRef::ra();
    if (text == "ec") return RoleRef::ec();
    if (text == "public") return RoleRef::pub();
    if (text.rfind("proxy:", 0) == 0 && text.size() > 6) {
        return RoleRef::proxy(std::string(text.substr(6)));
    }
    return std::nullopt;
}

std::string event_to_record(const Event& event) {
    std::string out = "{\"t\":" + std::to_string(event.t);
    out += ",\"actor\":\"" + json_escape(event.actor) + "\"";
    out += ",\"action\":\"" + json_escape(event.action) + "\"";
    out += ",\"data\":{";
    for (std::size_t i = 0; i < event.data.size(); ++i) {
        if (i) out.push_back(',');
        out += "\"" + json_escape(event.data[i].first) + "\":\"" +
               json_escape(event.data[i].second) + "\"";
    }
    out += "},\"visible_to\":[";
    for (std::size_t i = 0; i < event.visible_to.size(); ++i) {
        if (i) out.push_back(',');
        out += "\"" + json_escape(to_string(event.visible_to[i])) + "\"";
    }
    out += "]}";
    return out;
}

namespace {

const ProxyBehavior* find_proxy(const ScenarioConfig& config, const std::string& name) {
    auto it = config.proxies.find(name);
    return it == config.proxies.end() ? nullptr : &it->second;
}

void check_participant_name(const std::string& name, const char* what) {
    if (name.empty() || name == "ra" || name == "ec" || name == "stuffer") {
        throw ConfigError(std::string(what) + " name '" + name + "' is empty or reserved");
    }
}

}  // namespace

void ScenarioConfig::validate() const {
    params.validate();
    GrilleEncoding expected = variants.numerical ? GrilleEncoding::numerical : GrilleEncoding::bits;
    if (params.encoding != expected) {
        throw ConfigError("numerical variant flag disagrees with the election encoding");
    }
    if (params.embellishment_enabled != variants.embellishment) {
        throw ConfigError("embellishment variant flag disagrees with the election parameters");
    }
    if (variants.default_grid && variants.default_grille) {
        throw ConfigError("default-grid and default-grille cannot be combined");
    }
    if (variants.default_grille && variants.two_proxy) {
        throw ConfigError("default-grille and two-proxy cannot be combined");
    }
    if (variants.default_grille && variants.numerical) {
        throw ConfigError("default-grille and numerical encoding cannot be combined");
    }
    if ((variants.default_grid || variants.default_grille) &&
        params.mode != ElectoralMode::subset) {
        throw ConfigError("default ballot papers require subset mode");
    }

    std::set<std::string> roll_names;
    for (const auto& name : roll) {
        check_participant_name(name, "voter");
        if (!roll_names.insert(name).second) throw ConfigError("duplicate roll name '" + name + "'");
    }
    std::set<std::string> pool_names;
    for (const auto& name : proxy_pool) {
        check_participant_name(name, "proxy");
        if (!pool_names.insert(name).second) {
            throw ConfigError("duplicate proxy-pool name '" + name + "'");
        }
    }
    for (const auto& [name, behavior] : voters) {
        if (!roll_names.count(name)) throw ConfigError("behavior for non-roll voter '" + name + "'");
        if (behavior.name != name) throw ConfigError("voter behavior name mismatch for '" + name + "'");
    }
    for (const auto& name : roll) {
        if (!voters.count(name)) throw ConfigError("no behavior for roll member '" + name + "'");
    }
    for (const auto& [name, behavior] : proxies) {
        if (!pool_names.count(name)) throw ConfigError("behavior for unknown proxy '" + name + "'");
        if (behavior.name != name) throw ConfigError("proxy behavior name mismatch for '" + name + "'");
        if (behavior.conduct == Conduct::delegate_to) {
            if (!variants.transitive_proxy) {
                throw ConfigError("delegate-to conduct requires the transitive-proxy variant");
            }
            if (!pool_names.count(behavior.delegate)) {
                throw ConfigError("proxy '" + name + "' delegates to unknown proxy '" +
                                  behavior.delegate + "'");
            }
        }
    }

    for (const auto& [name, behavior] : voters) {
        if (!behavior.intent) continue;
        try {
            check_intent(*behavior.intent, params);
        } catch (const IntentError& error) {
            throw ConfigError("voter '" + name + "': " + error.what());
        }
        switch (behavior.attendance) {
            case Attendance::by_proxy:
                if (!pool_names.count(behavior.proxy)) {
                    throw ConfigError("voter '" + name + "' uses unknown proxy '" +
                                      behavior.proxy + "'");
                }
                break;
            case Attendance::two_proxy: {
                if (!variants.two_proxy) {
                    throw ConfigError("two-proxy attendance requires the two-proxy variant");
                }
                const auto& [first, second] = behavior.two_proxies;
                if (first == second) {
                    throw ConfigError("voter '" + name + "' must use two different proxies");
                }
                if (!pool_names.count(first) || !pool_names.count(second)) {
                    throw ConfigError("voter '" + name + "' uses an unknown proxy pair");
                }
                break;
            }
            default:
                break;
        }
        if (behavior.id_swap_partner) {
            if (!variants.id_swap) {
                throw ConfigError("id-swap partners require the id-swap variant");
            }
            const auto& partner = *behavior.id_swap_partner;
            if (partner == name) throw ConfigError("voter '" + name + "' cannot swap with herself");
            auto it = voters.find(partner);
            if (it == voters.end()) {
                throw ConfigError("voter '" + name + "' swaps with unknown voter '" + partner + "'");
            }
            if (!it->second.id_swap_partner || *it->second.id_swap_partner != name) {
                throw ConfigError("id swap between '" + name + "' and '" + partner +
                                  "' is not symmetric");
            }
        }
    }
}

ConductResult apply_conduct(Conduct conduct, const Grille& grille, Rng& rng) {
    ConductResult result;
    switch (conduct) {
        case Conduct::no_show:
            return result;
        case Conduct::faithful:
        case Conduct::delegate_to:
            result.delivered = grille;
            return result;
        case Conduct::deanonymize:
            result.delivered = grille;
            result.deanonymized = true;
            return result;
        case Conduct::leak_id:
            result.delivered = grille;
            result.leaked = grille.id;
            return result;
        case Conduct::swap_grille_preserving_checksum: {
            Grille swapped = grille;
            if (grille.encoding == GrilleEncoding::numerical) {
                // Without the grid the proxy knows no valid code numbers; all
                // he can preserve is the count.
                std::unordered_set<std::uint32_t> used;
                swapped.codes.clear();
                while (swapped.codes.size() < grille.codes.size()) {
                    auto code = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << 32));
                    if (used.insert(code).second) swapped.codes.push_back(code);
                }
                result.delivered = std::move(swapped);
                return result;
            }
            auto ones = checksum_of(grille);
            if (ones == 0 || ones == grille.bits.size()) {
                result.delivered = grille;  // no other vector has this mark count
                return result;
            }
            do {
                std::fill(swapped.bits.begin(), swapped.bits.end(), std::uint8_t{0});
                // Uniform k-subset of positions via partial shuffle.
                std::vector<std::size_t> positions = rng.permutation(grille.bits.size());
                for (std::uint64_t i = 0; i < ones; ++i) swapped.bits[positions[i]] = 1;
            } while (swapped.bits == grille.bits);
            result.delivered = std::move(swapped);
            return result;
        }
        case Conduct::random_alteration: {
            Grille altered = grille;
            if (grille.encoding == GrilleEncoding::numerical) {
                if (!altered.codes.empty()) {
                    auto slot = rng.below(altered.codes.size());
                    std::uint32_t fresh;
                    do {
                        fresh = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << 32));
                    } while (std::find(altered.codes.begin(), altered.codes.end(), fresh) !=
                             altered.codes.end());
                    altered.codes[slot] = fresh;
                }
                result.delivered = std::move(altered);
                return result;
            }
            std::vector<std::size_t> ones;
            std::vector<std::size_t> zeros;
            for (std::size_t i = 0; i < grille.bits.size(); ++i) {
                (grille.bits[i] ? ones : zeros).push_back(i);
            }
            if (!ones.empty() && !zeros.empty()) {
                auto from = ones[rng.below(ones.size())];
                auto to = zeros[rng.below(zeros.size())];
                altered.bits[from] = 0;
                altered.bits[to] = 1;
            }
            result.delivered = std::move(altered);
            return result;
        }
    }
    return result;
}

namespace {

class TraceBuilder {
  public:
    LogicalTime now() const { return next_; }
    void advance_to(LogicalTime t) { next_ = std::max(next_, t); }

    void add(std::string actor, std::string action,
             std::vector<std::pair<std::string, std::string>> data, std::vector<RoleRef> visible) {
        events_.push_back(Event{next_++, std::move(actor), std::move(action), std::move(data),
                                std::move(visible)});
    }

    std::vector<Event> take() { return std::move(events_); }

  private:
    LogicalTime next_ = 1;
    std::vector<Event> events_;
};

std::vector<std::string> make_decoys(std::size_t count, const ElectionParams& params, Rng& rng) {
    constexpr std::string_view alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::set<std::string> taken(params.candidates.begin(), params.candidates.end());
    std::vector<std::string> decoys;
    while (decoys.size() < count) {
        std::string name;
        for (int i = 0; i < 8; ++i) name.push_back(alphabet[rng.below(alphabet.size())]);
        if (taken.insert(name).second) decoys.push_back(std::move(name));
    }
    return decoys;
}

// Voter marks a default grid delivered by the authority: candidate rows per
// her intent, decoy rows by coin flip, then the checksum is filled in.
BallotPaper mark_default_grid(Grid grid, const VoteIntent& intent, const ElectionParams& params,
                              Rng& rng) {
    Grille grille;
    grille.id = grid.id;
    std::vector<std::uint8_t> bits(grid.names.size(), 0);
    for (std::size_t i = 0; i < grid.names.size(); ++i) {
        if (params.candidate_index(grid.names[i])) {
            bits[i] = intent.voted_for.count(grid.names[i]) ? 1 : 0;
        } else {
            bits[i] = rng.coin() ? 1 : 0;
        }
    }
    if (params.encoding == GrilleEncoding::numerical) {
        grille.encoding = GrilleEncoding::numerical;
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i]) grille.codes.push_back((*grid.code_numbers)[i]);
        }
    } else {
        grille.bits = std::move(bits);
    }
    grid.checksum = checksum_of(grille);
    if (params.embellishment_enabled) grid.embellishment = embellishment_of(grille);
    return BallotPaper{std::move(grid), std::move(grille)};
}

// Voter expresses her intent by assigning names to a fixed grille: voted
// candidates land on marked rows, the others on empty rows, decoys fill the
// rest.
BallotPaper build_grid_for_grille(const Grille& grille, const VoteIntent& intent,
                                  const ElectionParams& params, Rng& rng) {
    std::vector<std::size_t> ones;
    std::vector<std::size_t> zeros;
    for (std::size_t i = 0; i < grille.bits.size(); ++i) {
        (grille.bits[i] ? ones : zeros).push_back(i);
    }
    rng.shuffle(ones);
    rng.shuffle(zeros);

    std::vector<std::string> names(grille.bits.size());
    std::size_t one_cursor = 0;
    std::size_t zero_cursor = 0;
    for (const auto& candidate : params.candidates) {
        if (intent.voted_for.count(candidate)) {
            names[ones[one_cursor++]] = candidate;
        } else {
            names[zeros[zero_cursor++]] = candidate;
        }
    }
    auto decoys = make_decoys(grille.bits.size() - params.candidates.size(), params, rng);
    std::size_t decoy_cursor = 0;
    for (auto& slot : names) {
        if (slot.empty()) slot = std::move(decoys[decoy_cursor++]);
    }

    Grid grid;
    grid.id = grille.id;
    grid.names = std::move(names);
    grid.checksum = checksum_of(grille);
    if (params.embellishment_enabled) grid.embellishment = embellishment_of(grille);
    return BallotPaper{std::move(grid), grille};
}

struct VoterRuntime {
    const VoterBehavior* behavior = nullptr;
    BallotId used_id;
    std::optional<BallotPaper> paper;
    bool substituted_grille = false;  // default-grille flow bookkeeping
};

struct Engine {
    const ScenarioConfig& config;
    TraceBuilder trace;
    std::vector<BallotId> leaked_ids;

    explicit Engine(const ScenarioConfig& config_in) : config(config_in) {}

    const ProxyBehavior* resolve_delegation(const std::string& proxy_name, BallotId id,
                                            ProxyBehavior& storage) {
        const ProxyBehavior* current = find_proxy(config, proxy_name);
        if (!current) {
            storage = ProxyBehavior{proxy_name, Conduct::faithful, {}};
            return &storage;
        }
        std::set<std::string> visited{proxy_name};
        int hops = 0;
        while (current->conduct == Conduct::delegate_to) {
            const std::string& next = current->delegate;
            trace.add(current->name, "delegate",
                      {{"to", next}, {"id", to_string(id)}},
                      {RoleRef::proxy(current->name), RoleRef::proxy(next)});
            // A delegation cycle or an over-long chain strands the ballot.
            if (!visited.insert(next).second || ++hops > 8) return nullptr;
            const ProxyBehavior* resolved = find_proxy(config, next);
            if (!resolved) {
                storage = ProxyBehavior{next, Conduct::faithful, {}};
                return &storage;
            }
            current = resolved;
        }
        return current;
    }

    void insert_sheet(BallotBox& box, const std::string& inserter, std::string payload,
                      std::optional<std::string> scrawl) {
        bool accepted = box.insert(Sheet{payload, inserter, scrawl});
        trace.add(inserter, accepted ? "insert-sheet" : "insert-rejected", {},
                  {RoleRef::ec(), RoleRef::pub()});
        if (accepted) {
            std::vector<std::pair<std::string, std::string>> data{{"payload", std::move(payload)}};
            if (scrawl) data.emplace_back("scrawled-name", *scrawl);
            trace.add(inserter, "sheet-content", std::move(data), {});
        }
    }

    // Delivers one grille through a proxy, applying his conduct.
    void deliver_by_proxy(BallotBox& box, const std::string& proxy_name,
                          const std::string& principal, const Grille& grille) {
        trace.add(principal, "handoff-grille",
                  {{"to", proxy_name},
                   {"id", to_string(grille.id)},
                   {"grille", to_text(grille)}},
                  {RoleRef::proxy(proxy_name)});
        ProxyBehavior storage;
        const ProxyBehavior* terminal = resolve_delegation(proxy_name, grille.id, storage);
        if (!terminal) return;  // stranded in a delegation cycle

        Rng conduct_rng = Rng(config.seed).fork("conduct/" + terminal->name + "/" + principal);
        auto result = apply_conduct(terminal->conduct, grille, conduct_rng);
        trace.add(terminal->name, "proxy-conduct",
                  {{"conduct", std::string(to_string(terminal->conduct))},
                   {"principal-id", to_string(grille.id)}},
                  {RoleRef::proxy(terminal->name)});
        if (result.leaked) {
            leaked_ids.push_back(*result.leaked);
            // Copies of the printed email lying loose: anyone can read them.
            trace.add(terminal->name, "leak-id",
                      {{"id", to_string(*result.leaked)}, {"voter", principal}},
                      {RoleRef::pub()});
        }
        if (result.delivered) {
            insert_sheet(box, terminal->name, to_text(*result.delivered),
                         result.deanonymized ? std::optional<std::string>(principal)
                                             : std::nullopt);
        }
    }

    // Delivers one grid through a proxy. Without marks there is nothing to
    // alter blindly, so only the delivery conducts have an effect.
    void deliver_grid_by_proxy(BallotBox& box, const std::string& proxy_name,
                               const std::string& principal, const Grid& grid) {
        trace.add(principal, "handoff-grid",
                  {{"to", proxy_name}, {"id", to_string(grid.id)}, {"grid", to_text(grid)}},
                  {RoleRef::proxy(proxy_name)});
        ProxyBehavior storage;
        const ProxyBehavior* terminal = resolve_delegation(proxy_name, grid.id, storage);
        if (!terminal) return;
        trace.add(terminal->name, "proxy-conduct",
                  {{"conduct", std::string(to_string(terminal->conduct))},
                   {"principal-id", to_string(grid.id)}},
                  {RoleRef::proxy(terminal->name)});
        if (terminal->conduct == Conduct::no_show) return;
        if (terminal->conduct == Conduct::leak_id) {
            leaked_ids.push_back(grid.id);
            trace.add(terminal->name, "leak-id",
                      {{"id", to_string(grid.id)}, {"voter", principal}}, {RoleRef::pub()});
        }
        insert_sheet(box, terminal->name, to_text(grid),
                     terminal->conduct == Conduct::deanonymize
                         ? std::optional<std::string>(principal)
                         : std::nullopt);
    }
};

}  // namespace

ScenarioTrace run_scenario(const ScenarioConfig& config) {
    config.validate();
    const auto& params = config.params;
    const auto& variants = config.variants;

    Engine engine(config);
    TraceBuilder& trace = engine.trace;
    Rng root(config.seed);
    Rng reg_rng = root.fork("registration");
    Rng box_rng = root.fork("box-mixing");
    Rng stuff_rng = root.fork("stuffing");

    const LogicalTime deadline = 1'000'000;
    DefaultBallotPolicy policy = DefaultBallotPolicy::none;
    if (variants.default_grid) policy = DefaultBallotPolicy::default_grid;
    if (variants.default_grille) policy = DefaultBallotPolicy::default_grille;

    Registry registry = Registry::register_voters(config.roll, reg_rng, deadline, policy);
    for (const auto& name : config.roll) {
        trace.add("ra", "assign-id",
                  {{"voter", name}, {"id", to_string(registry.id_of(name))}}, {RoleRef::ra()});
    }

    std::map<std::string, VoterRuntime> runtime;
    for (const auto& name : config.roll) {
        VoterRuntime rt;
        rt.behavior = &config.voters.at(name);
        rt.used_id = rt.behavior->id_swap_partner
                         ? registry.id_of(*rt.behavior->id_swap_partner)
                         : registry.id_of(name);
        runtime.emplace(name, std::move(rt));
    }

    // Ballot preparation and the authority-route submissions, in roll order.
    for (const auto& name : config.roll) {
        auto& rt = runtime.at(name);
        const auto& behavior = *rt.behavior;
        if (!behavior.intent) continue;
        Rng voter_rng = root.fork("voter/" + name);

        if (variants.default_grid) {
            Grid default_grid = registry.make_default_grid(rt.used_id, params, voter_rng);
            trace.add("ra", "deliver-default-grid",
                      {{"id", to_string(rt.used_id)}, {"grid", to_text(default_grid)}},
                      {RoleRef::ra()});
            if (voter_rng.coin()) {
                rt.paper = mark_default_grid(std::move(default_grid), *behavior.intent, params,
                                             voter_rng);
            } else {
                // Discards the default and prepares her own from scratch.
                rt.paper = make_ballot(*behavior.intent, params, voter_rng, rt.used_id);
            }
        } else if (variants.default_grille) {
            Grille default_grille = registry.make_default_grille(rt.used_id, params, voter_rng);
            trace.add("ra", "deliver-default-grille",
                      {{"id", to_string(rt.used_id)}, {"grille", to_text(default_grille)}},
                      {RoleRef::ra()});
            Grille chosen = default_grille;
            if (voter_rng.coin()) {
                // Substitutes a private grille of her own for the default.
                const std::size_t m = params.candidates.size();
                const std::size_t voted = behavior.intent->voted_for.size();
                std::size_t marks = voted + voter_rng.below(m + 1);
                chosen.bits.assign(2 * m, 0);
                for (std::size_t i = 0; i < marks; ++i) chosen.bits[i] = 1;
                voter_rng.shuffle(chosen.bits);
                rt.substituted_grille = true;
            }
            rt.paper = build_grid_for_grille(chosen, *behavior.intent, params, voter_rng);
        } else {
            rt.paper = make_ballot(*behavior.intent, params, voter_rng, rt.used_id);
        }
    }

    // Authority-route submissions: on-time first, then the late ones just
    // past the deadline.
    for (int late_pass = 0; late_pass < 2; ++late_pass) {
        for (const auto& name : config.roll) {
            auto& rt = runtime.at(name);
            const auto& behavior = *rt.behavior;
            if (!rt.paper || behavior.late_grid != (late_pass == 1)) continue;
            if (late_pass == 1) trace.advance_to(deadline + 1);

            if (variants.default_grille) {
                // Routes are swapped: only a substituted grille travels to
                // the authority, and the grid half goes to the box.
                if (rt.substituted_grille) {
                    registry.submit_grille(rt.used_id, rt.paper->grille, trace.now());
                    trace.add(name, "submit-grille",
                              {{"id", to_string(rt.used_id)},
                               {"grille", to_text(rt.paper->grille)}},
                              {RoleRef::ra()});
                }
                continue;
            }
            bool grid_via_box =
                variants.two_proxy && (behavior.attendance == Attendance::in_person ||
                                       behavior.attendance == Attendance::two_proxy);
            if (grid_via_box) continue;
            registry.submit_grid(rt.used_id, rt.paper->grid, trace.now());
            trace.add(name, "submit-grid",
                      {{"id", to_string(rt.used_id)}, {"grid", to_text(rt.paper->grid)}},
                      {RoleRef::ra()});
        }
    }

    // Election day.
    trace.advance_to(deadline + 10);
    BallotBox box = BallotBox::open_box(config.box_cap);
    trace.add("ec", "open-box", {}, {RoleRef::ec(), RoleRef::pub()});

    for (const auto& name : config.roll) {
        auto& rt = runtime.at(name);
        const auto& behavior = *rt.behavior;
        if (!rt.paper) continue;

        const bool swapped = variants.default_grille;
        switch (behavior.attendance) {
            case Attendance::abstain:
                break;  // the box-route half never arrives
            case Attendance::in_person:
                if (swapped) {
                    engine.insert_sheet(box, name, to_text(rt.paper->grid), std::nullopt);
                } else {
                    if (variants.two_proxy) {
                        engine.insert_sheet(box, name, to_text(rt.paper->grid), std::nullopt);
                    }
                    engine.insert_sheet(box, name, to_text(rt.paper->grille), std::nullopt);
                }
                break;
            case Attendance::by_proxy:
                if (swapped) {
                    engine.deliver_grid_by_proxy(box, behavior.proxy, name, rt.paper->grid);
                } else {
                    engine.deliver_by_proxy(box, behavior.proxy, name, rt.paper->grille);
                }
                break;
            case Attendance::two_proxy:
                engine.deliver_grid_by_proxy(box, behavior.two_proxies.first, name,
                                             rt.paper->grid);
                engine.deliver_by_proxy(box, behavior.two_proxies.second, name,
                                        rt.paper->grille);
                break;
        }
    }

    // Stuffing happens once the day's leaks are lying around.
    if (config.stuffing && config.stuffing->count > 0) {
        const auto& stuffing = *config.stuffing;
        const std::size_t length = params.grid_length();
        std::uint64_t inserted = 0;
        for (std::uint64_t i = 0; i < stuffing.count; ++i) {
            BallotId id;
            if (stuffing.strategy == StuffingConfig::IdStrategy::leaked &&
                !engine.leaked_ids.empty()) {
                id = engine.leaked_ids[static_cast<std::size_t>(i % engine.leaked_ids.size())];
            } else {
                id = BallotId{stuff_rng.next_u128()};
            }
            std::string payload;
            if (variants.default_grille) {
                Grid fake;
                fake.id = id;
                fake.checksum = stuff_rng.below(length + 1);
                fake.names = make_decoys(length, params, stuff_rng);
                payload = to_text(fake);
            } else {
                Grille fake;
                fake.id = id;
                if (params.encoding == GrilleEncoding::numerical) {
                    fake.encoding = GrilleEncoding::numerical;
                    std::size_t marks = stuff_rng.below(length) + 1;
                    std::unordered_set<std::uint32_t> used;
                    while (fake.codes.size() < marks) {
                        auto code =
                            static_cast<std::uint32_t>(stuff_rng.below(std::uint64_t{1} << 32));
                        if (used.insert(code).second) fake.codes.push_back(code);
                    }
                } else {
                    fake.bits.resize(length);
                    for (auto& bit : fake.bits) bit = stuff_rng.coin() ? 1 : 0;
                }
                payload = to_text(fake);
            }
            if (box.insert(Sheet{std::move(payload), "stuffer", std::nullopt})) ++inserted;
        }
        trace.add("stuffer", "insert-sheets", {{"count", std::to_string(inserted)}},
                  {RoleRef::ec(), RoleRef::pub()});
    }

    auto closed = box.close_box(box_rng);
    trace.add("ec", "close-box", {{"sheets", std::to_string(closed.size())}},
              {RoleRef::ec(), RoleRef::pub()});
    trace.add("ec", "box-contents", {{"dump", contents_dump(closed)}}, {RoleRef::ec()});

    const HandoverPackage& handover = registry.seal_and_handover(true);
    trace.add("ra", "handover", {{"package", to_text(handover)}},
              {RoleRef::ra(), RoleRef::ec()});

    TallyOptions tally_options;
    tally_options.box_grids = variants.two_proxy;
    tally_options.swapped_routes = variants.default_grille;
    tally_options.publish_purged = variants.publish_purged;
    std::vector<std::string> payloads;
    payloads.reserve(closed.size());
    for (auto& sheet : closed) payloads.push_back(std::move(sheet.payload));
    TallyOutcome outcome = tally(payloads, handover, params, tally_options);

    // Ground truth is settled through the proving interface before the
    // ledger goes public.
    std::map<BallotId, IdStatus> status_of;
    for (const auto& [id, status] : outcome.report().ledger) status_of.emplace(id, status);

    ScenarioTrace result;
    for (const auto& name : config.roll) {
        const auto& rt = runtime.at(name);
        GroundTruth truth;
        truth.intent = rt.behavior->intent;
        if (!truth.intent) {
            truth.outcome = VoterOutcome::absent;
        } else {
            switch (status_of.at(rt.used_id)) {
                case IdStatus::counted:
                    truth.outcome = outcome.prove_vote(rt.used_id, *truth.intent)
                                        ? VoterOutcome::counted_as_intended
                                        : VoterOutcome::counted_altered;
                    break;
                case IdStatus::unused:
                    truth.outcome = VoterOutcome::absent;
                    break;
                default:
                    truth.outcome = VoterOutcome::invalidated;
                    break;
            }
        }
        result.ground_truth.emplace(name, std::move(truth));
    }

    result.final_report = outcome.publish();
    trace.add("ec", "publish-report", {{"report", report_to_text(result.final_report)}},
              {RoleRef::pub()});

    result.events = trace.take();
    result.handover = handover;
    result.leaked_ids = std::move(engine.leaked_ids);
    return result;
}

std::vector<Event> role_view(const ScenarioTrace& trace, const RoleRef& role) {
    std::vector<Event> view;
    for (const auto& event : trace.events) {
        bool visible = false;
        for (const auto& watcher : event.visible_to) {
            if (watcher == role || watcher.kind == RoleRef::Kind::public_) {
                visible = true;
                break;
            }
        }
        if (visible) view.push_back(event);
    }
    return view;
}

}  // namespace bpv
