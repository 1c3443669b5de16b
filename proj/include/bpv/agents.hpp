#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bpv/ballot.hpp"
#include "bpv/collection.hpp"
#include "bpv/registration.hpp"
#include "bpv/tally.hpp"

namespace bpv {

enum class Attendance { in_person, by_proxy, two_proxy, abstain };
std::string_view to_string(Attendance attendance);

enum class Conduct {
    faithful,
    no_show,
    deanonymize,
    leak_id,
    swap_grille_preserving_checksum,
    random_alteration,
    delegate_to,
};
std::string_view to_string(Conduct conduct);

struct VoterBehavior {
    std::string name;
    // No intent at all means the voter stays out of the election entirely;
    // an intent with attendance `abstain` means she submits her grid but her
    // marks half never reaches the box.
    std::optional<VoteIntent> intent;
    Attendance attendance = Attendance::in_person;
    std::string proxy;                                // by_proxy
    std::pair<std::string, std::string> two_proxies;  // grid carrier, grille carrier
    std::optional<std::string> id_swap_partner;
    bool late_grid = false;  // the authority-route half misses the deadline
};

struct ProxyBehavior {
    std::string name;
    Conduct conduct = Conduct::faithful;
    std::string delegate;  // delegate_to target
};

struct VariantFlags {
    bool two_proxy = false;
    bool default_grid = false;
    bool default_grille = false;
    bool numerical = false;
    bool embellishment = false;
    bool transitive_proxy = false;
    bool publish_purged = false;
    bool id_swap = false;
};

struct StuffingConfig {
    enum class IdStrategy { random, leaked };
    std::uint64_t count = 0;
    IdStrategy strategy = IdStrategy::random;
};

struct ScenarioConfig {
    ElectionParams params;
    std::vector<std::string> roll;
    std::vector<std::string> proxy_pool;
    std::map<std::string, VoterBehavior> voters;
    std::map<std::string, ProxyBehavior> proxies;  // pool members default to faithful
    VariantFlags variants;
    std::optional<StuffingConfig> stuffing;
    std::optional<std::size_t> box_cap;
    std::uint64_t seed = 0;

    // ConfigError naming the violated invariant.
    void validate() const;
};

struct RoleRef {
    enum class Kind { ra, ec, proxy, public_ } kind = Kind::public_;
    std::string proxy_name;

    static RoleRef ra() { return {Kind::ra, {}}; }
    static RoleRef ec() { return {Kind::ec, {}}; }
    static RoleRef pub() { return {Kind::public_, {}}; }
    static RoleRef proxy(std::string name) { return {Kind::proxy, std::move(name)}; }

    friend bool operator==(const RoleRef&, const RoleRef&) = default;
};
std::string to_string(const RoleRef& role);
std::optional<RoleRef> role_from_string(std::string_view text);

// One trace entry. Events visible to `public_` are visible to every role;
// an empty visibility list marks simulator-omniscient bookkeeping.
struct Event {
    LogicalTime t = 0;
    std::string actor;
    std::string action;
    std::vector<std::pair<std::string, std::string>> data;
    std::vector<RoleRef> visible_to;
};
std::string event_to_record(const Event& event);  // one JSON object per line

enum class VoterOutcome { counted_as_intended, counted_altered, invalidated, absent };
std::string_view to_string(VoterOutcome outcome);

struct GroundTruth {
    std::optional<VoteIntent> intent;
    VoterOutcome outcome = VoterOutcome::absent;
};

struct ScenarioTrace {
    std::vector<Event> events;
    ElectionReport final_report;
    HandoverPackage handover;
    std::map<std::string, GroundTruth> ground_truth;  // omniscient bookkeeping
    std::vector<BallotId> leaked_ids;
};

struct ConductResult {
    std::optional<Grille> delivered;
    std::optional<BallotId> leaked;
    bool deanonymized = false;
};

// What one proxy does with the grille entrusted to him. The alteration
// conducts preserve the checksum: a proxy holds the grille, so he can count
// its marks, but without the grid he cannot aim. `random_alteration` moves
// one random mark to a random empty row (which the embellishment always
// detects); the swap conduct replaces the whole vector with a uniformly
// random different one of equal mark count. Degenerate grilles (no mark or
// no empty row) are delivered unchanged. Delegation is resolved by the
// scenario engine, not here.
ConductResult apply_conduct(Conduct conduct, const Grille& grille, Rng& rng);

// Runs registration, ballot preparation, collection, handover, and tally end
// to end, recording every event with the roles that can see it.
// Deterministic given config.seed.
ScenarioTrace run_scenario(const ScenarioConfig& config);

// Exactly the events the given role can see.
std::vector<Event> role_view(const ScenarioTrace& trace, const RoleRef& role);

}  // namespace bpv
