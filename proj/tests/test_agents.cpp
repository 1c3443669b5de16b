#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "bpv/agents.hpp"
#include "bpv/textio.hpp"
#include "helpers.hpp"

using namespace bpv;
using bpvtest::GeneratorOptions;
using bpvtest::make_honest_scenario;
using bpvtest::oracle_tally;
using bpvtest::report_matches_oracle;

namespace {

Grille bits_grille(std::vector<std::uint8_t> bits) {
    Grille grille;
    grille.id = BallotId{1};
    grille.bits = std::move(bits);
    return grille;
}

// A small hand-written scenario: three candidates, named voters, faithful
// couriers unless a test tweaks them.
ScenarioConfig base_scenario(std::uint64_t seed = 1) {
    ScenarioConfig config;
    config.seed = seed;
    config.params.candidates = {"north", "south", "east"};
    config.roll = {"victoria", "walter", "xena"};
    config.proxy_pool = {"peter", "quentin"};
    for (const auto& proxy : config.proxy_pool) {
        config.proxies.emplace(proxy, ProxyBehavior{proxy, Conduct::faithful, {}});
    }
    auto add_voter = [&](const std::string& name, std::set<std::string> votes,
                         Attendance attendance, const std::string& proxy = "") {
        VoterBehavior behavior;
        behavior.name = name;
        behavior.intent = VoteIntent{std::move(votes)};
        behavior.attendance = attendance;
        behavior.proxy = proxy;
        config.voters[name] = std::move(behavior);
    };
    add_voter("victoria", {"north"}, Attendance::by_proxy, "peter");
    add_voter("walter", {"south", "east"}, Attendance::in_person);
    add_voter("xena", {}, Attendance::in_person);
    return config;
}

const GroundTruth& truth_of(const ScenarioTrace& trace, const std::string& voter) {
    return trace.ground_truth.at(voter);
}

IdStatus only_invalidated_status(const ScenarioTrace& trace) {
    std::optional<IdStatus> found;
    for (const auto& [id, status] : trace.final_report.ledger) {
        if (is_invalidated(status)) {
            REQUIRE_FALSE(found.has_value());
            found = status;
        }
    }
    REQUIRE(found.has_value());
    return *found;
}

std::string render_events(const std::vector<Event>& events) {
    std::string out;
    for (const auto& event : events) {
        out += event_to_record(event);
        out.push_back('\n');
    }
    return out;
}

}  // namespace

TEST_CASE("faithful and no-show conducts") {
    auto grille = bits_grille({1, 0, 1, 0});
    Rng rng(1);
    auto faithful = apply_conduct(Conduct::faithful, grille, rng);
    REQUIRE(faithful.delivered.has_value());
    CHECK(faithful.delivered->bits == grille.bits);
    CHECK_FALSE(faithful.leaked.has_value());
    CHECK_FALSE(faithful.deanonymized);

    auto gone = apply_conduct(Conduct::no_show, grille, rng);
    CHECK_FALSE(gone.delivered.has_value());
}

TEST_CASE("leak and deanonymize deliver the grille but violate privacy") {
    auto grille = bits_grille({1, 1, 0});
    Rng rng(2);
    auto leaked = apply_conduct(Conduct::leak_id, grille, rng);
    REQUIRE(leaked.delivered.has_value());
    REQUIRE(leaked.leaked.has_value());
    CHECK(*leaked.leaked == grille.id);

    auto outed = apply_conduct(Conduct::deanonymize, grille, rng);
    REQUIRE(outed.delivered.has_value());
    CHECK(outed.deanonymized);
    CHECK(outed.delivered->bits == grille.bits);
}

TEST_CASE("swap conduct: equal mark count, different vector") {
    // Exhaustive over all 4-bit vectors with at least one mark and one empty
    // row, across many draws.
    for (unsigned mask = 1; mask < 15; ++mask) {
        std::vector<std::uint8_t> bits(4);
        for (std::size_t i = 0; i < 4; ++i) bits[i] = (mask >> i) & 1u;
        auto grille = bits_grille(bits);
        for (int round = 0; round < 20; ++round) {
            Rng rng(100 * mask + round);
            auto swapped = apply_conduct(Conduct::swap_grille_preserving_checksum, grille, rng);
            REQUIRE(swapped.delivered.has_value());
            REQUIRE(checksum_of(*swapped.delivered) == checksum_of(grille));
            REQUIRE(swapped.delivered->bits != grille.bits);
        }
    }
    // Degenerate vectors have no equal-count alternative.
    Rng rng(3);
    auto all_zero = apply_conduct(Conduct::swap_grille_preserving_checksum,
                                  bits_grille({0, 0, 0}), rng);
    CHECK(all_zero.delivered->bits == std::vector<std::uint8_t>{0, 0, 0});
    auto all_one = apply_conduct(Conduct::swap_grille_preserving_checksum,
                                 bits_grille({1, 1, 1}), rng);
    CHECK(all_one.delivered->bits == std::vector<std::uint8_t>{1, 1, 1});
}

TEST_CASE("random alteration moves exactly one mark and never escapes the embellishment") {
    for (std::size_t length = 2; length <= 8; ++length) {
        for (unsigned mask = 0; mask < (1u << length); ++mask) {
            std::vector<std::uint8_t> bits(length);
            for (std::size_t i = 0; i < length; ++i) bits[i] = (mask >> i) & 1u;
            auto grille = bits_grille(bits);
            auto marks = checksum_of(grille);
            bool degenerate = marks == 0 || marks == length;
            for (int round = 0; round < 4; ++round) {
                Rng rng(1000 * mask + 17 * length + round);
                auto altered = apply_conduct(Conduct::random_alteration, grille, rng);
                REQUIRE(altered.delivered.has_value());
                REQUIRE(checksum_of(*altered.delivered) == marks);
                if (degenerate) {
                    REQUIRE(altered.delivered->bits == grille.bits);
                } else {
                    std::size_t differing = 0;
                    for (std::size_t i = 0; i < length; ++i) {
                        if (altered.delivered->bits[i] != grille.bits[i]) ++differing;
                    }
                    REQUIRE(differing == 2);
                    REQUIRE(embellishment_of(*altered.delivered) != embellishment_of(grille));
                }
            }
        }
    }
}

TEST_CASE("random alteration picks its target rows uniformly") {
    // One mark among four rows: the mark can land on any of the three empty
    // rows. Expected count per destination over 10000 draws is 3333.3 with
    // sigma = sqrt(n * p * (1-p)) ~ 47.1; the bounds below are +-3 sigma.
    auto grille = bits_grille({0, 1, 0, 0});
    std::map<std::size_t, int> destinations;
    for (int round = 0; round < 10000; ++round) {
        Rng rng(static_cast<std::uint64_t>(round) + 777);
        auto altered = apply_conduct(Conduct::random_alteration, grille, rng);
        for (std::size_t i = 0; i < 4; ++i) {
            if (altered.delivered->bits[i] && i != 1) destinations[i] += 1;
        }
    }
    REQUIRE(destinations.size() == 3);
    for (const auto& [row, count] : destinations) {
        CHECK(count > 3333 - 142);
        CHECK(count < 3333 + 142);
    }
}

TEST_CASE("numerical conducts preserve the count") {
    Grille grille;
    grille.id = BallotId{5};
    grille.encoding = GrilleEncoding::numerical;
    grille.codes = {11, 22, 33};
    Rng rng(4);
    auto swapped = apply_conduct(Conduct::swap_grille_preserving_checksum, grille, rng);
    CHECK(swapped.delivered->codes.size() == 3);
    CHECK(swapped.delivered->codes != grille.codes);
    auto altered = apply_conduct(Conduct::random_alteration, grille, rng);
    CHECK(altered.delivered->codes.size() == 3);
    CHECK(altered.delivered->codes != grille.codes);
}

TEST_CASE("honest scenario counts every vote as intended") {
    auto trace = run_scenario(base_scenario());
    CHECK(truth_of(trace, "victoria").outcome == VoterOutcome::counted_as_intended);
    CHECK(truth_of(trace, "walter").outcome == VoterOutcome::counted_as_intended);
    CHECK(truth_of(trace, "xena").outcome == VoterOutcome::counted_as_intended);
    for (const auto& [name, votes] : trace.final_report.counts) {
        if (name == "north") CHECK(votes == 1);
        if (name == "south") CHECK(votes == 1);
        if (name == "east") CHECK(votes == 1);
    }
    CHECK(trace.final_report.total_valid_ballots == 3);
}

TEST_CASE("randomized honest scenarios match the intent oracle") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        GeneratorOptions options;
        options.max_voters = 20;
        auto config = make_honest_scenario(seed, options);
        auto trace = run_scenario(config);
        auto oracle = oracle_tally(config);
        REQUIRE(report_matches_oracle(trace.final_report, oracle));
        for (const auto& [voter, truth] : trace.ground_truth) {
            REQUIRE(truth.outcome == VoterOutcome::counted_as_intended);
        }
    }
}

TEST_CASE("scenarios are deterministic") {
    auto config = make_honest_scenario(99);
    auto first = run_scenario(config);
    auto second = run_scenario(config);
    CHECK(render_events(first.events) == render_events(second.events));
    CHECK(report_to_text(first.final_report) == report_to_text(second.final_report));
}

TEST_CASE("a no-show proxy silently disenfranchises the voter") {
    auto config = base_scenario();
    config.proxies.at("peter").conduct = Conduct::no_show;
    auto trace = run_scenario(config);
    CHECK(truth_of(trace, "victoria").outcome == VoterOutcome::invalidated);
    CHECK(only_invalidated_status(trace) == IdStatus::invalid_missing_grille);
    CHECK(truth_of(trace, "walter").outcome == VoterOutcome::counted_as_intended);
    CHECK(trace.final_report.total_valid_ballots == 2);
}

TEST_CASE("a no-show proxy plus a missed deadline leaves the id untouched") {
    auto config = base_scenario();
    config.proxies.at("peter").conduct = Conduct::no_show;
    config.voters.at("victoria").late_grid = true;
    auto trace = run_scenario(config);
    CHECK(truth_of(trace, "victoria").outcome == VoterOutcome::absent);
    bool has_unused = false;
    for (const auto& [id, status] : trace.final_report.ledger) {
        if (status == IdStatus::unused) has_unused = true;
    }
    CHECK(has_unused);
}

TEST_CASE("a leaked id plus targeted stuffing spoils the vote") {
    auto config = base_scenario();
    config.proxies.at("peter").conduct = Conduct::leak_id;
    config.stuffing = StuffingConfig{3, StuffingConfig::IdStrategy::leaked};
    auto trace = run_scenario(config);
    CHECK(truth_of(trace, "victoria").outcome == VoterOutcome::invalidated);
    CHECK(only_invalidated_status(trace) == IdStatus::invalid_duplicate_grille);
    REQUIRE(trace.leaked_ids.size() == 1);
    // The leak is a public event.
    bool leak_event = false;
    for (const auto& event : role_view(trace, RoleRef::pub())) {
        if (event.action == "leak-id") leak_event = true;
    }
    CHECK(leak_event);
}

TEST_CASE("blind alteration changes the vote but leaves no ledger trace") {
    auto config = base_scenario();
    config.params.mode = ElectoralMode::first_past_the_post;
    config.voters.at("walter").intent = VoteIntent{{"south"}};
    config.proxies.at("peter").conduct = Conduct::random_alteration;
    auto trace = run_scenario(config);
    CHECK(truth_of(trace, "victoria").outcome == VoterOutcome::counted_altered);
    for (const auto& [id, status] : trace.final_report.ledger) {
        CHECK(status == IdStatus::counted);
    }
    CHECK(trace.final_report.total_valid_ballots == 3);
}

TEST_CASE("the embellishment catches blind alteration") {
    auto config = base_scenario();
    config.params.mode = ElectoralMode::first_past_the_post;
    config.voters.at("walter").intent = VoteIntent{{"south"}};
    config.params.embellishment_enabled = true;
    config.variants.embellishment = true;
    config.proxies.at("peter").conduct = Conduct::random_alteration;
    auto trace = run_scenario(config);
    CHECK(truth_of(trace, "victoria").outcome == VoterOutcome::invalidated);
    CHECK(only_invalidated_status(trace) == IdStatus::invalid_embellishment);
}

TEST_CASE("a swapped grille is undetectable without the embellishment and caught with it") {
    for (bool embellished : {false, true}) {
        auto config = base_scenario();
        config.params.mode = ElectoralMode::first_past_the_post;
        config.voters.at("walter").intent = VoteIntent{{"south"}};
        config.params.embellishment_enabled = embellished;
        config.variants.embellishment = embellished;
        config.proxies.at("peter").conduct = Conduct::swap_grille_preserving_checksum;
        auto trace = run_scenario(config);
        if (embellished) {
            CHECK(truth_of(trace, "victoria").outcome == VoterOutcome::invalidated);
            CHECK(only_invalidated_status(trace) == IdStatus::invalid_embellishment);
        } else {
            CHECK(truth_of(trace, "victoria").outcome == VoterOutcome::counted_altered);
            for (const auto& [id, status] : trace.final_report.ledger) {
                CHECK(status == IdStatus::counted);
            }
        }
    }
}

TEST_CASE("deanonymization reveals the vote to the committee but still counts") {
    auto config = base_scenario();
    config.proxies.at("peter").conduct = Conduct::deanonymize;
    auto trace = run_scenario(config);
    CHECK(truth_of(trace, "victoria").outcome == VoterOutcome::counted_as_intended);
    auto ec_events = render_events(role_view(trace, RoleRef::ec()));
    CHECK(ec_events.find("victoria") != std::string::npos);  // the scrawled name
}

TEST_CASE("role views: who knows what") {
    auto config = base_scenario();
    auto trace = run_scenario(config);

    auto ra_events = role_view(trace, RoleRef::ra());
    CHECK_FALSE(ra_events.empty());
    CHECK(render_events(ra_events).find("kind=grille") == std::string::npos);

    // No committee-visible event pairs a voter name with an issued id.
    std::set<std::string> id_strings;
    for (const auto& id : trace.handover.valid_ids) id_strings.insert(to_string(id));
    for (const auto& event : role_view(trace, RoleRef::ec())) {
        auto text = event_to_record(event);
        bool has_name = false;
        for (const auto& voter : config.roll) {
            if (text.find(voter) != std::string::npos) has_name = true;
        }
        if (!has_name) continue;
        for (const auto& id_text : id_strings) {
            CHECK(text.find(id_text) == std::string::npos);
        }
    }

    // A proxy sees exactly the pairs entrusted to him: victoria's id and
    // grille for peter, nothing for quentin.
    auto peter_events = render_events(role_view(trace, RoleRef::proxy("peter")));
    CHECK(peter_events.find("handoff-grille") != std::string::npos);
    CHECK(peter_events.find("kind=grille") != std::string::npos);
    auto quentin_events = render_events(role_view(trace, RoleRef::proxy("quentin")));
    CHECK(quentin_events.find("handoff-grille") == std::string::npos);
    CHECK(quentin_events.find("kind=grille") == std::string::npos);

    // The handover itself never names voters.
    auto handover_text = to_text(trace.handover);
    for (const auto& voter : config.roll) {
        CHECK(handover_text.find(voter) == std::string::npos);
    }
}

TEST_CASE("uniform appearance: in-person and proxy sheets are byte-identical") {
    ElectionParams params;
    params.candidates = {"A", "B"};
    Rng rng(6);
    auto paper = make_ballot(VoteIntent{{"A"}}, params, rng, BallotId{88});
    auto payload_in_person = to_text(paper.grille);

    Rng conduct_rng(7);
    auto result = apply_conduct(Conduct::faithful, paper.grille, conduct_rng);
    auto payload_by_proxy = to_text(*result.delivered);
    CHECK(payload_in_person == payload_by_proxy);
}

TEST_CASE("swapping ids between a pair of voters changes no count") {
    GeneratorOptions plain;
    plain.min_voters = 6;
    plain.max_voters = 6;
    auto config = make_honest_scenario(4242, plain);

    auto swapped = config;
    swapped.variants.id_swap = true;
    auto& a = swapped.voters.at(swapped.roll[0]);
    auto& b = swapped.voters.at(swapped.roll[1]);
    a.id_swap_partner = b.name;
    b.id_swap_partner = a.name;

    auto base_trace = run_scenario(config);
    auto swap_trace = run_scenario(swapped);
    CHECK(base_trace.final_report.counts == swap_trace.final_report.counts);
    CHECK(swap_trace.ground_truth.at(a.name).outcome == VoterOutcome::counted_as_intended);
    CHECK(swap_trace.ground_truth.at(b.name).outcome == VoterOutcome::counted_as_intended);
}

TEST_CASE("two-proxy mode reproduces the default-mode counts") {
    GeneratorOptions plain;
    plain.min_voters = 12;
    plain.max_voters = 12;
    auto config = make_honest_scenario(777, plain);

    GeneratorOptions doubled = plain;
    doubled.variants.two_proxy = true;
    auto two_proxy_config = make_honest_scenario(777, doubled);
    // Same generator stream, same candidates and intents; only attendance
    // and variant flags differ.
    REQUIRE(two_proxy_config.params.candidates == config.params.candidates);

    auto base_trace = run_scenario(config);
    auto two_proxy_trace = run_scenario(two_proxy_config);
    CHECK(base_trace.final_report.counts == two_proxy_trace.final_report.counts);
    for (const auto& [voter, truth] : two_proxy_trace.ground_truth) {
        CHECK(truth.outcome == VoterOutcome::counted_as_intended);
    }
}

TEST_CASE("a chain of faithful delegates is as good as one faithful proxy") {
    auto config = base_scenario();
    config.variants.transitive_proxy = true;
    config.proxy_pool.push_back("rita");
    config.proxies.at("peter") = ProxyBehavior{"peter", Conduct::delegate_to, "quentin"};
    config.proxies.at("quentin") = ProxyBehavior{"quentin", Conduct::delegate_to, "rita"};
    config.proxies.emplace("rita", ProxyBehavior{"rita", Conduct::faithful, {}});
    auto trace = run_scenario(config);
    CHECK(truth_of(trace, "victoria").outcome == VoterOutcome::counted_as_intended);

    // Both hops are visible to the proxies involved.
    auto peter_view = render_events(role_view(trace, RoleRef::proxy("peter")));
    CHECK(peter_view.find("delegate") != std::string::npos);
    auto rita_view = render_events(role_view(trace, RoleRef::proxy("rita")));
    CHECK(rita_view.find("delegate") != std::string::npos);
}

TEST_CASE("a delegation cycle strands the ballot") {
    auto config = base_scenario();
    config.variants.transitive_proxy = true;
    config.proxies.at("peter") = ProxyBehavior{"peter", Conduct::delegate_to, "quentin"};
    config.proxies.at("quentin") = ProxyBehavior{"quentin", Conduct::delegate_to, "peter"};
    auto trace = run_scenario(config);
    CHECK(truth_of(trace, "victoria").outcome == VoterOutcome::invalidated);
    CHECK(only_invalidated_status(trace) == IdStatus::invalid_missing_grille);
}

TEST_CASE("default-grid and default-grille flows reproduce the oracle") {
    for (bool use_grid : {true, false}) {
        GeneratorOptions options;
        options.min_voters = 8;
        options.max_voters = 14;
        if (use_grid) {
            options.variants.default_grid = true;
        } else {
            options.variants.default_grille = true;
        }
        for (std::uint64_t seed = 50; seed < 54; ++seed) {
            auto config = make_honest_scenario(seed, options);
            auto trace = run_scenario(config);
            auto oracle = oracle_tally(config);
            REQUIRE(report_matches_oracle(trace.final_report, oracle));
            for (const auto& [voter, truth] : trace.ground_truth) {
                REQUIRE(truth.outcome == VoterOutcome::counted_as_intended);
            }
        }
    }
}

TEST_CASE("numerical encoding reproduces the oracle") {
    GeneratorOptions options;
    options.variants.numerical = true;
    options.min_voters = 8;
    options.max_voters = 14;
    for (std::uint64_t seed = 60; seed < 64; ++seed) {
        auto config = make_honest_scenario(seed, options);
        auto trace = run_scenario(config);
        REQUIRE(report_matches_oracle(trace.final_report, oracle_tally(config)));
    }
}

TEST_CASE("abstaining after submitting a grid is a missing grille") {
    auto config = base_scenario();
    config.voters.at("victoria").attendance = Attendance::abstain;
    auto trace = run_scenario(config);
    CHECK(truth_of(trace, "victoria").outcome == VoterOutcome::invalidated);
    CHECK(only_invalidated_status(trace) == IdStatus::invalid_missing_grille);
}

TEST_CASE("voters without any intent never touch the election") {
    auto config = base_scenario();
    config.voters.at("victoria").intent.reset();
    auto trace = run_scenario(config);
    CHECK(truth_of(trace, "victoria").outcome == VoterOutcome::absent);
    bool has_unused = false;
    for (const auto& [id, status] : trace.final_report.ledger) {
        if (status == IdStatus::unused) has_unused = true;
    }
    CHECK(has_unused);
    CHECK(trace.final_report.total_valid_ballots == 2);
}

TEST_CASE("config invariants are named") {
    auto config = base_scenario();
    config.voters.at("victoria").proxy = "nobody";
    CHECK_THROWS_AS(run_scenario(config), ConfigError);

    config = base_scenario();
    config.voters.at("victoria").id_swap_partner = "walter";
    CHECK_THROWS_AS(run_scenario(config), ConfigError);  // variant off

    config = base_scenario();
    config.variants.id_swap = true;
    config.voters.at("victoria").id_swap_partner = "walter";
    CHECK_THROWS_AS(run_scenario(config), ConfigError);  // asymmetric

    config = base_scenario();
    config.proxies.at("peter").conduct = Conduct::delegate_to;
    config.proxies.at("peter").delegate = "quentin";
    CHECK_THROWS_AS(run_scenario(config), ConfigError);  // transitive variant off

    config = base_scenario();
    config.voters.at("victoria").attendance = Attendance::two_proxy;
    config.voters.at("victoria").two_proxies = {"peter", "peter"};
    config.variants.two_proxy = true;
    CHECK_THROWS_AS(run_scenario(config), ConfigError);  // same proxy twice

    config = base_scenario();
    config.variants.default_grid = true;
    config.variants.default_grille = true;
    CHECK_THROWS_AS(run_scenario(config), ConfigError);

    config = base_scenario();
    config.roll.push_back("ghost");
    CHECK_THROWS_AS(run_scenario(config), ConfigError);  // no behavior for ghost
}

TEST_CASE("per-participant cap stops a stuffer") {
    auto config = base_scenario();
    config.stuffing = StuffingConfig{50, StuffingConfig::IdStrategy::random};
    config.box_cap = 10;
    auto trace = run_scenario(config);
    // 3 genuine sheets + at most 10 stuffed ones.
    CHECK(trace.final_report.discarded_sheets == 10);
    CHECK(trace.final_report.total_valid_ballots == 3);
}
