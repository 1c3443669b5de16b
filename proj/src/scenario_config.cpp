#include "bpv/scenario_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace bpv {

namespace {

std::vector<std::string> split_list(std::string_view text, char separator) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(separator, start);
        if (end == std::string_view::npos) end = text.size();
        std::string item = trim(text.substr(start, end - start));
        if (!item.empty()) items.push_back(std::move(item));
        start = end + 1;
    }
    return items;
}

std::uint64_t parse_number(std::string_view text, const std::string& context) {
    std::string value = trim(text);
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
        throw ConfigParseError(context + ": expected a number, got '" + value + "'");
    }
    return out;
}

bool parse_on_off(std::string_view text, const std::string& context) {
    std::string value = trim(text);
    if (value == "on" || value == "true" || value == "yes") return true;
    if (value == "off" || value == "false" || value == "no") return false;
    throw ConfigParseError(context + ": expected on/off, got '" + value + "'");
}

// One `key: value` clause of a voter or proxy line; the value may be empty.
std::pair<std::string, std::string> split_clause(std::string_view clause) {
    auto colon = clause.find(':');
    if (colon == std::string_view::npos) return {trim(clause), ""};
    return {trim(clause.substr(0, colon)), trim(clause.substr(colon + 1))};
}

VoterBehavior parse_voter_line(const std::string& name, std::string_view value) {
    VoterBehavior behavior;
    behavior.name = name;
    bool have_intent = false;
    for (const auto& clause_text : split_list(value, ';')) {
        auto [key, arg] = split_clause(clause_text);
        if (key == "abstain") {
            behavior.intent.reset();
            have_intent = false;
        } else if (key == "intent") {
            behavior.intent = VoteIntent{};
            for (auto& candidate : split_list(arg, ',')) {
                behavior.intent->voted_for.insert(std::move(candidate));
            }
            have_intent = true;
        } else if (key == "in-person") {
            behavior.attendance = Attendance::in_person;
        } else if (key == "absent") {
            behavior.attendance = Attendance::abstain;
        } else if (key == "by-proxy") {
            behavior.attendance = Attendance::by_proxy;
            behavior.proxy = arg;
        } else if (key == "two-proxy") {
            behavior.attendance = Attendance::two_proxy;
            auto pair = split_list(arg, ',');
            if (pair.size() != 2) {
                throw ConfigParseError("voter '" + name + "': two-proxy needs two names");
            }
            behavior.two_proxies = {pair[0], pair[1]};
        } else if (key == "swap-with") {
            behavior.id_swap_partner = arg;
        } else if (key == "late-grid") {
            behavior.late_grid = true;
        } else {
            throw ConfigParseError("voter '" + name + "': unknown clause '" + key + "'");
        }
    }
    if (!have_intent && behavior.intent) behavior.intent.reset();
    return behavior;
}

ProxyBehavior parse_proxy_line(const std::string& name, std::string_view value) {
    ProxyBehavior behavior;
    behavior.name = name;
    auto [key, arg] = split_clause(value);
    if (key == "faithful") {
        behavior.conduct = Conduct::faithful;
    } else if (key == "no-show") {
        behavior.conduct = Conduct::no_show;
    } else if (key == "deanonymize") {
        behavior.conduct = Conduct::deanonymize;
    } else if (key == "leak-id") {
        behavior.conduct = Conduct::leak_id;
    } else if (key == "swap-grille-preserving-checksum") {
        behavior.conduct = Conduct::swap_grille_preserving_checksum;
    } else if (key == "random-alteration") {
        behavior.conduct = Conduct::random_alteration;
    } else if (key == "delegate-to") {
        behavior.conduct = Conduct::delegate_to;
        behavior.delegate = arg;
        if (behavior.delegate.empty()) {
            throw ConfigParseError("proxy '" + name + "': delegate-to needs a target");
        }
    } else {
        throw ConfigParseError("proxy '" + name + "': unknown conduct '" + key + "'");
    }
    return behavior;
}

}  // namespace

ScenarioConfig parse_scenario_config(std::string_view text) {
    ScenarioConfig config;
    config.params.seats = 1;
    bool saw_roll_section = false;

    std::string section;
    std::size_t line_number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string line = trim(text.substr(start, end - start));
        start = end + 1;
        ++line_number;
        auto fail = [&](const std::string& message) {
            throw ConfigParseError("line " + std::to_string(line_number) + ": " + message);
        };

        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section != "election" && section != "variants" && section != "stuffing" &&
                section != "voters" && section != "proxies" && section != "run") {
                fail("unknown section '" + section + "'");
            }
            if (section == "voters") saw_roll_section = true;
            continue;
        }

        auto equals = line.find('=');
        if (equals == std::string::npos) fail("expected 'key = value'");
        std::string key = trim(std::string_view(line).substr(0, equals));
        std::string value = trim(std::string_view(line).substr(equals + 1));
        if (key.empty()) fail("empty key");

        if (section == "election") {
            if (key == "candidates") {
                config.params.candidates = split_list(value, ',');
            } else if (key == "seats") {
                config.params.seats = static_cast<int>(parse_number(value, "seats"));
            } else if (key == "mode") {
                auto mode = mode_from_string(value);
                if (!mode) fail("unknown mode '" + value + "'");
                config.params.mode = *mode;
            } else if (key == "encoding") {
                auto encoding = encoding_from_string(value);
                if (!encoding) fail("unknown encoding '" + value + "'");
                config.params.encoding = *encoding;
            } else if (key == "embellishment") {
                config.params.embellishment_enabled = parse_on_off(value, "embellishment");
            } else {
                fail("unknown election key '" + key + "'");
            }
        } else if (section == "variants") {
            bool flag = parse_on_off(value, key);
            if (key == "two-proxy") config.variants.two_proxy = flag;
            else if (key == "default-grid") config.variants.default_grid = flag;
            else if (key == "default-grille") config.variants.default_grille = flag;
            else if (key == "transitive-proxy") config.variants.transitive_proxy = flag;
            else if (key == "publish-purged") config.variants.publish_purged = flag;
            else if (key == "id-swap") config.variants.id_swap = flag;
            else fail("unknown variant '" + key + "'");
        } else if (section == "stuffing") {
            if (!config.stuffing) config.stuffing = StuffingConfig{};
            if (key == "count") {
                config.stuffing->count = parse_number(value, "stuffing count");
            } else if (key == "ids") {
                if (value == "random") {
                    config.stuffing->strategy = StuffingConfig::IdStrategy::random;
                } else if (value == "leaked") {
                    config.stuffing->strategy = StuffingConfig::IdStrategy::leaked;
                } else {
                    fail("unknown id strategy '" + value + "'");
                }
            } else {
                fail("unknown stuffing key '" + key + "'");
            }
        } else if (section == "voters") {
            if (config.voters.count(key)) fail("duplicate voter '" + key + "'");
            config.roll.push_back(key);
            config.voters.emplace(key, parse_voter_line(key, value));
        } else if (section == "proxies") {
            if (config.proxies.count(key)) fail("duplicate proxy '" + key + "'");
            config.proxy_pool.push_back(key);
            config.proxies.emplace(key, parse_proxy_line(key, value));
        } else if (section == "run") {
            if (key == "seed") {
                config.seed = parse_number(value, "seed");
            } else if (key == "box-cap") {
                config.box_cap = static_cast<std::size_t>(parse_number(value, "box-cap"));
            } else {
                fail("unknown run key '" + key + "'");
            }
        } else {
            fail("key outside any section");
        }
    }

    if (!saw_roll_section) throw ConfigParseError("missing [voters] section");
    config.variants.numerical = config.params.encoding == GrilleEncoding::numerical;
    config.variants.embellishment = config.params.embellishment_enabled;
    config.validate();
    return config;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_config(buffer.str());
}

}  // namespace bpv
