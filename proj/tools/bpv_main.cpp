#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpv/agents.hpp"
#include "bpv/scenario_config.hpp"
#include "bpv/tally.hpp"
#include "bpv/textio.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnreadable = 2;       // unreadable or unparseable input
constexpr int kExitConfigInvariant = 3;  // config violates a named invariant

enum class OutputFormat { human, records };

OutputFormat parse_format(const std::string& text) {
    if (text == "human") return OutputFormat::human;
    if (text == "records") return OutputFormat::records;
    throw CLI::ValidationError("--format", "expected 'human' or 'records'");
}

std::string render_run(const bpv::ScenarioTrace& trace, std::uint64_t seed, OutputFormat format,
                       const std::vector<bpv::RoleRef>& views) {
    std::string out;
    if (format == OutputFormat::human) {
        out += "seed=" + std::to_string(seed) + "\n";
        out += bpv::report_to_text(trace.final_report);
    } else {
        out += "{\"record\":\"run\",\"seed\":" + std::to_string(seed) + "}\n";
        for (const auto& record : bpv::report_to_records(trace.final_report)) {
            out += record;
            out.push_back('\n');
        }
    }
    for (const auto& role : views) {
        if (format == OutputFormat::human) {
            out += "view " + bpv::to_string(role) + "\n";
        }
        for (const auto& event : bpv::role_view(trace, role)) {
            if (format == OutputFormat::records) {
                out += "{\"record\":\"view-event\",\"role\":\"" +
                       bpv::json_escape(bpv::to_string(role)) +
                       "\",\"event\":" + bpv::event_to_record(event) + "}\n";
            } else {
                out += bpv::event_to_record(event);
                out.push_back('\n');
            }
        }
        if (format == OutputFormat::human) out += "end view\n";
    }
    return out;
}

int emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return kExitOk;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return kExitUnreadable;
    }
    out << text;
    return kExitOk;
}

int cmd_run(const std::string& scenario_path, bool has_seed_override,
            std::uint64_t seed_override, const std::string& format_text,
            const std::vector<std::string>& view_names, const std::string& out_path) {
    OutputFormat format = parse_format(format_text);
    std::vector<bpv::RoleRef> views;
    for (const auto& name : view_names) {
        auto role = bpv::role_from_string(name);
        if (!role) {
            std::cerr << "error: unknown role '" << name << "'\n";
            return kExitUnreadable;
        }
        views.push_back(*role);
    }
    bpv::ScenarioConfig config = bpv::load_scenario_file(scenario_path);
    if (has_seed_override) config.seed = seed_override;
    auto trace = bpv::run_scenario(config);
    return emit(render_run(trace, config.seed, format, views), out_path);
}

int cmd_sweep(const std::string& scenario_path, std::uint64_t seed_start, std::uint64_t count,
              const std::string& format_text, const std::string& out_path) {
    OutputFormat format = parse_format(format_text);
    bpv::ScenarioConfig config = bpv::load_scenario_file(scenario_path);
    std::vector<std::string> blocks(static_cast<std::size_t>(count));

    // Scenarios are independent; outputs are ordered by seed before emission
    // so parallelism never changes bytes.
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(count); ++i) {
        bpv::ScenarioConfig local = config;
        local.seed = seed_start + static_cast<std::uint64_t>(i);
        auto trace = bpv::run_scenario(local);
        blocks[static_cast<std::size_t>(i)] = render_run(trace, local.seed, format, {});
    }

    std::string out;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i && format == OutputFormat::human) out.push_back('\n');
        out += blocks[i];
    }
    return emit(out, out_path);
}

int cmd_validate(const std::vector<std::string>& files, const std::string& candidates_text,
                 int seats, const std::string& mode_text, const std::string& encoding_text,
                 bool embellishment, const std::string& out_path) {
    bpv::ElectionParams params;
    {
        std::stringstream splitter(candidates_text);
        std::string item;
        while (std::getline(splitter, item, ',')) {
            auto trimmed = bpv::trim(item);
            if (!trimmed.empty()) params.candidates.push_back(trimmed);
        }
    }
    params.seats = seats;
    auto mode = bpv::mode_from_string(mode_text);
    if (!mode) {
        std::cerr << "error: unknown mode '" << mode_text << "'\n";
        return kExitUnreadable;
    }
    params.mode = *mode;
    auto encoding = bpv::encoding_from_string(encoding_text);
    if (!encoding) {
        std::cerr << "error: unknown encoding '" << encoding_text << "'\n";
        return kExitUnreadable;
    }
    params.encoding = *encoding;
    params.embellishment_enabled = embellishment;
    try {
        params.validate();
    } catch (const bpv::ParamsError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitConfigInvariant;
    }

    std::string out;
    std::map<bpv::BallotId, bpv::Grid> grids;
    std::map<bpv::BallotId, bpv::Grille> grilles;
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            out += path + ": unreadable\n";
            continue;
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        auto sheet = bpv::parse_sheet(buffer.str());
        switch (sheet.kind) {
            case bpv::SheetKind::grid:
                grids[sheet.grid->id] = std::move(*sheet.grid);
                break;
            case bpv::SheetKind::grille:
                grilles[sheet.grille->id] = std::move(*sheet.grille);
                break;
            case bpv::SheetKind::unreadable:
                out += path + ": unreadable\n";
                break;
        }
    }

    std::map<bpv::BallotId, int> ids;
    for (const auto& [id, grid] : grids) ids[id] |= 1;
    for (const auto& [id, grille] : grilles) ids[id] |= 2;
    for (const auto& [id, mask] : ids) {
        std::string label = "id " + bpv::to_string(id) + ": ";
        if (mask == 1) {
            out += label + "missing grille\n";
            continue;
        }
        if (mask == 2) {
            out += label + "missing grid\n";
            continue;
        }
        auto verdict = bpv::match_pair(grids.at(id), grilles.at(id), params);
        if (verdict.matched) {
            std::string names;
            for (const auto& candidate : params.candidates) {
                if (verdict.intent.voted_for.count(candidate)) {
                    if (!names.empty()) names += ",";
                    names += candidate;
                }
            }
            out += label + "matched intent=" + names + "\n";
        } else {
            out += label + "mismatch: " + std::string(bpv::to_string(verdict.reason)) + "\n";
        }
    }
    return emit(out, out_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blind-proxy ballot engine: deterministic election scenarios,"
                 " grid/grille validation, and seed sweeps"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string format_text = "human";
    std::string out_path;
    std::uint64_t seed_override = 0;
    std::vector<std::string> view_names;

    auto* run = app.add_subcommand("run", "Run one scenario and emit its report");
    run->add_option("--scenario", scenario_path, "Scenario file")->required();
    auto* seed_option = run->add_option("--seed", seed_override, "Override the scenario seed");
    run->add_option("--format", format_text, "Output format: human or records");
    run->add_option("--out", out_path, "Write output to a file instead of stdout");
    run->add_option("--views", view_names,
                    "Role views to append: ra, ec, public, proxy:NAME")
        ->delimiter(',');

    std::uint64_t sweep_start = 0;
    std::uint64_t sweep_count = 1;
    auto* sweep = app.add_subcommand("sweep", "Run a scenario across consecutive seeds");
    sweep->add_option("--scenario", scenario_path, "Scenario file")->required();
    sweep->add_option("--seed-start", sweep_start, "First seed")->required();
    sweep->add_option("--count", sweep_count, "Number of seeds")->required();
    sweep->add_option("--format", format_text, "Output format: human or records");
    sweep->add_option("--out", out_path, "Write output to a file instead of stdout");

    std::vector<std::string> files;
    std::string candidates_text;
    std::string mode_text = "subset";
    std::string encoding_text = "bits";
    int seats = 1;
    bool embellishment = false;
    auto* validate = app.add_subcommand("validate", "Desk-check grid/grille pair files");
    validate->add_option("files", files, "Ballot half files in canonical text form")->required();
    validate->add_option("--candidates", candidates_text, "Comma-separated candidate names")
        ->required();
    validate->add_option("--seats", seats, "Number of seats");
    validate->add_option("--mode", mode_text, "subset, first-past-the-post, plurality-at-large");
    validate->add_option("--encoding", encoding_text, "bits or numerical");
    validate->add_flag("--embellishment", embellishment, "Evaluate grille embellishments");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(scenario_path, seed_option->count() > 0, seed_override, format_text,
                           view_names, out_path);
        }
        if (sweep->parsed()) {
            return cmd_sweep(scenario_path, sweep_start, sweep_count, format_text, out_path);
        }
        if (validate->parsed()) {
            return cmd_validate(files, candidates_text, seats, mode_text, encoding_text,
                                embellishment, out_path);
        }
    } catch (const bpv::ConfigParseError& error) {
        std::cerr << "unreadable config: " << error.what() << "\n";
        return kExitUnreadable;
    } catch (const bpv::ConfigError& error) {
        std::cerr << "config invariant violated: " << error.what() << "\n";
        return kExitConfigInvariant;
    } catch (const bpv::Error& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitUnreadable;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitUnreadable;
    }
    return kExitOk;
}
