#include "bpv/textio.hpp"

#include <charconv>
#include <cstdio>
#include <unordered_set>

namespace bpv {

namespace {

void append_header(std::string& out, std::string_view key, std::string_view value) {
    out.append(key);
    out.push_back('=');
    out.append(value);
    out.push_back('\n');
}

// Splits into lines; rejects CR, embedded empty lines, and a missing final
// newline. Returns false on any deviation from canonical form.
bool split_lines(std::string_view text, std::vector<std::string_view>& lines) {
    if (text.empty() || text.back() != '\n') return false;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end - start);
        if (line.empty()) return false;
        if (line.find('\r') != std::string_view::npos) return false;
        lines.push_back(line);
        start = end + 1;
    }
    return !lines.empty();
}

std::optional<std::string_view> header_value(std::string_view line, std::string_view key) {
    if (line.size() <= key.size() + 1) return std::nullopt;
    if (line.substr(0, key.size()) != key || line[key.size()] != '=') return std::nullopt;
    return line.substr(key.size() + 1);
}

std::optional<std::uint64_t> parse_u64(std::string_view text) {
    if (text.empty() || (text.size() > 1 && text.front() == '0')) return std::nullopt;
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

std::optional<std::uint32_t> parse_u32(std::string_view text) {
    auto value = parse_u64(text);
    if (!value || *value > 0xffffffffULL) return std::nullopt;
    return static_cast<std::uint32_t>(*value);
}

}  // namespace

std::string to_text(const Grid& grid) {
    std::string out;
    out.reserve(64 + grid.names.size() * 12);
    append_header(out, "kind", "grid");
    append_header(out, "id", to_string(grid.id));
    append_header(out, "checksum", std::to_string(grid.checksum));
    if (grid.embellishment) {
        append_header(out, "embellishment", std::to_string(*grid.embellishment));
    }
    for (std::size_t i = 0; i < grid.names.size(); ++i) {
        out.append(grid.names[i]);
        if (grid.code_numbers) {
            out.push_back('\t');
            out.append(std::to_string((*grid.code_numbers)[i]));
        }
        out.push_back('\n');
    }
    return out;
}

std::string to_text(const Grille& grille) {
    std::string out;
    out.reserve(48 + grille.bits.size() * 2 + grille.codes.size() * 11);
    append_header(out, "kind", "grille");
    append_header(out, "id", to_string(grille.id));
    if (grille.encoding == GrilleEncoding::numerical) {
        append_header(out, "encoding", "numerical");
        for (auto code : grille.codes) {
            out.append(std::to_string(code));
            out.push_back('\n');
        }
    } else {
        for (auto bit : grille.bits) {
            out.push_back(bit ? '1' : '0');
            out.push_back('\n');
        }
    }
    return out;
}

std::optional<Grid> grid_from_text(std::string_view text) {
    std::vector<std::string_view> lines;
    if (!split_lines(text, lines)) return std::nullopt;
    if (lines.size() < 4) return std::nullopt;
    if (lines[0] != "kind=grid") return std::nullopt;

    auto id_text = header_value(lines[1], "id");
    if (!id_text) return std::nullopt;
    auto id_value = u128_from_string(*id_text);
    if (!id_value) return std::nullopt;

    auto checksum_text = header_value(lines[2], "checksum");
    if (!checksum_text) return std::nullopt;
    auto checksum = parse_u64(*checksum_text);
    if (!checksum) return std::nullopt;

    Grid grid;
    grid.id = BallotId{*id_value};
    grid.checksum = *checksum;

    std::size_t row_start = 3;
    if (auto emb_text = header_value(lines[3], "embellishment")) {
        auto emb = parse_u64(*emb_text);
        if (!emb) return std::nullopt;
        grid.embellishment = *emb;
        row_start = 4;
    }
    if (lines.size() <= row_start) return std::nullopt;

    bool numerical = lines[row_start].find('\t') != std::string_view::npos;
    std::vector<std::uint32_t> codes;
    std::unordered_set<std::uint32_t> seen_codes;
    for (std::size_t i = row_start; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        std::string_view name_part = line;
        if (numerical) {
            auto tab = line.find('\t');
            if (tab == std::string_view::npos) return std::nullopt;
            if (line.find('\t', tab + 1) != std::string_view::npos) return std::nullopt;
            name_part = line.substr(0, tab);
            std::string_view code_part = line.substr(tab + 1);
            auto code = parse_u32(code_part);
            if (!code || !seen_codes.insert(*code).second) return std::nullopt;
            codes.push_back(*code);
        } else if (line.find('\t') != std::string_view::npos) {
            return std::nullopt;
        }
        std::string name = trim(name_part);
        if (name.empty()) return std::nullopt;
        grid.names.push_back(std::move(name));
    }
    if (numerical) grid.code_numbers = std::move(codes);
    return grid;
}

std::optional<Grille> grille_from_text(std::string_view text) {
    std::vector<std::string_view> lines;
    if (!split_lines(text, lines)) return std::nullopt;
    if (lines.size() < 3) return std::nullopt;
    if (lines[0] != "kind=grille") return std::nullopt;

    auto id_text = header_value(lines[1], "id");
    if (!id_text) return std::nullopt;
    auto id_value = u128_from_string(*id_text);
    if (!id_value) return std::nullopt;

    Grille grille;
    grille.id = BallotId{*id_value};

    std::size_t row_start = 2;
    if (auto enc = header_value(lines[2], "encoding")) {
        if (*enc != "numerical") return std::nullopt;
        grille.encoding = GrilleEncoding::numerical;
        row_start = 3;
    }
    // A numerical grille may legitimately list no codes at all (a vote for
    // nobody); a bit grille always spans its grid and needs rows.
    if (grille.encoding == GrilleEncoding::bits && lines.size() <= row_start) {
        return std::nullopt;
    }

    if (grille.encoding == GrilleEncoding::numerical) {
        std::unordered_set<std::uint32_t> seen;
        for (std::size_t i = row_start; i < lines.size(); ++i) {
            auto code = parse_u32(lines[i]);
            if (!code || !seen.insert(*code).second) return std::nullopt;
            grille.codes.push_back(*code);
        }
    } else {
        for (std::size_t i = row_start; i < lines.size(); ++i) {
            if (lines[i] == "0") {
                grille.bits.push_back(0);
            } else if (lines[i] == "1") {
                grille.bits.push_back(1);
            } else {
                return std::nullopt;
            }
        }
    }
    return grille;
}

ParsedSheet parse_sheet(std::string_view payload) {
    ParsedSheet sheet;
    if (payload.rfind("kind=grille\n", 0) == 0) {
        if (auto grille = grille_from_text(payload)) {
            sheet.kind = SheetKind::grille;
            sheet.grille = std::move(grille);
        }
    } else if (payload.rfind("kind=grid\n", 0) == 0) {
        if (auto grid = grid_from_text(payload)) {
            sheet.kind = SheetKind::grid;
            sheet.grid = std::move(grid);
        }
    }
    return sheet;
}

std::string json_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size() + 8);
    for (unsigned char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
    return out;
}

}  // namespace bpv
