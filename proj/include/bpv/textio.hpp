#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "bpv/ballot.hpp"

namespace bpv {

// Canonical text form of ballot halves: LF line endings, UTF-8, byte-exact
// across platforms. One row per line after the headers.
//
//   kind=grid                 kind=grille          kind=grille
//   id=<decimal>              id=<decimal>         id=<decimal>
//   checksum=<decimal>        <bit>                encoding=numerical
//   embellishment=<decimal>   ...                  <code>
//   <name>[\t<code>]                               ...
//   ...
//
// The embellishment header appears only when the grid carries one; grid rows
// carry a tab-separated code number only in numerical encoding.

std::string to_text(const Grid& grid);
std::string to_text(const Grille& grille);

// Strict parses of the canonical forms; any deviation yields nothing.
std::optional<Grid> grid_from_text(std::string_view text);
std::optional<Grille> grille_from_text(std::string_view text);

// Reads one sheet pulled from the ballot box: canonical grille text or
// nothing. Total function; unreadable sheets are discarded later without
// affecting any id.
inline std::optional<Grille> read_sheet(std::string_view payload) {
    return grille_from_text(payload);
}

enum class SheetKind { grille, grid, unreadable };

struct ParsedSheet {
    SheetKind kind = SheetKind::unreadable;
    std::optional<Grid> grid;
    std::optional<Grille> grille;
};

// Total parse distinguishing the two sheet kinds by their header line.
ParsedSheet parse_sheet(std::string_view payload);

// JSON string escaping for the line-delimited record outputs.
std::string json_escape(std::string_view text);

}  // namespace bpv
