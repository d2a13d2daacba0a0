#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mergemend/conflict_model.hpp"

namespace mergemend::editseq {

// One uncompressed edit operation with its payload character.
// symbol is '=' (keep), '-' (delete from a) or '+' (insert from b).
struct EditOp {
  char symbol;
  char payload;

  bool operator==(const EditOp&) const = default;
};

// Canonical minimal edit script between two strings: character-level LCS,
// equalities taken whenever they preserve minimality, deletions preferred
// over insertions at ties. Within every changed region all deletions come
// before all insertions.
std::vector<EditOp> diff_script(std::string_view a, std::string_view b);

// The symbols of a script as a string over {=, -, +}.
std::string script_symbols(const std::vector<EditOp>& script);

// Collapses runs of identical symbols to a single symbol. Idempotent.
std::string compress(std::string_view symbols);

// Removes every ASCII space (0x20); tabs and other whitespace stay.
std::string strip_spaces(std::string_view text);

// The compressed edit sequence of (a, b) after space stripping.
// edit_sequence("bool IsIncognito() const;", "bool GetIncognito() const;")
// is "=-+=".
std::string edit_sequence(std::string_view a, std::string_view b);

// Replays an uncompressed script against `a`, producing `b`. Throws Error
// if the script does not match `a` (wrong payload for '=' or '-', or
// leftover input).
std::string apply_script(const std::vector<EditOp>& script, std::string_view a);

// Edit-sequence pattern of a change pair: edit_sequence of (before, first
// line of after).
std::string change_pattern(const UpstreamChange& pair);

// Keeps the first pair for each distinct change pattern, preserving input
// order.
std::vector<UpstreamChange> distinct_filter(const std::vector<UpstreamChange>& pairs);

}  // namespace mergemend::editseq
