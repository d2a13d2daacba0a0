#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mergemend/errors.hpp"

namespace mergemend {

// One upstream before/after code change harvested from history.
// `before` is a single source line; `after` is one or more lines joined
// with '\n' (the replacement block that followed the deleted line).
struct UpstreamChange {
  std::string before;
  std::string after;

  bool operator==(const UpstreamChange&) const = default;
};

enum class DiagnosticType {
  err_no_member,
  err_no_member_suggest,
  err_undeclared_var_use_suggest,
  err_undeclared_use_suggest,
  other,
};

const char* to_string(DiagnosticType type);
DiagnosticType diagnostic_type_from_string(const std::string& name);

struct CompilerDiagnostic {
  DiagnosticType error_type = DiagnosticType::other;
  std::string message;
  std::string file;
  int line = 0;  // 1-based

  bool operator==(const CompilerDiagnostic&) const = default;
};

// Self-contained record of one semantic merge conflict: the relevant
// upstream changes, the downstream line that broke, and (optionally) the
// first line of the developer's fix as ground truth.
struct ConflictDescription {
  std::string id;
  std::vector<UpstreamChange> upstream_changes;  // curation order
  std::string downstream_conflict;               // exactly one line
  std::optional<std::string> downstream_fix;     // exactly one line when set
  std::optional<CompilerDiagnostic> diagnostic;

  bool operator==(const ConflictDescription&) const = default;
};

// A textual merge conflict as a (base, A, B, resolution) tuple of line lists.
// base may be empty (two-way datasets such as the header corpus).
struct TextualConflict {
  std::string id;
  std::vector<std::string> base;
  std::vector<std::string> variant_a;
  std::vector<std::string> variant_b;
  std::vector<std::string> resolution;  // ground truth

  bool operator==(const TextualConflict&) const = default;
};

// Per-example trial outcomes plus the candidate text each trial produced.
struct EvalRecord {
  std::string example_id;
  std::vector<bool> trial_outcomes;
  std::vector<std::string> candidates;

  bool operator==(const EvalRecord&) const = default;
};

enum class TextualLayout { marker_file, tuple_dir };

// Throws SchemaError if any type invariant fails; `where` names the value
// in the message (e.g. "description 3").
void validate(const ConflictDescription& description, const std::string& where);
void validate(const TextualConflict& conflict, const std::string& where);
void validate(const EvalRecord& record, const std::string& where);

// Conflict-description corpus I/O. On disk each description is a JSON
// object with keys "UpstreamChanges" (list of {"Before","After"}),
// "DownstreamConflict", optional "DownstreamFix", optional "Id" and
// "Diagnostic". Input may be a JSON array or JSON-lines; the writer emits
// an array with 4-space indentation. Descriptions without "Id" get a
// positional id ("0", "1", ...).
std::vector<ConflictDescription> load_conflict_descriptions(std::istream& in);
std::vector<ConflictDescription> load_conflict_descriptions_file(const std::filesystem::path& path);
void save_conflict_descriptions(const std::vector<ConflictDescription>& descriptions, std::ostream& out);
void save_conflict_descriptions_file(const std::vector<ConflictDescription>& descriptions,
                                     const std::filesystem::path& path);

// Marker-file dataset: concatenated records, each a conflict block
// ("<<<<<<<" [label], A lines, optional "|||||||" + base lines, "=======",
// B lines, ">>>>>>>" [label]) followed by a line "Answer:", the resolution
// lines, and a blank line. Record ids are zero-based indices.
std::vector<TextualConflict> load_textual_conflicts_marker(std::istream& in);

// Tuple dataset: <root>/<example-id>/{a.txt,base.txt,b.txt,r.txt};
// base.txt may be absent. Examples are returned sorted by id.
std::vector<TextualConflict> load_textual_conflicts_tuples(const std::filesystem::path& root);

std::vector<TextualConflict> load_textual_conflicts(const std::filesystem::path& path, TextualLayout layout);

// Splits on '\n', normalizing "\r\n"; no trailing empty line for text
// ending in '\n'.
std::vector<std::string> split_lines(const std::string& text);
std::string join_lines(const std::vector<std::string>& lines);
std::string first_line(const std::string& text);

}  // namespace mergemend
