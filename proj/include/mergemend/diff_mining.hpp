#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mergemend/conflict_model.hpp"
#include "mergemend/errors.hpp"

namespace mergemend::diffmine {

enum class LineTag { context, deleted, added };

struct DiffLine {
  LineTag tag;
  std::string text;

  bool operator==(const DiffLine&) const = default;
};

struct Hunk {
  int old_start = 0;  // 1-based
  int new_start = 0;  // 1-based
  std::vector<DiffLine> lines;

  bool operator==(const Hunk&) const = default;
};

struct FileDiff {
  std::string path;
  std::vector<Hunk> hunks;

  bool operator==(const FileDiff&) const = default;
};

struct CommitRecord {
  std::string commit_id;
  std::int64_t timestamp = 0;  // seconds since epoch
  std::vector<FileDiff> diffs;
  std::string message;

  bool operator==(const CommitRecord&) const = default;
};

// Ordered set of diagnostic keywords; duplicates dropped, first kept.
struct KeywordSet {
  std::vector<std::string> keywords;

  void add(std::string keyword);
  bool empty() const { return keywords.empty(); }
  // True when any keyword occurs in `line` as a plain substring.
  bool matches(std::string_view line) const;
};

// Where the compiler pointed at the downstream conflict.
struct ConflictLocation {
  std::string file;
  int line = 0;  // 1-based
  std::string line_text;
};

struct RepairCommit {
  std::string commit_id;
  std::string fix_first_line;
};

enum class CurationStage { keyword_extraction, change_collection };

class CurationError : public Error {
 public:
  CurationError(CurationStage stage, const std::string& what) : Error(what), stage_(stage) {}
  CurationStage stage() const { return stage_; }

 private:
  CurationStage stage_;
};

// Parses `diff --git` style unified diff text. Throws ParseError with the
// offending line number for malformed hunk headers, hunks shorter than
// their header counts, or non-increasing hunk positions.
std::vector<FileDiff> parse_unified_diff(const std::string& text);

// Parses a commit stream: records separated by a line "commit <id>",
// then a timestamp line (integer seconds since epoch), then optional
// message lines, then the diff body. Message text is filtered to ASCII.
std::vector<CommitRecord> parse_commit_stream(std::istream& in);

// Pulls every maximal quoted substring out of the diagnostic message
// ('...', "..." and clang's `...' style); keywords of the shape X::Y also
// contribute the type specifier X and the member name Y separately.
KeywordSet extract_keywords(const CompilerDiagnostic& diagnostic);

// Harvests (before, after) pairs: every deleted line containing a keyword
// becomes `before`; the added lines immediately following it, up to the
// next context or deleted line, become `after`. Pairs with no following
// added line are dropped, as are exact duplicates (first kept). Order is
// commit, then hunk, then line order.
std::vector<UpstreamChange> collect_upstream_changes(const std::vector<CommitRecord>& commits,
                                                     const KeywordSet& keywords);

// Finds the earliest commit (later_commits sorted by timestamp ascending)
// that deletes exactly `conflict.line_text` in `conflict.file` with at
// least one added line in the matching hunk, and for which
// diagnostic_absent(commit_id) holds. The fix is the first added line of
// that hunk.
std::optional<RepairCommit> find_repair_commit(
    const ConflictLocation& conflict, const std::vector<CommitRecord>& later_commits,
    const std::function<bool(const std::string&)>& diagnostic_absent);

struct CurationInput {
  std::string id;
  std::vector<CommitRecord> upstream_commits;
  std::vector<CommitRecord> downstream_commits;  // repair search, sorted ascending
  CompilerDiagnostic diagnostic;
  ConflictLocation conflict;
  // Defaults to "always absent" so desk runs do not need a compiler.
  std::function<bool(const std::string&)> diagnostic_absent;
};

// keyword extraction -> upstream change collection -> repair lookup.
// Throws CurationError naming the stage when the keyword set or the
// collected change list comes up empty.
ConflictDescription curate(const CurationInput& input);

}  // namespace mergemend::diffmine
