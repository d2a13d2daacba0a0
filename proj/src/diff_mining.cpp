#include "mergemend/diff_mining.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <set>
#include <sstream>

namespace mergemend::diffmine {

namespace {

bool starts_with(const std::string& s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

// "@@ -12,3 +14,4 @@" -> (12, 3, 14, 4); counts default to 1.
struct HunkHeader {
  int old_start, old_count, new_start, new_count;
};

std::optional<HunkHeader> parse_hunk_header(const std::string& line) {
  if (!starts_with(line, "@@ -")) return std::nullopt;
  const char* p = line.c_str() + 4;
  const char* end = line.c_str() + line.size();
  HunkHeader h{0, 1, 0, 1};

  auto read_int = [&](int& out) {
    auto [next, ec] = std::from_chars(p, end, out);
    if (ec != std::errc{} || next == p) return false;
    p = next;
    return true;
  };

  if (!read_int(h.old_start)) return std::nullopt;
  if (p < end && *p == ',' && (++p, !read_int(h.old_count))) return std::nullopt;
  if (p >= end || *p != ' ' || *(++p) != '+') return std::nullopt;
  ++p;
  if (!read_int(h.new_start)) return std::nullopt;
  if (p < end && *p == ',' && (++p, !read_int(h.new_count))) return std::nullopt;
  if (p + 3 > end || std::string_view(p, 3) != " @@") return std::nullopt;
  return h;
}

std::string strip_diff_path(const std::string& raw) {
  // "a/foo/bar.cc" -> "foo/bar.cc"; "/dev/null" stays as-is.
  if (raw.size() > 2 && (raw[0] == 'a' || raw[0] == 'b') && raw[1] == '/') return raw.substr(2);
  return raw;
}

std::string ascii_only(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (unsigned char c : text)
    if (c < 0x80) out += static_cast<char>(c);
  return out;
}

}  // namespace

void KeywordSet::add(std::string keyword) {
  if (keyword.empty()) return;
  if (std::find(keywords.begin(), keywords.end(), keyword) != keywords.end()) return;
  keywords.push_back(std::move(keyword));
}

bool KeywordSet::matches(std::string_view line) const {
  for (const auto& keyword : keywords)
    if (line.find(keyword) != std::string_view::npos) return true;
  return false;
}

std::vector<FileDiff> parse_unified_diff(const std::string& text) {
  const auto lines = split_lines(text);
  std::vector<FileDiff> files;
  FileDiff current;
  bool have_file = false;

  auto flush_file = [&] {
    if (have_file && !current.hunks.empty()) files.push_back(std::move(current));
    current = FileDiff{};
    have_file = false;
  };

  std::size_t i = 0;
  while (i < lines.size()) {
    const std::string& line = lines[i];

    if (starts_with(line, "diff --git ")) {
      flush_file();
      have_file = true;
      // Path falls out of the "+++ b/..." header below; keep the b-side of
      // this line as a fallback for diffs without file headers.
      auto pos = line.rfind(" b/");
      if (pos != std::string::npos) current.path = line.substr(pos + 3);
      ++i;
      continue;
    }
    if (starts_with(line, "--- ")) {
      if (!have_file) have_file = true;
      if (current.path.empty() && line.substr(4) != "/dev/null")
        current.path = strip_diff_path(line.substr(4));
      ++i;
      continue;
    }
    if (starts_with(line, "+++ ")) {
      have_file = true;
      if (line.substr(4) != "/dev/null") current.path = strip_diff_path(line.substr(4));
      ++i;
      continue;
    }

    if (starts_with(line, "@@")) {
      auto header = parse_hunk_header(line);
      if (!header) throw ParseError("malformed hunk header \"" + line + "\"", i + 1);
      if (!current.hunks.empty()) {
        const Hunk& prev = current.hunks.back();
        if (header->old_start <= prev.old_start || header->new_start <= prev.new_start)
          throw ParseError("hunk positions not strictly increasing", i + 1);
      }
      have_file = true;

      Hunk hunk;
      hunk.old_start = header->old_start;
      hunk.new_start = header->new_start;
      int old_left = header->old_count;
      int new_left = header->new_count;
      ++i;
      while (old_left > 0 || new_left > 0) {
        if (i >= lines.size())
          throw ParseError("hunk shorter than its header counts", i);
        const std::string& body = lines[i];
        if (starts_with(body, "\\")) {  // "\ No newline at end of file"
          ++i;
          continue;
        }
        if (body.empty() || body[0] == ' ') {
          hunk.lines.push_back({LineTag::context, body.empty() ? std::string{} : body.substr(1)});
          --old_left;
          --new_left;
        } else if (body[0] == '-') {
          hunk.lines.push_back({LineTag::deleted, body.substr(1)});
          --old_left;
        } else if (body[0] == '+') {
          hunk.lines.push_back({LineTag::added, body.substr(1)});
          --new_left;
        } else {
          throw ParseError("unexpected line inside hunk: \"" + body + "\"", i + 1);
        }
        if (old_left < 0 || new_left < 0)
          throw ParseError("hunk longer than its header counts", i + 1);
        ++i;
      }
      current.hunks.push_back(std::move(hunk));
      continue;
    }

    // Header noise between files ("index ...", "new file mode", ...).
    ++i;
  }
  flush_file();
  return files;
}

std::vector<CommitRecord> parse_commit_stream(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto lines = split_lines(buffer.str());

  std::vector<CommitRecord> commits;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (lines[i].empty()) {
      ++i;
      continue;
    }
    if (!starts_with(lines[i], "commit "))
      throw ParseError("expected \"commit <id>\"", i + 1);
    CommitRecord commit;
    commit.commit_id = lines[i].substr(7);
    if (commit.commit_id.empty()) throw ParseError("empty commit id", i + 1);
    ++i;

    if (i >= lines.size()) throw ParseError("missing timestamp line", i);
    {
      const std::string& ts = lines[i];
      const char* begin = ts.c_str();
      const char* end = begin + ts.size();
      while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
      auto [next, ec] = std::from_chars(begin, end, commit.timestamp);
      if (ec != std::errc{} || next != end)
        throw ParseError("timestamp is not an integer: \"" + ts + "\"", i + 1);
    }
    ++i;

    std::vector<std::string> message_lines;
    std::size_t diff_begin = i;
    while (diff_begin < lines.size() && !starts_with(lines[diff_begin], "diff --git ") &&
           !starts_with(lines[diff_begin], "commit ")) {
      message_lines.push_back(ascii_only(lines[diff_begin]));
      ++diff_begin;
    }
    while (!message_lines.empty() && message_lines.back().empty()) message_lines.pop_back();
    commit.message = join_lines(message_lines);

    std::size_t diff_end = diff_begin;
    while (diff_end < lines.size() && !starts_with(lines[diff_end], "commit ")) ++diff_end;
    if (diff_end > diff_begin) {
      std::string body;
      for (std::size_t k = diff_begin; k < diff_end; ++k) {
        body += lines[k];
        body += '\n';
      }
      commit.diffs = parse_unified_diff(body);
    }
    commits.push_back(std::move(commit));
    i = diff_end;
  }
  return commits;
}

KeywordSet extract_keywords(const CompilerDiagnostic& diagnostic) {
  KeywordSet set;
  const std::string& msg = diagnostic.message;
  std::size_t i = 0;
  while (i < msg.size()) {
    char open = msg[i];
    if (open != '\'' && open != '"' && open != '`') {
      ++i;
      continue;
    }
    const char close = (open == '`') ? '\'' : open;
    auto end = msg.find(close, i + 1);
    if (end == std::string::npos) break;
    std::string keyword = msg.substr(i + 1, end - i - 1);
    set.add(keyword);
    // "browser::IsIncognito()" also yields "browser" and "IsIncognito()".
    auto sep = keyword.rfind("::");
    if (sep != std::string::npos) {
      set.add(keyword.substr(0, sep));
      set.add(keyword.substr(sep + 2));
    }
    i = end + 1;
  }
  return set;
}

std::vector<UpstreamChange> collect_upstream_changes(const std::vector<CommitRecord>& commits,
                                                     const KeywordSet& keywords) {
  std::vector<UpstreamChange> changes;
  std::set<std::pair<std::string, std::string>> seen;

  auto trimmed_empty = [](const std::string& s) {
    return s.find_first_not_of(" \t\r\n\f\v") == std::string::npos;
  };

  for (const auto& commit : commits) {
    for (const auto& diff : commit.diffs) {
      for (const auto& hunk : diff.hunks) {
        for (std::size_t i = 0; i < hunk.lines.size(); ++i) {
          if (hunk.lines[i].tag != LineTag::deleted) continue;
          if (!keywords.matches(hunk.lines[i].text)) continue;

          std::vector<std::string> added;
          for (std::size_t j = i + 1; j < hunk.lines.size() && hunk.lines[j].tag == LineTag::added; ++j)
            added.push_back(hunk.lines[j].text);
          if (added.empty()) continue;

          UpstreamChange change{hunk.lines[i].text, join_lines(added)};
          if (trimmed_empty(change.before) || trimmed_empty(change.after)) continue;
          if (!seen.insert({change.before, change.after}).second) continue;
          changes.push_back(std::move(change));
        }
      }
    }
  }
  return changes;
}

std::optional<RepairCommit> find_repair_commit(
    const ConflictLocation& conflict, const std::vector<CommitRecord>& later_commits,
    const std::function<bool(const std::string&)>& diagnostic_absent) {
  for (const auto& commit : later_commits) {
    for (const auto& diff : commit.diffs) {
      if (diff.path != conflict.file) continue;
      for (const auto& hunk : diff.hunks) {
        bool deletes_conflict = false;
        std::optional<std::string> fix;
        for (const auto& line : hunk.lines) {
          if (line.tag == LineTag::deleted && line.text == conflict.line_text) deletes_conflict = true;
          if (line.tag == LineTag::added && !fix) fix = line.text;
        }
        if (!deletes_conflict || !fix) continue;
        if (diagnostic_absent && !diagnostic_absent(commit.commit_id)) continue;
        return RepairCommit{commit.commit_id, *fix};
      }
    }
  }
  return std::nullopt;
}

ConflictDescription curate(const CurationInput& input) {
  KeywordSet keywords = extract_keywords(input.diagnostic);
  if (keywords.empty())
    throw CurationError(CurationStage::keyword_extraction,
                        "no quoted keywords in diagnostic message for " + input.id);

  std::vector<UpstreamChange> changes = collect_upstream_changes(input.upstream_commits, keywords);
  if (changes.empty())
    throw CurationError(CurationStage::change_collection,
                        "no upstream change matches any keyword for " + input.id);

  ConflictDescription description;
  description.id = input.id;
  description.upstream_changes = std::move(changes);
  description.downstream_conflict = input.conflict.line_text;
  description.diagnostic = input.diagnostic;

  auto absent = input.diagnostic_absent ? input.diagnostic_absent
                                        : [](const std::string&) { return true; };
  if (auto repair = find_repair_commit(input.conflict, input.downstream_commits, absent))
    description.downstream_fix = first_line(repair->fix_first_line);

  validate(description, "curated description " + description.id);
  return description;
}

}  // namespace mergemend::diffmine
