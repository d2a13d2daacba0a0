#include "mergemend/conflict_model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mergemend {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n\f\v");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(begin, end - begin + 1);
}

bool is_single_line(const std::string& s) { return s.find('\n') == std::string::npos; }

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

json parse_json(const std::string& text, std::size_t line_base = 0) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(),
                     line_base + line_of_offset(text, e.byte ? e.byte - 1 : 0));
  }
}

const json& require_key(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw SchemaError("missing required key \"" + std::string(key) + "\" in " + where);
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& value = require_key(obj, key, where);
  if (!value.is_string())
    throw SchemaError("key \"" + std::string(key) + "\" in " + where + " is not a string");
  return value.get<std::string>();
}

CompilerDiagnostic diagnostic_from_json(const json& obj, const std::string& where) {
  CompilerDiagnostic diag;
  diag.error_type = diagnostic_type_from_string(require_string(obj, "ErrorType", where));
  diag.message = require_string(obj, "Message", where);
  diag.file = obj.value("File", std::string{});
  diag.line = obj.value("Line", 0);
  return diag;
}

ConflictDescription description_from_json(const json& obj, std::size_t index) {
  const std::string where = "description " + std::to_string(index);
  if (!obj.is_object()) throw SchemaError(where + " is not a JSON object");

  ConflictDescription description;
  description.id = obj.contains("Id") ? require_string(obj, "Id", where) : std::to_string(index);

  const json& changes = require_key(obj, "UpstreamChanges", where);
  if (!changes.is_array())
    throw SchemaError("key \"UpstreamChanges\" in " + where + " is not an array");
  for (const auto& pair : changes) {
    UpstreamChange change;
    change.before = require_string(pair, "Before", where);
    change.after = require_string(pair, "After", where);
    description.upstream_changes.push_back(std::move(change));
  }

  description.downstream_conflict = require_string(obj, "DownstreamConflict", where);
  if (obj.contains("DownstreamFix") && !obj["DownstreamFix"].is_null())
    description.downstream_fix = require_string(obj, "DownstreamFix", where);
  if (obj.contains("Diagnostic") && !obj["Diagnostic"].is_null())
    description.diagnostic = diagnostic_from_json(obj["Diagnostic"], where);

  validate(description, where);
  return description;
}

json description_to_json(const ConflictDescription& description) {
  json obj;
  obj["Id"] = description.id;
  json changes = json::array();
  for (const auto& change : description.upstream_changes)
    changes.push_back({{"Before", change.before}, {"After", change.after}});
  obj["UpstreamChanges"] = std::move(changes);
  obj["DownstreamConflict"] = description.downstream_conflict;
  if (description.downstream_fix) obj["DownstreamFix"] = *description.downstream_fix;
  if (description.diagnostic) {
    obj["Diagnostic"] = {{"ErrorType", to_string(description.diagnostic->error_type)},
                         {"Message", description.diagnostic->message},
                         {"File", description.diagnostic->file},
                         {"Line", description.diagnostic->line}};
  }
  return obj;
}

}  // namespace

const char* to_string(DiagnosticType type) {
  switch (type) {
    case DiagnosticType::err_no_member: return "err_no_member";
    case DiagnosticType::err_no_member_suggest: return "err_no_member_suggest";
    case DiagnosticType::err_undeclared_var_use_suggest: return "err_undeclared_var_use_suggest";
    case DiagnosticType::err_undeclared_use_suggest: return "err_undeclared_use_suggest";
    case DiagnosticType::other: break;
  }
  return "other";
}

DiagnosticType diagnostic_type_from_string(const std::string& name) {
  if (name == "err_no_member") return DiagnosticType::err_no_member;
  if (name == "err_no_member_suggest") return DiagnosticType::err_no_member_suggest;
  if (name == "err_undeclared_var_use_suggest") return DiagnosticType::err_undeclared_var_use_suggest;
  if (name == "err_undeclared_use_suggest") return DiagnosticType::err_undeclared_use_suggest;
  return DiagnosticType::other;
}

void validate(const ConflictDescription& description, const std::string& where) {
  for (std::size_t i = 0; i < description.upstream_changes.size(); ++i) {
    const auto& change = description.upstream_changes[i];
    const std::string pair_where = where + ", change " + std::to_string(i);
    if (trim(change.before).empty())
      throw SchemaError("\"Before\" is empty after trimming in " + pair_where);
    if (trim(change.after).empty())
      throw SchemaError("\"After\" is empty after trimming in " + pair_where);
    if (!is_single_line(change.before))
      throw SchemaError("\"Before\" spans multiple lines in " + pair_where);
  }
  if (!is_single_line(description.downstream_conflict))
    throw SchemaError("\"DownstreamConflict\" is not exactly one line in " + where);
  if (description.downstream_fix && !is_single_line(*description.downstream_fix))
    throw SchemaError("\"DownstreamFix\" is not exactly one line in " + where);
}

void validate(const TextualConflict& conflict, const std::string& where) {
  if (conflict.variant_a.empty() && conflict.variant_b.empty())
    throw SchemaError("variant A and variant B are both empty in " + where);
}

void validate(const EvalRecord& record, const std::string& where) {
  if (record.trial_outcomes.empty())
    throw SchemaError("no trial outcomes in " + where);
  if (record.trial_outcomes.size() != record.candidates.size())
    throw SchemaError("trial_outcomes and candidates differ in length in " + where);
}

std::vector<ConflictDescription> load_conflict_descriptions(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::vector<ConflictDescription> descriptions;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return descriptions;

  if (text[first] == '[') {
    json array = parse_json(text);
    for (std::size_t i = 0; i < array.size(); ++i)
      descriptions.push_back(description_from_json(array[i], i));
    return descriptions;
  }

  // JSON-lines: one object per non-empty line.
  std::istringstream lines(text);
  std::string line;
  std::size_t line_number = 0;
  std::size_t index = 0;
  while (std::getline(lines, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    descriptions.push_back(description_from_json(parse_json(line, line_number - 1), index++));
  }
  return descriptions;
}

std::vector<ConflictDescription> load_conflict_descriptions_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return load_conflict_descriptions(in);
}

void save_conflict_descriptions(const std::vector<ConflictDescription>& descriptions, std::ostream& out) {
  json array = json::array();
  for (const auto& description : descriptions) array.push_back(description_to_json(description));
  out << array.dump(4) << '\n';
}

void save_conflict_descriptions_file(const std::vector<ConflictDescription>& descriptions,
                                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save_conflict_descriptions(descriptions, out);
}

std::vector<TextualConflict> load_textual_conflicts_marker(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }

  std::vector<TextualConflict> conflicts;
  std::size_t i = 0;
  auto starts_with = [](const std::string& s, const char* prefix) { return s.rfind(prefix, 0) == 0; };

  while (i < lines.size()) {
    if (trim(lines[i]).empty()) {
      ++i;
      continue;
    }
    if (!starts_with(lines[i], "<<<<<<<"))
      throw ParseError("expected \"<<<<<<<\" to open a conflict block", i + 1);
    const std::size_t open_line = i;
    ++i;

    TextualConflict conflict;
    conflict.id = std::to_string(conflicts.size());

    while (i < lines.size() && !starts_with(lines[i], "|||||||") && !starts_with(lines[i], "======="))
      conflict.variant_a.push_back(lines[i++]);
    if (i < lines.size() && starts_with(lines[i], "|||||||")) {
      ++i;
      while (i < lines.size() && !starts_with(lines[i], "======="))
        conflict.base.push_back(lines[i++]);
    }
    if (i >= lines.size() || !starts_with(lines[i], "======="))
      throw ParseError("conflict block opened here has no \"=======\" separator", open_line + 1);
    ++i;
    while (i < lines.size() && !starts_with(lines[i], ">>>>>>>"))
      conflict.variant_b.push_back(lines[i++]);
    if (i >= lines.size())
      throw ParseError("conflict block opened here has no \">>>>>>>\" terminator", open_line + 1);
    ++i;

    if (i >= lines.size() || trim(lines[i]) != "Answer:")
      throw ParseError("expected \"Answer:\" after conflict block", std::min(i, lines.size() - 1) + 1);
    ++i;
    while (i < lines.size() && !trim(lines[i]).empty())
      conflict.resolution.push_back(lines[i++]);

    validate(conflict, "record " + conflict.id);
    conflicts.push_back(std::move(conflict));
  }
  return conflicts;
}

std::vector<TextualConflict> load_textual_conflicts_tuples(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());

  auto read_lines = [](const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("missing tuple file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
    return lines;
  };

  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());

  std::vector<TextualConflict> conflicts;
  for (const auto& dir : dirs) {
    TextualConflict conflict;
    conflict.id = dir.filename().string();
    conflict.variant_a = read_lines(dir / "a.txt");
    conflict.variant_b = read_lines(dir / "b.txt");
    conflict.resolution = read_lines(dir / "r.txt");
    if (fs::exists(dir / "base.txt")) conflict.base = read_lines(dir / "base.txt");
    validate(conflict, "example " + conflict.id);
    conflicts.push_back(std::move(conflict));
  }
  return conflicts;
}

std::vector<TextualConflict> load_textual_conflicts(const std::filesystem::path& path, TextualLayout layout) {
  if (layout == TextualLayout::tuple_dir) return load_textual_conflicts_tuples(path);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return load_textual_conflicts_marker(in);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string text;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) text += '\n';
    text += lines[i];
  }
  return text;
}

std::string first_line(const std::string& text) {
  auto pos = text.find('\n');
  return pos == std::string::npos ? text : text.substr(0, pos);
}

}  // namespace mergemend
