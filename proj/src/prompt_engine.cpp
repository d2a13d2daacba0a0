#include "mergemend/prompt_engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

#include "mergemend/edit_sequence.hpp"
#include "mergemend/rng.hpp"

namespace mergemend::prompt {

namespace {

constexpr const char* kMarkerOpen = "<<<<<<< HEAD";
constexpr const char* kMarkerBase = "|||||||";
constexpr const char* kMarkerMid = "=======";
constexpr const char* kMarkerClose = ">>>>>>>";

void append_lines(std::string& out, const std::vector<std::string>& lines) {
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
}

std::string semantic_question(const std::vector<UpstreamChange>& pairs, const std::string& conflict) {
  std::string out = "Question:\n";
  for (const auto& pair : pairs) out += render_pair_block(pair);
  out += '-';
  out += conflict;
  out += "\n\nAnswer:\n";
  return out;
}

std::string markers_question(const TextualConflict& example) {
  std::string out = "Question:\n";
  out += kMarkerOpen;
  out += '\n';
  append_lines(out, example.variant_a);
  if (!example.base.empty()) {
    out += kMarkerBase;
    out += '\n';
    append_lines(out, example.base);
  }
  out += kMarkerMid;
  out += '\n';
  append_lines(out, example.variant_b);
  out += kMarkerClose;
  out += "\n\nAnswer:\n";
  return out;
}

std::string tuple_question(const TextualConflict& example) {
  std::string out = "Questions:\na.js:\n";
  append_lines(out, example.variant_a);
  out += "base.js:\n";
  append_lines(out, example.base);
  out += "b.js:\n";
  append_lines(out, example.variant_b);
  out += "\nAnswers:\n";
  return out;
}

std::string block_answer(const std::vector<std::string>& resolution) {
  std::string out;
  append_lines(out, resolution);
  out += '\n';
  return out;
}

}  // namespace

const char* to_string(PromptFormat format) {
  switch (format) {
    case PromptFormat::semantic_diff: return "semantic_diff";
    case PromptFormat::conflict_markers: return "conflict_markers";
    case PromptFormat::merge_tuple: return "merge_tuple";
  }
  return "semantic_diff";
}

const char* to_string(SelectionStrategy strategy) {
  switch (strategy) {
    case SelectionStrategy::first_pair: return "first_pair";
    case SelectionStrategy::maximal_plain: return "maximal_plain";
    case SelectionStrategy::maximal_distinct: return "maximal_distinct";
  }
  return "maximal_distinct";
}

PromptFormat format_from_string(const std::string& name) {
  if (name == "semantic_diff") return PromptFormat::semantic_diff;
  if (name == "conflict_markers") return PromptFormat::conflict_markers;
  if (name == "merge_tuple") return PromptFormat::merge_tuple;
  throw Error("unknown prompt format: " + name);
}

SelectionStrategy strategy_from_string(const std::string& name) {
  if (name == "first_pair") return SelectionStrategy::first_pair;
  if (name == "maximal_plain") return SelectionStrategy::maximal_plain;
  if (name == "maximal_distinct") return SelectionStrategy::maximal_distinct;
  throw Error("unknown selection strategy: " + name);
}

std::size_t TokenEstimator::scaled(std::size_t raw_count) const {
  return static_cast<std::size_t>(std::ceil(static_cast<double>(raw_count) * safety_factor));
}

TokenEstimator default_token_estimator() {
  TokenEstimator estimator;
  estimator.safety_factor = 1.25;
  estimator.count = [](std::string_view text) {
    std::size_t tokens = 0;
    bool in_word = false;
    for (unsigned char c : text) {
      if (std::isalnum(c) || c == '_') {
        if (!in_word) {
          ++tokens;
          in_word = true;
        }
      } else {
        in_word = false;
        if (!std::isspace(c)) ++tokens;
      }
    }
    return tokens;
  };
  return estimator;
}

std::string render_pair_block(const UpstreamChange& pair) {
  std::string out = "--";
  out += pair.before;
  out += '\n';
  for (const auto& line : split_lines(pair.after)) {
    out += "++";
    out += line;
    out += '\n';
  }
  out += '\n';
  return out;
}

Shot make_shot(PromptFormat format, const ConflictDescription& example) {
  if (format != PromptFormat::semantic_diff)
    throw RenderError(std::string(to_string(format)) + " cannot render a conflict description");
  if (!example.downstream_fix)
    throw RenderError("description " + example.id + " has no ground-truth fix to render as a shot");
  Shot shot;
  shot.question = semantic_question(example.upstream_changes, example.downstream_conflict);
  shot.answer = "+" + *example.downstream_fix + "\n\n";
  return shot;
}

Shot make_shot(PromptFormat format, const TextualConflict& example) {
  if (format == PromptFormat::semantic_diff)
    throw RenderError("semantic_diff cannot render a textual conflict");
  if (example.resolution.empty())
    throw RenderError("conflict " + example.id + " has no resolution to render as a shot");
  Shot shot;
  shot.question = format == PromptFormat::conflict_markers ? markers_question(example)
                                                           : tuple_question(example);
  shot.answer = block_answer(example.resolution);
  return shot;
}

std::string render_shot(PromptFormat format, const ConflictDescription& example) {
  Shot shot = make_shot(format, example);
  return shot.question + shot.answer;
}

std::string render_shot(PromptFormat format, const TextualConflict& example) {
  Shot shot = make_shot(format, example);
  return shot.question + shot.answer;
}

std::string build_query(PromptFormat format, const ConflictDescription& target,
                        const std::vector<UpstreamChange>& pairs) {
  if (format != PromptFormat::semantic_diff)
    throw RenderError(std::string(to_string(format)) + " cannot render a conflict description");
  return semantic_question(pairs, target.downstream_conflict);
}

std::string build_query(PromptFormat format, const ConflictDescription& target) {
  return build_query(format, target, target.upstream_changes);
}

std::string build_query(PromptFormat format, const TextualConflict& target) {
  if (format == PromptFormat::semantic_diff)
    throw RenderError("semantic_diff cannot render a textual conflict");
  return format == PromptFormat::conflict_markers ? markers_question(target)
                                                  : tuple_question(target);
}

std::vector<UpstreamChange> select_pairs(const ConflictDescription& description,
                                         SelectionStrategy strategy, std::size_t budget,
                                         const TokenEstimator& estimator,
                                         std::size_t fixed_overhead) {
  const auto& pairs = description.upstream_changes;
  if (pairs.empty()) return {};

  auto pair_cost = [&](const UpstreamChange& pair) {
    return estimator.count(render_pair_block(pair));
  };

  if (strategy == SelectionStrategy::first_pair) {
    const std::size_t total = estimator.scaled(fixed_overhead + pair_cost(pairs.front()));
    if (total > budget)
      throw SelectionError("first pair of " + description.id + " does not fit", total - budget);
    return {pairs.front()};
  }

  // maximal_plain keeps the longest fitting prefix in curation order;
  // maximal_distinct does the same over the pattern-deduplicated list,
  // scanning lazily so huge same-pattern tails cost nothing.
  const bool distinct = strategy == SelectionStrategy::maximal_distinct;
  std::vector<UpstreamChange> kept;
  std::unordered_set<std::string> seen_patterns;
  std::size_t raw = fixed_overhead;
  for (const auto& pair : pairs) {
    if (distinct && !seen_patterns.insert(editseq::change_pattern(pair)).second) continue;
    const std::size_t cost = pair_cost(pair);
    if (estimator.scaled(raw + cost) > budget) {
      if (kept.empty())
        throw SelectionError("first pair of " + description.id + " does not fit",
                             estimator.scaled(raw + cost) - budget);
      break;
    }
    raw += cost;
    kept.push_back(pair);
  }
  return kept;
}

Prompt assemble(const std::vector<Shot>& shots, const ConflictDescription& description,
                PromptFormat format, SelectionStrategy strategy,
                std::size_t budget, const TokenEstimator& estimator) {
  std::string shots_text;
  for (const auto& shot : shots) {
    shots_text += shot.question;
    shots_text += shot.answer;
  }

  const std::string skeleton = build_query(format, description, {});
  const std::size_t fixed_overhead = estimator.count(shots_text) + estimator.count(skeleton);
  std::vector<UpstreamChange> selected =
      select_pairs(description, strategy, budget, estimator, fixed_overhead);

  // The additive estimate above is exact for line-local counters; re-check
  // the real text and drop pairs if a non-additive estimator disagrees.
  Prompt prompt;
  prompt.shots_used = shots.size();
  for (;;) {
    prompt.text = shots_text + build_query(format, description, selected);
    prompt.token_estimate = estimator.estimate(prompt.text);
    prompt.pairs_used = selected.size();
    if (prompt.token_estimate <= budget) return prompt;
    if (selected.empty())
      throw AssemblyError("shots and query skeleton alone exceed the budget of " +
                          std::to_string(budget) + " tokens (estimate " +
                          std::to_string(prompt.token_estimate) + ") for " + description.id);
    selected.pop_back();
  }
}

Prompt assemble(const std::vector<Shot>& shots, const TextualConflict& target,
                PromptFormat format, std::size_t budget, const TokenEstimator& estimator) {
  Prompt prompt;
  for (const auto& shot : shots) {
    prompt.text += shot.question;
    prompt.text += shot.answer;
  }
  prompt.text += build_query(format, target);
  prompt.token_estimate = estimator.estimate(prompt.text);
  prompt.shots_used = shots.size();
  if (prompt.token_estimate > budget)
    throw AssemblyError("prompt for " + target.id + " exceeds the budget of " +
                        std::to_string(budget) + " tokens (estimate " +
                        std::to_string(prompt.token_estimate) + ")");
  return prompt;
}

namespace {

bool line_starts_with(const std::string& line, std::string_view prefix) {
  return line.size() >= prefix.size() && line.compare(0, prefix.size(), prefix) == 0;
}

// Collects answer lines after an answer cue; returns true when this block
// ended the prompt (i.e. it was the query).
bool read_answer(const std::vector<std::string>& lines, std::size_t& i, ParsedQuestion& question) {
  if (i >= lines.size()) return true;  // cue was the last line: query
  std::vector<std::string> answer_lines;
  while (i < lines.size() && !lines[i].empty()) answer_lines.push_back(lines[i++]);
  while (i < lines.size() && lines[i].empty()) ++i;
  question.answer = join_lines(answer_lines);
  return false;
}

ParsedQuestion parse_semantic_question(const std::vector<std::string>& lines, std::size_t& i) {
  if (i >= lines.size() || lines[i] != "Question:")
    throw ParseError("expected \"Question:\"", i + 1);
  ++i;

  std::vector<std::vector<std::string>> groups;
  std::vector<std::string> group;
  while (i < lines.size() && lines[i] != "Answer:") {
    if (lines[i].empty()) {
      if (!group.empty()) groups.push_back(std::move(group));
      group.clear();
    } else {
      group.push_back(lines[i]);
    }
    ++i;
  }
  if (i >= lines.size()) throw ParseError("question without \"Answer:\" cue", i);
  ++i;  // consume "Answer:"
  if (!group.empty()) groups.push_back(std::move(group));

  if (groups.empty()) throw ParseError("question has no conflict line", i);
  ParsedQuestion question;
  const auto& conflict_group = groups.back();
  if (conflict_group.size() != 1 || conflict_group[0].empty() || conflict_group[0][0] != '-')
    throw ParseError("last question block is not a single \"-\" conflict line", i);
  question.conflict = conflict_group[0].substr(1);

  for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
    const auto& pair_group = groups[g];
    if (pair_group.size() < 2 || !line_starts_with(pair_group[0], "--"))
      throw ParseError("malformed --/++ pair block", i);
    UpstreamChange pair;
    pair.before = pair_group[0].substr(2);
    std::vector<std::string> after;
    for (std::size_t k = 1; k < pair_group.size(); ++k) {
      if (!line_starts_with(pair_group[k], "++"))
        throw ParseError("malformed ++ line in pair block", i);
      after.push_back(pair_group[k].substr(2));
    }
    pair.after = join_lines(after);
    question.pairs.push_back(std::move(pair));
  }
  return question;
}

ParsedQuestion parse_markers_question(const std::vector<std::string>& lines, std::size_t& i) {
  if (i >= lines.size() || lines[i] != "Question:")
    throw ParseError("expected \"Question:\"", i + 1);
  ++i;
  if (i >= lines.size() || !line_starts_with(lines[i], "<<<<<<<"))
    throw ParseError("expected \"<<<<<<<\" after \"Question:\"", i + 1);
  ++i;

  ParsedQuestion question;
  while (i < lines.size() && !line_starts_with(lines[i], kMarkerBase) &&
         !line_starts_with(lines[i], kMarkerMid))
    question.variant_a.push_back(lines[i++]);
  if (i < lines.size() && line_starts_with(lines[i], kMarkerBase)) {
    ++i;
    while (i < lines.size() && !line_starts_with(lines[i], kMarkerMid))
      question.base.push_back(lines[i++]);
  }
  if (i >= lines.size()) throw ParseError("conflict block has no \"=======\"", i);
  ++i;
  while (i < lines.size() && !line_starts_with(lines[i], kMarkerClose))
    question.variant_b.push_back(lines[i++]);
  if (i >= lines.size()) throw ParseError("conflict block has no \">>>>>>>\"", i);
  ++i;
  if (i < lines.size() && lines[i].empty()) ++i;
  if (i >= lines.size() || lines[i] != "Answer:")
    throw ParseError("expected \"Answer:\" after conflict block", i + 1);
  ++i;
  return question;
}

ParsedQuestion parse_tuple_question(const std::vector<std::string>& lines, std::size_t& i) {
  auto expect = [&](const char* label) {
    if (i >= lines.size() || lines[i] != label)
      throw ParseError(std::string("expected \"") + label + "\"", i + 1);
    ++i;
  };
  expect("Questions:");
  expect("a.js:");
  ParsedQuestion question;
  while (i < lines.size() && lines[i] != "base.js:") question.variant_a.push_back(lines[i++]);
  expect("base.js:");
  while (i < lines.size() && lines[i] != "b.js:") question.base.push_back(lines[i++]);
  expect("b.js:");
  while (i < lines.size() && !lines[i].empty()) question.variant_b.push_back(lines[i++]);
  if (i < lines.size() && lines[i].empty()) ++i;
  expect("Answers:");
  return question;
}

}  // namespace

ParsedPrompt parse_prompt(const std::string& text, PromptFormat format) {
  const auto lines = split_lines(text);
  ParsedPrompt parsed;
  std::size_t i = 0;
  bool saw_query = false;
  while (i < lines.size()) {
    if (lines[i].empty()) {
      ++i;
      continue;
    }
    ParsedQuestion question;
    switch (format) {
      case PromptFormat::semantic_diff: question = parse_semantic_question(lines, i); break;
      case PromptFormat::conflict_markers: question = parse_markers_question(lines, i); break;
      case PromptFormat::merge_tuple: question = parse_tuple_question(lines, i); break;
    }
    if (read_answer(lines, i, question)) {
      parsed.query = std::move(question);
      saw_query = true;
      break;
    }
    parsed.shots.push_back(std::move(question));
  }
  if (!saw_query) {
    // A prompt that ends with a completed shot has no open query; treat the
    // last shot as the query only if nothing followed the cue.
    if (parsed.shots.empty()) throw ParseError("prompt contains no question", 1);
    throw ParseError("prompt does not end with an open query", lines.size());
  }
  return parsed;
}

ShotPick pick_random_shots(const std::vector<TextualConflict>& headers,
                           const std::vector<TextualConflict>& macros, std::uint64_t seed,
                           std::size_t header_count, std::size_t macro_count) {
  SplitMix rng(seed);
  ShotPick pick;

  auto take = [&](const std::vector<TextualConflict>& pool, std::size_t count,
                  std::unordered_set<const TextualConflict*>& chosen) {
    for (std::size_t index : rng.sample_indices(pool.size(), count)) {
      pick.shots.push_back(pool[index]);
      chosen.insert(&pool[index]);
    }
  };

  std::unordered_set<const TextualConflict*> chosen;
  take(headers, header_count, chosen);
  take(macros, macro_count, chosen);
  for (const auto& pool : {&headers, &macros})
    for (const auto& example : *pool)
      if (!chosen.count(&example)) pick.evaluation.push_back(example);
  return pick;
}

ShotPick pick_shots_by_id(const std::vector<TextualConflict>& pool,
                          const std::vector<std::string>& ids) {
  ShotPick pick;
  std::unordered_set<std::string> wanted(ids.begin(), ids.end());
  for (const auto& id : ids) {
    auto it = std::find_if(pool.begin(), pool.end(),
                           [&](const TextualConflict& c) { return c.id == id; });
    if (it == pool.end()) throw Error("shot id not found in dataset: " + id);
    pick.shots.push_back(*it);
  }
  for (const auto& example : pool)
    if (!wanted.count(example.id)) pick.evaluation.push_back(example);
  return pick;
}

}  // namespace mergemend::prompt
