#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mergemend/conflict_model.hpp"
#include "mergemend/errors.hpp"

namespace mergemend::prompt {

// The three wire formats a prompt can be rendered in. semantic_diff is the
// --/++ pair format for conflict descriptions; conflict_markers and
// merge_tuple apply to textual conflicts.
enum class PromptFormat { semantic_diff, conflict_markers, merge_tuple };

enum class SelectionStrategy { first_pair, maximal_plain, maximal_distinct };

const char* to_string(PromptFormat format);
const char* to_string(SelectionStrategy strategy);
PromptFormat format_from_string(const std::string& name);
SelectionStrategy strategy_from_string(const std::string& name);

// A rendered example. `question` is everything up to and including the
// answer cue line ("Answer:\n" / "Answers:\n"); `answer` is the answer
// block with its trailing blank line. Full shot text = question + answer;
// a query is a question part alone.
struct Shot {
  std::string question;
  std::string answer;
};

struct Prompt {
  std::string text;
  std::size_t token_estimate = 0;
  std::size_t shots_used = 0;
  std::size_t pairs_used = 0;
};

// Pluggable token counter standing in for the model tokenizer. The count
// function must be monotone under concatenation; the safety factor biases
// the estimate upward so the true tokenizer never exceeds the budget.
struct TokenEstimator {
  std::function<std::size_t(std::string_view)> count;
  double safety_factor = 1.0;

  std::size_t scaled(std::size_t raw_count) const;
  std::size_t estimate(std::string_view text) const { return scaled(count(text)); }
};

// Counts maximal [A-Za-z0-9_] runs plus each individual non-whitespace
// punctuation character; safety factor 1.25.
TokenEstimator default_token_estimator();

inline constexpr std::size_t kDefaultTokenBudget = 2048;

class RenderError : public Error {
 public:
  using Error::Error;
};

class SelectionError : public Error {
 public:
  SelectionError(const std::string& what, std::size_t overflow)
      : Error(what + " (over budget by " + std::to_string(overflow) + " tokens)"),
        overflow_(overflow) {}
  std::size_t overflow() const { return overflow_; }

 private:
  std::size_t overflow_;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

// One --/++ pair block of the semantic format.
std::string render_pair_block(const UpstreamChange& pair);

// Shot rendering. Throws RenderError when the example has no ground truth
// (no fix / empty resolution) or the format cannot represent the example.
Shot make_shot(PromptFormat format, const ConflictDescription& example);
Shot make_shot(PromptFormat format, const TextualConflict& example);
std::string render_shot(PromptFormat format, const ConflictDescription& example);
std::string render_shot(PromptFormat format, const TextualConflict& example);

// Query rendering: same grammar as the shot but ending at the answer cue.
// The semantic overloads render exactly `pairs` (the selected subset).
std::string build_query(PromptFormat format, const ConflictDescription& target,
                        const std::vector<UpstreamChange>& pairs);
std::string build_query(PromptFormat format, const ConflictDescription& target);
std::string build_query(PromptFormat format, const TextualConflict& target);

// Picks the upstream pairs that go into the query. fixed_overhead is the
// raw token count of the shots plus the query skeleton. Throws
// SelectionError when even the first pair cannot fit.
std::vector<UpstreamChange> select_pairs(const ConflictDescription& description,
                                         SelectionStrategy strategy, std::size_t budget,
                                         const TokenEstimator& estimator,
                                         std::size_t fixed_overhead);

// Concatenates pre-rendered shots with the query for `description`,
// keeping token_estimate <= budget by shrinking the pair selection (never
// the shots). Throws AssemblyError when the shots and query skeleton alone
// overflow.
Prompt assemble(const std::vector<Shot>& shots, const ConflictDescription& description,
                PromptFormat format, SelectionStrategy strategy,
                std::size_t budget, const TokenEstimator& estimator);

// Textual-conflict prompts have no pair selection to shrink; overflow is
// an AssemblyError.
Prompt assemble(const std::vector<Shot>& shots, const TextualConflict& target,
                PromptFormat format, std::size_t budget, const TokenEstimator& estimator);

// Inverse of the renderers, used by the offline backends and round-trip
// tests. Content lines must be what the renderers emit (one source line
// per rendered line, no embedded blank lines).
struct ParsedQuestion {
  std::vector<UpstreamChange> pairs;  // semantic_diff
  std::string conflict;               // semantic_diff
  std::vector<std::string> variant_a;
  std::vector<std::string> base;
  std::vector<std::string> variant_b;
  std::optional<std::string> answer;  // raw answer block, no trailing blank
};

struct ParsedPrompt {
  std::vector<ParsedQuestion> shots;
  ParsedQuestion query;
};

ParsedPrompt parse_prompt(const std::string& text, PromptFormat format);

// Shot picking for textual datasets. Picked examples are removed from the
// evaluation remainder.
struct ShotPick {
  std::vector<TextualConflict> shots;
  std::vector<TextualConflict> evaluation;
};

// Seeded random choice of header_count + macro_count examples.
ShotPick pick_random_shots(const std::vector<TextualConflict>& headers,
                           const std::vector<TextualConflict>& macros, std::uint64_t seed,
                           std::size_t header_count = 5, std::size_t macro_count = 2);

// Fixed "representative" shot list by example id.
ShotPick pick_shots_by_id(const std::vector<TextualConflict>& pool,
                          const std::vector<std::string>& ids);

}  // namespace mergemend::prompt
