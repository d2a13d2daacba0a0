#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mergemend/conflict_model.hpp"

namespace mergemend::stringmerge {

// A literal substring rewrite learned from one changed region of a
// character diff. new_text may be empty (pure deletion); old_text never is.
struct RewriteRule {
  std::string old_text;
  std::string new_text;

  bool operator==(const RewriteRule&) const = default;
};

// Learns rewrite rules from upstream change pairs. For each pair the
// character-level diff of (before, first line of after) is computed with
// whitespace preserved; every maximal changed region (a run of deletions
// plus the adjacent insertions) becomes one rule. Rules are deduplicated
// by (old, new) keeping the first occurrence and ordered longest old
// first, ties by first occurrence.
std::vector<RewriteRule> learn_rules(const std::vector<UpstreamChange>& pairs);

// Applies rules in order. Each rule replaces every occurrence of its old
// text in the still-unrewritten parts of the line; spans produced by an
// earlier rule are frozen and never rewritten again.
std::string apply_rules(std::string_view line, const std::vector<RewriteRule>& rules);

}  // namespace mergemend::stringmerge
