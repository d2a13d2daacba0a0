#include "mergemend/stringmerge.hpp"

#include <algorithm>

#include "mergemend/edit_sequence.hpp"

namespace mergemend::stringmerge {

namespace {

// Walks one script and appends a rule per maximal changed region.
void rules_from_script(const std::vector<editseq::EditOp>& script, std::vector<RewriteRule>& out) {
  std::size_t i = 0;
  while (i < script.size()) {
    if (script[i].symbol == '=') {
      ++i;
      continue;
    }
    std::string deleted;
    std::string inserted;
    while (i < script.size() && script[i].symbol == '-') deleted += script[i++].payload;
    while (i < script.size() && script[i].symbol == '+') inserted += script[i++].payload;
    if (!deleted.empty() && deleted != inserted)
      out.push_back({std::move(deleted), std::move(inserted)});
  }
}

}  // namespace

std::vector<RewriteRule> learn_rules(const std::vector<UpstreamChange>& pairs) {
  std::vector<RewriteRule> rules;
  for (const auto& pair : pairs)
    rules_from_script(editseq::diff_script(pair.before, first_line(pair.after)), rules);

  std::vector<RewriteRule> unique;
  for (auto& rule : rules)
    if (std::find(unique.begin(), unique.end(), rule) == unique.end())
      unique.push_back(std::move(rule));

  std::stable_sort(unique.begin(), unique.end(), [](const RewriteRule& a, const RewriteRule& b) {
    return a.old_text.size() > b.old_text.size();
  });
  return unique;
}

std::string apply_rules(std::string_view line, const std::vector<RewriteRule>& rules) {
  // Segments alternate between rewritable input text and frozen rule output.
  struct Segment {
    std::string text;
    bool frozen;
  };
  std::vector<Segment> segments{{std::string(line), false}};

  for (const auto& rule : rules) {
    if (rule.old_text.empty()) continue;
    std::vector<Segment> next;
    for (auto& segment : segments) {
      if (segment.frozen || segment.text.find(rule.old_text) == std::string::npos) {
        next.push_back(std::move(segment));
        continue;
      }
      std::size_t pos = 0;
      while (pos < segment.text.size()) {
        auto hit = segment.text.find(rule.old_text, pos);
        if (hit == std::string::npos) break;
        if (hit > pos) next.push_back({segment.text.substr(pos, hit - pos), false});
        next.push_back({rule.new_text, true});
        pos = hit + rule.old_text.size();
      }
      if (pos < segment.text.size()) next.push_back({segment.text.substr(pos), false});
    }
    segments = std::move(next);
  }

  std::string out;
  for (const auto& segment : segments) out += segment.text;
  return out;
}

}  // namespace mergemend::stringmerge
