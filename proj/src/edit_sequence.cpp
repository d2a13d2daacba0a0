#include "mergemend/edit_sequence.hpp"

#include <unordered_set>

#include "mergemend/errors.hpp"

namespace mergemend::editseq {

std::vector<EditOp> diff_script(std::string_view a, std::string_view b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();

  // cost[i][j] = minimal insert+delete count to turn a[i..] into b[j..].
  std::vector<int> cost((n + 1) * (m + 1));
  auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };

  for (std::size_t j = 0; j <= m; ++j) cost[at(n, j)] = static_cast<int>(m - j);
  for (std::size_t i = 0; i <= n; ++i) cost[at(i, m)] = static_cast<int>(n - i);
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      int best = 1 + std::min(cost[at(i + 1, j)], cost[at(i, j + 1)]);
      if (a[i] == b[j]) best = std::min(best, cost[at(i + 1, j + 1)]);
      cost[at(i, j)] = best;
    }
  }

  std::vector<EditOp> script;
  script.reserve(n + m);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[i] == b[j] && cost[at(i + 1, j + 1)] == cost[at(i, j)]) {
      script.push_back({'=', a[i]});
      ++i;
      ++j;
    } else if (i < n && cost[at(i + 1, j)] + 1 == cost[at(i, j)]) {
      script.push_back({'-', a[i]});
      ++i;
    } else {
      script.push_back({'+', b[j]});
      ++j;
    }
  }
  return script;
}

std::string script_symbols(const std::vector<EditOp>& script) {
  std::string symbols;
  symbols.reserve(script.size());
  for (const auto& op : script) symbols += op.symbol;
  return symbols;
}

std::string compress(std::string_view symbols) {
  std::string out;
  for (char c : symbols)
    if (out.empty() || out.back() != c) out += c;
  return out;
}

std::string strip_spaces(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text)
    if (c != ' ') out += c;
  return out;
}

std::string edit_sequence(std::string_view a, std::string_view b) {
  const std::string sa = strip_spaces(a);
  const std::string sb = strip_spaces(b);
  return compress(script_symbols(diff_script(sa, sb)));
}

std::string apply_script(const std::vector<EditOp>& script, std::string_view a) {
  std::string out;
  std::size_t i = 0;
  for (const auto& op : script) {
    switch (op.symbol) {
      case '=':
        if (i >= a.size() || a[i] != op.payload)
          throw Error("edit script does not match input at offset " + std::to_string(i));
        out += a[i++];
        break;
      case '-':
        if (i >= a.size() || a[i] != op.payload)
          throw Error("edit script does not match input at offset " + std::to_string(i));
        ++i;
        break;
      case '+':
        out += op.payload;
        break;
      default:
        throw Error(std::string("unknown edit op symbol '") + op.symbol + "'");
    }
  }
  if (i != a.size()) throw Error("edit script leaves unconsumed input");
  return out;
}

std::string change_pattern(const UpstreamChange& pair) {
  return edit_sequence(pair.before, first_line(pair.after));
}

std::vector<UpstreamChange> distinct_filter(const std::vector<UpstreamChange>& pairs) {
  std::vector<UpstreamChange> kept;
  std::unordered_set<std::string> seen;
  for (const auto& pair : pairs)
    if (seen.insert(change_pattern(pair)).second) kept.push_back(pair);
  return kept;
}

}  // namespace mergemend::editseq
