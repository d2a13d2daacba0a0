#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mergemend/evaluation.hpp"
#include "mergemend/prompt_engine.hpp"

namespace mergemend::cli {

enum class BackendKind { remote, replay, rule_mock, echo };

const char* to_string(BackendKind kind);
BackendKind backend_from_string(const std::string& name);

// Everything a run needs, embedded verbatim in run reports so results can
// be reproduced. Credential material never lives here, only the name of
// the environment variable that holds it.
struct RunConfig {
  BackendKind backend = BackendKind::rule_mock;
  std::string endpoint;
  std::string credential_env = "MERGEMEND_API_KEY";
  std::string replay_fixture;
  prompt::PromptFormat format = prompt::PromptFormat::semantic_diff;
  prompt::SelectionStrategy strategy = prompt::SelectionStrategy::maximal_distinct;
  std::size_t budget = prompt::kDefaultTokenBudget;
  int trials = 10;
  double temperature = 0.7;
  int max_tokens = 128;
  std::vector<std::string> stop = {"\nQuestion", "\n\n"};
  std::uint64_t seed = 0;
  eval::EvalMode eval_mode = eval::EvalMode::prefix_first_line;
  int shots = 1;
  std::string shot_fixture;  // description corpus to draw shots from; "" = built-in
  std::size_t workers = 1;
  std::size_t parallelism = 4;
  double safety_factor = 1.25;

  void validate() const;
};

// String form of every config key, used by the precedence pipeline and by
// `--set key=value` style overrides. Unknown keys throw.
void apply_key(RunConfig& config, const std::string& key, const std::string& value);

// Parses a "key = value" config file ('#' comments, blank lines ignored).
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

// Resolves the effective config: defaults, then file, then MERGEMEND_*
// environment variables, then explicit overrides (flags win).
RunConfig resolve_config(const std::optional<std::filesystem::path>& file,
                         const std::map<std::string, std::string>& flag_overrides);

nlohmann::json to_json(const RunConfig& config);

// Stop sequences in config strings are comma-separated with \n, \t and
// \\ escapes ("\\nQuestion,\\n\\n").
std::vector<std::string> parse_stop_list(const std::string& value);
std::string format_stop_list(const std::vector<std::string>& stop);

}  // namespace mergemend::cli
