#include "mergemend/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include "mergemend/errors.hpp"

namespace mergemend::cli {

namespace {

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "backend",    "endpoint",   "credential_env", "replay_fixture", "format",
      "strategy",   "budget",     "trials",         "temperature",    "max_tokens",
      "stop",       "seed",       "eval_mode",      "shots",          "shot_fixture",
      "workers",    "parallelism", "safety_factor",
  };
  return keys;
}

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  try {
    if constexpr (std::is_floating_point_v<T>) return static_cast<T>(std::stod(value));
    else if constexpr (std::is_signed_v<T>) return static_cast<T>(std::stoll(value));
    else return static_cast<T>(std::stoull(value));
  } catch (const std::exception&) {
    throw Error("config key \"" + key + "\" has non-numeric value \"" + value + "\"");
  }
}

}  // namespace

const char* to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::remote: return "remote";
    case BackendKind::replay: return "replay";
    case BackendKind::rule_mock: return "rule_mock";
    case BackendKind::echo: return "echo";
  }
  return "rule_mock";
}

BackendKind backend_from_string(const std::string& name) {
  if (name == "remote") return BackendKind::remote;
  if (name == "replay") return BackendKind::replay;
  if (name == "rule_mock") return BackendKind::rule_mock;
  if (name == "echo") return BackendKind::echo;
  throw Error("unknown backend: " + name);
}

void RunConfig::validate() const {
  if (backend == BackendKind::remote) {
    if (endpoint.empty()) throw Error("remote backend requires an endpoint URL");
    if (credential_env.empty()) throw Error("remote backend requires credential_env");
  }
  if (backend == BackendKind::replay && replay_fixture.empty())
    throw Error("replay backend requires replay_fixture");
  if (trials < 1) throw Error("trials must be at least 1");
  if (max_tokens < 1) throw Error("max_tokens must be at least 1");
  if (budget < 1) throw Error("budget must be at least 1");
  if (safety_factor < 1.0) throw Error("safety_factor must be >= 1");
  if (shots < 0) throw Error("shots must be >= 0");
}

void apply_key(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "backend") config.backend = backend_from_string(value);
  else if (key == "endpoint") config.endpoint = value;
  else if (key == "credential_env") config.credential_env = value;
  else if (key == "replay_fixture") config.replay_fixture = value;
  else if (key == "format") config.format = prompt::format_from_string(value);
  else if (key == "strategy") config.strategy = prompt::strategy_from_string(value);
  else if (key == "budget") config.budget = parse_number<std::size_t>(key, value);
  else if (key == "trials") config.trials = parse_number<int>(key, value);
  else if (key == "temperature") config.temperature = parse_number<double>(key, value);
  else if (key == "max_tokens") config.max_tokens = parse_number<int>(key, value);
  else if (key == "stop") config.stop = parse_stop_list(value);
  else if (key == "seed") config.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "eval_mode") config.eval_mode = eval::eval_mode_from_string(value);
  else if (key == "shots") config.shots = parse_number<int>(key, value);
  else if (key == "shot_fixture") config.shot_fixture = value;
  else if (key == "workers") config.workers = std::max<std::size_t>(1, parse_number<std::size_t>(key, value));
  else if (key == "parallelism") config.parallelism = std::max<std::size_t>(1, parse_number<std::size_t>(key, value));
  else if (key == "safety_factor") config.safety_factor = parse_number<double>(key, value);
  else throw Error("unknown config key: " + key);
}

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());

  std::map<std::string, std::string> entries;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line is not \"key = value\"", line_number);
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    entries[key] = value;
  }
  return entries;
}

RunConfig resolve_config(const std::optional<std::filesystem::path>& file,
                         const std::map<std::string, std::string>& flag_overrides) {
  RunConfig config;

  if (file)
    for (const auto& [key, value] : parse_config_file(*file)) apply_key(config, key, value);

  for (const auto& key : config_keys()) {
    std::string env_name = "MERGEMEND_" + key;
    std::transform(env_name.begin(), env_name.end(), env_name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (const char* value = std::getenv(env_name.c_str())) apply_key(config, key, value);
  }

  for (const auto& [key, value] : flag_overrides) apply_key(config, key, value);

  config.validate();
  return config;
}

nlohmann::json to_json(const RunConfig& config) {
  return {
      {"backend", to_string(config.backend)},
      {"endpoint", config.endpoint},
      {"credential_env", config.credential_env},
      {"replay_fixture", config.replay_fixture},
      {"format", prompt::to_string(config.format)},
      {"strategy", prompt::to_string(config.strategy)},
      {"budget", config.budget},
      {"trials", config.trials},
      {"temperature", config.temperature},
      {"max_tokens", config.max_tokens},
      {"stop", config.stop},
      {"seed", config.seed},
      {"eval_mode", eval::to_string(config.eval_mode)},
      {"shots", config.shots},
      {"shot_fixture", config.shot_fixture},
      {"workers", config.workers},
      {"parallelism", config.parallelism},
      {"safety_factor", config.safety_factor},
  };
}

std::vector<std::string> parse_stop_list(const std::string& value) {
  std::vector<std::string> stop;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) stop.push_back(current);
    current.clear();
  };
  for (std::size_t i = 0; i < value.size(); ++i) {
    char c = value[i];
    if (c == '\\' && i + 1 < value.size()) {
      char next = value[++i];
      if (next == 'n') current += '\n';
      else if (next == 't') current += '\t';
      else current += next;
    } else if (c == ',') {
      flush();
    } else {
      current += c;
    }
  }
  flush();
  return stop;
}

std::string format_stop_list(const std::vector<std::string>& stop) {
  std::string out;
  for (std::size_t i = 0; i < stop.size(); ++i) {
    if (i) out += ',';
    for (char c : stop[i]) {
      if (c == '\n') out += "\\n";
      else if (c == '\t') out += "\\t";
      else if (c == '\\' || c == ',') { out += '\\'; out += c; }
      else out += c;
    }
  }
  return out;
}

}  // namespace mergemend::cli
