#include "mergemend/lm_backend.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>

#include "mergemend/rng.hpp"
#include "mergemend/sha256.hpp"
#include "mergemend/stringmerge.hpp"

namespace mergemend::backend {

using nlohmann::json;

namespace {

std::string trim_spaces(const std::string& s) {
  auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

RemoteBackend::RemoteBackend(EndpointConfig config) : config_(std::move(config)) {
  const std::string& url = config_.url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw BackendError(BackendErrorKind::protocol, "endpoint URL has no scheme: " + url);
  auto path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) {
    scheme_host_ = url;
    path_ = "/";
  } else {
    scheme_host_ = url.substr(0, path_begin);
    path_ = url.substr(path_begin);
  }
}

std::string RemoteBackend::complete(const std::string& prompt, const CompletionParams& params) {
  json body = {
      {"prompt", prompt},
      {"max_tokens", params.max_tokens},
      {"temperature", params.temperature},
      {"stop", params.stop},
      {"n", 1},
  };

  httplib::Client client(scheme_host_);
  client.set_read_timeout(120, 0);
  httplib::Headers headers;
  if (!config_.credential_env.empty()) {
    if (const char* token = std::getenv(config_.credential_env.c_str()))
      headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  auto result = client.Post(path_, headers, body.dump(), "application/json");
  if (!result)
    throw BackendError(BackendErrorKind::transport,
                       "transport failure contacting " + scheme_host_ + ": " +
                           httplib::to_string(result.error()));

  if (result->status == 429) {
    std::optional<double> retry_after;
    if (result->has_header("Retry-After")) {
      try {
        retry_after = std::stod(result->get_header_value("Retry-After"));
      } catch (const std::exception&) {
      }
    }
    throw BackendError(BackendErrorKind::rate_limited, "rate limited by " + scheme_host_,
                       429, retry_after);
  }
  if (result->status < 200 || result->status >= 300)
    throw BackendError(BackendErrorKind::http_status,
                       "completion endpoint returned status " + std::to_string(result->status),
                       result->status);

  json response;
  try {
    response = json::parse(result->body);
  } catch (const json::parse_error& e) {
    throw BackendError(BackendErrorKind::protocol,
                       std::string("completion response is not JSON: ") + e.what());
  }
  if (!response.contains("choices") || !response["choices"].is_array() ||
      response["choices"].empty())
    throw BackendError(BackendErrorKind::protocol, "completion response has no choices");
  const json& first = response["choices"][0];
  if (!first.contains("text") || !first["text"].is_string())
    throw BackendError(BackendErrorKind::protocol, "completion choice has no text");
  return first["text"].get<std::string>();
}

void ReplayBackend::load(std::istream& fixture) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(fixture, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed replay fixture line: ") + e.what(), line_number);
    }
    if (!record.contains("prompt_sha256") || !record.contains("completions"))
      throw SchemaError("replay fixture line " + std::to_string(line_number) +
                        " needs prompt_sha256 and completions");
    Entry entry;
    for (const auto& text : record["completions"]) entry.completions.push_back(text.get<std::string>());
    entries_[record["prompt_sha256"].get<std::string>()] = std::move(entry);
  }
}

ReplayBackend::ReplayBackend(std::istream& fixture) { load(fixture); }

ReplayBackend::ReplayBackend(const std::filesystem::path& fixture_path) {
  std::ifstream in(fixture_path);
  if (!in) throw IoError("cannot open replay fixture " + fixture_path.string());
  load(in);
}

std::string ReplayBackend::complete(const std::string& prompt, const CompletionParams&) {
  const std::string digest = sha256_hex(prompt);
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = entries_.find(digest);
  if (it == entries_.end())
    throw BackendError(BackendErrorKind::fixture, "no recorded completions for prompt " + digest);
  Entry& entry = it->second;
  if (entry.cursor >= entry.completions.size())
    throw BackendError(BackendErrorKind::fixture,
                       "recorded completions exhausted for prompt " + digest);
  return entry.completions[entry.cursor++];
}

std::string RuleMockBackend::complete(const std::string& prompt, const CompletionParams&) {
  prompt::ParsedPrompt parsed;
  try {
    parsed = prompt::parse_prompt(prompt, prompt::PromptFormat::semantic_diff);
  } catch (const ParseError&) {
    return "";
  }
  auto rules = stringmerge::learn_rules(parsed.query.pairs);
  std::string result = stringmerge::apply_rules(parsed.query.conflict, rules);
  return "+" + result + "\n\nQuestion:";
}

std::string EchoBackend::complete(const std::string& prompt, const CompletionParams&) {
  try {
    auto parsed = prompt::parse_prompt(prompt, format_);
    if (format_ == prompt::PromptFormat::semantic_diff) return parsed.query.conflict;
    return join_lines(parsed.query.variant_a);
  } catch (const ParseError&) {
    return "";
  }
}

std::uint64_t derive_trial_seed(std::uint64_t seed, int trial) {
  return splitmix64_mix(seed ^ splitmix64_mix(static_cast<std::uint64_t>(trial) + 1));
}

std::vector<std::string> sample_n(CompletionBackend& backend, const std::string& prompt,
                                  const CompletionParams& params, std::size_t parallelism) {
  if (params.trials < 1) throw Error("trials must be at least 1");
  const std::size_t trials = static_cast<std::size_t>(params.trials);
  if (backend.sequential_only() || parallelism < 2) {
    std::vector<std::string> results;
    results.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      CompletionParams trial_params = params;
      if (params.seed) trial_params.seed = derive_trial_seed(*params.seed, static_cast<int>(t));
      results.push_back(backend.complete(prompt, trial_params));
    }
    return results;
  }

  std::vector<std::string> results(trials);
  std::vector<std::exception_ptr> errors(trials);
  for (std::size_t wave = 0; wave < trials; wave += parallelism) {
    const std::size_t wave_end = std::min(trials, wave + parallelism);
    std::vector<std::future<void>> inflight;
    for (std::size_t t = wave; t < wave_end; ++t) {
      inflight.push_back(std::async(std::launch::async, [&, t] {
        try {
          CompletionParams trial_params = params;
          if (params.seed) trial_params.seed = derive_trial_seed(*params.seed, static_cast<int>(t));
          results[t] = backend.complete(prompt, trial_params);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      }));
    }
    for (auto& f : inflight) f.wait();
    for (std::size_t t = wave; t < wave_end; ++t)
      if (errors[t]) std::rethrow_exception(errors[t]);
  }
  return results;
}

std::string parse_resolution(std::string_view completion, prompt::PromptFormat format,
                             const std::vector<std::string>& stop) {
  std::string text(completion);
  std::size_t cut = text.size();
  for (const auto& marker : stop) {
    if (marker.empty()) continue;
    auto pos = text.find(marker);
    if (pos != std::string::npos) cut = std::min(cut, pos);
  }
  text.resize(cut);

  if (format == prompt::PromptFormat::semantic_diff) {
    std::string line = trim_spaces(first_line(text));
    if (!line.empty() && line[0] == '+') line = trim_spaces(line.substr(1));
    return line;
  }

  auto begin = text.find_first_not_of("\r\n");
  if (begin == std::string::npos) return {};
  auto end = text.find_last_not_of("\r\n");
  return text.substr(begin, end - begin + 1);
}

}  // namespace mergemend::backend
