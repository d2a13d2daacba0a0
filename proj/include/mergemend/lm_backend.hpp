#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mergemend/errors.hpp"
#include "mergemend/prompt_engine.hpp"

namespace mergemend::backend {

struct CompletionParams {
  double temperature = 0.7;
  int max_tokens = 128;
  std::vector<std::string> stop = {"\nQuestion", "\n\n"};
  int trials = 10;
  std::optional<std::uint64_t> seed;
};

enum class BackendErrorKind { transport, http_status, rate_limited, protocol, fixture };

class BackendError : public Error {
 public:
  BackendError(BackendErrorKind kind, const std::string& what,
               std::optional<int> status = std::nullopt,
               std::optional<double> retry_after = std::nullopt)
      : Error(what), kind_(kind), status_(status), retry_after_(retry_after) {}

  BackendErrorKind kind() const { return kind_; }
  std::optional<int> status() const { return status_; }
  std::optional<double> retry_after_seconds() const { return retry_after_; }

 private:
  BackendErrorKind kind_;
  std::optional<int> status_;
  std::optional<double> retry_after_;
};

// The completion boundary. Implementations must be safe for concurrent
// complete() calls; deterministic backends return identical text for
// identical (prompt, params, seed).
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string complete(const std::string& prompt, const CompletionParams& params) = 0;
  // Backends whose responses depend on call order (the replay cursor)
  // return true so sample_n keeps their trials sequential.
  virtual bool sequential_only() const { return false; }
};

struct EndpointConfig {
  std::string url;             // e.g. "http://localhost:8080/v1/completions"
  std::string credential_env;  // environment variable holding the bearer token
};

// HTTP JSON completion client. Sends {"prompt", "max_tokens",
// "temperature", "stop", "n":1} and returns choices[0].text verbatim.
class RemoteBackend : public CompletionBackend {
 public:
  explicit RemoteBackend(EndpointConfig config);
  std::string complete(const std::string& prompt, const CompletionParams& params) override;

 private:
  EndpointConfig config_;
  std::string scheme_host_;  // "http://host:port"
  std::string path_;
};

// Replays recorded completions keyed by SHA-256 of the prompt. Fixture
// format: JSON-lines of {"prompt_sha256": ..., "completions": [...]}.
// Repeated calls for the same prompt walk the completion list in order.
class ReplayBackend : public CompletionBackend {
 public:
  explicit ReplayBackend(std::istream& fixture);
  explicit ReplayBackend(const std::filesystem::path& fixture_path);

  std::string complete(const std::string& prompt, const CompletionParams& params) override;
  bool sequential_only() const override { return true; }

 private:
  struct Entry {
    std::vector<std::string> completions;
    std::size_t cursor = 0;
  };

  void load(std::istream& fixture);

  std::mutex mutex_;
  std::map<std::string, Entry> entries_;
};

// Deterministic mock: parses the query of a semantic_diff prompt, learns
// StringMerge rules from its pairs, rewrites the conflict line, and
// over-generates "+{result}\n\nQuestion:" so stop handling gets exercised.
class RuleMockBackend : public CompletionBackend {
 public:
  std::string complete(const std::string& prompt, const CompletionParams& params) override;
};

// Returns the query's conflict line (semantic) or variant A (textual)
// unchanged; a floor baseline for the harness.
class EchoBackend : public CompletionBackend {
 public:
  explicit EchoBackend(prompt::PromptFormat format = prompt::PromptFormat::semantic_diff)
      : format_(format) {}
  std::string complete(const std::string& prompt, const CompletionParams& params) override;

 private:
  prompt::PromptFormat format_;
};

// Per-trial seed so that seeded backends differ reproducibly across trials.
std::uint64_t derive_trial_seed(std::uint64_t seed, int trial);

// Runs params.trials completions and returns their texts in trial order.
// Trials may run concurrently (up to `parallelism` at a time) unless the
// backend is sequential_only. The first failing trial's error is rethrown
// once in-flight trials have drained; no partial result escapes.
std::vector<std::string> sample_n(CompletionBackend& backend, const std::string& prompt,
                                  const CompletionParams& params, std::size_t parallelism = 4);

// Truncates a completion at the earliest stop marker and extracts the
// resolution: for semantic_diff the first line with one leading '+' and
// surrounding whitespace stripped, for textual formats every line up to
// the stop.
std::string parse_resolution(std::string_view completion, prompt::PromptFormat format,
                             const std::vector<std::string>& stop = {"\nQuestion", "\n\n"});

}  // namespace mergemend::backend
