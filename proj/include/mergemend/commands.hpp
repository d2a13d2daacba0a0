#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "mergemend/diff_mining.hpp"
#include "mergemend/evaluation.hpp"
#include "mergemend/lm_backend.hpp"
#include "mergemend/run_config.hpp"

namespace mergemend::cli {

// The one place that talks to the host version-control tool. Produces the
// commit-stream text parse_commit_stream consumes.
std::string run_git_log(const std::string& repo_path);

// Built-in default one-shot example (a field rename with its fix); also
// shipped as fixtures/default_shot.json.
ConflictDescription default_shot_example();

std::unique_ptr<backend::CompletionBackend> make_backend(const RunConfig& config);
std::vector<prompt::Shot> load_shots(const RunConfig& config);
prompt::TokenEstimator make_estimator(const RunConfig& config);

// One record of the diagnostics file: a JSON array of objects with keys
// "ErrorType", "Message", "File", "Line", "LineText" and optional "Id".
struct DiagnosticRecord {
  std::string id;
  CompilerDiagnostic diagnostic;
  diffmine::ConflictLocation location;
};

std::vector<DiagnosticRecord> load_diagnostics(const std::filesystem::path& path);

struct CurateOptions {
  std::string repo_path;        // mine a git repository ...
  std::string commits_file;     // ... or read a commit stream ("-" = stdin)
  std::string downstream_file;  // repair-search stream; empty = same as commits
  std::string diagnostics_file;
  std::string output_file;
};

struct CurateStats {
  std::size_t diagnostics = 0;
  std::size_t curated = 0;
  std::size_t keyword_failures = 0;
  std::size_t collection_failures = 0;
  std::size_t with_fix = 0;
};

CurateStats cmd_curate(const CurateOptions& options, std::ostream& log);

struct CandidateRecord {
  std::string id;
  std::string prompt_sha256;
  std::vector<std::string> candidates;
};

std::vector<CandidateRecord> load_candidates(const std::filesystem::path& path);

struct ResolveStats {
  std::size_t examples = 0;
  std::size_t skipped = 0;
};

// Assembles, samples and parses a candidates file (JSON-lines
// {id, prompt_sha256, candidates}) for every description in the corpus,
// output sorted by id. Backend errors abort: the partial output is
// flushed, a "<output>.MANIFEST" notes the abort point, and the error is
// rethrown. Descriptions whose prompt cannot be built are logged and
// skipped.
ResolveStats cmd_resolve(const std::filesystem::path& corpus_path, const RunConfig& config,
                         const std::filesystem::path& output_path, std::ostream& log);

// StringMerge over each description's pairs; JSON-lines {id, candidate}.
std::size_t cmd_baseline(const std::filesystem::path& corpus_path,
                         const std::filesystem::path& output_path);

// The assembled prompt for one description.
std::string cmd_prompt(const std::filesystem::path& corpus_path, const std::string& id,
                       const RunConfig& config);

// Scores a candidates file against the corpus ground truth; includes the
// accuracy curve, OOV classification and the density fit.
eval::RunReport cmd_eval(const std::filesystem::path& candidates_path,
                         const std::filesystem::path& corpus_path, const RunConfig& config);

// Fits a density to a curve file: either a JSON array of accuracies or an
// object with a "curve" key (a run report works).
eval::FitResult cmd_fit_curve(const std::filesystem::path& curve_path,
                              const eval::FitOptions& options);

}  // namespace mergemend::cli
