#pragma once

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mergemend/conflict_model.hpp"
#include "mergemend/errors.hpp"

namespace mergemend::eval {

enum class EvalMode { prefix_first_line, exact_multiline };

const char* to_string(EvalMode mode);
EvalMode eval_mode_from_string(const std::string& name);

// acc[k-1] is the fraction of examples solved by at least one of the
// first k trials; non-decreasing in k.
struct AccuracyCurve {
  std::vector<double> acc;
};

// Discrete density over resolve probabilities: grid[j] = j/M with a
// non-negative weight per point, weights summing to 1.
struct DensityModel {
  std::vector<double> grid;
  std::vector<double> weights;
};

struct FitOptions {
  std::size_t grid_size = 50;     // M; grid has M+1 points
  std::size_t iterations = 60000;
  double learning_rate = 25.0;
  double epsilon = 0.05;          // mass-near-zero/one threshold
};

struct FitResult {
  DensityModel model;
  double loss = 0.0;  // final sum of squared errors
  double mass_near_zero = 0.0;
  double mass_near_one = 0.0;
};

struct FeasibilityRecord {
  std::string example_id;
  bool oov_required = false;
  bool resolved = false;
};

// prefix_first_line: the whitespace-trimmed first line of the truth must
// be a prefix of the trimmed first line of the candidate.
// exact_multiline: same line count and per-line equality after trailing
// whitespace trim. Throws Error for empty ground truth.
bool is_correct(std::string_view candidate, std::string_view ground_truth, EvalMode mode);

// Throws Error when any record has fewer than K trials or records is
// empty.
AccuracyCurve accuracy_curve(const std::vector<EvalRecord>& records, std::size_t K);

// Closed form sum_j w_j * (1 - (1 - p_j)^k).
double expected_accuracy(const DensityModel& model, std::size_t k);

// Least-squares fit of a density to an observed curve by gradient descent
// over a softmax parameterization (weights non-negative and normalized by
// construction). Deterministic: uniform initialization, no randomness.
// Throws Error when the observed curve is empty or decreasing.
FitResult fit_density(const AccuracyCurve& observed, const FitOptions& options = {});

// Identifier tokens: maximal [A-Za-z0-9_] runs.
std::vector<std::string> tokenize_identifiers(std::string_view text);

// oov_required is true when some token of the ground-truth fix never
// occurs in the prompt. Throws Error when the description has no fix.
FeasibilityRecord classify_oov(const ConflictDescription& description,
                               std::string_view prompt_text, bool resolved);

struct ExampleOutcome {
  std::string id;
  std::vector<bool> outcomes;
  bool oov_required = false;
  std::optional<int> resolved_at;  // 1-based first successful trial
};

struct RunReport {
  nlohmann::json run_config;
  std::vector<ExampleOutcome> per_example;
  AccuracyCurve curve;
  FitResult density;
};

nlohmann::json to_json(const RunReport& report);

// "k,accuracy" rows for plotting.
void write_curve_csv(const AccuracyCurve& curve, std::ostream& out);

}  // namespace mergemend::eval
