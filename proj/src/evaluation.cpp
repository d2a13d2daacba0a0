#include "mergemend/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <unordered_set>

namespace mergemend::eval {

namespace {

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n\f\v");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string trim_trailing(std::string_view s) {
  auto end = s.find_last_not_of(" \t\r\n\f\v");
  return end == std::string_view::npos ? std::string{} : std::string(s.substr(0, end + 1));
}

}  // namespace

const char* to_string(EvalMode mode) {
  return mode == EvalMode::prefix_first_line ? "prefix_first_line" : "exact_multiline";
}

EvalMode eval_mode_from_string(const std::string& name) {
  if (name == "prefix_first_line") return EvalMode::prefix_first_line;
  if (name == "exact_multiline") return EvalMode::exact_multiline;
  throw Error("unknown eval mode: " + name);
}

bool is_correct(std::string_view candidate, std::string_view ground_truth, EvalMode mode) {
  if (trim(ground_truth).empty()) throw Error("ground truth is empty");

  if (mode == EvalMode::prefix_first_line) {
    const std::string truth = trim(first_line(std::string(ground_truth)));
    const std::string cand = trim(first_line(std::string(candidate)));
    return cand.size() >= truth.size() && cand.compare(0, truth.size(), truth) == 0;
  }

  const auto truth_lines = split_lines(std::string(ground_truth));
  const auto cand_lines = split_lines(std::string(candidate));
  if (truth_lines.size() != cand_lines.size()) return false;
  for (std::size_t i = 0; i < truth_lines.size(); ++i)
    if (trim_trailing(truth_lines[i]) != trim_trailing(cand_lines[i])) return false;
  return true;
}

AccuracyCurve accuracy_curve(const std::vector<EvalRecord>& records, std::size_t K) {
  if (records.empty()) throw Error("accuracy curve needs at least one record");
  if (K < 1) throw Error("accuracy curve needs K >= 1");
  for (const auto& record : records)
    if (record.trial_outcomes.size() < K)
      throw Error("record " + record.example_id + " has " +
                  std::to_string(record.trial_outcomes.size()) + " trials, need " +
                  std::to_string(K));

  AccuracyCurve curve;
  curve.acc.resize(K, 0.0);
  for (const auto& record : records) {
    bool resolved = false;
    for (std::size_t k = 0; k < K; ++k) {
      resolved = resolved || record.trial_outcomes[k];
      if (resolved) curve.acc[k] += 1.0;
    }
  }
  for (auto& value : curve.acc) value /= static_cast<double>(records.size());
  return curve;
}

double expected_accuracy(const DensityModel& model, std::size_t k) {
  double total = 0.0;
  for (std::size_t j = 0; j < model.grid.size(); ++j)
    total += model.weights[j] * (1.0 - std::pow(1.0 - model.grid[j], static_cast<double>(k)));
  return total;
}

FitResult fit_density(const AccuracyCurve& observed, const FitOptions& options) {
  const std::size_t K = observed.acc.size();
  if (K == 0) throw Error("observed curve is empty");
  for (std::size_t k = 0; k < K; ++k) {
    if (observed.acc[k] < -1e-12 || observed.acc[k] > 1.0 + 1e-12)
      throw Error("observed accuracy out of [0,1] at k=" + std::to_string(k + 1));
    if (k > 0 && observed.acc[k] + 1e-12 < observed.acc[k - 1])
      throw Error("observed curve decreases at k=" + std::to_string(k + 1));
  }

  const std::size_t M = options.grid_size;
  const std::size_t points = M + 1;

  // f[j][k] = 1 - (1 - p_j)^(k+1)
  std::vector<double> f(points * K);
  std::vector<double> grid(points);
  for (std::size_t j = 0; j < points; ++j) {
    grid[j] = static_cast<double>(j) / static_cast<double>(M);
    double pow_term = 1.0;
    for (std::size_t k = 0; k < K; ++k) {
      pow_term *= 1.0 - grid[j];
      f[j * K + k] = 1.0 - pow_term;
    }
  }

  std::vector<double> theta(points, 0.0);
  std::vector<double> weights(points);
  std::vector<double> residual(K);
  std::vector<double> grad_w(points);
  double loss = 0.0;

  auto softmax = [&] {
    double max_theta = *std::max_element(theta.begin(), theta.end());
    double total = 0.0;
    for (std::size_t j = 0; j < points; ++j) {
      weights[j] = std::exp(theta[j] - max_theta);
      total += weights[j];
    }
    for (auto& w : weights) w /= total;
  };

  for (std::size_t iter = 0; iter <= options.iterations; ++iter) {
    softmax();
    loss = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      double expected = 0.0;
      for (std::size_t j = 0; j < points; ++j) expected += weights[j] * f[j * K + k];
      residual[k] = expected - observed.acc[k];
      loss += residual[k] * residual[k];
    }
    if (iter == options.iterations) break;

    double mean_grad = 0.0;
    for (std::size_t j = 0; j < points; ++j) {
      double g = 0.0;
      for (std::size_t k = 0; k < K; ++k) g += 2.0 * residual[k] * f[j * K + k];
      grad_w[j] = g;
      mean_grad += weights[j] * g;
    }
    for (std::size_t j = 0; j < points; ++j)
      theta[j] -= options.learning_rate * weights[j] * (grad_w[j] - mean_grad);
  }

  FitResult result;
  result.model.grid = std::move(grid);
  result.model.weights = weights;
  result.loss = loss;
  for (std::size_t j = 0; j < points; ++j) {
    if (result.model.grid[j] < options.epsilon) result.mass_near_zero += weights[j];
    if (result.model.grid[j] > 1.0 - options.epsilon) result.mass_near_one += weights[j];
  }
  return result;
}

std::vector<std::string> tokenize_identifiers(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '_') {
      current += static_cast<char>(c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

FeasibilityRecord classify_oov(const ConflictDescription& description,
                               std::string_view prompt_text, bool resolved) {
  if (!description.downstream_fix)
    throw Error("description " + description.id + " has no ground-truth fix");

  const auto prompt_tokens = tokenize_identifiers(prompt_text);
  const std::unordered_set<std::string> vocabulary(prompt_tokens.begin(), prompt_tokens.end());

  FeasibilityRecord record;
  record.example_id = description.id;
  record.resolved = resolved;
  for (const auto& token : tokenize_identifiers(*description.downstream_fix)) {
    if (!vocabulary.count(token)) {
      record.oov_required = true;
      break;
    }
  }
  return record;
}

nlohmann::json to_json(const RunReport& report) {
  nlohmann::json doc;
  doc["run_config"] = report.run_config;
  doc["per_example"] = nlohmann::json::array();
  for (const auto& example : report.per_example) {
    nlohmann::json entry;
    entry["id"] = example.id;
    entry["outcomes"] = example.outcomes;
    entry["oov_required"] = example.oov_required;
    entry["resolved_at"] =
        example.resolved_at ? nlohmann::json(*example.resolved_at) : nlohmann::json(nullptr);
    doc["per_example"].push_back(std::move(entry));
  }
  doc["curve"] = report.curve.acc;
  doc["density"] = {{"grid", report.density.model.grid},
                    {"weights", report.density.model.weights},
                    {"mass_near_zero", report.density.mass_near_zero},
                    {"mass_near_one", report.density.mass_near_one}};
  doc["loss"] = report.density.loss;
  return doc;
}

void write_curve_csv(const AccuracyCurve& curve, std::ostream& out) {
  out << "k,accuracy\n";
  for (std::size_t k = 0; k < curve.acc.size(); ++k)
    out << (k + 1) << ',' << curve.acc[k] << '\n';
}

}  // namespace mergemend::eval
