#pragma once

// Evaluation reports: per-fold scores, mean ± std aggregation across folds,
// JSON serialization, an aligned plain-text table, and a paired t-test over
// fold scores for method comparisons.

#include <optional>
#include <string>
#include <vector>

#include "ddikit/common/jsonl.hpp"
#include "ddikit/eval/classification.hpp"
#include "ddikit/eval/text_metrics.hpp"

namespace ddikit::eval {

struct GenerationScores {
  double bleu = 0.0;
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
};

struct FoldScores {
  int fold = 0;
  std::string subset;  // "test", "test_s1", or "test_s2"
  std::optional<GenerationScores> generation;
  BinaryReport binary;
  std::optional<MulticlassReport> multiclass;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n-1); 0 for n <= 1
};

Aggregate aggregate(const std::vector<double>& values);

struct EvalReport {
  std::vector<FoldScores> folds;
};

// {"folds": [...], "summary": {subset: {metric: {mean, std, values}}}}
jsonl::json report_to_json(const EvalReport& report);

// Aligned plain-text table: one row per subset, metric columns as
// "mean±std" over folds.
std::string render_table(const EvalReport& report);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

// Paired t-test over fold scores; lists must have equal size >= 2.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace ddikit::eval
