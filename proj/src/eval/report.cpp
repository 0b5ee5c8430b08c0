#include "ddikit/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace ddikit::eval {

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

namespace {

using jsonl::json;

json binary_to_json(const BinaryReport& b) {
  json j;
  j["accuracy"] = b.accuracy;
  j["precision"] = b.precision;
  j["recall"] = b.recall;
  j["f1"] = b.f1;
  j["n"] = b.n;
  j["tp"] = b.tp;
  j["fp"] = b.fp;
  j["fn"] = b.fn;
  j["tn"] = b.tn;
  return j;
}

json multiclass_to_json(const MulticlassReport& m) {
  json j;
  j["accuracy"] = m.accuracy;
  j["macro_precision"] = m.macro_precision;
  j["macro_recall"] = m.macro_recall;
  j["macro_f1"] = m.macro_f1;
  j["n"] = m.n;
  j["n_classes"] = m.n_classes;
  return j;
}

// Named metric accessors used for both summary JSON and the text table.
struct Metric {
  const char* name;
  bool (*present)(const FoldScores&);
  double (*get)(const FoldScores&);
};

const Metric kMetrics[] = {
    {"bleu", [](const FoldScores& f) { return f.generation.has_value(); },
     [](const FoldScores& f) { return f.generation->bleu; }},
    {"rouge1", [](const FoldScores& f) { return f.generation.has_value(); },
     [](const FoldScores& f) { return f.generation->rouge1; }},
    {"rouge2", [](const FoldScores& f) { return f.generation.has_value(); },
     [](const FoldScores& f) { return f.generation->rouge2; }},
    {"rougeL", [](const FoldScores& f) { return f.generation.has_value(); },
     [](const FoldScores& f) { return f.generation->rougeL; }},
    {"accuracy", [](const FoldScores&) { return true; },
     [](const FoldScores& f) { return f.binary.accuracy; }},
    {"precision", [](const FoldScores&) { return true; },
     [](const FoldScores& f) { return f.binary.precision; }},
    {"recall", [](const FoldScores&) { return true; },
     [](const FoldScores& f) { return f.binary.recall; }},
    {"f1", [](const FoldScores&) { return true; },
     [](const FoldScores& f) { return f.binary.f1; }},
    {"macro_accuracy", [](const FoldScores& f) { return f.multiclass.has_value(); },
     [](const FoldScores& f) { return f.multiclass->accuracy; }},
    {"macro_precision", [](const FoldScores& f) { return f.multiclass.has_value(); },
     [](const FoldScores& f) { return f.multiclass->macro_precision; }},
    {"macro_recall", [](const FoldScores& f) { return f.multiclass.has_value(); },
     [](const FoldScores& f) { return f.multiclass->macro_recall; }},
    {"macro_f1", [](const FoldScores& f) { return f.multiclass.has_value(); },
     [](const FoldScores& f) { return f.multiclass->macro_f1; }},
};

std::vector<std::string> subsets_in_order(const EvalReport& report) {
  std::vector<std::string> subsets;
  for (const auto& f : report.folds) {
    if (std::find(subsets.begin(), subsets.end(), f.subset) == subsets.end()) {
      subsets.push_back(f.subset);
    }
  }
  return subsets;
}

}  // namespace

json report_to_json(const EvalReport& report) {
  json folds = json::array();
  for (const auto& f : report.folds) {
    json j;
    j["fold"] = f.fold;
    j["subset"] = f.subset;
    if (f.generation) {
      json g;
      g["bleu"] = f.generation->bleu;
      g["rouge1"] = f.generation->rouge1;
      g["rouge2"] = f.generation->rouge2;
      g["rougeL"] = f.generation->rougeL;
      j["generation"] = g;
    }
    j["binary"] = binary_to_json(f.binary);
    if (f.multiclass) j["multiclass"] = multiclass_to_json(*f.multiclass);
    folds.push_back(j);
  }

  json summary = json::object();
  for (const auto& subset : subsets_in_order(report)) {
    json per_metric = json::object();
    for (const auto& metric : kMetrics) {
      std::vector<double> values;
      bool all_present = true;
      for (const auto& f : report.folds) {
        if (f.subset != subset) continue;
        if (!metric.present(f)) {
          all_present = false;
          break;
        }
        values.push_back(metric.get(f));
      }
      if (!all_present || values.empty()) continue;
      const Aggregate agg = aggregate(values);
      json m;
      m["mean"] = agg.mean;
      m["std"] = agg.stddev;
      m["values"] = values;
      per_metric[metric.name] = m;
    }
    summary[subset] = per_metric;
  }

  json out;
  out["folds"] = folds;
  out["summary"] = summary;
  return out;
}

std::string render_table(const EvalReport& report) {
  const std::vector<std::string> subsets = subsets_in_order(report);
  constexpr int kCell = 17;
  std::string out;
  char buf[64];

  std::snprintf(buf, sizeof(buf), "%-10s", "subset");
  out += buf;
  for (const auto& metric : kMetrics) {
    std::snprintf(buf, sizeof(buf), " %*s", kCell, metric.name);
    out += buf;
  }
  out += '\n';

  for (const auto& subset : subsets) {
    std::snprintf(buf, sizeof(buf), "%-10s", subset.c_str());
    out += buf;
    for (const auto& metric : kMetrics) {
      std::vector<double> values;
      bool all_present = true;
      for (const auto& f : report.folds) {
        if (f.subset != subset) continue;
        if (!metric.present(f)) {
          all_present = false;
          break;
        }
        values.push_back(metric.get(f));
      }
      if (!all_present || values.empty()) {
        std::snprintf(buf, sizeof(buf), " %*s", kCell, "-");
      } else {
        const Aggregate agg = aggregate(values);
        char cell[40];
        std::snprintf(cell, sizeof(cell), "%.4f±%.4f", agg.mean, agg.stddev);
        // The UTF-8 ± sign is two bytes; pad one extra so columns align.
        std::snprintf(buf, sizeof(buf), " %*s", kCell + 1, cell);
      }
      out += buf;
    }
    out += '\n';
  }
  return out;
}

namespace {

// Continued-fraction evaluation of the regularized incomplete beta function
// (modified Lentz method).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw EvalError(EvalErrorKind::LengthMismatch,
                    "paired_t_test: score lists differ in size");
  }
  if (a.size() < 2) {
    throw std::invalid_argument("paired_t_test: need at least two paired scores");
  }
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  const Aggregate agg = aggregate(diff);

  TTestResult result;
  result.df = static_cast<double>(n - 1);
  if (agg.stddev == 0.0) {
    if (agg.mean == 0.0) {
      result.t = 0.0;
      result.p = 1.0;
    } else {
      result.t = agg.mean > 0 ? std::numeric_limits<double>::infinity()
                              : -std::numeric_limits<double>::infinity();
      result.p = 0.0;
    }
    return result;
  }
  result.t = agg.mean / (agg.stddev / std::sqrt(static_cast<double>(n)));
  const double t2 = result.t * result.t;
  result.p = reg_inc_beta(result.df / 2.0, 0.5, result.df / (result.df + t2));
  return result;
}

}  // namespace ddikit::eval
