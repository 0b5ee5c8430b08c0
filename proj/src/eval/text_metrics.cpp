#include "ddikit/eval/text_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace ddikit::eval {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  };
  for (unsigned char c : text) {
    if (std::isalnum(c) != 0) {
      current += static_cast<char>(std::tolower(c));
    } else {
      flush();
      if (std::isspace(c) == 0) tokens.push_back(std::string(1, static_cast<char>(c)));
    }
  }
  flush();
  return tokens;
}

namespace {

using Counter = std::map<std::vector<std::string>, std::size_t>;

Counter ngram_counts(const std::vector<std::string>& tokens, int n) {
  Counter counts;
  if (tokens.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
    std::vector<std::string> gram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                  tokens.begin() + static_cast<std::ptrdiff_t>(i) + n);
    ++counts[std::move(gram)];
  }
  return counts;
}

std::size_t clipped_overlap(const Counter& hyp, const Counter& ref) {
  std::size_t overlap = 0;
  for (const auto& [gram, count] : hyp) {
    auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  return overlap;
}

std::size_t total(const Counter& counts) {
  std::size_t sum = 0;
  for (const auto& [gram, count] : counts) sum += count;
  return sum;
}

double f1_of(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

double bleu(const std::vector<std::string>& hypotheses,
            const std::vector<std::string>& references) {
  if (hypotheses.size() != references.size() || hypotheses.empty()) {
    throw EvalError(EvalErrorKind::LengthMismatch,
                    "bleu: hypothesis and reference lists must have equal non-zero size");
  }
  constexpr int kMaxN = 4;
  std::size_t clipped[kMaxN] = {0, 0, 0, 0};
  std::size_t totals[kMaxN] = {0, 0, 0, 0};
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const std::vector<std::string> hyp = tokenize(hypotheses[i]);
    const std::vector<std::string> ref = tokenize(references[i]);
    hyp_len += hyp.size();
    ref_len += ref.size();
    for (int n = 1; n <= kMaxN; ++n) {
      const Counter hc = ngram_counts(hyp, n);
      const Counter rc = ngram_counts(ref, n);
      clipped[n - 1] += clipped_overlap(hc, rc);
      totals[n - 1] += total(hc);
    }
  }
  if (hyp_len == 0) return 0.0;
  double log_precision_sum = 0.0;
  for (int n = 0; n < kMaxN; ++n) {
    if (totals[n] == 0 || clipped[n] == 0) return 0.0;
    const double p = static_cast<double>(clipped[n]) / static_cast<double>(totals[n]);
    log_precision_sum += std::log(p) / kMaxN;
  }
  const double bp =
      hyp_len > ref_len
          ? 1.0
          : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
  return bp * std::exp(log_precision_sum);
}

RougeScore rouge_n(const std::string& hyp, const std::string& ref, int n) {
  if (n != 1 && n != 2) throw std::invalid_argument("rouge_n: n must be 1 or 2");
  const Counter hc = ngram_counts(tokenize(hyp), n);
  const Counter rc = ngram_counts(tokenize(ref), n);
  const std::size_t overlap = clipped_overlap(hc, rc);
  const std::size_t n_hyp = total(hc);
  const std::size_t n_ref = total(rc);
  RougeScore s;
  s.precision = n_hyp > 0 ? static_cast<double>(overlap) / static_cast<double>(n_hyp) : 0.0;
  s.recall = n_ref > 0 ? static_cast<double>(overlap) / static_cast<double>(n_ref) : 0.0;
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

RougeScore rouge_l(const std::string& hyp, const std::string& ref) {
  const std::vector<std::string> h = tokenize(hyp);
  const std::vector<std::string> r = tokenize(ref);
  RougeScore s;
  if (h.empty() || r.empty()) return s;
  // Two-row LCS dynamic program.
  std::vector<std::size_t> prev(r.size() + 1, 0), curr(r.size() + 1, 0);
  for (std::size_t i = 1; i <= h.size(); ++i) {
    for (std::size_t j = 1; j <= r.size(); ++j) {
      curr[j] = h[i - 1] == r[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  const double lcs = static_cast<double>(prev[r.size()]);
  s.precision = lcs / static_cast<double>(h.size());
  s.recall = lcs / static_cast<double>(r.size());
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

namespace {

RougeScore mean_rouge(const std::vector<std::string>& hypotheses,
                      const std::vector<std::string>& references,
                      const std::function<RougeScore(const std::string&, const std::string&)>& fn) {
  if (hypotheses.size() != references.size() || hypotheses.empty()) {
    throw EvalError(EvalErrorKind::LengthMismatch,
                    "rouge: hypothesis and reference lists must have equal non-zero size");
  }
  RougeScore sum;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const RougeScore s = fn(hypotheses[i], references[i]);
    sum.precision += s.precision;
    sum.recall += s.recall;
    sum.f1 += s.f1;
  }
  const double n = static_cast<double>(hypotheses.size());
  return {sum.precision / n, sum.recall / n, sum.f1 / n};
}

}  // namespace

RougeScore rouge_n_corpus(const std::vector<std::string>& hypotheses,
                          const std::vector<std::string>& references, int n) {
  return mean_rouge(hypotheses, references,
                    [n](const std::string& h, const std::string& r) { return rouge_n(h, r, n); });
}

RougeScore rouge_l_corpus(const std::vector<std::string>& hypotheses,
                          const std::vector<std::string>& references) {
  return mean_rouge(hypotheses, references,
                    [](const std::string& h, const std::string& r) { return rouge_l(h, r); });
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);  // keep the inner row short
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t levenshtein_bounded(std::string_view a, std::string_view b, std::size_t bound) {
  if (a.size() < b.size()) std::swap(a, b);
  if (a.size() - b.size() > bound) return bound + 1;
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    std::size_t row_min = row[0];
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
      diag = up;
      row_min = std::min(row_min, row[j]);
    }
    // Edit distance never drops below the running row minimum, so once the
    // whole row exceeds the bound the final value must as well.
    if (row_min > bound) return bound + 1;
  }
  return row[b.size()] > bound ? bound + 1 : row[b.size()];
}

}  // namespace ddikit::eval
