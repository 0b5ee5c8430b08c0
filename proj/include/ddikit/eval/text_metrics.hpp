#pragma once

// Generation metrics: corpus BLEU-4, ROUGE-1/2 and ROUGE-L (F1 with beta=1,
// corpus score = mean of per-case scores), plus character-level Levenshtein
// distance with a bounded variant for nearest-template scans.
//
// Tokenization: lowercase ASCII; maximal alphanumeric runs are tokens; every
// other non-space character is a single-character token.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddikit::eval {

enum class EvalErrorKind { LengthMismatch, MissingCategoryColumn };

struct EvalError : std::runtime_error {
  EvalErrorKind kind;
  EvalError(EvalErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

std::vector<std::string> tokenize(const std::string& text);

// Corpus-level BLEU over n-grams 1..4 with uniform weights, clipped counts,
// and the standard brevity penalty. Any zero corpus-level n-gram precision
// makes the score 0. Throws LengthMismatch when list sizes differ.
double bleu(const std::vector<std::string>& hypotheses,
            const std::vector<std::string>& references);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Per-case clipped n-gram overlap, n in {1,2}.
RougeScore rouge_n(const std::string& hyp, const std::string& ref, int n);

// Per-case LCS-based score.
RougeScore rouge_l(const std::string& hyp, const std::string& ref);

// Corpus scores: arithmetic mean of the per-case precision/recall/F1.
RougeScore rouge_n_corpus(const std::vector<std::string>& hypotheses,
                          const std::vector<std::string>& references, int n);
RougeScore rouge_l_corpus(const std::vector<std::string>& hypotheses,
                          const std::vector<std::string>& references);

// Character-level edit distance, unit costs.
std::size_t levenshtein(std::string_view a, std::string_view b);

// Exact when the distance is <= bound; otherwise returns bound + 1. Lets a
// nearest scan prune rows whose minimum already exceeds the current best.
std::size_t levenshtein_bounded(std::string_view a, std::string_view b, std::size_t bound);

}  // namespace ddikit::eval
