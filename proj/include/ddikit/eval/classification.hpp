#pragma once

// Label extraction from generated text, Levenshtein template mapping for
// mechanism-category classification, and binary / macro multi-class reports.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ddikit/dataset/record.hpp"
#include "ddikit/eval/text_metrics.hpp"

namespace ddikit::eval {

enum class PredLabel { Positive, Negative, Unparseable };

std::string pred_label_to_string(PredLabel label);

// Strictly parses "<s> <label> Explanation: <text> </s>"; tolerantly falls
// back to a leading positive/negative/yes/no token, in which case the
// explanation is the full input text; otherwise (Unparseable, text).
std::pair<PredLabel, std::string> extract_prediction(const std::string& generated);

struct TemplateTable {
  struct Entry {
    int id = 0;
    std::string text;      // masked explanation template
    std::string category;  // mechanism category
  };
  std::vector<Entry> entries;  // sorted by id
};

// Distinct explanations become templates (ids assigned in lexicographic
// text order); each template's category is the majority vote of the
// co-occurring record categories, ties resolved to the lexicographically
// smallest category. Throws MissingCategoryColumn when any record lacks a
// category.
TemplateTable build_template_table(const std::vector<dataset::DdiRecord>& records);

// Nearest template by character-level Levenshtein over lowercased text;
// ties resolved to the lowest template id. Table must be non-empty.
std::string map_explanation_to_type(const std::string& generated,
                                    const TemplateTable& table);

struct BinaryReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t n = 0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct MulticlassReport {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::size_t n = 0;
  std::size_t n_classes = 0;  // distinct gold categories
};

// Binary report; "positive" is the positive class and unparseable
// predictions count as wrong. Throws LengthMismatch on unequal sizes.
BinaryReport classification_report(const std::vector<PredLabel>& predictions,
                                   const std::vector<dataset::Label>& golds);

// Macro multi-class report over the gold-present categories; classes never
// predicted contribute zero precision; an empty prediction string marks an
// unparseable case and counts as wrong.
MulticlassReport classification_report(const std::vector<std::string>& predictions,
                                       const std::vector<std::string>& golds);

}  // namespace ddikit::eval
