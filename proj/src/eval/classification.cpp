#include "ddikit/eval/classification.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>

namespace ddikit::eval {

std::string pred_label_to_string(PredLabel label) {
  switch (label) {
    case PredLabel::Positive: return "positive";
    case PredLabel::Negative: return "negative";
    case PredLabel::Unparseable: return "unparseable";
  }
  return "unparseable";
}

namespace {

std::string lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string strip(const std::string& s) {
  std::size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

// First maximal alphabetic run of the text, lowercased.
std::string first_word(const std::string& s) {
  std::size_t begin = 0;
  while (begin < s.size() && std::isalpha(static_cast<unsigned char>(s[begin])) == 0) ++begin;
  std::size_t end = begin;
  while (end < s.size() && std::isalpha(static_cast<unsigned char>(s[end])) != 0) ++end;
  return lowercase(s.substr(begin, end - begin));
}

}  // namespace

std::pair<PredLabel, std::string> extract_prediction(const std::string& generated) {
  const std::string text = strip(generated);

  // Strict target format first.
  std::string body = text;
  if (body.rfind("<s>", 0) == 0) body = strip(body.substr(3));
  for (const auto& [prefix, label] :
       {std::pair{std::string("positive"), PredLabel::Positive},
        std::pair{std::string("negative"), PredLabel::Negative}}) {
    const std::string lead = prefix + " Explanation: ";
    if (body.rfind(lead, 0) == 0) {
      std::string explanation = body.substr(lead.size());
      const std::string tail = "</s>";
      const std::size_t at = explanation.rfind(tail);
      if (at != std::string::npos && strip(explanation.substr(at + tail.size())).empty()) {
        explanation = explanation.substr(0, at);
      }
      return {label, strip(explanation)};
    }
  }

  // Tolerant fallback: a leading label-ish token decides; the explanation is
  // the full text.
  const std::string head = first_word(text);
  if (head == "positive" || head == "yes") return {PredLabel::Positive, text};
  if (head == "negative" || head == "no") return {PredLabel::Negative, text};
  return {PredLabel::Unparseable, text};
}

TemplateTable build_template_table(const std::vector<dataset::DdiRecord>& records) {
  std::map<std::string, std::map<std::string, std::size_t>> votes;
  for (const auto& r : records) {
    if (r.category.empty()) {
      throw EvalError(EvalErrorKind::MissingCategoryColumn,
                      "record '" + r.record_id + "' lacks a category; the template "
                      "table needs a category per training explanation");
    }
    ++votes[r.explanation][r.category];
  }
  TemplateTable table;
  int next_id = 0;
  for (const auto& [text, counts] : votes) {  // std::map: lexicographic text order
    std::string best_category;
    std::size_t best_count = 0;
    for (const auto& [category, count] : counts) {  // ascending category
      if (count > best_count) {  // ties keep the smaller category
        best_count = count;
        best_category = category;
      }
    }
    table.entries.push_back({next_id++, text, best_category});
  }
  return table;
}

std::string map_explanation_to_type(const std::string& generated,
                                    const TemplateTable& table) {
  if (table.entries.empty()) {
    throw std::invalid_argument("map_explanation_to_type: empty template table");
  }
  const std::string query = lowercase(generated);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  const TemplateTable::Entry* winner = nullptr;
  for (const auto& entry : table.entries) {  // ascending id: first win = lowest id
    const std::size_t bound = best == std::numeric_limits<std::size_t>::max()
                                  ? std::max(query.size(), entry.text.size())
                                  : best - 1;
    const std::size_t d = levenshtein_bounded(query, lowercase(entry.text), bound);
    if (d < best) {
      best = d;
      winner = &entry;
      if (best == 0) break;
    }
  }
  return winner->category;
}

BinaryReport classification_report(const std::vector<PredLabel>& predictions,
                                   const std::vector<dataset::Label>& golds) {
  if (predictions.size() != golds.size()) {
    throw EvalError(EvalErrorKind::LengthMismatch,
                    "classification_report: predictions and golds differ in size");
  }
  BinaryReport report;
  report.n = golds.size();
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const bool gold_pos = golds[i] == dataset::Label::Positive;
    switch (predictions[i]) {
      case PredLabel::Positive:
        gold_pos ? ++report.tp : ++report.fp;
        break;
      case PredLabel::Negative:
        gold_pos ? ++report.fn : ++report.tn;
        break;
      case PredLabel::Unparseable:
        // Wrong regardless of gold; counts toward recall's denominator when
        // the gold is positive, and toward accuracy's in any case.
        if (gold_pos) ++report.fn;
        break;
    }
  }
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
  };
  report.accuracy = ratio(report.tp + report.tn, report.n);
  report.precision = ratio(report.tp, report.tp + report.fp);
  report.recall = ratio(report.tp, report.tp + report.fn);
  report.f1 = report.precision + report.recall > 0
                  ? 2.0 * report.precision * report.recall /
                        (report.precision + report.recall)
                  : 0.0;
  return report;
}

MulticlassReport classification_report(const std::vector<std::string>& predictions,
                                       const std::vector<std::string>& golds) {
  if (predictions.size() != golds.size()) {
    throw EvalError(EvalErrorKind::LengthMismatch,
                    "classification_report: predictions and golds differ in size");
  }
  MulticlassReport report;
  report.n = golds.size();

  struct ClassTally {
    std::size_t tp = 0, predicted = 0, gold = 0;
  };
  std::map<std::string, ClassTally> tally;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    tally[golds[i]].gold += 1;
    if (!predictions[i].empty()) {
      tally[predictions[i]].predicted += 1;
      if (predictions[i] == golds[i]) {
        ++correct;
        tally[golds[i]].tp += 1;
      }
    }
  }
  report.accuracy =
      report.n > 0 ? static_cast<double>(correct) / static_cast<double>(report.n) : 0.0;

  // Macro averages run over gold-present classes only.
  double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
  std::size_t n_classes = 0;
  for (const auto& [category, t] : tally) {
    if (t.gold == 0) continue;
    ++n_classes;
    const double p =
        t.predicted > 0 ? static_cast<double>(t.tp) / static_cast<double>(t.predicted) : 0.0;
    const double r = static_cast<double>(t.tp) / static_cast<double>(t.gold);
    p_sum += p;
    r_sum += r;
    f_sum += p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  report.n_classes = n_classes;
  if (n_classes > 0) {
    report.macro_precision = p_sum / static_cast<double>(n_classes);
    report.macro_recall = r_sum / static_cast<double>(n_classes);
    report.macro_f1 = f_sum / static_cast<double>(n_classes);
  }
  return report;
}

}  // namespace ddikit::eval
