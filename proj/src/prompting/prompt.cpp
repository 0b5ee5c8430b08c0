#include "ddikit/prompting/prompt.hpp"

#include <cctype>

#include "ddikit/dataset/preprocess.hpp"

namespace ddikit::prompting {

namespace {

constexpr const char* kInstruction =
    "Analyze whether there exists a drug-drug interaction between the query molecules, "
    "and explain the reasons. Several examples have been given for reference, and you "
    "should consider the similarity of the molecular structures between the given "
    "examples and the query molecules. First, answer Yes/No, and then explain the "
    "reasons.";

}  // namespace

DemonstrationSet select_demonstrations(const retrieval::TrainingIndex& index,
                                       const std::string& smiles1,
                                       const std::string& smiles2, int n, int k) {
  if (n < 1) throw std::invalid_argument("select_demonstrations: n must be >= 1");
  retrieval::CandidateSearch search =
      retrieval::search_candidates(index, smiles1, smiles2, k);
  DemonstrationSet out;
  out.warnings = search.warnings;
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(n),
                                                 search.ranked.size());
  for (std::size_t i = 0; i < take; ++i) {
    const retrieval::OrientedPair oriented =
        retrieval::orient_pair(search.ranked[i], search.nbrs1, search.nbrs2);
    const retrieval::PairValue& value = index.pairs.at(oriented.key);
    Demonstration demo;
    const std::string& first = oriented.swapped ? oriented.key.second : oriented.key.first;
    const std::string& second = oriented.swapped ? oriented.key.first : oriented.key.second;
    demo.smiles1 = index.drugs.at(first).smiles;
    demo.smiles2 = index.drugs.at(second).smiles;
    demo.label = value.label;
    demo.explanation = oriented.swapped
                           ? dataset::swap_drug_placeholders(value.explanation)
                           : value.explanation;
    out.demos.push_back(std::move(demo));
  }
  if (out.demos.size() < static_cast<std::size_t>(n)) {
    out.warnings.push_back("only " + std::to_string(out.demos.size()) + " of " +
                           std::to_string(n) + " demonstrations available");
  }
  return out;
}

std::string build_prompt(const std::string& smiles1, const std::string& smiles2,
                         const std::vector<Demonstration>& demos) {
  std::string prompt = kInstruction;
  if (!demos.empty()) {
    prompt += "\n";
    for (std::size_t i = 0; i < demos.size(); ++i) {
      const Demonstration& demo = demos[i];
      prompt += "\n" + std::to_string(i + 1) + ". Drug1: " + demo.smiles1 +
                " Drug2: " + demo.smiles2 +
                " Answer: " + (demo.label == dataset::Label::Positive ? "Yes" : "No") +
                ". " + demo.explanation;
    }
  }
  prompt += "\n\nQuery: Drug1: " + smiles1 + " Drug2: " + smiles2 + " Answer:";
  return prompt;
}

std::pair<eval::PredLabel, std::string> parse_completion(const std::string& text) {
  // Locate the first alphabetic run.
  std::size_t begin = 0;
  while (begin < text.size() && std::isalpha(static_cast<unsigned char>(text[begin])) == 0) {
    ++begin;
  }
  std::size_t end = begin;
  std::string word;
  while (end < text.size() && std::isalpha(static_cast<unsigned char>(text[end])) != 0) {
    word += static_cast<char>(std::tolower(static_cast<unsigned char>(text[end])));
    ++end;
  }

  eval::PredLabel label;
  if (word == "yes") {
    label = eval::PredLabel::Positive;
  } else if (word == "no") {
    label = eval::PredLabel::Negative;
  } else {
    return {eval::PredLabel::Unparseable, text};
  }

  // The explanation is the remainder after the answer word and any
  // punctuation/whitespace that follows it.
  while (end < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[end]);
    if (std::isspace(c) != 0 || c == '.' || c == ',' || c == ':' || c == ';' ||
        c == '!' || c == '?' || c == '-') {
      ++end;
    } else {
      break;
    }
  }
  std::string explanation = text.substr(end);
  while (!explanation.empty() &&
         std::isspace(static_cast<unsigned char>(explanation.back())) != 0) {
    explanation.pop_back();
  }
  return {label, explanation};
}

}  // namespace ddikit::prompting
