#pragma once

// In-context prompting support: demonstration selection via the retrieval
// engine, deterministic prompt assembly, and completion parsing.

#include <string>
#include <utility>
#include <vector>

#include "ddikit/eval/classification.hpp"
#include "ddikit/retrieval/engine.hpp"

namespace ddikit::prompting {

struct Demonstration {
  std::string smiles1;
  std::string smiles2;
  dataset::Label label = dataset::Label::Negative;
  std::string explanation;
};

struct DemonstrationSet {
  std::vector<Demonstration> demos;
  std::vector<std::string> warnings;
};

// Top-n ranked candidate pairs for the query, using the same candidate
// search as retrieval::predict (k widening only while the candidate set is
// empty), so n = 1 reproduces predict's provenance pair. Fewer than n
// available yields a shorter list plus a warning.
DemonstrationSet select_demonstrations(const retrieval::TrainingIndex& index,
                                       const std::string& smiles1,
                                       const std::string& smiles2, int n = 5,
                                       int k = 50);

// Instruction block, then numbered demonstrations, then the query line.
// Byte-deterministic; demonstration answers render as
// "Answer: <Yes|No>. <explanation>".
std::string build_prompt(const std::string& smiles1, const std::string& smiles2,
                         const std::vector<Demonstration>& demos);

// Leading Yes -> positive, No -> negative (case-insensitive, tolerant of
// punctuation); the explanation is the remainder. Anything else is
// (Unparseable, full text).
std::pair<eval::PredLabel, std::string> parse_completion(const std::string& text);

}  // namespace ddikit::prompting
