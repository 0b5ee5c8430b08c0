#pragma once

// End-to-end orchestration (ingest -> mask -> split -> per-fold index /
// predict / evaluate -> summary) and the synthetic fixture generator used
// for desk-scale experiments and tests.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddikit/pipeline/config.hpp"

namespace ddikit::pipeline {

struct RunError : std::runtime_error {
  explicit RunError(const std::string& msg) : std::runtime_error(msg) {}
};

// Executes the configured experiment. Writes, under out_dir:
//   ingest_report.json
//   fold<i>/split.jsonl, fold<i>/drugs.jsonl (inductive),
//   fold<i>/index.jsonl, fold<i>/predictions.jsonl, fold<i>/eval.json,
//   fold<i>/model.txt + fold<i>/train_log.jsonl (method=bilinear)
//   summary.json, summary.txt
// Deterministic: identical config+seed reproduce byte-identical files.
// Throws ConfigError / dataset-module / retrieval-module errors / RunError.
void run_pipeline(const RunConfig& config);

struct FixtureInfo {
  std::vector<std::string> drug_ids;
  std::map<std::string, int> cluster_of;  // planted similarity cluster per drug
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
};

// Writes a synthetic, balanced dataset JSONL: n_drugs random organic-subset
// SMILES grown from per-cluster bases (so intra-cluster Tanimoto is high),
// n_positives positive records whose explanations instantiate a small set of
// mechanism templates (cluster-correlated, so retrieval has signal), and an
// equal number of sampled negatives. Every SMILES parses. Deterministic
// under seed.
FixtureInfo generate_fixture(int n_drugs, int n_positives, std::uint64_t seed,
                             const std::string& out_path);

}  // namespace ddikit::pipeline
