#pragma once

// The training index behind similarity retrieval: a drug table with
// precomputed fingerprints and a pair table keyed by the canonical unordered
// drug-id pair. Pair explanations are stored masked (DRUG1/DRUG2
// placeholders), oriented so that DRUG1 refers to the canonical-first drug.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddikit/dataset/record.hpp"
#include "ddikit/fp/fingerprint.hpp"

namespace ddikit::retrieval {

using dataset::PairKey;

struct DrugEntry {
  std::string smiles;
  fp::Fingerprint fingerprint;
  std::string description;
};

struct PairValue {
  dataset::Label label = dataset::Label::Negative;
  std::string explanation;  // masked, DRUG1 = canonical-first drug
};

struct IndexBuildConfig {
  int k = 50;
  std::string fingerprint_version;
};

struct TrainingIndex {
  std::map<std::string, DrugEntry> drugs;
  std::map<PairKey, PairValue> pairs;
  IndexBuildConfig build_config;
};

enum class IndexErrorKind {
  DuplicateConflict,
  UnparseableSmiles,
  VersionMismatch,
  Io,
};

struct IndexError : std::runtime_error {
  IndexErrorKind kind;
  std::vector<std::string> offenders;  // record or drug ids
  IndexError(IndexErrorKind k, const std::string& msg,
             std::vector<std::string> ids = {})
      : std::runtime_error(msg), kind(k), offenders(std::move(ids)) {}
};

// Builds the index from training records. Explanations are masked with the
// records' name lists and re-oriented to the canonical pair order before
// storage. Throws UnparseableSmiles (listing record ids) when any SMILES
// fails to parse, and DuplicateConflict when a pair key recurs with a
// different label or masked explanation, or a drug id recurs with a
// different SMILES.
TrainingIndex build_index(const std::vector<dataset::DdiRecord>& records, int k = 50);

// Line-JSON persistence. The header record carries the tool version and the
// fingerprint version tag; loading a file whose fingerprint version differs
// from this build's is a VersionMismatch error.
void save_index(const TrainingIndex& index, const std::string& path,
                const std::string& config_hash = "", std::uint64_t seed = 0);
TrainingIndex load_index(const std::string& path);

}  // namespace ddikit::retrieval
