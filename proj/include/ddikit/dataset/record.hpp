#pragma once

// Drug-drug interaction records: the JSONL ingestion schema, label/source
// vocabulary, and the canonical unordered pair key used across the library.
//
// Dataset JSONL schema (one object per line; a leading {"_header": ...}
// record is permitted and skipped):
//   record_id    string, unique
//   drug1_id     string
//   drug2_id     string, != drug1_id
//   smiles1      string, parseable SMILES
//   smiles2      string, parseable SMILES
//   drug1_names  array of strings (name + synonyms; used for masking); optional
//   drug2_names  array of strings; optional
//   drug1_def    string description; optional
//   drug2_def    string description; optional
//   label        "positive" | "negative"
//   explanation  string; required non-empty for positive records
//   source       "ddinter" | "drugbank" | "synthetic"; optional (default synthetic)
//   category     string mechanism category; optional (used for multi-class eval)

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ddikit::dataset {

enum class Label { Negative = 0, Positive = 1 };

enum class Source { DdInter, DrugBank, Synthetic };

std::string label_to_string(Label label);
Label label_from_string(const std::string& text);  // throws std::invalid_argument
std::string source_to_string(Source source);
Source source_from_string(const std::string& text);  // throws std::invalid_argument

struct DdiRecord {
  std::string record_id;
  std::string drug1_id;
  std::string drug2_id;
  std::string smiles1;
  std::string smiles2;
  std::vector<std::string> drug1_names;
  std::vector<std::string> drug2_names;
  std::string drug1_def;
  std::string drug2_def;
  Label label = Label::Negative;
  std::string explanation;
  Source source = Source::Synthetic;
  std::string category;  // empty when the dataset carries no category column
};

// Canonical unordered pair key: lexicographically smaller id first.
using PairKey = std::pair<std::string, std::string>;

inline PairKey make_pair_key(const std::string& a, const std::string& b) {
  return a <= b ? PairKey{a, b} : PairKey{b, a};
}

inline PairKey pair_key_of(const DdiRecord& r) {
  return make_pair_key(r.drug1_id, r.drug2_id);
}

enum class DatasetErrorKind {
  FileNotFound,
  SchemaError,
  PoolExhausted,
  EmptyDefinition,
};

struct DatasetError : std::runtime_error {
  DatasetErrorKind kind;
  DatasetError(DatasetErrorKind k, const std::string& msg)
      : std::runtime_error(msg), kind(k) {}
};

struct IngestIssue {
  std::size_t line;  // 1-based line number in the input file
  std::string message;
};

struct IngestReport {
  std::vector<IngestIssue> issues;
  std::size_t n_valid = 0;
  std::size_t n_excluded = 0;
};

struct IngestResult {
  std::vector<DdiRecord> records;
  IngestReport report;
};

// Reads and validates a dataset JSONL file. Lines that violate the schema
// (bad JSON, missing/ill-typed fields, unparseable SMILES, id invariants)
// are excluded and listed in the report with their line numbers. Throws
// FileNotFound when the file cannot be opened and SchemaError when the file
// yields no valid record at all.
IngestResult ingest_records(const std::string& path);

// One drug with everything needed for masking and negative templating.
struct DrugInfo {
  std::string id;
  std::string smiles;
  std::vector<std::string> names;
  std::string def;
};

// Collects the distinct drugs mentioned by the records, sorted by id.
// Name lists are unioned; the first non-empty definition wins.
std::vector<DrugInfo> collect_drugs(const std::vector<DdiRecord>& records);

}  // namespace ddikit::dataset
