#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ddikit/common/jsonl.hpp"
#include "ddikit/dataset/preprocess.hpp"
#include "ddikit/dataset/split.hpp"

using namespace ddikit;
using jsonl::json;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("ddikit_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& line : lines) out << line << "\n";
}

json valid_record(const std::string& record_id, const std::string& d1,
                  const std::string& d2, const std::string& label,
                  const std::string& explanation) {
  json j;
  j["record_id"] = record_id;
  j["drug1_id"] = d1;
  j["drug2_id"] = d2;
  j["smiles1"] = "CCO";
  j["smiles2"] = "CCN";
  j["label"] = label;
  j["explanation"] = explanation;
  return j;
}

dataset::DdiRecord make_record(const std::string& id, const std::string& d1,
                               const std::string& d2) {
  dataset::DdiRecord r;
  r.record_id = id;
  r.drug1_id = d1;
  r.drug2_id = d2;
  r.smiles1 = "CCO";
  r.smiles2 = "CCN";
  r.label = dataset::Label::Positive;
  r.explanation = "x";
  return r;
}

}  // namespace

TEST_CASE("ingest keeps valid records and reports the rest line by line") {
  TempDir dir;
  const std::string path = dir.file("data.jsonl");
  write_lines(path, {
      jsonl::header_record("dataset").dump(),
      valid_record("R1", "D1", "D2", "positive", "DRUG1 affects DRUG2.").dump(),
      "{not json",                                                       // bad JSON
      valid_record("R2", "D3", "D3", "positive", "x").dump(),            // same drug twice
      valid_record("R1", "D4", "D5", "negative", "").dump(),             // duplicate id
      R"({"record_id":"R3","drug1_id":"D6","drug2_id":"D7","smiles1":"C1C","smiles2":"CC","label":"positive","explanation":"x"})",  // bad SMILES
      valid_record("R4", "D8", "D9", "maybe", "x").dump(),               // bad label
      R"({"record_id":"R5","drug1_id":"D1","drug2_id":"D9","smiles1":"CCC","smiles2":"CC","label":"negative","explanation":""})",   // D1 SMILES conflict
      valid_record("R6", "D10", "D11", "positive", "").dump(),           // positive needs explanation
      valid_record("R7", "D12", "D13", "negative", "").dump(),
  });
  const auto result = dataset::ingest_records(path);
  CHECK(result.report.n_valid == 2);
  CHECK(result.report.n_excluded == 7);
  REQUIRE(result.records.size() == 2);
  CHECK(result.records[0].record_id == "R1");
  CHECK(result.records[1].record_id == "R7");
  CHECK(result.records[1].label == dataset::Label::Negative);
  REQUIRE(result.report.issues.size() == 7);
  CHECK(result.report.issues[0].line == 3);
  // Line numbers are 1-based and skip nothing.
  std::set<std::size_t> lines;
  for (const auto& issue : result.report.issues) lines.insert(issue.line);
  CHECK(lines == std::set<std::size_t>{3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("ingest error taxonomy") {
  CHECK_THROWS_AS(dataset::ingest_records("/nonexistent/file.jsonl"),
                  dataset::DatasetError);
  try {
    dataset::ingest_records("/nonexistent/file.jsonl");
  } catch (const dataset::DatasetError& e) {
    CHECK(e.kind == dataset::DatasetErrorKind::FileNotFound);
  }

  TempDir dir;
  const std::string path = dir.file("bad.jsonl");
  write_lines(path, {"{broken", "{\"record_id\": 5}"});
  try {
    dataset::ingest_records(path);
    FAIL("expected DatasetError");
  } catch (const dataset::DatasetError& e) {
    CHECK(e.kind == dataset::DatasetErrorKind::SchemaError);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }

  // Zero issues and zero records (empty file) is not a schema error.
  const std::string empty = dir.file("empty.jsonl");
  write_lines(empty, {jsonl::header_record("dataset").dump()});
  const auto result = dataset::ingest_records(empty);
  CHECK(result.records.empty());
  CHECK(result.report.issues.empty());
}

TEST_CASE("collect_drugs unions names and keeps the first definition") {
  dataset::DdiRecord a = make_record("R1", "D2", "D1");
  a.drug1_names = {"Beta", "Betamax"};
  a.drug1_def = "Beta def.";
  a.drug2_names = {"Alpha"};
  dataset::DdiRecord b = make_record("R2", "D1", "D2");
  b.drug1_names = {"Alphonse"};
  b.drug1_def = "Alpha def.";
  b.drug2_names = {"Beta"};
  b.drug2_def = "ignored; D2 already has one";

  const auto drugs = dataset::collect_drugs({a, b});
  REQUIRE(drugs.size() == 2);
  CHECK(drugs[0].id == "D1");
  CHECK(drugs[0].names == std::vector<std::string>{"Alpha", "Alphonse"});
  CHECK(drugs[0].def == "Alpha def.");
  CHECK(drugs[1].id == "D2");
  CHECK(drugs[1].names == std::vector<std::string>{"Beta", "Betamax"});
  CHECK(drugs[1].def == "Beta def.");
}

TEST_CASE("mask_drug_names is whole-word, case-insensitive, longest-first") {
  const std::vector<std::string> names1 = {"Aspirin"};
  const std::vector<std::string> names2 = {"Warfarin", "Warfarin sodium"};
  CHECK(dataset::mask_drug_names(
            "Aspirin may increase the anticoagulant activities of Warfarin sodium.",
            names1, names2) ==
        "DRUG1 may increase the anticoagulant activities of DRUG2.");
  // Case-insensitive.
  CHECK(dataset::mask_drug_names("ASPIRIN and warfarin interact.", names1, names2) ==
        "DRUG1 and DRUG2 interact.");
  // Whole-word: no match inside a longer word.
  CHECK(dataset::mask_drug_names("Aspirinol is unrelated to Aspirin.", names1, names2) ==
        "Aspirinol is unrelated to DRUG1.");
  // Idempotent: placeholders survive a second pass.
  const std::string once =
      dataset::mask_drug_names("Aspirin boosts Warfarin.", names1, names2);
  CHECK(dataset::mask_drug_names(once, names1, names2) == once);
}

TEST_CASE("swap_drug_placeholders is simultaneous") {
  CHECK(dataset::swap_drug_placeholders("DRUG1 inhibits DRUG2.") ==
        "DRUG2 inhibits DRUG1.");
  CHECK(dataset::swap_drug_placeholders("DRUG2 then DRUG2 then DRUG1") ==
        "DRUG1 then DRUG1 then DRUG2");
  CHECK(dataset::swap_drug_placeholders("no placeholders") == "no placeholders");
}

TEST_CASE("negative_explanation matches the template byte for byte") {
  CHECK(dataset::negative_explanation("DRUG1 is an antibiotic", "DRUG2 is a diuretic.") ==
        "DRUG1 is an antibiotic. DRUG2 is a diuretic. "
        "There were no known direct interactions reported between them.");
  // Already-terminated definitions are not double-dotted; whitespace trimmed.
  CHECK(dataset::negative_explanation("  A.  ", "B") ==
        "A. B. There were no known direct interactions reported between them.");
  CHECK_THROWS_AS(dataset::negative_explanation("", "B"), dataset::DatasetError);
  try {
    dataset::negative_explanation("A", "   ");
    FAIL("expected DatasetError");
  } catch (const dataset::DatasetError& e) {
    CHECK(e.kind == dataset::DatasetErrorKind::EmptyDefinition);
  }
}

TEST_CASE("build_target_sequence matches the sequence format byte for byte") {
  CHECK(dataset::build_target_sequence(dataset::Label::Positive,
                                       "DRUG1 slows DRUG2 clearance.") ==
        "<s> positive Explanation: DRUG1 slows DRUG2 clearance. </s>");
  CHECK(dataset::build_target_sequence(dataset::Label::Negative, "None known.") ==
        "<s> negative Explanation: None known. </s>");
}

TEST_CASE("sample_negatives avoids positives, self-pairs, and duplicates") {
  std::vector<dataset::DdiRecord> positives;
  std::vector<dataset::DrugInfo> pool;
  for (int i = 0; i < 12; ++i) {
    dataset::DrugInfo d;
    d.id = "D" + std::to_string(i);
    d.smiles = "CCO";
    d.names = {"Name" + std::to_string(i)};
    d.def = "Def " + std::to_string(i) + ".";
    pool.push_back(d);
  }
  for (int i = 0; i < 6; ++i) {
    positives.push_back(make_record("R" + std::to_string(i), "D" + std::to_string(i),
                                    "D" + std::to_string(i + 1)));
  }
  const auto negatives = dataset::sample_negatives(positives, pool, 7);
  CHECK(negatives.size() == positives.size());
  std::set<dataset::PairKey> positive_keys, seen;
  for (const auto& r : positives) positive_keys.insert(dataset::pair_key_of(r));
  for (const auto& r : negatives) {
    CHECK(r.label == dataset::Label::Negative);
    CHECK(r.drug1_id != r.drug2_id);
    CHECK(r.drug1_id <= r.drug2_id);  // canonical order
    const auto key = dataset::pair_key_of(r);
    CHECK(positive_keys.count(key) == 0);
    CHECK(seen.insert(key).second);
    CHECK(r.explanation.find("There were no known direct interactions") !=
          std::string::npos);
    CHECK(r.record_id.substr(0, 1) == "N");
  }
  // Deterministic under the seed.
  const auto again = dataset::sample_negatives(positives, pool, 7);
  REQUIRE(again.size() == negatives.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].drug1_id == negatives[i].drug1_id);
    CHECK(again[i].drug2_id == negatives[i].drug2_id);
  }
  // Different seed, different draw (overwhelmingly likely with 60 candidates).
  const auto other = dataset::sample_negatives(positives, pool, 8);
  bool any_diff = false;
  for (std::size_t i = 0; i < other.size(); ++i) {
    any_diff |= other[i].drug1_id != negatives[i].drug1_id ||
                other[i].drug2_id != negatives[i].drug2_id;
  }
  CHECK(any_diff);
}

TEST_CASE("sample_negatives exhausts the pool loudly") {
  std::vector<dataset::DdiRecord> positives = {make_record("R0", "DA", "DB")};
  std::vector<dataset::DrugInfo> pool;
  for (const char* id : {"DA", "DB"}) {
    dataset::DrugInfo d;
    d.id = id;
    d.def = "Def.";
    pool.push_back(d);
  }
  try {
    dataset::sample_negatives(positives, pool, 1);
    FAIL("expected DatasetError");
  } catch (const dataset::DatasetError& e) {
    CHECK(e.kind == dataset::DatasetErrorKind::PoolExhausted);
  }
}

TEST_CASE("transductive split: disjoint exhaustive test tiles, 10% val") {
  std::vector<dataset::DdiRecord> records;
  for (int i = 0; i < 103; ++i) {
    records.push_back(make_record("R" + std::to_string(i), "D" + std::to_string(i),
                                  "D" + std::to_string(i + 1)));
  }
  const auto folds = dataset::split_transductive(records, 42, 5);
  REQUIRE(folds.size() == 5);
  std::map<std::string, int> test_count;
  for (const auto& fold : folds) {
    REQUIRE(fold.roles.size() == records.size());
    std::size_t n_test = 0, n_val = 0, n_train = 0;
    for (const auto& [id, role] : fold.roles) {
      if (role == dataset::Role::Test) {
        ++n_test;
        ++test_count[id];
      } else if (role == dataset::Role::Val) {
        ++n_val;
      } else if (role == dataset::Role::Train) {
        ++n_train;
      } else {
        FAIL("unexpected role in transductive split");
      }
    }
    CHECK(n_val == records.size() / 10);
    CHECK(n_test + n_val + n_train == records.size());
    // Tile size is N/5 rounded by tile boundaries: between floor and ceil.
    CHECK(n_test >= records.size() / 5);
    CHECK(n_test <= records.size() / 5 + 1);
  }
  // Disjoint and exhaustive across the 5 folds.
  CHECK(test_count.size() == records.size());
  for (const auto& [id, n] : test_count) {
    CAPTURE(id);
    CHECK(n == 1);
  }
  // Deterministic.
  const auto again = dataset::split_transductive(records, 42, 5);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    CHECK(again[f].roles == folds[f].roles);
  }
  // folds parameter caps at 5 (tiles are fifths).
  CHECK_THROWS_AS(dataset::split_transductive(records, 42, 6), std::invalid_argument);
  CHECK(dataset::split_transductive(records, 42, 2).size() == 2);
}

TEST_CASE("inductive split role rules follow the drug partition") {
  std::vector<dataset::DdiRecord> records;
  int rec = 0;
  for (int i = 0; i < 40; ++i) {
    for (int j = i + 1; j < 40; j += 7) {
      records.push_back(make_record("R" + std::to_string(rec++), "D" + std::to_string(i),
                                    "D" + std::to_string(j)));
    }
  }
  const auto folds = dataset::split_inductive(records, 9, 3);
  REQUIRE(folds.size() == 3);
  for (const auto& fold : folds) {
    REQUIRE_FALSE(fold.drug_partition.empty());
    std::size_t m1 = 0, m2 = 0, m3 = 0;
    for (const auto& [id, bucket] : fold.drug_partition) {
      if (bucket == dataset::Bucket::M1) ++m1;
      if (bucket == dataset::Bucket::M2) ++m2;
      if (bucket == dataset::Bucket::M3) ++m3;
    }
    const std::size_t n = fold.drug_partition.size();
    CHECK(m1 == n * 75 / 100);
    CHECK(m1 + m2 == n * 80 / 100);
    CHECK(m1 + m2 + m3 == n);

    for (const auto& r : records) {
      const auto b1 = fold.drug_partition.at(r.drug1_id);
      const auto b2 = fold.drug_partition.at(r.drug2_id);
      const auto role = fold.roles.at(r.record_id);
      const int n_m3 = (b1 == dataset::Bucket::M3) + (b2 == dataset::Bucket::M3);
      const int n_m2 = (b1 == dataset::Bucket::M2) + (b2 == dataset::Bucket::M2);
      CAPTURE(r.record_id);
      if (n_m3 == 2) {
        CHECK(role == dataset::Role::TestS1);
      } else if (n_m3 == 1 && n_m2 == 0) {
        CHECK(role == dataset::Role::TestS2);
      } else if (n_m3 == 1 && n_m2 == 1) {
        CHECK(role == dataset::Role::Discarded);
      } else if (n_m2 >= 1) {
        CHECK(role == dataset::Role::Val);
      } else {
        CHECK(role == dataset::Role::Train);
      }
    }
  }
  // Fold partitions differ (a single continuing shuffle stream).
  CHECK(folds[0].drug_partition != folds[1].drug_partition);
}

TEST_CASE("split files round-trip") {
  TempDir dir;
  std::vector<dataset::DdiRecord> records;
  for (int i = 0; i < 30; ++i) {
    records.push_back(make_record("R" + std::to_string(i), "D" + std::to_string(i % 9),
                                  "D" + std::to_string(i % 9 + 1 + i % 3)));
  }
  const auto folds = dataset::split_inductive(records, 4, 2);
  const std::string path = dir.file("split.jsonl");
  dataset::save_split(folds, path, "cafebabe00000000", 4);
  const auto loaded = dataset::load_split(path);
  REQUIRE(loaded.size() == folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    CHECK(loaded[f].fold == folds[f].fold);
    CHECK(loaded[f].setting == folds[f].setting);
    CHECK(loaded[f].roles == folds[f].roles);
  }
  // records_with_role preserves input order.
  const auto train = dataset::records_with_role(records, folds[0], dataset::Role::Train);
  for (std::size_t i = 1; i < train.size(); ++i) {
    const int a = std::stoi(train[i - 1].record_id.substr(1));
    const int b = std::stoi(train[i].record_id.substr(1));
    CHECK(a < b);
  }
  // Malformed file reports the line.
  const std::string bad = dir.file("bad.jsonl");
  write_lines(bad, {jsonl::header_record("split").dump(), "{\"record_id\":\"R1\"}"});
  CHECK_THROWS_AS(dataset::load_split(bad), jsonl::IoError);
}

TEST_CASE("mask_all applies record-level names to explanations") {
  dataset::DdiRecord r = make_record("R1", "DA", "DB");
  r.drug1_names = {"Aspirin"};
  r.drug2_names = {"Warfarin"};
  r.explanation = "Aspirin may increase the anticoagulant activities of Warfarin.";
  std::vector<dataset::DdiRecord> records = {r};
  dataset::mask_all(records);
  CHECK(records[0].explanation ==
        "DRUG1 may increase the anticoagulant activities of DRUG2.");
}
