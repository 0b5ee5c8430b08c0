#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "ddikit/common/jsonl.hpp"
#include "ddikit/common/rng.hpp"
#include "ddikit/pipeline/run.hpp"
#include "ddikit/retrieval/engine.hpp"
#include "ddikit/version.hpp"
#include "support/retrieval_oracle.hpp"

using namespace ddikit;

namespace {

dataset::DdiRecord pair_record(const std::string& id, const std::string& d1,
                               const std::string& s1, const std::string& d2,
                               const std::string& s2, dataset::Label label,
                               const std::string& explanation) {
  dataset::DdiRecord r;
  r.record_id = id;
  r.drug1_id = d1;
  r.drug2_id = d2;
  r.smiles1 = s1;
  r.smiles2 = s2;
  r.label = label;
  r.explanation = explanation;
  return r;
}

// Four structurally distinct drugs used by the hand-built cases.
const std::string kSmilesA = "CCO";          // ethanol-like
const std::string kSmilesB = "CCN";          // amine
const std::string kSmilesC = "c1ccccc1O";    // phenol
const std::string kSmilesD = "C1CCNCC1";     // piperidine

retrieval::TrainingIndex small_index() {
  std::vector<dataset::DdiRecord> records;
  records.push_back(pair_record("R1", "DA", kSmilesA, "DB", kSmilesB,
                                dataset::Label::Positive,
                                "DRUG1 raises the plasma level of DRUG2."));
  records.push_back(pair_record("R2", "DC", kSmilesC, "DD", kSmilesD,
                                dataset::Label::Negative,
                                "No interaction between DRUG1 and DRUG2."));
  return retrieval::build_index(records, 50);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() /
          ("ddikit_retrieval_" + std::to_string(::getpid()) + "_" + name))
      .string();
}

void check_matches_oracle(const retrieval::TrainingIndex& index, const std::string& s1,
                          const std::string& s2, int k) {
  const auto got = retrieval::predict(index, s1, s2, k);
  const auto want = testsupport::oracle_predict(index, s1, s2, k);
  CAPTURE(s1);
  CAPTURE(s2);
  CAPTURE(k);
  REQUIRE(got.provenance.fallback == want.fallback);
  REQUIRE(got.label == want.label);
  REQUIRE(got.explanation == want.explanation);
  if (!want.fallback) {
    REQUIRE(got.provenance.pair == want.pair);
    REQUIRE(got.provenance.pair_score == want.pair_score);
    REQUIRE(got.provenance.sim1 == want.sim1);
    REQUIRE(got.provenance.sim2 == want.sim2);
  }
}

}  // namespace

TEST_CASE("build_index canonicalizes pairs and masks explanations") {
  std::vector<dataset::DdiRecord> records;
  dataset::DdiRecord r = pair_record("R1", "DB", kSmilesB, "DA", kSmilesA,
                                     dataset::Label::Positive,
                                     "Bexarol raises the plasma level of Axitol.");
  r.drug1_names = {"Bexarol"};
  r.drug2_names = {"Axitol"};
  r.drug1_def = "Bexarol is a test compound.";
  r.drug2_def = "Axitol is another test compound.";
  records.push_back(r);

  const auto index = retrieval::build_index(records, 7);
  CHECK(index.build_config.k == 7);
  CHECK(index.build_config.fingerprint_version == kFingerprintVersion);
  REQUIRE(index.drugs.size() == 2);
  REQUIRE(index.pairs.size() == 1);
  const auto& [key, value] = *index.pairs.begin();
  // Canonical key order is sorted ids; the record listed DB first, so the
  // stored explanation must be re-oriented to make DRUG1 = DA.
  CHECK(key == dataset::PairKey{"DA", "DB"});
  CHECK(value.label == dataset::Label::Positive);
  CHECK(value.explanation == "DRUG2 raises the plasma level of DRUG1.");
  CHECK(index.drugs.at("DA").description == "Axitol is another test compound.");
  CHECK(index.drugs.at("DA").smiles == kSmilesA);
}

TEST_CASE("build_index detects conflicts and tolerates exact duplicates") {
  auto base = pair_record("R1", "DA", kSmilesA, "DB", kSmilesB,
                          dataset::Label::Positive, "DRUG1 affects DRUG2.");
  // Exact duplicate pair: kept once.
  auto dup = base;
  dup.record_id = "R2";
  const auto ok = retrieval::build_index({base, dup});
  CHECK(ok.pairs.size() == 1);

  // Same pair, different label: conflict.
  auto conflict = base;
  conflict.record_id = "R3";
  conflict.label = dataset::Label::Negative;
  CHECK_THROWS_AS((void)retrieval::build_index({base, conflict}), retrieval::IndexError);

  // Same drug id, different SMILES: conflict.
  auto redefined = pair_record("R4", "DA", kSmilesC, "DC", kSmilesD,
                               dataset::Label::Negative, "x");
  try {
    (void)retrieval::build_index({base, redefined});
    FAIL("expected IndexError");
  } catch (const retrieval::IndexError& e) {
    CHECK(e.kind == retrieval::IndexErrorKind::DuplicateConflict);
  }

  // Unparseable SMILES: all offending record ids are listed.
  auto bad1 = pair_record("R5", "DX", "C1C", "DY", kSmilesA,
                          dataset::Label::Negative, "x");
  auto bad2 = pair_record("R6", "DZ", "totally wrong", "DA", kSmilesA,
                          dataset::Label::Negative, "x");
  try {
    (void)retrieval::build_index({base, bad1, bad2});
    FAIL("expected IndexError");
  } catch (const retrieval::IndexError& e) {
    CHECK(e.kind == retrieval::IndexErrorKind::UnparseableSmiles);
    CHECK(e.offenders == std::vector<std::string>{"R5", "R6"});
  }
}

TEST_CASE("top_k_similar ranks by similarity then id") {
  const auto index = small_index();
  const auto fp_query = fp::compute_keys(chem::parse_molecule(kSmilesA));
  const auto nbrs = retrieval::top_k_similar(index, fp_query, 10);
  REQUIRE(nbrs.size() == index.drugs.size());
  CHECK(nbrs.front().drug_id == "DA");
  CHECK(nbrs.front().similarity == 1.0);
  for (std::size_t i = 1; i < nbrs.size(); ++i) {
    const bool ordered =
        nbrs[i - 1].similarity > nbrs[i].similarity ||
        (nbrs[i - 1].similarity == nbrs[i].similarity &&
         nbrs[i - 1].drug_id < nbrs[i].drug_id);
    CHECK(ordered);
  }
  CHECK(retrieval::top_k_similar(index, fp_query, 1).size() == 1);
  CHECK_THROWS_AS(retrieval::top_k_similar(index, fp_query, 0), std::invalid_argument);
}

TEST_CASE("rank_candidate_pairs multiplies similarities and filters to the index") {
  const auto index = small_index();
  std::vector<retrieval::Neighbor> nbrs1 = {{"DA", 0.9}, {"DC", 0.5}, {"DD", 0.4}};
  std::vector<retrieval::Neighbor> nbrs2 = {{"DB", 0.8}, {"DD", 0.6}, {"DA", 0.3}};
  const auto ranked = retrieval::rank_candidate_pairs(nbrs1, nbrs2, index);
  // Indexed pairs are (DA,DB) and (DC,DD); candidates: DA*DB=0.72,
  // DC*DD=0.30; DD (from nbrs1) with DA→ (DA,DD) unindexed; DA-DA skipped.
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].first == dataset::PairKey{"DA", "DB"});
  CHECK(ranked[0].second == doctest::Approx(0.72).epsilon(1e-12));
  CHECK(ranked[1].first == dataset::PairKey{"DC", "DD"});
  CHECK(ranked[1].second == doctest::Approx(0.30).epsilon(1e-12));
}

TEST_CASE("ranked duplicates keep the better orientation product") {
  const auto index = small_index();
  // (DA,DB) reachable both ways with different products: 0.9*0.2 vs 0.7*0.8.
  std::vector<retrieval::Neighbor> nbrs1 = {{"DA", 0.9}, {"DB", 0.7}};
  std::vector<retrieval::Neighbor> nbrs2 = {{"DB", 0.2}, {"DA", 0.8}};
  const auto ranked = retrieval::rank_candidate_pairs(nbrs1, nbrs2, index);
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].second == doctest::Approx(0.56).epsilon(1e-12));
}

TEST_CASE("predict orients the retrieved explanation to the query order") {
  const auto index = small_index();
  // "NCC"/"OCC" are the indexed molecules written differently: identical
  // fingerprints (similarity 1.0) without triggering the exact-SMILES
  // own-pair exclusion. Query drug 1 ~ DB and drug 2 ~ DA, so the stored
  // (DA,DB) explanation must come back with placeholders swapped.
  const auto response = retrieval::predict(index, "NCC", "OCC", 50);
  CHECK(response.label == dataset::Label::Positive);
  CHECK(response.provenance.pair == dataset::PairKey{"DA", "DB"});
  CHECK(response.explanation == "DRUG2 raises the plasma level of DRUG1.");
  CHECK(response.provenance.sim1 == 1.0);
  CHECK(response.provenance.sim2 == 1.0);

  const auto forward = retrieval::predict(index, "OCC", "NCC", 50);
  CHECK(forward.provenance.pair == dataset::PairKey{"DA", "DB"});
  CHECK(forward.explanation == "DRUG1 raises the plasma level of DRUG2.");
}

TEST_CASE("querying an indexed pair excludes it and warns") {
  std::vector<dataset::DdiRecord> records;
  records.push_back(pair_record("R1", "DA", kSmilesA, "DB", kSmilesB,
                                dataset::Label::Positive, "DRUG1 affects DRUG2."));
  records.push_back(pair_record("R2", "DA", kSmilesA, "DC", kSmilesC,
                                dataset::Label::Negative,
                                "DRUG1 and DRUG2 do not interact."));
  const auto index = retrieval::build_index(records);

  const auto response = retrieval::predict(index, kSmilesA, kSmilesB, 50);
  CHECK(response.provenance.pair != dataset::PairKey{"DA", "DB"});
  REQUIRE(!response.warnings.empty());
  CHECK(response.warnings.front().find("split-protocol violation") !=
        std::string::npos);
  check_matches_oracle(index, kSmilesA, kSmilesB, 50);
}

TEST_CASE("k widening warns and eventually reaches the whole drug list") {
  // DA pairs only with DD; with k=1 the neighbor lists are too narrow, so
  // the search must widen before it finds the (DA,DD) pair.
  std::vector<dataset::DdiRecord> records;
  records.push_back(pair_record("R1", "DA", kSmilesA, "DD", kSmilesD,
                                dataset::Label::Positive, "DRUG1 boosts DRUG2."));
  records.push_back(pair_record("R2", "DB", kSmilesB, "DC", kSmilesC,
                                dataset::Label::Negative, "Nothing."));
  const auto index = retrieval::build_index(records);
  const auto response = retrieval::predict(index, kSmilesB, kSmilesB, 1);
  CHECK_FALSE(response.provenance.fallback);
  bool widened = false;
  for (const auto& w : response.warnings) {
    if (w.find("widening to k=") != std::string::npos) widened = true;
  }
  CHECK(widened);
  check_matches_oracle(index, kSmilesB, kSmilesB, 1);
}

TEST_CASE("fallback returns the templated negative with descriptions when known") {
  std::vector<dataset::DdiRecord> records;
  auto r = pair_record("R1", "DA", kSmilesA, "DB", kSmilesB, dataset::Label::Positive,
                       "DRUG1 affects DRUG2.");
  r.drug1_def = "A test alcohol.";
  r.drug2_def = "A test amine.";
  records.push_back(r);
  auto index = retrieval::build_index(records);
  index.pairs.clear();  // no pair can ever match

  const auto response = retrieval::predict(index, kSmilesA, kSmilesB, 50);
  CHECK(response.provenance.fallback);
  CHECK(response.label == dataset::Label::Negative);
  CHECK(response.explanation ==
        "A test alcohol. A test amine. "
        "There were no known direct interactions reported between them.");
  bool fallback_warned = false;
  for (const auto& w : response.warnings) {
    if (w.find("retrieval fallback") != std::string::npos) fallback_warned = true;
  }
  CHECK(fallback_warned);

  // Unknown query drugs fall back to the placeholder literals.
  const auto unknown = retrieval::predict(index, kSmilesC, kSmilesD, 50);
  CHECK(unknown.provenance.fallback);
  CHECK(unknown.explanation ==
        "DRUG1. DRUG2. There were no known direct interactions reported between them.");

  // Empty index behaves the same way.
  retrieval::TrainingIndex empty;
  const auto none = retrieval::predict(empty, kSmilesA, kSmilesB, 50);
  CHECK(none.provenance.fallback);
  CHECK(none.label == dataset::Label::Negative);
}

TEST_CASE("unparseable query SMILES names the offending argument") {
  const auto index = small_index();
  try {
    (void)retrieval::predict(index, "C1C", kSmilesB, 50);
    FAIL("expected IndexError");
  } catch (const retrieval::IndexError& e) {
    CHECK(e.kind == retrieval::IndexErrorKind::UnparseableSmiles);
    CHECK(e.offenders == std::vector<std::string>{"smiles1"});
  }
  try {
    (void)retrieval::predict(index, kSmilesA, "", 50);
    FAIL("expected IndexError");
  } catch (const retrieval::IndexError& e) {
    CHECK(e.offenders == std::vector<std::string>{"smiles2"});
  }
}

TEST_CASE("index save/load round-trips and enforces the fingerprint version") {
  const auto index = small_index();
  const std::string path = temp_path("index.jsonl");
  retrieval::save_index(index, path, "00000000deadbeef", 3);
  const auto loaded = retrieval::load_index(path);
  CHECK(loaded.drugs.size() == index.drugs.size());
  CHECK(loaded.pairs.size() == index.pairs.size());
  for (const auto& [id, entry] : index.drugs) {
    const auto& other = loaded.drugs.at(id);
    CHECK(other.smiles == entry.smiles);
    CHECK(other.fingerprint == entry.fingerprint);
    CHECK(other.description == entry.description);
  }
  for (const auto& [key, value] : index.pairs) {
    const auto& other = loaded.pairs.at(key);
    CHECK(other.label == value.label);
    CHECK(other.explanation == value.explanation);
  }
  CHECK(loaded.build_config.k == index.build_config.k);

  // Tampered fingerprint version must be refused.
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  in.close();
  const auto pos = content.find(kFingerprintVersion);
  REQUIRE(pos != std::string::npos);
  content.replace(pos, std::string(kFingerprintVersion).size(), "skeys166/9");
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  try {
    (void)retrieval::load_index(path);
    FAIL("expected IndexError");
  } catch (const retrieval::IndexError& e) {
    CHECK(e.kind == retrieval::IndexErrorKind::VersionMismatch);
  }
  std::filesystem::remove(path);
}

TEST_CASE("predict_batch matches sequential prediction in order") {
  const auto index = small_index();
  std::vector<std::pair<std::string, std::string>> queries = {
      {kSmilesA, kSmilesB}, {kSmilesB, kSmilesA}, {kSmilesC, kSmilesD},
      {kSmilesD, kSmilesA}, {kSmilesB, kSmilesC}, {kSmilesA, kSmilesA},
      {kSmilesC, kSmilesA}, {kSmilesD, kSmilesB},
  };
  const auto parallel = retrieval::predict_batch(index, queries, 50, 4);
  REQUIRE(parallel.size() == queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto solo = retrieval::predict(index, queries[i].first, queries[i].second, 50);
    CHECK(parallel[i].label == solo.label);
    CHECK(parallel[i].explanation == solo.explanation);
    CHECK(parallel[i].provenance.pair == solo.provenance.pair);
    CHECK(parallel[i].provenance.fallback == solo.provenance.fallback);
    CHECK(parallel[i].warnings == solo.warnings);
  }
  // Errors propagate out of worker threads.
  queries.push_back({"C1C", kSmilesA});
  CHECK_THROWS_AS((void)retrieval::predict_batch(index, queries, 50, 4),
                  retrieval::IndexError);
}

TEST_CASE("engine matches the straight-line oracle on a synthetic corpus") {
  const std::string data_path = temp_path("fixture.jsonl");
  const auto info = pipeline::generate_fixture(60, 120, 2024, data_path);
  auto ingest = dataset::ingest_records(data_path);
  dataset::mask_all(ingest.records);
  const auto index = retrieval::build_index(ingest.records, 50);
  std::filesystem::remove(data_path);

  // Random drug pairs from the fixture, plus novel variants, at several k.
  std::vector<std::string> smiles;
  for (const auto& [id, entry] : index.drugs) smiles.push_back(entry.smiles);
  Rng rng(77);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto& s1 = smiles[static_cast<std::size_t>(rng.below(smiles.size()))];
    std::string s2 = smiles[static_cast<std::size_t>(rng.below(smiles.size()))];
    if (trial % 5 == 0) s2 += "C";  // novel molecule, absent from the index
    const int k = trial % 3 == 0 ? 1 : (trial % 3 == 1 ? 5 : 50);
    check_matches_oracle(index, s1, s2, k);
    ++checked;
  }
  CHECK(checked == 150);
}
