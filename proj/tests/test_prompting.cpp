#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include "ddikit/common/jsonl.hpp"
#include "ddikit/prompting/backend.hpp"
#include "ddikit/prompting/prompt.hpp"
#include "ddikit/retrieval/engine.hpp"

using namespace ddikit;

namespace {

const std::string kInstruction =
    "Analyze whether there exists a drug-drug interaction between the query molecules, "
    "and explain the reasons. Several examples have been given for reference, and you "
    "should consider the similarity of the molecular structures between the given "
    "examples and the query molecules. First, answer Yes/No, and then explain the "
    "reasons.";

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() /
          ("ddikit_prompting_" + std::to_string(::getpid()) + "_" + name))
      .string();
}

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

retrieval::TrainingIndex demo_index() {
  std::vector<dataset::DdiRecord> records;
  records.push_back(pair_record("R1", "DA", "CCO", "DB", "CCN", dataset::Label::Positive,
                                "DRUG1 boosts DRUG2."));
  records.push_back(pair_record("R2", "DC", "c1ccccc1O", "DD", "C1CCNCC1",
                                dataset::Label::Negative,
                                "DRUG1 does not affect DRUG2."));
  return retrieval::build_index(records, 50);
}

}  // namespace

TEST_CASE("build_prompt is byte-exact") {
  std::vector<prompting::Demonstration> demos;
  demos.push_back({"CCO", "CCN", dataset::Label::Positive, "DRUG1 boosts DRUG2."});
  demos.push_back({"c1ccccc1O", "C1CCNCC1", dataset::Label::Negative, "Nothing happens."});

  const std::string expected =
      kInstruction +
      "\n"
      "\n1. Drug1: CCO Drug2: CCN Answer: Yes. DRUG1 boosts DRUG2."
      "\n2. Drug1: c1ccccc1O Drug2: C1CCNCC1 Answer: No. Nothing happens."
      "\n\nQuery: Drug1: CCOC Drug2: CCNC Answer:";
  CHECK(prompting::build_prompt("CCOC", "CCNC", demos) == expected);

  // Zero demonstrations: instruction, blank line, query; no trailing newline.
  const std::string bare = prompting::build_prompt("CCO", "CCN", {});
  CHECK(bare == kInstruction + "\n\nQuery: Drug1: CCO Drug2: CCN Answer:");
  CHECK(bare.back() == ':');
}

TEST_CASE("demonstrations come from the ranked candidates in query orientation") {
  const auto index = demo_index();
  // Query spellings differ from the indexed strings (same molecules), so no
  // own-pair exclusion fires; drug 1 matches DB's molecule, drug 2 DA's.
  const auto set = prompting::select_demonstrations(index, "NCC", "OCC", 2, 50);
  REQUIRE(set.demos.size() == 2);
  // Top demonstration: the (DA,DB) pair oriented with DB (the drug-1 match)
  // first, its explanation placeholder-swapped to agree.
  CHECK(set.demos[0].smiles1 == "CCN");
  CHECK(set.demos[0].smiles2 == "CCO");
  CHECK(set.demos[0].label == dataset::Label::Positive);
  CHECK(set.demos[0].explanation == "DRUG2 boosts DRUG1.");
  CHECK(set.demos[1].label == dataset::Label::Negative);

  // n = 1 reproduces predict's provenance pair and explanation.
  const auto one = prompting::select_demonstrations(index, "NCC", "OCC", 1, 50);
  const auto response = retrieval::predict(index, "NCC", "OCC", 50);
  REQUIRE(one.demos.size() == 1);
  CHECK(one.demos[0].explanation == response.explanation);
  CHECK(one.demos[0].label == response.label);
  CHECK(retrieval::build_index({}, 50).pairs.empty());

  CHECK_THROWS_AS(
      (void)prompting::select_demonstrations(index, "CCO", "CCN", 0, 50),
      std::invalid_argument);
}

TEST_CASE("a demonstration shortfall adds a warning") {
  const auto index = demo_index();
  const auto set = prompting::select_demonstrations(index, "NCC", "OCC", 5, 50);
  CHECK(set.demos.size() == 2);
  bool warned = false;
  for (const auto& w : set.warnings) {
    if (w == "only 2 of 5 demonstrations available") warned = true;
  }
  CHECK(warned);

  // Exclusion warnings from the candidate search pass through.
  const auto own = prompting::select_demonstrations(index, "CCO", "CCN", 1, 50);
  bool excluded = false;
  for (const auto& w : own.warnings) {
    if (w.find("split-protocol violation") != std::string::npos) excluded = true;
  }
  CHECK(excluded);
}

TEST_CASE("parse_completion reads the leading answer word") {
  using eval::PredLabel;
  auto [l1, e1] = prompting::parse_completion("Yes. The bleeding risk increases.");
  CHECK(l1 == PredLabel::Positive);
  CHECK(e1 == "The bleeding risk increases.");

  auto [l2, e2] = prompting::parse_completion("No. Nothing was reported.");
  CHECK(l2 == PredLabel::Negative);
  CHECK(e2 == "Nothing was reported.");

  // Case-insensitive, tolerant of leading noise and padding punctuation.
  auto [l3, e3] = prompting::parse_completion("  YES:   it interacts");
  CHECK(l3 == PredLabel::Positive);
  CHECK(e3 == "it interacts");

  auto [l4, e4] = prompting::parse_completion("1. no -- they are unrelated  ");
  CHECK(l4 == PredLabel::Negative);
  CHECK(e4 == "they are unrelated");

  auto [l5, e5] = prompting::parse_completion("Yes");
  CHECK(l5 == PredLabel::Positive);
  CHECK(e5 == "");

  // Unlike the strict-format parser, the answer word is consumed.
  auto [l6, e6] = prompting::parse_completion("Maybe they interact");
  CHECK(l6 == PredLabel::Unparseable);
  CHECK(e6 == "Maybe they interact");

  auto [l7, e7] = prompting::parse_completion("");
  CHECK(l7 == PredLabel::Unparseable);

  // "Nothing" must not be read as "no" (whole-word match).
  auto [l8, e8] = prompting::parse_completion("Nothing to report");
  CHECK(l8 == PredLabel::Unparseable);
}

TEST_CASE("null backend always errors and names itself") {
  prompting::NullBackend backend;
  CHECK(backend.name() == "null");
  try {
    (void)backend.send("prompt");
    FAIL("expected BackendError");
  } catch (const prompting::BackendError& e) {
    CHECK(std::string(e.what()).find("null") != std::string::npos);
  }
}

TEST_CASE("prompt_hash is the 16-hex-digit FNV-1a of the prompt bytes") {
  // Published FNV-1a 64 test vectors.
  CHECK(prompting::ReplayBackend::prompt_hash("") == "cbf29ce484222325");
  CHECK(prompting::ReplayBackend::prompt_hash("a") == "af63dc4c8601ec8c");
  CHECK(prompting::ReplayBackend::prompt_hash("abc") == "e71fa2190541574b");
  CHECK(prompting::ReplayBackend::prompt_hash("hello world") == "779a65e7023cd2e7");
}

TEST_CASE("replay backend answers from the fixture and rejects unknown prompts") {
  const std::string path = temp_path("replay.jsonl");
  {
    jsonl::Writer w(path);
    w.write(jsonl::header_record("replay", {}));
    jsonl::json row;
    row["prompt_hash"] = prompting::ReplayBackend::prompt_hash("abc");
    row["completion"] = "Yes. Works.";
    w.write(row);
    w.close();
  }
  prompting::ReplayBackend backend(path);
  CHECK(backend.name() == "replay");
  CHECK(backend.send("abc") == "Yes. Works.");
  CHECK_THROWS_AS((void)backend.send("unknown prompt"), prompting::BackendError);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(prompting::ReplayBackend("/nonexistent/replay.jsonl"),
                  prompting::BackendError);
}

TEST_CASE("make_backend dispatches on kind") {
  prompting::HttpBackendConfig http;
  http.endpoint = "http://localhost:1/v1/complete";
  CHECK(prompting::make_backend("null", "", http)->name() == "null");
  CHECK(prompting::make_backend("http", "", http)->name() == "http");
  CHECK_THROWS_AS((void)prompting::make_backend("replay", "", http),
                  prompting::BackendError);
  CHECK_THROWS_AS((void)prompting::make_backend("oracle", "", http),
                  prompting::BackendError);
  CHECK_THROWS_AS(
      (void)prompting::make_backend(
          "http", "",
          prompting::HttpBackendConfig{"https://secure.example/v1", "", 0.0, 1000, 0, ""}),
      prompting::BackendError);
}

TEST_CASE("http backend posts the prompt and retries transient failures") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string seen_body;
  std::string seen_auth;
  server.Post("/v1/complete", [&](const httplib::Request& req, httplib::Response& res) {
    const int n = ++hits;
    seen_body = req.body;
    if (req.has_header("Authorization")) seen_auth = req.get_header_value("Authorization");
    if (n == 1) {
      res.status = 500;  // first attempt: transient failure
      return;
    }
    jsonl::json reply;
    reply["completion"] = "No. They are unrelated.";
    res.set_content(reply.dump(), "application/json");
  });
  server.Post("/v1/reject", [&](const httplib::Request&, httplib::Response& res) {
    res.status = 400;
  });

  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread runner([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("DDIKIT_TEST_API_KEY", "sekret", 1);
  prompting::HttpBackendConfig config;
  config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/complete";
  config.model = "test-model";
  config.temperature = 0.25;
  config.timeout_ms = 5000;
  config.max_retries = 2;
  config.api_key_env = "DDIKIT_TEST_API_KEY";

  prompting::HttpBackend backend(config);
  CHECK(backend.send("Query prompt") == "No. They are unrelated.");
  CHECK(hits.load() == 2);
  CHECK(seen_auth == "Bearer sekret");
  const auto body = jsonl::json::parse(seen_body);
  CHECK(body["model"] == "test-model");
  CHECK(body["temperature"].get<double>() == 0.25);
  CHECK(body["prompt"] == "Query prompt");

  // Non-retryable client errors surface immediately.
  prompting::HttpBackendConfig reject = config;
  reject.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/reject";
  reject.max_retries = 0;
  prompting::HttpBackend rejecting(reject);
  const int before = hits.load();
  CHECK_THROWS_AS((void)rejecting.send("x"), prompting::BackendError);
  CHECK(hits.load() == before);

  server.stop();
  runner.join();
  unsetenv("DDIKIT_TEST_API_KEY");
}

TEST_CASE("http backend reports exhausted retries against a closed port") {
  // Bind a port, then close it so nothing listens there.
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
  }
  prompting::HttpBackendConfig config;
  config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/complete";
  config.timeout_ms = 500;
  config.max_retries = 0;
  prompting::HttpBackend backend(config);
  try {
    (void)backend.send("x");
    FAIL("expected BackendError");
  } catch (const prompting::BackendError& e) {
    CHECK(std::string(e.what()).find("giving up after 1 attempts") != std::string::npos);
  }
}
