#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddikit/chem/smiles.hpp"
#include "ddikit/common/rng.hpp"
#include "ddikit/fp/keys.hpp"

using namespace ddikit;

namespace {

nlohmann::json load_fixture(const std::string& name) {
  std::ifstream in(std::string(DDIKIT_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

fp::Fingerprint random_fp(Rng& rng, int max_bits) {
  fp::Fingerprint f;
  const int n = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_bits) + 1));
  for (int i = 0; i < n; ++i) {
    f.set(static_cast<int>(rng.below(fp::Fingerprint::kBits)));
  }
  return f;
}

}  // namespace

TEST_CASE("structural keys match the frozen reference fixture bit for bit") {
  const auto fixture = load_fixture("structural_keys_20.json");
  REQUIRE(fixture.size() == 20);
  for (const auto& record : fixture) {
    CAPTURE(record["name"].get<std::string>());
    const auto mol = chem::parse_molecule(record["smiles"].get<std::string>());
    const fp::Fingerprint fingerprint = fp::compute_keys(mol);
    CHECK(fingerprint.to_hex() == record["hex"].get<std::string>());
    std::set<int> expected(record["bits"].begin(), record["bits"].end());
    for (int key = 1; key <= fp::Fingerprint::kBits; ++key) {
      const bool want = expected.count(key) > 0;
      if (fingerprint.test(key - 1) != want) {
        CAPTURE(key);
        CHECK(fingerprint.test(key - 1) == want);
      }
    }
  }
}

TEST_CASE("unimplemented keys never fire") {
  const auto fixture = load_fixture("structural_keys_20.json");
  const auto dead = fp::unimplemented_keys();
  for (const auto& record : fixture) {
    const auto mol = chem::parse_molecule(record["smiles"].get<std::string>());
    const fp::Fingerprint fingerprint = fp::compute_keys(mol);
    for (int key : dead) CHECK_FALSE(fingerprint.test(key - 1));
  }
}

TEST_CASE("key table is complete and ordered") {
  const auto& table = fp::key_table();
  REQUIRE(table.size() == 166);
  for (int i = 0; i < 166; ++i) CHECK(table[static_cast<std::size_t>(i)].key == i + 1);
}

TEST_CASE("hex round trip") {
  Rng rng(991);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = random_fp(rng, 166);
    const auto hex = f.to_hex();
    CHECK(hex.size() == 42);
    CHECK(fp::Fingerprint::from_hex(hex) == f);
  }
  CHECK_THROWS(fp::Fingerprint::from_hex("zz"));
  CHECK_THROWS(fp::Fingerprint::from_hex("00"));
}

TEST_CASE("tanimoto on known bit sets") {
  fp::Fingerprint a, b;
  for (int bit : {1, 2, 3}) a.set(bit);
  for (int bit : {2, 3, 4}) b.set(bit);
  CHECK(fp::tanimoto(a, b) == doctest::Approx(0.5).epsilon(1e-15));  // 2 / 4

  fp::Fingerprint empty1, empty2;
  CHECK(fp::tanimoto(empty1, empty2) == 1.0);
  CHECK(fp::tanimoto(empty1, a) == 0.0);
  CHECK(fp::tanimoto(a, a) == 1.0);
}

TEST_CASE("tanimoto axioms on random pairs") {
  Rng rng(1234);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto a = random_fp(rng, 80);
    const auto b = random_fp(rng, 80);
    const double ab = fp::tanimoto(a, b);
    const double ba = fp::tanimoto(b, a);
    REQUIRE(ab == ba);
    REQUIRE(ab >= 0.0);
    REQUIRE(ab <= 1.0);
    REQUIRE(fp::tanimoto(a, a) == 1.0);
    // Exact rational check against a bit-by-bit recount.
    int inter = 0, uni = 0;
    for (int i = 0; i < fp::Fingerprint::kBits; ++i) {
      inter += a.test(i) && b.test(i);
      uni += a.test(i) || b.test(i);
    }
    const double expected = uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
    REQUIRE(ab == expected);
  }
}

TEST_CASE("keys are invariant under SMILES re-serialization") {
  const auto fixture = load_fixture("structural_keys_20.json");
  for (const auto& record : fixture) {
    const auto mol = chem::parse_molecule(record["smiles"].get<std::string>());
    const auto rewritten = chem::parse_molecule(chem::write_smiles(mol));
    CHECK(fp::compute_keys(mol) == fp::compute_keys(rewritten));
  }
}
