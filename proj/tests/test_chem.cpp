#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "ddikit/chem/smiles.hpp"

using namespace ddikit;

namespace {

chem::Molecule parse(const std::string& s) { return chem::parse_molecule(s); }

int count_h(const chem::Molecule& m) {
  int total = 0;
  for (const auto& a : m.atoms) total += a.total_h();
  return total;
}

}  // namespace

TEST_CASE("linear chains get the right implicit hydrogens") {
  const auto ethanol = parse("CCO");
  REQUIRE(ethanol.n_atoms() == 3);
  REQUIRE(ethanol.n_bonds() == 2);
  CHECK(ethanol.atoms[0].total_h() == 3);
  CHECK(ethanol.atoms[1].total_h() == 2);
  CHECK(ethanol.atoms[2].total_h() == 1);
  CHECK(count_h(ethanol) == 6);  // C2H6O

  const auto acetic = parse("CC(=O)O");
  REQUIRE(acetic.n_atoms() == 4);
  CHECK(acetic.atoms[1].total_h() == 0);  // carbonyl carbon: double bond counts twice
  CHECK(count_h(acetic) == 4);            // C2H4O2
}

TEST_CASE("bond orders parse") {
  const auto m = parse("C=CC#N");
  REQUIRE(m.n_bonds() == 3);
  CHECK(m.bonds[0].order == chem::BondOrder::Double);
  CHECK(m.bonds[1].order == chem::BondOrder::Single);
  CHECK(m.bonds[2].order == chem::BondOrder::Triple);
  CHECK(m.atoms[3].total_h() == 0);  // nitrile N
}

TEST_CASE("branches attach to the correct atom") {
  const auto isobutane = parse("CC(C)C");
  REQUIRE(isobutane.n_atoms() == 4);
  CHECK(isobutane.degree(1) == 3);
  CHECK(isobutane.atoms[1].total_h() == 1);
  CHECK(isobutane.bond_between(1, 3) != nullptr);
  CHECK(isobutane.bond_between(0, 3) == nullptr);

  const auto nested = parse("CC(C(C)C)C");
  REQUIRE(nested.n_atoms() == 6);
  CHECK(nested.degree(2) == 3);
}

TEST_CASE("ring closures: digits, %nn, and bond flags") {
  const auto cyclohexane = parse("C1CCCCC1");
  REQUIRE(cyclohexane.n_atoms() == 6);
  REQUIRE(cyclohexane.n_bonds() == 6);
  REQUIRE(cyclohexane.rings.size() == 1);
  CHECK(cyclohexane.rings[0].size() == 6);
  for (const auto& b : cyclohexane.bonds) CHECK(b.in_ring);
  for (const auto& a : cyclohexane.atoms) CHECK(a.in_ring);

  const auto percent = parse("C%12CCCCC%12");
  CHECK(percent.n_bonds() == 6);
  CHECK(percent.rings.size() == 1);

  const auto with_tail = parse("OC1CCC1");
  CHECK_FALSE(with_tail.atoms[0].in_ring);
  REQUIRE(with_tail.rings.size() == 1);
  CHECK(with_tail.rings[0].size() == 4);
}

TEST_CASE("aromatic notation marks atoms and bonds") {
  const auto benzene = parse("c1ccccc1");
  REQUIRE(benzene.n_atoms() == 6);
  for (const auto& a : benzene.atoms) {
    CHECK(a.aromatic);
    CHECK(a.atomic_number == 6);
    CHECK(a.total_h() == 1);
  }
  for (const auto& b : benzene.bonds) CHECK(b.order == chem::BondOrder::Aromatic);

  const auto pyridine = parse("c1ccncc1");
  const int n_idx = 3;
  CHECK(pyridine.atoms[n_idx].atomic_number == 7);
  CHECK(pyridine.atoms[n_idx].aromatic);
  CHECK(pyridine.atoms[n_idx].total_h() == 0);
}

TEST_CASE("fused rings are perceived as a two-ring basis") {
  const auto naphthalene = parse("c1ccc2ccccc2c1");
  REQUIRE(naphthalene.n_atoms() == 10);
  REQUIRE(naphthalene.n_bonds() == 11);
  REQUIRE(naphthalene.rings.size() == 2);
  CHECK(naphthalene.rings[0].size() == 6);
  CHECK(naphthalene.rings[1].size() == 6);

  const auto spiro = parse("C1CCC2(CC1)CCCC2");
  REQUIRE(spiro.rings.size() == 2);
  std::vector<std::size_t> sizes = {spiro.rings[0].size(), spiro.rings[1].size()};
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes[0] == 5);
  CHECK(sizes[1] == 6);
}

TEST_CASE("bracket atoms: charge, explicit H, isotope") {
  const auto salt = parse("[Na+].[Cl-]");
  REQUIRE(salt.n_atoms() == 2);
  CHECK(salt.atoms[0].atomic_number == 11);
  CHECK(salt.atoms[0].formal_charge == 1);
  CHECK(salt.atoms[1].atomic_number == 17);
  CHECK(salt.atoms[1].formal_charge == -1);
  CHECK(salt.n_components == 2);
  CHECK(salt.multi_component());

  const auto ammonium = parse("[NH4+]");
  CHECK(ammonium.atoms[0].total_h() == 4);
  CHECK(ammonium.atoms[0].formal_charge == 1);

  const auto heavy = parse("[13CH4]");
  CHECK(heavy.atoms[0].isotope == 13);
  CHECK(heavy.atoms[0].total_h() == 4);

  const auto dication = parse("[Ca+2]");
  CHECK(dication.atoms[0].formal_charge == 2);
  const auto dianion = parse("[O-2]");
  CHECK(dianion.atoms[0].formal_charge == -2);
}

TEST_CASE("stereo marks are accepted and reported as dropped") {
  std::vector<std::string> warnings;
  const auto m = chem::parse_molecule("C[C@@H](N)C(=O)O", &warnings);
  CHECK(m.n_atoms() == 6);
  CHECK(!warnings.empty());

  warnings.clear();
  const auto alkene = chem::parse_molecule("C/C=C/C", &warnings);
  CHECK(alkene.n_atoms() == 4);
  CHECK(alkene.bonds[1].order == chem::BondOrder::Double);
  CHECK(!warnings.empty());
}

TEST_CASE("dot-separated components are numbered") {
  const auto m = parse("CCO.CC.O");
  CHECK(m.n_components == 3);
  CHECK(m.atoms[0].component == 0);
  CHECK(m.atoms[3].component == 1);
  CHECK(m.atoms[5].component == 2);
  CHECK(m.bond_between(2, 3) == nullptr);
}

TEST_CASE("parse errors carry kind and position") {
  CHECK_THROWS_AS(parse(""), chem::SmilesError);
  try {
    parse("");
    FAIL("expected SmilesError");
  } catch (const chem::SmilesError& e) {
    CHECK(e.kind() == chem::SmilesErrorKind::EmptyInput);
  }

  try {
    parse("C1CC");
    FAIL("expected SmilesError");
  } catch (const chem::SmilesError& e) {
    CHECK(e.kind() == chem::SmilesErrorKind::UnclosedRing);
  }

  try {
    parse("C(C(C)");
    FAIL("expected SmilesError");
  } catch (const chem::SmilesError& e) {
    CHECK(e.kind() == chem::SmilesErrorKind::UnbalancedBranch);
  }

  try {
    parse("C)C");
    FAIL("expected SmilesError");
  } catch (const chem::SmilesError& e) {
    CHECK(e.kind() == chem::SmilesErrorKind::UnbalancedBranch);
  }

  try {
    parse("[Xq]");
    FAIL("expected SmilesError");
  } catch (const chem::SmilesError& e) {
    CHECK(e.kind() == chem::SmilesErrorKind::UnknownElement);
  }

  CHECK_THROWS_AS(parse("C$C"), chem::SmilesError);
  CHECK_THROWS_AS(parse("[C"), chem::SmilesError);
}

TEST_CASE("write_smiles round-trips the graph") {
  const std::vector<std::string> inputs = {
      "CCO",
      "CC(=O)Oc1ccccc1C(=O)O",
      "c1ccc2ccccc2c1",
      "[NH4+].[Cl-]",
      "C1CCNCC1",
      "O=C(N)c1ccncc1",
      "CC(C)(C)c1ccc(O)cc1",
  };
  for (const auto& s : inputs) {
    CAPTURE(s);
    const auto first = parse(s);
    const auto text = chem::write_smiles(first);
    const auto second = parse(text);
    CHECK(second.n_atoms() == first.n_atoms());
    CHECK(second.n_bonds() == first.n_bonds());
    CHECK(second.n_components == first.n_components);
    std::multiset<int> za, zb;
    for (const auto& a : first.atoms) za.insert(a.atomic_number);
    for (const auto& a : second.atoms) zb.insert(a.atomic_number);
    CHECK(za == zb);
    CHECK(count_h(first) == count_h(second));
  }
}

TEST_CASE("two-letter organic-subset elements do not shadow one-letter ones") {
  const auto m = parse("ClCBr");
  REQUIRE(m.n_atoms() == 3);
  CHECK(m.atoms[0].atomic_number == 17);
  CHECK(m.atoms[1].atomic_number == 6);
  CHECK(m.atoms[2].atomic_number == 35);

  // 'Sc' inside brackets is scandium; bare 'S' + ring digit is sulfur.
  const auto sulfur = parse("S1CCCC1");
  CHECK(sulfur.atoms[0].atomic_number == 16);
}

TEST_CASE("ring_sizes_of reports memberships") {
  const auto naphthalene = parse("c1ccc2ccccc2c1");
  // Fusion atoms (indices 3 and 8 in this writing) belong to two 6-rings.
  const auto sizes = naphthalene.ring_sizes_of(3);
  CHECK(sizes == std::vector<int>{6});
  int fused = 0;
  for (int i = 0; i < naphthalene.n_atoms(); ++i) {
    int member_of = 0;
    for (const auto& ring : naphthalene.rings) {
      if (std::find(ring.begin(), ring.end(), i) != ring.end()) ++member_of;
    }
    if (member_of == 2) ++fused;
  }
  CHECK(fused == 2);
}
