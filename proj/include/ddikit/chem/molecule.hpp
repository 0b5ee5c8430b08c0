#pragma once

#include <string>
#include <vector>

namespace ddikit::chem {

enum class BondOrder { Single, Double, Triple, Aromatic };

struct Atom {
  int atomic_number = 0;
  bool aromatic = false;
  int formal_charge = 0;
  // Hydrogen count given in a bracket atom; -1 when unspecified (organic
  // subset shorthand).  total_h() folds the two cases together.
  int explicit_h = -1;
  int implicit_h = 0;
  int isotope = 0;    // 0 = unspecified
  bool in_ring = false;
  int component = 0;  // connected-component id, 0-based

  int total_h() const { return explicit_h >= 0 ? explicit_h : implicit_h; }
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::Single;
  bool in_ring = false;
};

// Heavy-atom molecular graph.  Hydrogens are counts on atoms, never vertices.
// Aromaticity is taken from the input notation; no re-perception is done.
class Molecule {
 public:
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  // Ring-perception output: one entry per basis ring, each a cyclic atom
  // sequence in canonical order.  Empty until perceive_rings() has run.
  std::vector<std::vector<int>> rings;
  std::string source;       // the input text this molecule was parsed from
  int n_components = 1;

  int n_atoms() const { return static_cast<int>(atoms.size()); }
  int n_bonds() const { return static_cast<int>(bonds.size()); }
  bool multi_component() const { return n_components > 1; }

  // Neighbor atom indices, ascending.
  const std::vector<int> &neighbors(int atom) const { return adjacency_[static_cast<std::size_t>(atom)]; }
  // Incident bond indices, in the same order as neighbors().
  const std::vector<int> &incident_bonds(int atom) const { return incident_[static_cast<std::size_t>(atom)]; }
  int degree(int atom) const { return static_cast<int>(adjacency_[static_cast<std::size_t>(atom)].size()); }
  // Bond between two atoms, or nullptr when not adjacent.
  const Bond *bond_between(int a, int b) const;

  // Rebuilds adjacency and component ids.  Must be called after the atom or
  // bond lists change; the SMILES parser and tests call it on construction.
  void finish();

  // Sizes of the perceived rings this atom belongs to, ascending, deduplicated.
  std::vector<int> ring_sizes_of(int atom) const;

 private:
  std::vector<std::vector<int>> adjacency_;
  std::vector<std::vector<int>> incident_;
};

}  // namespace ddikit::chem
