#pragma once

#include <vector>

#include "ddikit/chem/molecule.hpp"
#include "ddikit/fp/fingerprint.hpp"
#include "ddikit/fp/pattern.hpp"

namespace ddikit::fp {

enum class KeyKind {
  Unimplemented,   // key never set; listed by unimplemented_keys()
  Patterns,        // fragment-pattern alternatives
  RingCycle,       // a simple cycle with size in [cycle_min, cycle_max]
  ComponentCount,  // two or more connected components
  AromaticRings,   // two or more all-aromatic basis rings
};

enum class CountMode {
  ImageSets,    // count distinct matched atom-index sets
  AnchorAtoms,  // count distinct atoms that pattern atom 0 maps onto
};

struct KeyDef {
  int key = 0;             // 1-based key number
  const char *name = "";   // structural mnemonic
  KeyKind kind = KeyKind::Unimplemented;
  std::vector<FragmentPattern> patterns;
  CountMode mode = CountMode::ImageSets;
  int min_count = 1;       // key fires when the count reaches this
  int cycle_min = 0;
  int cycle_max = 0;
  bool cycle_hetero = false;  // cycle must contain a non-carbon atom
};

// The full 166-entry structural-key table, ordered by key number.  Entries
// document themselves: docs/structural_keys.md is generated from this table.
const std::vector<KeyDef> &key_table();

// Key numbers whose kind is Unimplemented.
std::vector<int> unimplemented_keys();

// Evaluates all keys against a ring-perceived molecule.  Bit i of the result
// is key i+1.
Fingerprint compute_keys(const chem::Molecule &mol);

}  // namespace ddikit::fp
