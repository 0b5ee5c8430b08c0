#pragma once

#include "ddikit/chem/molecule.hpp"

namespace ddikit::chem {

// Fills mol.rings with a minimum cycle basis (smallest-rings set) and sets
// the in_ring flags on atoms and bonds.  Deterministic: candidate cycles are
// ranked by (size, canonical atom sequence) before the greedy independence
// selection, so the same graph always yields the same rings.  The basis has
// exactly bonds - atoms + components entries.
void perceive_rings(Molecule &mol);

// Number of distinct simple cycles (by vertex set) with size in [min_size,
// max_size].  With hetero_only, counts only cycles containing a non-carbon
// atom.  Enumeration stops once `stop_at` distinct cycles are found, which
// keeps the common at-least-N checks cheap; pass a large value for an exact
// count.  Used by ring-membership structural keys, which follow the
// "any simple ring" reading rather than the basis-ring one.
int count_simple_cycles(const Molecule &mol, int min_size, int max_size, bool hetero_only,
                        int stop_at);

// Number of basis rings in which every bond is aromatic.
int aromatic_ring_count(const Molecule &mol);

}  // namespace ddikit::chem
