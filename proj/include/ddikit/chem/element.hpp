#pragma once

#include <string_view>
#include <vector>

namespace ddikit::chem {

// Atomic number for an element symbol ("C", "Cl", "Fe", ...).  Returns 0 for
// unknown symbols.  Case-sensitive; aromatic lowercase forms are handled by
// the SMILES layer, not here.
int atomic_number(std::string_view symbol);

// Symbol for an atomic number, or "" when out of range (valid range 1..118).
std::string_view element_symbol(int z);

// Elements writable without brackets in SMILES: B C N O P S F Cl Br I.
bool organic_subset(int z);

// Elements we accept with an aromatic flag: B C N O P S Se As.
bool aromatic_capable(int z);

// Standard valences used for implicit-hydrogen assignment, in ascending
// order.  Empty for elements with no defined default valence model.
const std::vector<int> &standard_valences(int z);

}  // namespace ddikit::chem
