#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ddikit/chem/molecule.hpp"

namespace ddikit::chem {

enum class SmilesErrorKind {
  EmptyInput,
  UnclosedRing,
  UnbalancedBranch,
  UnknownElement,
  BadCharge,
  Syntax,
};

class SmilesError : public std::runtime_error {
 public:
  SmilesError(SmilesErrorKind kind, std::size_t position, const std::string &what_arg)
      : std::runtime_error(what_arg), kind_(kind), position_(position) {}
  SmilesErrorKind kind() const { return kind_; }
  // Byte offset into the input where the problem was detected.
  std::size_t position() const { return position_; }

 private:
  SmilesErrorKind kind_;
  std::size_t position_;
};

// Parses a SMILES string into a heavy-atom graph.  Supported: organic-subset
// atoms, bracket atoms (isotope, element, chirality marks, H count, charge,
// atom class), bonds - = # :, branches, ring closures (digits and %nn), and
// dot-separated components.  Stereo marks (/ \ @ @@) are accepted and
// dropped; each dropped feature appends a note to `warnings` when provided.
// Aromaticity is taken from the notation (lowercase atoms / ':' bonds), and a
// bond with no symbol between two aromatic atoms is aromatic, otherwise
// single.  Implicit hydrogens are filled for organic-subset atoms only.
Molecule parse_smiles(std::string_view text, std::vector<std::string> *warnings = nullptr);

// parse_smiles followed by ring perception; the form the rest of the library
// expects.
Molecule parse_molecule(std::string_view text, std::vector<std::string> *warnings = nullptr);

// Writes a round-trippable SMILES for the parsed graph.  Atom order follows
// the graph; this is a plain serialization, not a canonicalization.
std::string write_smiles(const Molecule &mol);

}  // namespace ddikit::chem
