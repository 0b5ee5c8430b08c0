#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddikit/chem/molecule.hpp"

namespace ddikit::fp {

// Tri-state flags: require true, require false, or don't care.
inline constexpr int kAny = -1;

// Sentinel for "no charge requirement".
inline constexpr int kChargeAny = -100;

struct AtomConstraint {
  // Allowed atomic numbers; empty means any element.  With negate, the atom
  // must NOT be one of these.
  std::vector<int> elements;
  bool negate = false;
  int aromatic = kAny;      // kAny / 0 / 1
  int min_degree = 0;       // heavy-atom degree lower bound
  int in_ring = kAny;       // kAny / 0 / 1 (perceived-ring membership)
  int ring_size = 0;        // >0: atom must sit in a perceived ring of this size
  int charge = kChargeAny;  // exact formal charge when given
  int charged = kAny;       // kAny / 0 / 1: formal charge zero or nonzero
  int min_h = 0;            // total hydrogen count lower bound
  std::vector<int> h_counts;  // allowed total hydrogen counts; empty = any
};

enum class BondExpr {
  Any,               // ~
  Single,            // - (single and not aromatic)
  Double,            // =
  Triple,            // #
  Aromatic,          // :
  NotAromatic,       // any order except aromatic
  SingleOrAromatic,  // unmarked bond in pattern shorthand
};

struct BondConstraint {
  int a = 0;
  int b = 0;
  BondExpr expr = BondExpr::Any;
  int in_ring = kAny;
};

enum class PatternErrorKind { TooLarge, Disconnected, BadIndex };

class PatternError : public std::runtime_error {
 public:
  PatternError(PatternErrorKind kind, const std::string &what_arg)
      : std::runtime_error(what_arg), kind_(kind) {}
  PatternErrorKind kind() const { return kind_; }

 private:
  PatternErrorKind kind_;
};

// A small connected fragment template matched into molecules.  Limited to 8
// atoms; the matcher is exhaustive and the structural-key table needs no
// more.
struct FragmentPattern {
  std::vector<AtomConstraint> atoms;
  std::vector<BondConstraint> bonds;
  // Minimum number of distinct matches for a key using this pattern alone.
  int count_threshold = 1;
};

// Throws PatternError when the pattern breaks the size/connectivity rules.
void validate_pattern(const FragmentPattern &pattern);

// Number of distinct matches of `pattern` in `mol`.  A match is an injective
// constraint-respecting mapping; matches are deduplicated by their atom-index
// set, so a symmetric fragment found once in two orientations counts once.
// The molecule must be ring-perceived.
int match_fragment(const chem::Molecule &mol, const FragmentPattern &pattern);

// Lower-level form: collects the distinct matched atom-index sets, and (when
// `anchors` is given) the distinct molecule atoms that pattern atom 0 maps
// onto.  Anchor counting backs the keys defined as "environment around an
// atom, seen at more than N atoms".
void collect_matches(const chem::Molecule &mol, const FragmentPattern &pattern,
                     std::set<std::vector<int>> *image_sets, std::set<int> *anchors);

}  // namespace ddikit::fp
