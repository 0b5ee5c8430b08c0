#include "ddikit/fp/pattern.hpp"

#include <algorithm>

namespace ddikit::fp {

namespace {

constexpr int kMaxPatternAtoms = 8;

bool atom_ok(const chem::Molecule &mol, int atom, const AtomConstraint &c) {
  const chem::Atom &a = mol.atoms[static_cast<std::size_t>(atom)];
  if (!c.elements.empty()) {
    const bool member =
        std::find(c.elements.begin(), c.elements.end(), a.atomic_number) != c.elements.end();
    if (member == c.negate) return false;
  }
  if (c.aromatic != kAny && a.aromatic != (c.aromatic == 1)) return false;
  if (mol.degree(atom) < c.min_degree) return false;
  if (c.in_ring != kAny && a.in_ring != (c.in_ring == 1)) return false;
  if (c.ring_size > 0) {
    const auto sizes = mol.ring_sizes_of(atom);
    if (std::find(sizes.begin(), sizes.end(), c.ring_size) == sizes.end()) return false;
  }
  if (c.charge != kChargeAny && a.formal_charge != c.charge) return false;
  if (c.charged != kAny && (a.formal_charge != 0) != (c.charged == 1)) return false;
  if (a.total_h() < c.min_h) return false;
  if (!c.h_counts.empty() &&
      std::find(c.h_counts.begin(), c.h_counts.end(), a.total_h()) == c.h_counts.end())
    return false;
  return true;
}

bool bond_ok(const chem::Bond &bond, const BondConstraint &c) {
  using chem::BondOrder;
  switch (c.expr) {
    case BondExpr::Any: break;
    case BondExpr::Single:
      if (bond.order != BondOrder::Single) return false;
      break;
    case BondExpr::Double:
      if (bond.order != BondOrder::Double) return false;
      break;
    case BondExpr::Triple:
      if (bond.order != BondOrder::Triple) return false;
      break;
    case BondExpr::Aromatic:
      if (bond.order != BondOrder::Aromatic) return false;
      break;
    case BondExpr::NotAromatic:
      if (bond.order == BondOrder::Aromatic) return false;
      break;
    case BondExpr::SingleOrAromatic:
      if (bond.order != BondOrder::Single && bond.order != BondOrder::Aromatic) return false;
      break;
  }
  if (c.in_ring != kAny && bond.in_ring != (c.in_ring == 1)) return false;
  return true;
}

// Pattern atoms reordered so every atom after the first attaches to an
// earlier one; lets the matcher extend along bonds instead of guessing.
struct MatchPlan {
  std::vector<int> order;               // pattern atom visited at each step
  std::vector<std::vector<int>> bonds;  // bond ids checked when placing step i
};

MatchPlan build_plan(const FragmentPattern &pattern) {
  const int np = static_cast<int>(pattern.atoms.size());
  MatchPlan plan;
  std::vector<bool> placed(static_cast<std::size_t>(np), false);
  std::vector<bool> bond_done(pattern.bonds.size(), false);
  plan.order.push_back(0);
  placed[0] = true;
  plan.bonds.push_back({});
  while (static_cast<int>(plan.order.size()) < np) {
    int pick = -1;
    for (int p = 0; p < np && pick < 0; ++p) {
      if (placed[static_cast<std::size_t>(p)]) continue;
      for (const auto &bc : pattern.bonds) {
        const int other = bc.a == p ? bc.b : bc.b == p ? bc.a : -1;
        if (other >= 0 && placed[static_cast<std::size_t>(other)]) {
          pick = p;
          break;
        }
      }
    }
    // validate_pattern guarantees connectivity, so pick is always found.
    placed[static_cast<std::size_t>(pick)] = true;
    plan.order.push_back(pick);
    std::vector<int> check;
    for (std::size_t bi = 0; bi < pattern.bonds.size(); ++bi) {
      if (bond_done[bi]) continue;
      const auto &bc = pattern.bonds[bi];
      if ((bc.a == pick && placed[static_cast<std::size_t>(bc.b)]) ||
          (bc.b == pick && placed[static_cast<std::size_t>(bc.a)])) {
        check.push_back(static_cast<int>(bi));
        bond_done[bi] = true;
      }
    }
    plan.bonds.push_back(std::move(check));
  }
  return plan;
}

}  // namespace

void validate_pattern(const FragmentPattern &pattern) {
  const int np = static_cast<int>(pattern.atoms.size());
  if (np == 0) throw PatternError(PatternErrorKind::BadIndex, "pattern has no atoms");
  if (np > kMaxPatternAtoms)
    throw PatternError(PatternErrorKind::TooLarge,
                       "pattern has " + std::to_string(np) + " atoms; limit is " +
                           std::to_string(kMaxPatternAtoms));
  for (const auto &bc : pattern.bonds) {
    if (bc.a < 0 || bc.a >= np || bc.b < 0 || bc.b >= np || bc.a == bc.b)
      throw PatternError(PatternErrorKind::BadIndex, "pattern bond endpoint out of range");
  }
  std::vector<bool> reach(static_cast<std::size_t>(np), false);
  reach[0] = true;
  for (int round = 0; round < np; ++round) {
    for (const auto &bc : pattern.bonds) {
      if (reach[static_cast<std::size_t>(bc.a)]) reach[static_cast<std::size_t>(bc.b)] = true;
      if (reach[static_cast<std::size_t>(bc.b)]) reach[static_cast<std::size_t>(bc.a)] = true;
    }
  }
  if (std::find(reach.begin(), reach.end(), false) != reach.end())
    throw PatternError(PatternErrorKind::Disconnected, "pattern atoms are not connected");
}

void collect_matches(const chem::Molecule &mol, const FragmentPattern &pattern,
                     std::set<std::vector<int>> *image_sets, std::set<int> *anchors) {
  validate_pattern(pattern);
  const MatchPlan plan = build_plan(pattern);
  const int np = static_cast<int>(pattern.atoms.size());
  std::vector<int> image(static_cast<std::size_t>(np), -1);
  std::vector<bool> used(static_cast<std::size_t>(mol.n_atoms()), false);

  auto place = [&](auto &&self, int step) -> void {
    if (step == np) {
      if (anchors) anchors->insert(image[0]);
      if (image_sets) {
        std::vector<int> key(image.begin(), image.end());
        std::sort(key.begin(), key.end());
        image_sets->insert(std::move(key));
      }
      return;
    }
    const int p = plan.order[static_cast<std::size_t>(step)];
    const AtomConstraint &ac = pattern.atoms[static_cast<std::size_t>(p)];
    // Candidates: all atoms at step 0, neighbors of an already-placed atom after.
    std::vector<int> candidates;
    if (step == 0) {
      candidates.resize(static_cast<std::size_t>(mol.n_atoms()));
      for (int i = 0; i < mol.n_atoms(); ++i) candidates[static_cast<std::size_t>(i)] = i;
    } else {
      const auto &bc =
          pattern.bonds[static_cast<std::size_t>(plan.bonds[static_cast<std::size_t>(step)][0])];
      const int placed_pat = bc.a == p ? bc.b : bc.a;
      candidates = mol.neighbors(image[static_cast<std::size_t>(placed_pat)]);
    }
    for (int cand : candidates) {
      if (used[static_cast<std::size_t>(cand)]) continue;
      if (!atom_ok(mol, cand, ac)) continue;
      bool bonds_fine = true;
      for (int bi : plan.bonds[static_cast<std::size_t>(step)]) {
        const auto &bc = pattern.bonds[static_cast<std::size_t>(bi)];
        const int other_pat = bc.a == p ? bc.b : bc.a;
        const chem::Bond *bond = mol.bond_between(cand, image[static_cast<std::size_t>(other_pat)]);
        if (bond == nullptr || !bond_ok(*bond, bc)) {
          bonds_fine = false;
          break;
        }
      }
      if (!bonds_fine) continue;
      image[static_cast<std::size_t>(p)] = cand;
      used[static_cast<std::size_t>(cand)] = true;
      self(self, step + 1);
      used[static_cast<std::size_t>(cand)] = false;
      image[static_cast<std::size_t>(p)] = -1;
    }
  };
  place(place, 0);
}

int match_fragment(const chem::Molecule &mol, const FragmentPattern &pattern) {
  std::set<std::vector<int>> image_sets;
  collect_matches(mol, pattern, &image_sets, nullptr);
  return static_cast<int>(image_sets.size());
}

}  // namespace ddikit::fp
