#include "ddikit/chem/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <set>
#include <utility>

#include "ddikit/chem/element.hpp"
#include "ddikit/chem/rings.hpp"

namespace ddikit::chem {

namespace {

constexpr int kMaxCharge = 15;

bool aromatic_bare_symbol(char c) {
  return c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's';
}

struct PendingBond {
  bool set = false;
  BondOrder order = BondOrder::Single;
  bool explicit_order = false;  // a bond symbol was written
  std::size_t pos = 0;
};

struct RingOpen {
  int atom = 0;
  PendingBond bond;
  std::size_t pos = 0;
};

class Parser {
 public:
  Parser(std::string_view text, std::vector<std::string> *warnings)
      : text_(text), warnings_(warnings) {}

  Molecule run() {
    if (text_.empty())
      throw SmilesError(SmilesErrorKind::EmptyInput, 0, "empty SMILES input");
    while (pos_ < text_.size()) step();
    if (!branch_stack_.empty())
      throw SmilesError(SmilesErrorKind::UnbalancedBranch, text_.size(),
                        "unclosed branch at end of input");
    if (!ring_open_.empty()) {
      const auto &first = ring_open_.begin()->second;
      throw SmilesError(SmilesErrorKind::UnclosedRing, first.pos,
                        "ring closure " + std::to_string(ring_open_.begin()->first) +
                            " never closed");
    }
    if (pending_.set)
      throw SmilesError(SmilesErrorKind::Syntax, pending_.pos, "dangling bond at end of input");
    if (mol_.atoms.empty())
      throw SmilesError(SmilesErrorKind::EmptyInput, 0, "SMILES contains no atoms");
    assign_implicit_h();
    fold_explicit_hydrogens();
    mol_.source = std::string(text_);
    mol_.finish();
    return std::move(mol_);
  }

 private:
  void warn(const std::string &msg) {
    if (warnings_) warnings_->push_back(msg);
  }

  [[noreturn]] void fail(SmilesErrorKind kind, std::size_t pos, const std::string &msg) {
    throw SmilesError(kind, pos, msg + " (at offset " + std::to_string(pos) + ")");
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void step() {
    const char c = text_[pos_];
    switch (c) {
      case '-': set_pending(BondOrder::Single); ++pos_; return;
      case '=': set_pending(BondOrder::Double); ++pos_; return;
      case '#': set_pending(BondOrder::Triple); ++pos_; return;
      case ':': set_pending(BondOrder::Aromatic); ++pos_; return;
      case '/':
      case '\\':
        warn("stereo bond mark '" + std::string(1, c) + "' ignored");
        set_pending(BondOrder::Single);
        ++pos_;
        return;
      case '(': open_branch(); return;
      case ')': close_branch(); return;
      case '.': start_component(); return;
      case '%': ring_closure_percent(); return;
      case '[': bracket_atom(); return;
      default: break;
    }
    if (c >= '0' && c <= '9') {
      ring_closure(c - '0', pos_);
      ++pos_;
      return;
    }
    if (std::isspace(static_cast<unsigned char>(c)))
      fail(SmilesErrorKind::Syntax, pos_, "unexpected whitespace");
    organic_atom();
  }

  void set_pending(BondOrder order) {
    if (pending_.set) fail(SmilesErrorKind::Syntax, pos_, "two bond symbols in a row");
    pending_ = PendingBond{true, order, true, pos_};
  }

  void open_branch() {
    if (prev_ < 0) fail(SmilesErrorKind::Syntax, pos_, "branch before any atom");
    if (pending_.set) fail(SmilesErrorKind::Syntax, pos_, "bond symbol before '('");
    branch_stack_.push_back(prev_);
    ++pos_;
  }

  void close_branch() {
    if (branch_stack_.empty())
      fail(SmilesErrorKind::UnbalancedBranch, pos_, "')' without matching '('");
    if (pending_.set) fail(SmilesErrorKind::Syntax, pos_, "dangling bond before ')'");
    prev_ = branch_stack_.back();
    branch_stack_.pop_back();
    ++pos_;
  }

  void start_component() {
    if (pending_.set) fail(SmilesErrorKind::Syntax, pos_, "bond symbol before '.'");
    prev_ = -1;
    ++pos_;
  }

  void ring_closure_percent() {
    const std::size_t at = pos_;
    ++pos_;
    if (pos_ + 1 >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
        !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))
      fail(SmilesErrorKind::Syntax, at, "'%' must be followed by two digits");
    const int num = (text_[pos_] - '0') * 10 + (text_[pos_ + 1] - '0');
    pos_ += 2;
    ring_closure(num, at);
  }

  void ring_closure(int num, std::size_t at) {
    if (prev_ < 0) fail(SmilesErrorKind::Syntax, at, "ring closure before any atom");
    auto it = ring_open_.find(num);
    if (it == ring_open_.end()) {
      ring_open_[num] = RingOpen{prev_, pending_, at};
      pending_ = {};
      return;
    }
    const RingOpen open = it->second;
    ring_open_.erase(it);
    if (open.atom == prev_) fail(SmilesErrorKind::Syntax, at, "ring closure bonds atom to itself");
    PendingBond order = open.bond;
    if (pending_.set) {
      if (order.set && order.order != pending_.order)
        fail(SmilesErrorKind::Syntax, at, "conflicting bond orders on ring closure");
      order = pending_;
    }
    add_bond(open.atom, prev_, order, at);
    pending_ = {};
  }

  void add_bond(int a, int b, const PendingBond &pending, std::size_t at) {
    const auto key = std::minmax(a, b);
    if (!bond_keys_.insert(key).second)
      fail(SmilesErrorKind::Syntax, at, "duplicate bond between atoms");
    BondOrder order;
    if (pending.set && pending.explicit_order) {
      order = pending.order;
    } else {
      const bool both_aromatic = mol_.atoms[static_cast<std::size_t>(a)].aromatic &&
                                 mol_.atoms[static_cast<std::size_t>(b)].aromatic;
      order = both_aromatic ? BondOrder::Aromatic : BondOrder::Single;
    }
    if (order == BondOrder::Aromatic &&
        (!mol_.atoms[static_cast<std::size_t>(a)].aromatic ||
         !mol_.atoms[static_cast<std::size_t>(b)].aromatic))
      fail(SmilesErrorKind::Syntax, at, "aromatic bond between non-aromatic atoms");
    mol_.bonds.push_back(Bond{a, b, order, false});
  }

  void attach_atom(int idx, std::size_t at) {
    if (prev_ >= 0) add_bond(prev_, idx, pending_, at);
    pending_ = {};
    prev_ = idx;
  }

  void organic_atom() {
    const std::size_t at = pos_;
    const char c = text_[pos_];
    int z = 0;
    bool aromatic = false;
    if (c == 'C' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') {
      z = 17;
      pos_ += 2;
    } else if (c == 'B' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') {
      z = 35;
      pos_ += 2;
    } else if (c == 'B' || c == 'C' || c == 'N' || c == 'O' || c == 'P' || c == 'S' ||
               c == 'F' || c == 'I') {
      z = atomic_number(std::string_view(&text_[pos_], 1));
      ++pos_;
    } else if (aromatic_bare_symbol(c)) {
      char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      z = atomic_number(std::string_view(&upper, 1));
      aromatic = true;
      ++pos_;
    } else {
      fail(SmilesErrorKind::Syntax, at, std::string("unexpected character '") + c + "'");
    }
    Atom atom;
    atom.atomic_number = z;
    atom.aromatic = aromatic;
    mol_.atoms.push_back(atom);
    attach_atom(static_cast<int>(mol_.atoms.size()) - 1, at);
  }

  void bracket_atom() {
    const std::size_t at = pos_;
    ++pos_;  // '['
    Atom atom;
    atom.explicit_h = 0;

    // Isotope.
    std::size_t digits = 0;
    int isotope = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      isotope = isotope * 10 + (peek() - '0');
      ++digits;
      ++pos_;
      if (digits > 4) fail(SmilesErrorKind::Syntax, at, "isotope number too long");
    }
    atom.isotope = isotope;

    // Element symbol, lowercase forms meaning aromatic.
    if (pos_ >= text_.size()) fail(SmilesErrorKind::Syntax, at, "unterminated bracket atom");
    const char first = text_[pos_];
    if (std::isupper(static_cast<unsigned char>(first))) {
      std::size_t len = 1;
      if (pos_ + 1 < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_ + 1])) &&
          text_[pos_ + 1] != 'h' &&
          atomic_number(text_.substr(pos_, 2)) != 0)
        len = 2;
      atom.atomic_number = atomic_number(text_.substr(pos_, len));
      if (atom.atomic_number == 0)
        fail(SmilesErrorKind::UnknownElement, pos_,
             "unknown element '" + std::string(text_.substr(pos_, len)) + "'");
      pos_ += len;
    } else if (std::islower(static_cast<unsigned char>(first))) {
      std::size_t len = 1;
      if (pos_ + 1 < text_.size() &&
          ((first == 's' && text_[pos_ + 1] == 'e') || (first == 'a' && text_[pos_ + 1] == 's')))
        len = 2;
      const std::string_view sym = text_.substr(pos_, len);
      int z = 0;
      if (sym == "b") z = 5;
      else if (sym == "c") z = 6;
      else if (sym == "n") z = 7;
      else if (sym == "o") z = 8;
      else if (sym == "p") z = 15;
      else if (sym == "s") z = 16;
      else if (sym == "se") z = 34;
      else if (sym == "as") z = 33;
      if (z == 0)
        fail(SmilesErrorKind::UnknownElement, pos_,
             "'" + std::string(sym) + "' is not an aromatic element");
      atom.atomic_number = z;
      atom.aromatic = true;
      pos_ += len;
    } else {
      fail(SmilesErrorKind::Syntax, pos_, "expected element symbol in bracket atom");
    }

    // Chirality marks, accepted and dropped.
    while (peek() == '@') {
      ++pos_;
      if (peek() == '@') ++pos_;
      warn("chirality mark ignored in bracket atom");
    }

    // Hydrogen count.
    if (peek() == 'H') {
      ++pos_;
      int h = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        h = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
          h = h * 10 + (peek() - '0');
          ++pos_;
          if (h > 9) fail(SmilesErrorKind::Syntax, at, "hydrogen count too large");
        }
      }
      atom.explicit_h = h;
    }

    // Charge: +, -, ++, --, +n, -n.
    if (peek() == '+' || peek() == '-') {
      const char sign_char = peek();
      const int sign = sign_char == '+' ? 1 : -1;
      ++pos_;
      int magnitude = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        magnitude = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
          magnitude = magnitude * 10 + (peek() - '0');
          ++pos_;
          if (magnitude > 99) break;
        }
      } else {
        while (peek() == sign_char) {
          ++magnitude;
          ++pos_;
        }
      }
      if (magnitude == 0 || magnitude > kMaxCharge)
        fail(SmilesErrorKind::BadCharge, at,
             "charge magnitude " + std::to_string(magnitude) + " out of range");
      if (peek() == '+' || peek() == '-')
        fail(SmilesErrorKind::BadCharge, pos_, "mixed charge signs");
      atom.formal_charge = sign * magnitude;
    }

    // Atom class, accepted and dropped.
    if (peek() == ':') {
      ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek())))
        fail(SmilesErrorKind::Syntax, pos_, "atom class ':' needs digits");
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      warn("atom class label ignored");
    }

    if (peek() != ']') fail(SmilesErrorKind::Syntax, pos_, "expected ']' in bracket atom");
    ++pos_;

    if (atom.aromatic && !aromatic_capable(atom.atomic_number))
      fail(SmilesErrorKind::UnknownElement, at, "element cannot be aromatic");

    mol_.atoms.push_back(atom);
    attach_atom(static_cast<int>(mol_.atoms.size()) - 1, at);
  }

  static int order_value(BondOrder order) {
    switch (order) {
      case BondOrder::Single: return 1;
      case BondOrder::Double: return 2;
      case BondOrder::Triple: return 3;
      case BondOrder::Aromatic: return 1;
    }
    return 1;
  }

  // Implicit hydrogens for organic-subset shorthand atoms.  Bracket atoms
  // carry only their written H count.  Aromatic atoms reserve one unit of
  // valence for the ring system; aliphatic atoms round the bond-order sum up
  // to the next standard valence.
  void assign_implicit_h() {
    std::vector<int> order_sum(mol_.atoms.size(), 0);
    std::vector<int> degree(mol_.atoms.size(), 0);
    for (const Bond &b : mol_.bonds) {
      order_sum[static_cast<std::size_t>(b.a)] += order_value(b.order);
      order_sum[static_cast<std::size_t>(b.b)] += order_value(b.order);
      ++degree[static_cast<std::size_t>(b.a)];
      ++degree[static_cast<std::size_t>(b.b)];
    }
    for (std::size_t i = 0; i < mol_.atoms.size(); ++i) {
      Atom &atom = mol_.atoms[i];
      if (atom.explicit_h >= 0) continue;  // bracket atom
      const auto &valences = standard_valences(atom.atomic_number);
      if (valences.empty()) {
        atom.implicit_h = 0;
        continue;
      }
      if (atom.aromatic) {
        atom.implicit_h = std::max(0, valences.front() - degree[i] - 1);
        continue;
      }
      int h = 0;
      for (int v : valences) {
        if (v >= order_sum[i]) {
          h = v - order_sum[i];
          break;
        }
      }
      atom.implicit_h = h;
    }
  }

  // Standalone [H] vertices written for stereo centers fold into the heavy
  // atom they bond to; hydrogens are counts, not vertices, downstream.
  void fold_explicit_hydrogens() {
    std::vector<int> bond_count(mol_.atoms.size(), 0);
    std::vector<int> only_bond(mol_.atoms.size(), -1);
    for (std::size_t bi = 0; bi < mol_.bonds.size(); ++bi) {
      const Bond &b = mol_.bonds[bi];
      ++bond_count[static_cast<std::size_t>(b.a)];
      ++bond_count[static_cast<std::size_t>(b.b)];
      only_bond[static_cast<std::size_t>(b.a)] = static_cast<int>(bi);
      only_bond[static_cast<std::size_t>(b.b)] = static_cast<int>(bi);
    }
    std::vector<bool> drop(mol_.atoms.size(), false);
    bool any = false;
    for (std::size_t i = 0; i < mol_.atoms.size(); ++i) {
      const Atom &atom = mol_.atoms[i];
      if (atom.atomic_number != 1 || atom.formal_charge != 0) continue;
      if (bond_count[i] != 1) continue;
      const Bond &b = mol_.bonds[static_cast<std::size_t>(only_bond[i])];
      if (b.order != BondOrder::Single) continue;
      const int other = b.a == static_cast<int>(i) ? b.b : b.a;
      Atom &heavy = mol_.atoms[static_cast<std::size_t>(other)];
      if (heavy.atomic_number == 1) continue;
      heavy.explicit_h = heavy.total_h() + 1;
      drop[i] = true;
      any = true;
      if (atom.isotope != 0) warn("hydrogen isotope label lost when folding [H]");
    }
    if (!any) return;
    std::vector<int> remap(mol_.atoms.size(), -1);
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < mol_.atoms.size(); ++i) {
      if (drop[i]) continue;
      remap[i] = static_cast<int>(atoms.size());
      atoms.push_back(mol_.atoms[i]);
    }
    std::vector<Bond> bonds;
    for (const Bond &b : mol_.bonds) {
      if (drop[static_cast<std::size_t>(b.a)] || drop[static_cast<std::size_t>(b.b)]) continue;
      bonds.push_back(Bond{remap[static_cast<std::size_t>(b.a)],
                           remap[static_cast<std::size_t>(b.b)], b.order, b.in_ring});
    }
    mol_.atoms = std::move(atoms);
    mol_.bonds = std::move(bonds);
    if (mol_.atoms.empty())
      throw SmilesError(SmilesErrorKind::EmptyInput, 0, "molecule reduces to hydrogens only");
  }

  std::string_view text_;
  std::vector<std::string> *warnings_;
  Molecule mol_;
  std::size_t pos_ = 0;
  int prev_ = -1;
  PendingBond pending_;
  std::vector<int> branch_stack_;
  std::map<int, RingOpen> ring_open_;
  std::set<std::pair<int, int>> bond_keys_;
};

}  // namespace

Molecule parse_smiles(std::string_view text, std::vector<std::string> *warnings) {
  // Trim surrounding whitespace; inner whitespace is an error.
  std::size_t lo = 0, hi = text.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(text[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(text[hi - 1]))) --hi;
  return Parser(text.substr(lo, hi - lo), warnings).run();
}

Molecule parse_molecule(std::string_view text, std::vector<std::string> *warnings) {
  Molecule mol = parse_smiles(text, warnings);
  perceive_rings(mol);
  return mol;
}

std::string write_smiles(const Molecule &mol) {
  const int n = mol.n_atoms();
  // Phase 1: classify every bond as a DFS tree edge or a ring (back) edge.
  std::vector<char> edge_kind(mol.bonds.size(), 0);  // 0 unseen, 1 tree, 2 ring
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  auto classify = [&](auto &&self, int u) -> void {
    seen[static_cast<std::size_t>(u)] = true;
    const auto &nbr = mol.neighbors(u);
    const auto &inc = mol.incident_bonds(u);
    for (std::size_t k = 0; k < nbr.size(); ++k) {
      const auto bi = static_cast<std::size_t>(inc[k]);
      if (edge_kind[bi] != 0) continue;
      if (seen[static_cast<std::size_t>(nbr[k])]) {
        edge_kind[bi] = 2;
      } else {
        edge_kind[bi] = 1;
        self(self, nbr[k]);
      }
    }
  };
  for (int i = 0; i < n; ++i)
    if (!seen[static_cast<std::size_t>(i)]) classify(classify, i);

  auto atom_token = [&](int idx) {
    const Atom &a = mol.atoms[static_cast<std::size_t>(idx)];
    const std::string sym{element_symbol(a.atomic_number)};
    std::string lower = sym;
    for (char &c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const bool bare_ok = a.explicit_h < 0 && a.formal_charge == 0 && a.isotope == 0 &&
                         organic_subset(a.atomic_number) &&
                         (!a.aromatic || (lower.size() == 1 && aromatic_bare_symbol(lower[0])));
    if (bare_ok) return a.aromatic ? lower : sym;
    std::string t = "[";
    if (a.isotope > 0) t += std::to_string(a.isotope);
    t += a.aromatic ? lower : sym;
    const int h = a.total_h();
    if (h == 1) t += "H";
    else if (h > 1) t += "H" + std::to_string(h);
    if (a.formal_charge != 0) {
      t += a.formal_charge > 0 ? '+' : '-';
      if (std::abs(a.formal_charge) > 1) t += std::to_string(std::abs(a.formal_charge));
    }
    t += "]";
    return t;
  };

  auto bond_token = [&](const Bond &b) -> std::string {
    const bool both_aromatic = mol.atoms[static_cast<std::size_t>(b.a)].aromatic &&
                               mol.atoms[static_cast<std::size_t>(b.b)].aromatic;
    switch (b.order) {
      case BondOrder::Single: return both_aromatic ? "-" : "";
      case BondOrder::Double: return "=";
      case BondOrder::Triple: return "#";
      case BondOrder::Aromatic: return both_aromatic ? "" : ":";
    }
    return "";
  };

  // Phase 2: emit.  Ring digits are allocated at the first endpoint reached
  // (which also prints the bond symbol) and released at the second.
  std::string out;
  std::vector<bool> emitted(static_cast<std::size_t>(n), false);
  std::map<int, int> open_digit;  // bond index -> digit
  std::vector<int> free_digits;
  int next_digit = 1;
  auto take_digit = [&]() {
    if (!free_digits.empty()) {
      const int d = free_digits.back();
      free_digits.pop_back();
      return d;
    }
    return next_digit++;
  };
  auto digit_text = [](int d) { return d < 10 ? std::to_string(d) : "%" + std::to_string(d); };

  auto emit = [&](auto &&self, int u) -> void {
    emitted[static_cast<std::size_t>(u)] = true;
    out += atom_token(u);
    const auto &nbr = mol.neighbors(u);
    const auto &inc = mol.incident_bonds(u);
    for (std::size_t k = 0; k < nbr.size(); ++k) {
      const int bi = inc[k];
      if (edge_kind[static_cast<std::size_t>(bi)] != 2) continue;
      auto it = open_digit.find(bi);
      if (it == open_digit.end()) {
        const int d = take_digit();
        open_digit[bi] = d;
        out += bond_token(mol.bonds[static_cast<std::size_t>(bi)]);
        out += digit_text(d);
      } else {
        out += digit_text(it->second);
        free_digits.push_back(it->second);
        open_digit.erase(it);
      }
    }
    std::vector<std::size_t> children;
    for (std::size_t k = 0; k < nbr.size(); ++k) {
      const auto bi = static_cast<std::size_t>(inc[k]);
      if (edge_kind[bi] == 1 && !emitted[static_cast<std::size_t>(nbr[k])]) children.push_back(k);
    }
    for (std::size_t c = 0; c < children.size(); ++c) {
      const std::size_t k = children[c];
      const bool last = c + 1 == children.size();
      if (!last) out += "(";
      out += bond_token(mol.bonds[static_cast<std::size_t>(inc[k])]);
      self(self, nbr[k]);
      if (!last) out += ")";
    }
  };

  bool first_component = true;
  for (int i = 0; i < n; ++i) {
    if (emitted[static_cast<std::size_t>(i)]) continue;
    if (!first_component) out += ".";
    first_component = false;
    emit(emit, i);
  }
  return out;
}

}  // namespace ddikit::chem
