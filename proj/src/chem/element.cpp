#include "ddikit/chem/element.hpp"

#include <array>
#include <map>
#include <string>

namespace ddikit::chem {

namespace {

constexpr std::array<const char *, 119> kSymbols = {
    "",   "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
    "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",
    "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br",
    "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag",
    "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
    "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
    "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
    "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am",
    "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh",
    "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

const std::map<std::string, int, std::less<>> &symbol_index() {
  static const auto *index = [] {
    auto *m = new std::map<std::string, int, std::less<>>;
    for (int z = 1; z <= 118; ++z) (*m)[kSymbols[z]] = z;
    return m;
  }();
  return *index;
}

}  // namespace

int atomic_number(std::string_view symbol) {
  const auto &idx = symbol_index();
  auto it = idx.find(symbol);
  return it == idx.end() ? 0 : it->second;
}

std::string_view element_symbol(int z) {
  if (z < 1 || z > 118) return "";
  return kSymbols[static_cast<std::size_t>(z)];
}

bool organic_subset(int z) {
  switch (z) {
    case 5: case 6: case 7: case 8: case 9:
    case 15: case 16: case 17: case 35: case 53:
      return true;
    default:
      return false;
  }
}

bool aromatic_capable(int z) {
  switch (z) {
    case 5: case 6: case 7: case 8: case 15: case 16: case 33: case 34:
      return true;
    default:
      return false;
  }
}

const std::vector<int> &standard_valences(int z) {
  static const std::vector<int> none;
  static const std::vector<int> v1{1};
  static const std::vector<int> v2{2};
  static const std::vector<int> v3{3};
  static const std::vector<int> v4{4};
  static const std::vector<int> v35{3, 5};
  static const std::vector<int> v246{2, 4, 6};
  switch (z) {
    case 1: return v1;           // H
    case 5: return v3;           // B
    case 6: return v4;           // C
    case 7: return v3;           // N
    case 8: return v2;           // O
    case 9: return v1;           // F
    case 15: return v35;         // P
    case 16: return v246;        // S
    case 17: return v1;          // Cl
    case 35: return v1;          // Br
    case 53: return v1;          // I
    default: return none;
  }
}

}  // namespace ddikit::chem
