#include "ddikit/fp/keys.hpp"

#include <set>

#include "ddikit/chem/rings.hpp"

namespace ddikit::fp {

namespace {

using AC = AtomConstraint;
using BC = BondConstraint;
using BE = BondExpr;

// ---- atom constraint builders -------------------------------------------

AC A() { return {}; }  // any heavy atom

AC el(std::vector<int> zs) {
  AC c;
  c.elements = std::move(zs);
  return c;
}

// Q in the key mnemonics: any heteroatom (not carbon, not hydrogen).
AC Q() {
  AC c;
  c.elements = {1, 6};
  c.negate = true;
  return c;
}

AC QH() {
  AC c = Q();
  c.min_h = 1;
  return c;
}

AC X() { return el({9, 17, 35, 53}); }  // halogen

// Aliphatic carbon with an exact hydrogen count set.
AC CH(std::vector<int> hs) {
  AC c = el({6});
  c.aromatic = 0;
  c.h_counts = std::move(hs);
  return c;
}

AC arom(AC c) {
  c.aromatic = 1;
  return c;
}

AC aliph(AC c) {
  c.aromatic = 0;
  return c;
}

AC ring_atom(AC c) {
  c.in_ring = 1;
  return c;
}

AC min_h(AC c, int n) {
  c.min_h = n;
  return c;
}

AC charged(AC c) {
  c.charged = 1;
  return c;
}

// ---- bond and pattern builders ------------------------------------------

BC b(int i, int j, BE e = BE::Any) { return BC{i, j, e, kAny}; }
BC rb(int i, int j, BE e = BE::Any) { return BC{i, j, e, 1}; }  // ring bond
BC cb(int i, int j, BE e = BE::Any) { return BC{i, j, e, 0}; }  // chain bond

FragmentPattern pat(std::vector<AC> atoms, std::vector<BC> bonds) {
  FragmentPattern p;
  p.atoms = std::move(atoms);
  p.bonds = std::move(bonds);
  return p;
}

// Linear chain with uniform bond expression.
FragmentPattern path(std::vector<AC> atoms, BE e = BE::Any) {
  FragmentPattern p;
  p.atoms = std::move(atoms);
  for (int i = 0; i + 1 < static_cast<int>(p.atoms.size()); ++i) p.bonds.push_back(b(i, i + 1, e));
  return p;
}

FragmentPattern atom1(AC a) { return pat({std::move(a)}, {}); }

// ---- key entry builders ---------------------------------------------------

KeyDef none(int key, const char *name) {
  KeyDef d;
  d.key = key;
  d.name = name;
  d.kind = KeyKind::Unimplemented;
  return d;
}

KeyDef frag(int key, const char *name, std::vector<FragmentPattern> patterns, int min_count = 1,
            CountMode mode = CountMode::ImageSets) {
  KeyDef d;
  d.key = key;
  d.name = name;
  d.kind = KeyKind::Patterns;
  d.patterns = std::move(patterns);
  d.min_count = min_count;
  d.mode = mode;
  for (auto &p : d.patterns) p.count_threshold = min_count;
  return d;
}

KeyDef cyc(int key, const char *name, int lo, int hi, bool hetero, int min_count = 1) {
  KeyDef d;
  d.key = key;
  d.name = name;
  d.kind = KeyKind::RingCycle;
  d.cycle_min = lo;
  d.cycle_max = hi;
  d.cycle_hetero = hetero;
  d.min_count = min_count;
  return d;
}

KeyDef special(int key, const char *name, KeyKind kind) {
  KeyDef d;
  d.key = key;
  d.name = name;
  d.kind = kind;
  d.min_count = 2;
  return d;
}

std::vector<int> iota_z(int lo, int hi) {
  std::vector<int> zs;
  for (int z = lo; z <= hi; ++z) zs.push_back(z);
  return zs;
}

std::vector<KeyDef> build_table() {
  std::vector<KeyDef> t;
  t.reserve(166);
  const AC N = el({7});
  const AC O = el({8});
  const AC C6 = el({6});
  const AC S16 = el({16});

  t.push_back(none(1, "isotope-labelled atom"));
  t.push_back(frag(2, "atomic number >103", {atom1(el(iota_z(104, 118)))}));
  t.push_back(frag(3, "Ge/As/Se/Sn/Sb/Te/Pb/Bi/Po",
                   {atom1(el({32, 33, 34, 50, 51, 52, 82, 83, 84}))}));
  t.push_back(frag(4, "actinide", {atom1(el(iota_z(89, 103)))}));
  t.push_back(frag(5, "Sc/Ti/Y/Zr/Hf", {atom1(el({21, 22, 39, 40, 72}))}));
  t.push_back(frag(6, "lanthanide", {atom1(el(iota_z(57, 71)))}));
  t.push_back(frag(7, "V/Cr/Mn/Nb/Mo/Tc/Ta/W/Re",
                   {atom1(el({23, 24, 25, 41, 42, 43, 73, 74, 75}))}));
  t.push_back(cyc(8, "4-ring with heteroatom", 4, 4, true));
  t.push_back(frag(9, "Fe/Co/Ni/Ru/Rh/Pd/Os/Ir/Pt",
                   {atom1(el({26, 27, 28, 44, 45, 46, 76, 77, 78}))}));
  t.push_back(frag(10, "alkaline earth", {atom1(el({4, 12, 20, 38, 56, 88}))}));
  t.push_back(cyc(11, "4-ring", 4, 4, false));
  t.push_back(frag(12, "Cu/Zn/Ag/Cd/Au/Hg", {atom1(el({29, 30, 47, 48, 79, 80}))}));
  t.push_back(frag(13, "O~N(~C)~C", {pat({O, N, C6, C6}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(14, "S-S", {path({S16, S16}, BE::Single)}));
  t.push_back(frag(15, "O~C(~O)~O", {pat({O, C6, O, O}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(cyc(16, "3-ring with heteroatom", 3, 3, true));
  t.push_back(frag(17, "C#C", {path({C6, C6}, BE::Triple)}));
  t.push_back(frag(18, "group IIIA", {atom1(el({5, 13, 31, 49, 81}))}));
  t.push_back(cyc(19, "7-ring", 7, 7, false));
  t.push_back(frag(20, "Si", {atom1(el({14}))}));
  t.push_back(frag(21, "C=C(~Q)~Q",
                   {pat({C6, C6, Q(), Q()}, {b(0, 1, BE::Double), b(1, 2), b(1, 3)})}));
  t.push_back(cyc(22, "3-ring", 3, 3, false));
  t.push_back(frag(23, "N~C(~O)~O", {pat({N, C6, O, O}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(24, "N-O", {path({N, O}, BE::Single)}));
  t.push_back(frag(25, "N~C(~N)~N", {pat({N, C6, N, N}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(26, "ring C=C with two more ring bonds",
                   {pat({C6, C6, A(), A()}, {rb(0, 1, BE::Double), rb(1, 2), rb(1, 3)})}));
  t.push_back(frag(27, "I", {atom1(el({53}))}));
  t.push_back(frag(28, "Q~CH2~Q", {path({Q(), CH({2}), Q()})}));
  t.push_back(frag(29, "P", {atom1(el({15}))}));
  t.push_back(frag(30, "C~Q(~C)(~C)~A",
                   {pat({C6, Q(), C6, C6, A()}, {b(0, 1), b(1, 2), b(1, 3), b(1, 4)})}));
  t.push_back(frag(31, "Q~halogen", {path({Q(), X()})}));
  t.push_back(frag(32, "C~S~N", {path({C6, S16, N})}));
  t.push_back(frag(33, "N~S", {path({N, S16})}));
  t.push_back(frag(34, "CH2=A", {path({CH({2}), A()}, BE::Double)}));
  t.push_back(frag(35, "alkali metal", {atom1(el({3, 11, 19, 37, 55, 87}))}));
  t.push_back(frag(36, "S in ring", {atom1(ring_atom(S16))}));
  t.push_back(frag(37, "N~C(~O)~N", {pat({N, C6, O, N}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(38, "N~C(~C)~N", {pat({N, C6, C6, N}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(39, "O~S(~O)~O", {pat({O, S16, O, O}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(40, "S-O", {path({S16, O}, BE::Single)}));
  t.push_back(frag(41, "C#N", {path({C6, N}, BE::Triple)}));
  t.push_back(frag(42, "F", {atom1(el({9}))}));
  t.push_back(frag(43, "QH~A~QH", {path({QH(), A(), QH()})}));
  t.push_back(frag(44, "atom outside common set",
                   {atom1([] {
                     AC c;
                     c.elements = {1, 6, 7, 8, 9, 16, 17, 35, 53};
                     c.negate = true;
                     return c;
                   }())}));
  t.push_back(frag(45, "C=C~N", {pat({C6, C6, N}, {b(0, 1, BE::Double), b(1, 2)})}));
  t.push_back(frag(46, "Br", {atom1(el({35}))}));
  t.push_back(frag(47, "S~A~N", {path({S16, A(), N})}));
  t.push_back(frag(48, "O~Q(~O)~O", {pat({O, Q(), O, O}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(49, "charged atom", {atom1(charged(A()))}));
  t.push_back(frag(50, "C=C(~C)~C",
                   {pat({C6, C6, C6, C6}, {b(0, 1, BE::Double), b(1, 2), b(1, 3)})}));
  t.push_back(frag(51, "C~S~O", {path({C6, S16, O})}));
  t.push_back(frag(52, "N~N", {path({N, N})}));
  t.push_back(frag(53, "QH~A~A~A~QH", {path({QH(), A(), A(), A(), QH()})}));
  t.push_back(frag(54, "QH~A~A~QH", {path({QH(), A(), A(), QH()})}));
  t.push_back(frag(55, "O~S~O", {path({O, S16, O})}));
  t.push_back(frag(56, "O~N(~O)~C", {pat({O, N, O, C6}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(57, "O in ring", {atom1(ring_atom(O))}));
  t.push_back(frag(58, "Q~S~Q", {path({Q(), S16, Q()})}));
  t.push_back(frag(59, "S to aromatic pair",
                   {pat({S16, A(), A()}, {b(0, 1, BE::NotAromatic), b(1, 2, BE::Aromatic)})}));
  t.push_back(frag(60, "S=O", {path({S16, O}, BE::Double)}));
  t.push_back(frag(61, "A~S(~A)~A", {pat({A(), S16, A(), A()}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(62, "ring-chain-ring bond walk",
                   {pat({A(), A(), A(), A()}, {rb(0, 1), cb(1, 2), rb(2, 3)})}));
  t.push_back(frag(63, "N=O", {path({N, O}, BE::Double)}));
  t.push_back(frag(64, "ring atom chained to S", {pat({A(), A(), S16}, {rb(0, 1), cb(1, 2)})}));
  t.push_back(frag(65, "aromatic C:N", {path({arom(C6), arom(N)}, BE::Aromatic)}));
  t.push_back(frag(66, "C~C(~C)(~C)~A",
                   {pat({C6, C6, C6, C6, A()}, {b(0, 1), b(1, 2), b(1, 3), b(1, 4)})}));
  t.push_back(frag(67, "Q~S", {path({Q(), S16})}));
  t.push_back(frag(68, "QH~QH", {path({QH(), QH()})}));
  t.push_back(frag(69, "Q~QH", {path({Q(), QH()})}));
  t.push_back(frag(70, "Q~N~Q", {path({Q(), N, Q()})}));
  t.push_back(frag(71, "N~O", {path({N, O})}));
  t.push_back(frag(72, "O~A~A~O", {path({O, A(), A(), O})}));
  t.push_back(frag(73, "S=A", {path({S16, A()}, BE::Double)}));
  t.push_back(frag(74, "CH3~A~CH3", {path({CH({3}), A(), CH({3})})}));
  t.push_back(frag(75, "chain N in ring", {pat({A(), N, A()}, {cb(0, 1), rb(1, 2)})}));
  t.push_back(frag(76, "C=C(~A)~A",
                   {pat({C6, C6, A(), A()}, {b(0, 1, BE::Double), b(1, 2), b(1, 3)})}));
  t.push_back(frag(77, "N~A~N", {path({N, A(), N})}));
  t.push_back(frag(78, "C=N", {path({C6, N}, BE::Double)}));
  t.push_back(frag(79, "N~A~A~N", {path({N, A(), A(), N})}));
  t.push_back(frag(80, "N~A~A~A~N", {path({N, A(), A(), A(), N})}));
  t.push_back(frag(81, "S~A(~A)~A", {pat({S16, A(), A(), A()}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(82, "A~CH2~QH", {path({A(), CH({2}), QH()})}));
  t.push_back(cyc(83, "5-ring with heteroatom", 5, 5, true));
  t.push_back(frag(84, "NH2", {atom1([&] {
                     AC c = aliph(N);
                     c.h_counts = {2};
                     return c;
                   }())}));
  t.push_back(frag(85, "C~N(~C)~C", {pat({C6, N, C6, C6}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(86, "CH2~Q~CH2",
                   {path({CH({2, 3}), Q(), CH({2, 3})}, BE::SingleOrAromatic)}));
  t.push_back(frag(87, "halogen on ring substituent",
                   {pat({X(), A(), A()}, {cb(0, 1), rb(1, 2)})}));
  t.push_back(frag(88, "S", {atom1(S16)}));
  t.push_back(frag(89, "O~A~A~A~O", {path({O, A(), A(), A(), O})}));
  t.push_back(frag(90, "QH~A~A~CH2~A", {path({QH(), A(), A(), CH({2}), A()})}));
  t.push_back(frag(91, "QH~A~A~A~CH2~A", {path({QH(), A(), A(), A(), CH({2}), A()})}));
  t.push_back(frag(92, "O~C(~N)~C", {pat({O, C6, N, C6}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(93, "Q~CH3", {path({Q(), CH({3})})}));
  t.push_back(frag(94, "Q~N", {path({Q(), N})}));
  t.push_back(frag(95, "N~A~A~O", {path({N, A(), A(), O})}));
  t.push_back(cyc(96, "5-ring", 5, 5, false));
  t.push_back(frag(97, "N~A~A~A~O", {path({N, A(), A(), A(), O})}));
  t.push_back(cyc(98, "6-ring with heteroatom", 6, 6, true));
  t.push_back(frag(99, "C=C", {path({C6, C6}, BE::Double)}));
  t.push_back(frag(100, "A~CH2~N", {path({A(), CH({2}), N})}));
  t.push_back(cyc(101, "8-ring or larger", 8, 14, false));
  t.push_back(frag(102, "Q~O", {path({Q(), O})}));
  t.push_back(frag(103, "Cl", {atom1(el({17}))}));
  t.push_back(frag(104, "QH~A~CH2~A", {path({QH(), A(), CH({2}), A()})}));
  t.push_back(frag(105, "ring atom with three ring bonds",
                   {pat({A(), A(), A(), A()}, {rb(0, 1), rb(1, 2), rb(1, 3)})}));
  t.push_back(frag(106, "Q~A(~Q)~Q", {pat({Q(), A(), Q(), Q()}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(107, "halogen~A(~A)~A",
                   {pat({X(), A(), A(), A()}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(108, "CH3~A~A~A~CH2~A", {path({CH({3}), A(), A(), A(), CH({2}), A()})}));
  t.push_back(frag(109, "A~CH2~O", {path({A(), CH({2}), O})}));
  t.push_back(frag(110, "N~C~O", {path({N, C6, O})}));
  t.push_back(frag(111, "N~A~CH2~A", {path({N, A(), CH({2}), A()})}));
  t.push_back(frag(112, "A~A(~A)(~A)~A",
                   {pat({A(), A(), A(), A(), A()}, {b(0, 1), b(1, 2), b(1, 3), b(1, 4)})}));
  t.push_back(frag(113, "O to aromatic pair",
                   {pat({O, A(), A()}, {b(0, 1, BE::NotAromatic), b(1, 2, BE::Aromatic)})}));
  t.push_back(frag(114, "CH3~CH2~A", {path({CH({3}), CH({2}), A()})}));
  t.push_back(frag(115, "CH3~A~CH2~A", {path({CH({3}), A(), CH({2}), A()})}));
  t.push_back(frag(116, "CH3~A~A~CH2~A", {path({CH({3}), A(), A(), CH({2}), A()})}));
  t.push_back(frag(117, "N~A~O", {path({N, A(), O})}));
  t.push_back(frag(118, "A~CH2~CH2~A seen at >1 atom", {path({A(), CH({2}), CH({2}), A()})}, 2,
                   CountMode::AnchorAtoms));
  t.push_back(frag(119, "N=A", {path({N, A()}, BE::Double)}));
  t.push_back(frag(120, "heterocyclic atom x2", {atom1(ring_atom(Q()))}, 2));
  t.push_back(frag(121, "N in ring", {atom1(ring_atom(N))}));
  t.push_back(frag(122, "A~N(~A)~A", {pat({A(), N, A(), A()}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(123, "O~C~O", {path({O, C6, O})}));
  t.push_back(frag(124, "Q~Q", {path({Q(), Q()})}));
  t.push_back(special(125, "more than one aromatic ring", KeyKind::AromaticRings));
  t.push_back(frag(126, "chain O with two chain bonds", {pat({A(), O, A()}, {cb(0, 1), cb(1, 2)})}));
  t.push_back(frag(127, "ring atom chained to O, x2", {pat({A(), A(), O}, {rb(0, 1), cb(1, 2)})}, 2));
  t.push_back(frag(128, "A~CH2~A~A~A~CH2~A",
                   {path({A(), CH({2}), A(), A(), A(), CH({2}), A()})}));
  t.push_back(frag(129, "A~CH2~A~A~CH2~A", {path({A(), CH({2}), A(), A(), CH({2}), A()})}));
  t.push_back(frag(130, "Q~Q x2", {path({Q(), Q()})}, 2));
  t.push_back(frag(131, "QH x2", {atom1(QH())}, 2));
  t.push_back(frag(132, "O~A~CH2~A", {path({O, A(), CH({2}), A()})}));
  t.push_back(frag(133, "ring atom chained to N", {pat({A(), A(), N}, {rb(0, 1), cb(1, 2)})}));
  t.push_back(frag(134, "halogen", {atom1(X())}));
  t.push_back(frag(135, "N to aromatic pair",
                   {pat({N, A(), A()}, {b(0, 1, BE::NotAromatic), b(1, 2, BE::Aromatic)})}));
  t.push_back(frag(136, "O=A x2", {path({O, A()}, BE::Double)}, 2));
  t.push_back(frag(137, "heterocyclic atom", {atom1(ring_atom(Q()))}));
  t.push_back(frag(138, "Q~CH2~A x2", {path({Q(), CH({2}), A()})}, 2));
  t.push_back(frag(139, "OH", {atom1(min_h(aliph(O), 1))}));
  t.push_back(frag(140, "O x4", {atom1(O)}, 4));
  t.push_back(frag(141, "CH3 x3", {atom1(CH({3, 4}))}, 3));
  t.push_back(frag(142, "N x2", {atom1(N)}, 2));
  t.push_back(frag(143, "ring atom chained to O", {pat({A(), A(), O}, {rb(0, 1), cb(1, 2)})}));
  t.push_back(frag(144, "aromatic pair with two outside bonds",
                   {pat({A(), A(), A(), A()},
                        {b(0, 1, BE::NotAromatic), b(1, 2, BE::Aromatic), b(2, 3, BE::NotAromatic)})}));
  t.push_back(cyc(145, "6-ring x2", 6, 6, false, 2));
  t.push_back(frag(146, "O x3", {atom1(O)}, 3));
  t.push_back(frag(147, "A~CH2~CH2~A", {path({A(), CH({2}), CH({2}), A()})}, 1,
                   CountMode::AnchorAtoms));
  t.push_back(frag(148, "A~Q(~A)~A", {pat({A(), Q(), A(), A()}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(149, "CH3 x2", {atom1(CH({3, 4}))}, 2));
  t.push_back(frag(150, "chain-ring-chain bond walk",
                   {pat({A(), A(), A(), A()}, {cb(0, 1), rb(1, 2), cb(2, 3)})}));
  t.push_back(frag(151, "NH", {atom1(min_h(N, 1))}));
  t.push_back(frag(152, "O~C(~C)~C", {pat({O, C6, C6, C6}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(153, "Q~CH2~A", {path({Q(), CH({2}), A()})}));
  t.push_back(frag(154, "C=O", {path({C6, O}, BE::Double)}));
  t.push_back(frag(155, "chain CH2 with two chain bonds",
                   {pat({A(), CH({2}), A()}, {cb(0, 1), cb(1, 2)})}));
  t.push_back(frag(156, "N~A(~A)~A", {pat({N, A(), A(), A()}, {b(0, 1), b(1, 2), b(1, 3)})}));
  t.push_back(frag(157, "C-O", {path({C6, O}, BE::Single)}));
  t.push_back(frag(158, "C-N", {path({C6, N}, BE::Single)}));
  t.push_back(frag(159, "O x2", {atom1(O)}, 2));
  t.push_back(frag(160, "CH3", {atom1(CH({3, 4}))}));
  t.push_back(frag(161, "N", {atom1(N)}));
  t.push_back(frag(162, "aromatic atom", {atom1(arom(A()))}));
  t.push_back(cyc(163, "6-ring", 6, 6, false));
  t.push_back(frag(164, "O", {atom1(O)}));
  t.push_back(frag(165, "ring atom", {atom1(ring_atom(A()))}));
  t.push_back(special(166, "more than one fragment", KeyKind::ComponentCount));
  return t;
}

}  // namespace

const std::vector<KeyDef> &key_table() {
  static const std::vector<KeyDef> *table = [] {
    auto *t = new std::vector<KeyDef>(build_table());
    for (std::size_t i = 0; i < t->size(); ++i) {
      if ((*t)[i].key != static_cast<int>(i) + 1)
        throw std::logic_error("structural key table out of order");
      for (const auto &p : (*t)[i].patterns) validate_pattern(p);
    }
    if (t->size() != 166) throw std::logic_error("structural key table must have 166 entries");
    return t;
  }();
  return *table;
}

std::vector<int> unimplemented_keys() {
  std::vector<int> keys;
  for (const auto &def : key_table())
    if (def.kind == KeyKind::Unimplemented) keys.push_back(def.key);
  return keys;
}

Fingerprint compute_keys(const chem::Molecule &mol) {
  Fingerprint fp;
  for (const KeyDef &def : key_table()) {
    bool on = false;
    switch (def.kind) {
      case KeyKind::Unimplemented:
        break;
      case KeyKind::Patterns: {
        if (def.mode == CountMode::ImageSets) {
          std::set<std::vector<int>> sets;
          for (const auto &p : def.patterns) collect_matches(mol, p, &sets, nullptr);
          on = static_cast<int>(sets.size()) >= def.min_count;
        } else {
          std::set<int> anchors;
          for (const auto &p : def.patterns) collect_matches(mol, p, nullptr, &anchors);
          on = static_cast<int>(anchors.size()) >= def.min_count;
        }
        break;
      }
      case KeyKind::RingCycle:
        on = count_simple_cycles(mol, def.cycle_min, def.cycle_max, def.cycle_hetero,
                                 def.min_count) >= def.min_count;
        break;
      case KeyKind::ComponentCount:
        on = mol.n_components >= def.min_count;
        break;
      case KeyKind::AromaticRings:
        on = chem::aromatic_ring_count(mol) >= def.min_count;
        break;
    }
    if (on) fp.set(def.key - 1);
  }
  return fp;
}

}  // namespace ddikit::fp
