#include "ddikit/chem/rings.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <utility>
#include <vector>

namespace ddikit::chem {

namespace {

using EdgeBits = std::vector<std::uint64_t>;

void set_bit(EdgeBits &bits, int i) {
  bits[static_cast<std::size_t>(i) / 64] |= std::uint64_t{1} << (static_cast<std::size_t>(i) % 64);
}

int lowest_bit(const EdgeBits &bits) {
  for (std::size_t w = 0; w < bits.size(); ++w)
    if (bits[w] != 0) return static_cast<int>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits[w])));
  return -1;
}

void xor_into(EdgeBits &dst, const EdgeBits &src) {
  for (std::size_t w = 0; w < dst.size(); ++w) dst[w] ^= src[w];
}

bool any_bit(const EdgeBits &bits) {
  for (auto w : bits)
    if (w != 0) return true;
  return false;
}

// Rotate/reflect a cycle so the smallest atom comes first and its smaller
// cycle-neighbor second; makes ring lists reproducible.
std::vector<int> canonical_cycle(const std::vector<int> &cycle) {
  const std::size_t k = cycle.size();
  std::size_t lo = 0;
  for (std::size_t i = 1; i < k; ++i)
    if (cycle[i] < cycle[lo]) lo = i;
  const int next = cycle[(lo + 1) % k];
  const int prev = cycle[(lo + k - 1) % k];
  std::vector<int> out(k);
  if (next <= prev) {
    for (std::size_t i = 0; i < k; ++i) out[i] = cycle[(lo + i) % k];
  } else {
    for (std::size_t i = 0; i < k; ++i) out[i] = cycle[(lo + k - i) % k];
  }
  return out;
}

struct Candidate {
  std::vector<int> atoms;  // canonical cyclic order
  EdgeBits edges;
};

}  // namespace

void perceive_rings(Molecule &mol) {
  const int n = mol.n_atoms();
  const int m = mol.n_bonds();
  mol.rings.clear();
  for (auto &a : mol.atoms) a.in_ring = false;
  for (auto &b : mol.bonds) b.in_ring = false;
  const int rank = m - n + mol.n_components;
  if (rank <= 0) return;

  std::map<std::pair<int, int>, int> edge_index;
  for (int bi = 0; bi < m; ++bi) {
    const Bond &b = mol.bonds[static_cast<std::size_t>(bi)];
    edge_index[std::minmax(b.a, b.b)] = bi;
  }
  const std::size_t words = (static_cast<std::size_t>(m) + 63) / 64;

  // Horton candidate cycles: for every root r and edge (x, y), the cycle
  // path(r,x) + (x,y) + path(y,r) when the two shortest paths only share r.
  std::set<EdgeBits> dedup;
  std::vector<Candidate> candidates;
  std::vector<int> dist(static_cast<std::size_t>(n));
  std::vector<int> parent(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(parent.begin(), parent.end(), -1);
    std::queue<int> q;
    q.push(r);
    dist[static_cast<std::size_t>(r)] = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : mol.neighbors(u)) {
        if (dist[static_cast<std::size_t>(v)] == -1) {
          dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
          parent[static_cast<std::size_t>(v)] = u;
          q.push(v);
        }
      }
    }
    auto path_to_root = [&](int v) {
      std::vector<int> path;  // v, ..., r
      for (int u = v; u != -1; u = parent[static_cast<std::size_t>(u)]) path.push_back(u);
      return path;
    };
    for (const Bond &b : mol.bonds) {
      const int x = b.a, y = b.b;
      if (dist[static_cast<std::size_t>(x)] == -1 || dist[static_cast<std::size_t>(y)] == -1)
        continue;
      if (parent[static_cast<std::size_t>(x)] == y || parent[static_cast<std::size_t>(y)] == x)
        continue;  // tree edge
      const auto px = path_to_root(x);
      const auto py = path_to_root(y);
      // Paths must be vertex-disjoint apart from the root.
      std::set<int> seen(px.begin(), px.end());
      bool ok = true;
      for (std::size_t i = 0; ok && i + 1 < py.size(); ++i)
        if (seen.count(py[i])) ok = false;
      if (!ok || px.back() != r || py.back() != r) continue;
      // Cycle order: r .. x, then y .. back toward r (root excluded).
      std::vector<int> cycle(px.rbegin(), px.rend());
      for (std::size_t i = 0; i + 1 < py.size(); ++i) cycle.push_back(py[i]);
      if (cycle.size() < 3) continue;
      EdgeBits bits(words, 0);
      bool edges_ok = true;
      for (std::size_t i = 0; i < cycle.size() && edges_ok; ++i) {
        const auto it = edge_index.find(std::minmax(cycle[i], cycle[(i + 1) % cycle.size()]));
        if (it == edge_index.end()) edges_ok = false;
        else set_bit(bits, it->second);
      }
      if (!edges_ok) continue;
      if (dedup.insert(bits).second)
        candidates.push_back(Candidate{canonical_cycle(cycle), std::move(bits)});
    }
  }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate &a, const Candidate &b) {
    if (a.atoms.size() != b.atoms.size()) return a.atoms.size() < b.atoms.size();
    return a.atoms < b.atoms;
  });

  // Greedy GF(2) independence over candidate edge sets.
  std::vector<std::pair<int, EdgeBits>> reduced;  // pivot, reduced vector
  for (const Candidate &cand : candidates) {
    if (static_cast<int>(mol.rings.size()) == rank) break;
    EdgeBits v = cand.edges;
    for (const auto &[pivot, vec] : reduced) {
      if (v[static_cast<std::size_t>(pivot) / 64] >>
              (static_cast<std::size_t>(pivot) % 64) & 1)
        xor_into(v, vec);
    }
    if (!any_bit(v)) continue;
    reduced.emplace_back(lowest_bit(v), std::move(v));
    mol.rings.push_back(cand.atoms);
  }

  for (const auto &ring : mol.rings) {
    for (std::size_t i = 0; i < ring.size(); ++i) {
      mol.atoms[static_cast<std::size_t>(ring[i])].in_ring = true;
      const int bi = edge_index.at(std::minmax(ring[i], ring[(i + 1) % ring.size()]));
      mol.bonds[static_cast<std::size_t>(bi)].in_ring = true;
    }
  }
}

int count_simple_cycles(const Molecule &mol, int min_size, int max_size, bool hetero_only,
                        int stop_at) {
  const int n = mol.n_atoms();
  std::set<std::vector<int>> found;  // sorted vertex sets
  long budget = 2'000'000;           // step guard; unreachable for drug-sized graphs

  std::vector<int> path;
  std::vector<bool> on_path(static_cast<std::size_t>(n), false);

  auto dfs = [&](auto &&self, int start, int u) -> bool {
    if (--budget < 0) return true;
    for (int v : mol.neighbors(u)) {
      if (v == start && static_cast<int>(path.size()) >= 3) {
        // Count each cycle once: fix traversal direction.
        if (path[1] < path.back()) continue;
        if (static_cast<int>(path.size()) < min_size) continue;
        std::vector<int> key = path;
        std::sort(key.begin(), key.end());
        if (hetero_only) {
          bool hetero = false;
          for (int a : key)
            if (mol.atoms[static_cast<std::size_t>(a)].atomic_number != 6) hetero = true;
          if (!hetero) continue;
        }
        found.insert(std::move(key));
        if (static_cast<int>(found.size()) >= stop_at) return true;
        continue;
      }
      if (v <= start || on_path[static_cast<std::size_t>(v)]) continue;
      if (static_cast<int>(path.size()) >= max_size) continue;
      path.push_back(v);
      on_path[static_cast<std::size_t>(v)] = true;
      const bool done = self(self, start, v);
      on_path[static_cast<std::size_t>(v)] = false;
      path.pop_back();
      if (done) return true;
    }
    return false;
  };

  for (int s = 0; s < n; ++s) {
    if (static_cast<int>(found.size()) >= stop_at) break;
    path.assign(1, s);
    on_path.assign(static_cast<std::size_t>(n), false);
    on_path[static_cast<std::size_t>(s)] = true;
    if (dfs(dfs, s, s)) break;
  }
  return static_cast<int>(found.size());
}

int aromatic_ring_count(const Molecule &mol) {
  int count = 0;
  for (const auto &ring : mol.rings) {
    bool aromatic = true;
    for (std::size_t i = 0; i < ring.size() && aromatic; ++i) {
      const Bond *b = mol.bond_between(ring[i], ring[(i + 1) % ring.size()]);
      if (b == nullptr || b->order != BondOrder::Aromatic) aromatic = false;
    }
    if (aromatic) ++count;
  }
  return count;
}

}  // namespace ddikit::chem
