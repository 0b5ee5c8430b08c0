#include "ddikit/chem/molecule.hpp"

#include <algorithm>
#include <queue>

namespace ddikit::chem {

void Molecule::finish() {
  const auto n = atoms.size();
  adjacency_.assign(n, {});
  incident_.assign(n, {});
  for (std::size_t bi = 0; bi < bonds.size(); ++bi) {
    const Bond &bond = bonds[bi];
    adjacency_[static_cast<std::size_t>(bond.a)].push_back(bond.b);
    adjacency_[static_cast<std::size_t>(bond.b)].push_back(bond.a);
    incident_[static_cast<std::size_t>(bond.a)].push_back(static_cast<int>(bi));
    incident_[static_cast<std::size_t>(bond.b)].push_back(static_cast<int>(bi));
  }
  for (std::size_t i = 0; i < n; ++i) {
    // Keep neighbor order ascending with incident bonds in lockstep.
    std::vector<std::size_t> order(adjacency_[i].size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return adjacency_[i][x] < adjacency_[i][y];
    });
    std::vector<int> adj, inc;
    adj.reserve(order.size());
    inc.reserve(order.size());
    for (std::size_t k : order) {
      adj.push_back(adjacency_[i][k]);
      inc.push_back(incident_[i][k]);
    }
    adjacency_[i] = std::move(adj);
    incident_[i] = std::move(inc);
  }

  // Connected components by BFS, numbered in order of lowest atom index.
  std::vector<int> comp(n, -1);
  int next = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (comp[start] != -1) continue;
    std::queue<std::size_t> q;
    q.push(start);
    comp[start] = next;
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (int v : adjacency_[u]) {
        if (comp[static_cast<std::size_t>(v)] == -1) {
          comp[static_cast<std::size_t>(v)] = next;
          q.push(static_cast<std::size_t>(v));
        }
      }
    }
    ++next;
  }
  for (std::size_t i = 0; i < n; ++i) atoms[i].component = comp[i];
  n_components = n == 0 ? 0 : next;
}

const Bond *Molecule::bond_between(int a, int b) const {
  for (int bi : incident_[static_cast<std::size_t>(a)]) {
    const Bond &bond = bonds[static_cast<std::size_t>(bi)];
    if ((bond.a == a && bond.b == b) || (bond.a == b && bond.b == a)) return &bond;
  }
  return nullptr;
}

std::vector<int> Molecule::ring_sizes_of(int atom) const {
  std::vector<int> sizes;
  for (const auto &ring : rings) {
    if (std::find(ring.begin(), ring.end(), atom) != ring.end())
      sizes.push_back(static_cast<int>(ring.size()));
  }
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  return sizes;
}

}  // namespace ddikit::chem
