//
// Project molfuse - Copyright 2026 The molfuse Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "molfuse/common.hpp"
#include "molfuse/rng.hpp"

namespace molfuse {

enum class BondOrder : uint8_t { kSingle = 1, kDouble = 2, kTriple = 3, kAromatic = 4 };

namespace detail {

struct ElementInfo {
  const char *symbol;
  double mass;
  bool organic_subset; // writable without brackets
  bool aromatic_ok;    // has a lowercase aromatic form
  int pi_bonus;        // extra valence consumed by the aromatic system
  std::array<int, 3> valences; // allowed valences ascending; 0 = unused slot
};

// Average atomic masses; valences only matter for implicit-H inference on
// atoms written without brackets, bracket atoms are trusted as given.
inline constexpr std::array<ElementInfo, 32> kElements = {{
    {"H", 1.008, false, false, 0, {1, 0, 0}},
    {"B", 10.811, true, true, 0, {3, 0, 0}},
    {"C", 12.011, true, true, 1, {4, 0, 0}},
    {"N", 14.007, true, true, 1, {3, 0, 0}},
    {"O", 15.999, true, true, 0, {2, 0, 0}},
    {"F", 18.998, true, false, 0, {1, 0, 0}},
    {"Na", 22.990, false, false, 0, {0, 0, 0}},
    {"Mg", 24.305, false, false, 0, {0, 0, 0}},
    {"Al", 26.982, false, false, 0, {0, 0, 0}},
    {"Si", 28.086, false, false, 0, {4, 0, 0}},
    {"P", 30.974, true, true, 1, {3, 5, 0}},
    {"S", 32.065, true, true, 0, {2, 4, 6}},
    {"Cl", 35.453, true, false, 0, {1, 0, 0}},
    {"K", 39.098, false, false, 0, {0, 0, 0}},
    {"Ca", 40.078, false, false, 0, {0, 0, 0}},
    {"Cr", 51.996, false, false, 0, {0, 0, 0}},
    {"Mn", 54.938, false, false, 0, {0, 0, 0}},
    {"Fe", 55.845, false, false, 0, {0, 0, 0}},
    {"Co", 58.933, false, false, 0, {0, 0, 0}},
    {"Ni", 58.693, false, false, 0, {0, 0, 0}},
    {"Cu", 63.546, false, false, 0, {0, 0, 0}},
    {"Zn", 65.38, false, false, 0, {0, 0, 0}},
    {"As", 74.922, false, true, 1, {3, 5, 0}},
    {"Se", 78.971, false, true, 0, {2, 4, 6}},
    {"Br", 79.904, true, false, 0, {1, 0, 0}},
    {"Ag", 107.868, false, false, 0, {0, 0, 0}},
    {"Sn", 118.71, false, false, 0, {4, 0, 0}},
    {"I", 126.904, true, false, 0, {1, 0, 0}},
    {"Pt", 195.084, false, false, 0, {0, 0, 0}},
    {"Au", 196.967, false, false, 0, {0, 0, 0}},
    {"Hg", 200.59, false, false, 0, {0, 0, 0}},
    {"Pb", 207.2, false, false, 0, {0, 0, 0}},
}};

inline int element_index(std::string_view symbol) {
  for (size_t i = 0; i < kElements.size(); ++i) {
    if (symbol == kElements[i].symbol) return static_cast<int>(i);
  }
  return -1;
}

inline const ElementInfo &element(int idx) { return kElements[static_cast<size_t>(idx)]; }

} // namespace detail

struct Atom {
  uint8_t element = 0;     // index into the element table
  bool aromatic = false;
  int8_t formal_charge = 0;
  int16_t explicit_h = 0;  // bracket-specified hydrogen count
  int16_t implicit_h = 0;  // derived from the valence deficit

  int total_h() const { return explicit_h + implicit_h; }
  std::string_view symbol() const { return detail::element(element).symbol; }
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::kSingle;

  bool aromatic() const { return order == BondOrder::kAromatic; }
  int other(int atom) const { return atom == a ? b : a; }
};

struct MolGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::vector<std::vector<int>> rings; // SSSR, each ring a cycle of atom indices

  // Derived connectivity, filled by finalize().
  std::vector<std::vector<std::pair<int, int>>> adj; // (neighbor, bond index)
  std::vector<uint8_t> atom_in_ring;
  std::vector<uint8_t> bond_in_ring;
  int n_components = 0;

  int degree(int atom) const { return static_cast<int>(adj[atom].size()); }

  int heavy_degree(int atom) const {
    int d = 0;
    for (auto [nbr, bond] : adj[atom]) {
      (void)bond;
      if (atoms[nbr].symbol() != "H") ++d;
    }
    return d;
  }

  int cycle_rank() const {
    return static_cast<int>(bonds.size()) - static_cast<int>(atoms.size()) +
           n_components;
  }
};

namespace detail {

inline int bond_order_int(BondOrder o) {
  switch (o) {
  case BondOrder::kSingle: return 1;
  case BondOrder::kDouble: return 2;
  case BondOrder::kTriple: return 3;
  case BondOrder::kAromatic: return 1; // aromatic handled separately
  }
  return 1;
}

// Implicit hydrogen count the reader would assign to this atom given its
// bonds; -1 when no allowed valence fits (aliphatic over-valence).
inline int infer_hydrogens(const MolGraph &g, int atom_idx) {
  const Atom &a = g.atoms[atom_idx];
  const ElementInfo &el = element(a.element);
  int aromatic_bonds = 0;
  int order_sum = 0;
  for (auto [nbr, bond] : g.adj[atom_idx]) {
    (void)nbr;
    const Bond &b = g.bonds[bond];
    if (b.aromatic()) {
      ++aromatic_bonds;
    } else {
      order_sum += bond_order_int(b.order);
    }
  }
  if (a.aromatic) {
    const int base = aromatic_bonds + order_sum + el.pi_bonus;
    for (int v : el.valences) {
      if (v >= base) return v - base;
    }
    return 0; // fused/bridging aromatic atoms exhaust their valence
  }
  const int base = order_sum + aromatic_bonds;
  for (int v : el.valences) {
    if (v != 0 && v >= base) return v - base;
  }
  return -1;
}

inline void build_adjacency(MolGraph &g) {
  g.adj.assign(g.atoms.size(), {});
  for (size_t i = 0; i < g.bonds.size(); ++i) {
    g.adj[g.bonds[i].a].emplace_back(g.bonds[i].b, static_cast<int>(i));
    g.adj[g.bonds[i].b].emplace_back(g.bonds[i].a, static_cast<int>(i));
  }
}

inline std::vector<int> component_labels(const MolGraph &g, int *n_out = nullptr) {
  std::vector<int> comp(g.atoms.size(), -1);
  int n = 0;
  for (size_t start = 0; start < g.atoms.size(); ++start) {
    if (comp[start] >= 0) continue;
    std::queue<int> q;
    q.push(static_cast<int>(start));
    comp[start] = n;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (auto [v, bond] : g.adj[u]) {
        (void)bond;
        if (comp[v] < 0) {
          comp[v] = n;
          q.push(v);
        }
      }
    }
    ++n;
  }
  if (n_out) *n_out = n;
  return comp;
}

// Shortest path from src to dst avoiding one bond; empty when disconnected.
inline std::vector<int> shortest_path_avoiding(const MolGraph &g, int src,
                                               int dst, int avoid_bond) {
  std::vector<int> parent(g.atoms.size(), -2);
  std::queue<int> q;
  q.push(src);
  parent[src] = -1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    if (u == dst) break;
    for (auto [v, bond] : g.adj[u]) {
      if (bond == avoid_bond || parent[v] != -2) continue;
      parent[v] = u;
      q.push(v);
    }
  }
  if (parent[dst] == -2) return {};
  std::vector<int> path;
  for (int u = dst; u != -1; u = parent[u]) path.push_back(u);
  std::reverse(path.begin(), path.end());
  return path;
}

// Smallest set of smallest rings: candidate cycles are the shortest cycle
// through every ring bond plus the fundamental cycles of a BFS forest;
// greedily picked smallest-first subject to GF(2) independence.
inline void find_rings(MolGraph &g) {
  const int n_bonds = static_cast<int>(g.bonds.size());
  g.bond_in_ring.assign(g.bonds.size(), 0);
  g.atom_in_ring.assign(g.atoms.size(), 0);
  g.rings.clear();
  const int rank = g.cycle_rank();
  if (rank <= 0) return;

  for (int b = 0; b < n_bonds; ++b) {
    auto path = shortest_path_avoiding(g, g.bonds[b].a, g.bonds[b].b, b);
    if (!path.empty()) g.bond_in_ring[b] = 1;
  }

  std::vector<std::vector<int>> candidates;
  for (int b = 0; b < n_bonds; ++b) {
    if (!g.bond_in_ring[b]) continue;
    auto path = shortest_path_avoiding(g, g.bonds[b].a, g.bonds[b].b, b);
    candidates.push_back(std::move(path)); // closed by bond b
  }

  auto edge_between = [&](int u, int v) {
    for (auto [nbr, bond] : g.adj[u]) {
      if (nbr == v) return bond;
    }
    return -1;
  };

  const int words = (n_bonds + 63) / 64;
  auto cycle_bits = [&](const std::vector<int> &cycle) {
    std::vector<uint64_t> bits(words, 0);
    for (size_t i = 0; i < cycle.size(); ++i) {
      const int u = cycle[i];
      const int v = cycle[(i + 1) % cycle.size()];
      const int e = edge_between(u, v);
      bits[e / 64] ^= (1ULL << (e % 64));
    }
    return bits;
  };

  std::sort(candidates.begin(), candidates.end(),
            [](const std::vector<int> &x, const std::vector<int> &y) {
              if (x.size() != y.size()) return x.size() < y.size();
              auto xs = x, ys = y;
              std::sort(xs.begin(), xs.end());
              std::sort(ys.begin(), ys.end());
              return xs < ys;
            });
  candidates.erase(std::unique(candidates.begin(), candidates.end(),
                               [](const std::vector<int> &x,
                                  const std::vector<int> &y) {
                                 auto xs = x, ys = y;
                                 std::sort(xs.begin(), xs.end());
                                 std::sort(ys.begin(), ys.end());
                                 return xs == ys;
                               }),
                   candidates.end());

  // Gaussian elimination basis over bond incidence vectors.
  std::vector<std::vector<uint64_t>> basis;
  auto try_add = [&](std::vector<uint64_t> bits) {
    for (const auto &row : basis) {
      int pivot = -1;
      for (int w = 0; w < words; ++w) {
        if (row[w]) {
          pivot = w * 64 + std::countr_zero(row[w]);
          break;
        }
      }
      if (pivot >= 0 && (bits[pivot / 64] >> (pivot % 64)) & 1ULL) {
        for (int w = 0; w < words; ++w) bits[w] ^= row[w];
      }
    }
    for (int w = 0; w < words; ++w) {
      if (bits[w]) {
        basis.push_back(bits);
        return true;
      }
    }
    return false;
  };

  for (auto &cand : candidates) {
    if (static_cast<int>(g.rings.size()) == rank) break;
    if (try_add(cycle_bits(cand))) g.rings.push_back(cand);
  }

  for (const auto &ring : g.rings) {
    for (int a : ring) g.atom_in_ring[a] = 1;
  }
  // Ring-bond membership already computed exactly above via path existence.
  for (int b = 0; b < n_bonds; ++b) {
    if (g.bond_in_ring[b]) {
      g.atom_in_ring[g.bonds[b].a] = 1;
      g.atom_in_ring[g.bonds[b].b] = 1;
    }
  }
}

struct SmilesParser {
  std::string_view s;
  size_t pos = 0;
  MolGraph g;
  std::vector<uint8_t> from_bracket;

  int prev = -1;
  BondOrder pending_order = BondOrder::kSingle;
  bool has_pending_bond = false;
  std::vector<int> branch_stack;

  struct OpenRing {
    int atom;
    BondOrder order;
    bool has_order;
  };
  std::map<int, OpenRing> open_rings;

  [[noreturn]] void fail(Errc code, std::string msg) {
    raise(code, std::move(msg), std::string(s));
  }

  bool eof() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }

  int add_atom(Atom a, bool bracket) {
    const int idx = static_cast<int>(g.atoms.size());
    g.atoms.push_back(a);
    from_bracket.push_back(bracket ? 1 : 0);
    if (prev >= 0) {
      add_bond(prev, idx, take_pending(idx));
    } else if (has_pending_bond) {
      fail(Errc::kSyntax, "bond symbol with no preceding atom");
    }
    prev = idx;
    return idx;
  }

  BondOrder take_pending(int to_atom) {
    if (has_pending_bond) {
      has_pending_bond = false;
      return pending_order;
    }
    if (prev >= 0 && g.atoms[prev].aromatic && g.atoms[to_atom].aromatic) {
      return BondOrder::kAromatic;
    }
    return BondOrder::kSingle;
  }

  void add_bond(int a, int b, BondOrder order) {
    if (a == b) fail(Errc::kSyntax, "ring bond closes onto the same atom");
    for (const Bond &bond : g.bonds) {
      if ((bond.a == a && bond.b == b) || (bond.a == b && bond.b == a)) {
        fail(Errc::kSyntax, "duplicate bond between atom pair");
      }
    }
    if (order == BondOrder::kAromatic &&
        !(g.atoms[a].aromatic && g.atoms[b].aromatic)) {
      fail(Errc::kValence, "aromatic bond between non-aromatic atoms");
    }
    g.bonds.push_back({a, b, order});
  }

  void ring_closure(int digit) {
    if (prev < 0) fail(Errc::kSyntax, "ring closure with no preceding atom");
    BondOrder order = pending_order;
    const bool has_order = has_pending_bond;
    has_pending_bond = false;

    auto it = open_rings.find(digit);
    if (it == open_rings.end()) {
      open_rings[digit] = {prev, order, has_order};
      return;
    }
    OpenRing open = it->second;
    open_rings.erase(it);
    BondOrder final_order;
    if (open.has_order && has_order) {
      if (open.order != order) fail(Errc::kSyntax, "conflicting ring bond orders");
      final_order = order;
    } else if (open.has_order) {
      final_order = open.order;
    } else if (has_order) {
      final_order = order;
    } else if (g.atoms[open.atom].aromatic && g.atoms[prev].aromatic) {
      final_order = BondOrder::kAromatic;
    } else {
      final_order = BondOrder::kSingle;
    }
    add_bond(open.atom, prev, final_order);
  }

  void parse_bracket_atom() {
    ++pos; // consume '['
    if (eof()) fail(Errc::kSyntax, "unterminated bracket atom");
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      fail(Errc::kSyntax, "isotope labels are not supported");
    }
    Atom atom;
    // Element symbol: try the two-letter form first.
    bool matched = false;
    if (pos + 1 < s.size()) {
      std::string two{s[pos], s[pos + 1]};
      if (std::islower(static_cast<unsigned char>(two[0]))) {
        // lowercase aromatic two-letter (se, as)
        std::string up = two;
        up[0] = static_cast<char>(std::toupper(up[0]));
        int idx = element_index(up);
        if (idx >= 0 && element(idx).aromatic_ok) {
          atom.element = static_cast<uint8_t>(idx);
          atom.aromatic = true;
          pos += 2;
          matched = true;
        }
      } else if (std::islower(static_cast<unsigned char>(two[1]))) {
        int idx = element_index(two);
        if (idx >= 0) {
          atom.element = static_cast<uint8_t>(idx);
          pos += 2;
          matched = true;
        }
      }
    }
    if (!matched) {
      const char c = peek();
      if (std::islower(static_cast<unsigned char>(c))) {
        std::string up(1, static_cast<char>(std::toupper(c)));
        int idx = element_index(up);
        if (idx < 0 || !element(idx).aromatic_ok) {
          fail(Errc::kSyntax, std::string("unknown symbol '") + c + "'");
        }
        atom.element = static_cast<uint8_t>(idx);
        atom.aromatic = true;
        ++pos;
      } else {
        std::string one(1, c);
        int idx = element_index(one);
        if (idx < 0) fail(Errc::kSyntax, std::string("unknown symbol '") + c + "'");
        atom.element = static_cast<uint8_t>(idx);
        ++pos;
      }
    }
    // Stereo marks are accepted and discarded.
    while (!eof() && peek() == '@') ++pos;
    // Hydrogen count.
    int hcount = 0;
    if (!eof() && peek() == 'H') {
      ++pos;
      hcount = 1;
      if (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
        hcount = 0;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
          hcount = hcount * 10 + (peek() - '0');
          ++pos;
        }
      }
    }
    // Charge.
    int charge = 0;
    if (!eof() && (peek() == '+' || peek() == '-')) {
      const int sign = peek() == '+' ? 1 : -1;
      const char symbol_char = peek();
      ++pos;
      if (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
        int magnitude = 0;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
          magnitude = magnitude * 10 + (peek() - '0');
          ++pos;
        }
        charge = sign * magnitude;
      } else {
        charge = sign;
        while (!eof() && peek() == symbol_char) {
          charge += sign;
          ++pos;
        }
      }
    }
    if (eof() || peek() != ']') fail(Errc::kSyntax, "unterminated bracket atom");
    ++pos;
    atom.formal_charge = static_cast<int8_t>(charge);
    atom.explicit_h = static_cast<int16_t>(hcount);
    add_atom(atom, /*bracket=*/true);
  }

  void parse_plain_atom() {
    // Two-letter organic-subset elements first (Cl, Br).
    if (pos + 1 < s.size()) {
      std::string two{s[pos], s[pos + 1]};
      int idx = element_index(two);
      if (idx >= 0 && element(idx).organic_subset) {
        Atom a;
        a.element = static_cast<uint8_t>(idx);
        pos += 2;
        add_atom(a, false);
        return;
      }
    }
    const char c = peek();
    if (std::isupper(static_cast<unsigned char>(c))) {
      std::string one(1, c);
      int idx = element_index(one);
      if (idx < 0 || !element(idx).organic_subset) {
        fail(Errc::kSyntax, std::string("unknown symbol '") + c + "'");
      }
      Atom a;
      a.element = static_cast<uint8_t>(idx);
      ++pos;
      add_atom(a, false);
      return;
    }
    std::string up(1, static_cast<char>(std::toupper(c)));
    int idx = element_index(up);
    if (idx < 0 || !element(idx).organic_subset || !element(idx).aromatic_ok) {
      fail(Errc::kSyntax, std::string("unknown symbol '") + c + "'");
    }
    Atom a;
    a.element = static_cast<uint8_t>(idx);
    a.aromatic = true;
    ++pos;
    add_atom(a, false);
  }

  MolGraph run() {
    while (!eof()) {
      const char c = peek();
      switch (c) {
      case '(':
        if (prev < 0) fail(Errc::kSyntax, "branch opens before any atom");
        if (has_pending_bond) fail(Errc::kSyntax, "bond symbol before branch");
        branch_stack.push_back(prev);
        ++pos;
        break;
      case ')':
        if (branch_stack.empty()) fail(Errc::kSyntax, "unbalanced parentheses");
        if (has_pending_bond) fail(Errc::kSyntax, "dangling bond before ')'");
        prev = branch_stack.back();
        branch_stack.pop_back();
        ++pos;
        break;
      case '-': case '=': case '#': case ':': case '/': case '\\':
        if (has_pending_bond) fail(Errc::kSyntax, "two bond symbols in a row");
        if (prev < 0) fail(Errc::kSyntax, "bond symbol with no preceding atom");
        pending_order = (c == '=')   ? BondOrder::kDouble
                        : (c == '#') ? BondOrder::kTriple
                        : (c == ':') ? BondOrder::kAromatic
                                     : BondOrder::kSingle;
        has_pending_bond = true;
        ++pos;
        break;
      case '.':
        if (has_pending_bond) fail(Errc::kSyntax, "bond symbol before '.'");
        prev = -1;
        ++pos;
        break;
      case '%': {
        if (pos + 2 >= s.size() ||
            !std::isdigit(static_cast<unsigned char>(s[pos + 1])) ||
            !std::isdigit(static_cast<unsigned char>(s[pos + 2]))) {
          fail(Errc::kSyntax, "'%' ring reference needs two digits");
        }
        const int digit = (s[pos + 1] - '0') * 10 + (s[pos + 2] - '0');
        pos += 3;
        ring_closure(digit);
        break;
      }
      case '[':
        parse_bracket_atom();
        break;
      default:
        if (std::isdigit(static_cast<unsigned char>(c))) {
          ++pos;
          ring_closure(c - '0');
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
          parse_plain_atom();
        } else {
          fail(Errc::kSyntax, std::string("unexpected character '") + c + "'");
        }
      }
    }
    if (has_pending_bond) fail(Errc::kSyntax, "dangling bond at end of input");
    if (!branch_stack.empty()) fail(Errc::kSyntax, "unbalanced parentheses");
    if (!open_rings.empty()) {
      fail(Errc::kSyntax, "ring bond " + std::to_string(open_rings.begin()->first) +
                              " never closed");
    }
    if (g.atoms.empty()) fail(Errc::kSyntax, "no atoms");

    build_adjacency(g);
    // Implicit hydrogens; bracket atoms trust their explicit count.
    for (size_t i = 0; i < g.atoms.size(); ++i) {
      if (from_bracket[i]) continue;
      const int h = infer_hydrogens(g, static_cast<int>(i));
      if (h < 0) {
        raise(Errc::kValence,
              std::string("valence exceeded on atom ") + std::to_string(i) +
                  " (" + std::string(g.atoms[i].symbol()) + ")",
              std::string(s));
      }
      g.atoms[i].implicit_h = static_cast<int16_t>(h);
    }
    component_labels(g, &g.n_components);
    find_rings(g);
    for (size_t i = 0; i < g.atoms.size(); ++i) {
      if (g.atoms[i].aromatic && !g.atom_in_ring[i]) {
        raise(Errc::kValence, "aromatic atom outside any ring", std::string(s));
      }
    }
    for (size_t i = 0; i < g.bonds.size(); ++i) {
      if (g.bonds[i].aromatic() && !g.bond_in_ring[i]) {
        raise(Errc::kValence, "aromatic bond outside any ring", std::string(s));
      }
    }
    return std::move(g);
  }
};

} // namespace detail

// Parses a SMILES string into a molecular graph. Grammar: organic-subset
// atoms, bracket atoms with H-count and charge, bond symbols (-, =, #, :,
// with / and \ read as single bonds), ring-closure digits and %nn, branches
// and dots. Chemical validity is enforced through a fixed valence table.
inline MolGraph parse_smiles(std::string_view smiles) {
  std::string t;
  t.reserve(smiles.size());
  for (char c : smiles) {
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  }
  if (t.empty()) raise(Errc::kEmptyInput, "empty SMILES string");
  detail::SmilesParser parser;
  parser.s = t;
  return parser.run();
}

inline bool is_valid_smiles(std::string_view smiles) {
  try {
    parse_smiles(smiles);
    return true;
  } catch (const Error &) {
    return false;
  }
}

namespace detail {

inline bool needs_bracket(const MolGraph &g, int idx) {
  const Atom &a = g.atoms[idx];
  const ElementInfo &el = element(a.element);
  if (a.formal_charge != 0) return true;
  if (!el.organic_subset) return true;
  if (a.aromatic && !el.aromatic_ok) return true;
  return infer_hydrogens(g, idx) != a.total_h();
}

inline void append_atom_token(std::string &out, const MolGraph &g, int idx) {
  const Atom &a = g.atoms[idx];
  std::string sym(a.symbol());
  if (a.aromatic) {
    for (char &c : sym) c = static_cast<char>(std::tolower(c));
  }
  if (!needs_bracket(g, idx)) {
    out += sym;
    return;
  }
  out += '[';
  out += sym;
  const int h = a.total_h();
  if (h == 1) {
    out += 'H';
  } else if (h > 1) {
    out += 'H';
    out += std::to_string(h);
  }
  const int q = a.formal_charge;
  if (q == 1) {
    out += '+';
  } else if (q == -1) {
    out += '-';
  } else if (q > 1) {
    out += '+' + std::to_string(q);
  } else if (q < -1) {
    out += '-' + std::to_string(-q);
  }
  out += ']';
}

inline void append_bond_token(std::string &out, const MolGraph &g, const Bond &b) {
  switch (b.order) {
  case BondOrder::kDouble: out += '='; return;
  case BondOrder::kTriple: out += '#'; return;
  case BondOrder::kAromatic: return; // implied between aromatic atoms
  case BondOrder::kSingle:
    // A plain single bond between two aromatic atoms would read back as
    // aromatic, so it must be written explicitly.
    if (g.atoms[b.a].aromatic && g.atoms[b.b].aromatic) out += '-';
    return;
  }
}

// Emits one connected component as SMILES, visiting atoms by ascending rank.
inline std::string write_component(const MolGraph &g, std::span<const int> rank,
                                   int start) {
  struct RingLabel {
    int digit = 0;
    bool open = false;
  };
  std::vector<int> order_of_visit(g.atoms.size(), -1);
  std::vector<int> parent_bond(g.atoms.size(), -1);
  std::vector<std::vector<int>> ring_bonds_at(g.atoms.size());
  std::vector<uint8_t> bond_used(g.bonds.size(), 0);

  // First pass: DFS discovery to classify tree vs ring-closure bonds.
  {
    std::vector<std::pair<int, int>> stack{{start, -1}}; // (atom, via bond)
    int counter = 0;
    while (!stack.empty()) {
      auto [u, via] = stack.back();
      stack.pop_back();
      if (order_of_visit[u] >= 0) continue;
      order_of_visit[u] = counter++;
      parent_bond[u] = via;
      if (via >= 0) bond_used[via] = 1;
      auto nbrs = g.adj[u];
      std::sort(nbrs.begin(), nbrs.end(), [&](auto x, auto y) {
        return rank[x.first] > rank[y.first]; // stack pops lowest rank first
      });
      for (auto [v, bond] : nbrs) {
        if (order_of_visit[v] < 0) {
          stack.emplace_back(v, bond);
        } else if (!bond_used[bond]) {
          bond_used[bond] = 1; // ring closure
          ring_bonds_at[u].push_back(bond);
          ring_bonds_at[v].push_back(bond);
        }
      }
    }
  }

  std::map<int, RingLabel> ring_label; // bond index -> digit
  std::vector<uint8_t> digit_in_use(100, 0);
  auto alloc_digit = [&]() -> int {
    for (int d = 1; d < 100; ++d) {
      if (!digit_in_use[d]) {
        digit_in_use[d] = 1;
        return d;
      }
    }
    raise(Errc::kSyntax, "more than 99 simultaneous ring closures");
  };

  std::string out;
  // Second pass: emission. Recursive over the discovered tree.
  auto emit = [&](auto &&self, int u) -> void {
    append_atom_token(out, g, u);
    // Ring closure digits, partner-visit order for determinism.
    auto closures = ring_bonds_at[u];
    std::sort(closures.begin(), closures.end(), [&](int x, int y) {
      const int px = order_of_visit[g.bonds[x].other(u)];
      const int py = order_of_visit[g.bonds[y].other(u)];
      return px < py;
    });
    for (int bond : closures) {
      auto it = ring_label.find(bond);
      if (it == ring_label.end()) {
        const int d = alloc_digit();
        ring_label[bond] = {d, true};
        append_bond_token(out, g, g.bonds[bond]);
        if (d >= 10) out += '%';
        out += d >= 10 ? std::to_string(d) : std::string(1, static_cast<char>('0' + d));
      } else {
        digit_in_use[it->second.digit] = 0;
        if (it->second.digit >= 10) out += '%';
        out += it->second.digit >= 10
                   ? std::to_string(it->second.digit)
                   : std::string(1, static_cast<char>('0' + it->second.digit));
        ring_label.erase(it);
      }
    }
    // Children in rank order.
    std::vector<std::pair<int, int>> children;
    for (auto [v, bond] : g.adj[u]) {
      if (parent_bond[v] == bond && v != u && order_of_visit[v] > order_of_visit[u]) {
        children.emplace_back(v, bond);
      }
    }
    std::sort(children.begin(), children.end(), [&](auto x, auto y) {
      return rank[x.first] < rank[y.first];
    });
    for (size_t i = 0; i < children.size(); ++i) {
      const bool last = (i + 1 == children.size());
      if (!last) out += '(';
      append_bond_token(out, g, g.bonds[children[i].second]);
      self(self, children[i].first);
      if (!last) out += ')';
    }
  };
  emit(emit, start);
  return out;
}

} // namespace detail

// Serializes a molecular graph to SMILES, traversing atoms by ascending
// rank (a permutation of atom indices). The output reparses to an
// isomorphic graph.
inline std::string write_smiles(const MolGraph &g, std::span<const int> rank) {
  int n_comp = 0;
  const std::vector<int> comp = detail::component_labels(g, &n_comp);
  std::vector<int> comp_start(n_comp, -1);
  for (size_t i = 0; i < g.atoms.size(); ++i) {
    const int c = comp[i];
    if (comp_start[c] < 0 || rank[i] < rank[comp_start[c]]) {
      comp_start[c] = static_cast<int>(i);
    }
  }
  std::sort(comp_start.begin(), comp_start.end(),
            [&](int x, int y) { return rank[x] < rank[y]; });
  std::string out;
  for (int i = 0; i < n_comp; ++i) {
    if (i) out += '.';
    out += detail::write_component(g, rank, comp_start[i]);
  }
  return out;
}

inline std::string write_smiles(const MolGraph &g) {
  std::vector<int> identity(g.atoms.size());
  for (size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);
  return write_smiles(g, identity);
}

namespace detail {

// Morgan-style neighborhood refinement. Returns class ids (0-based, dense);
// equal ids mean the refinement could not distinguish the atoms.
inline std::vector<int> refine_classes(const MolGraph &g,
                                       const std::vector<int> &atoms,
                                       std::vector<int> classes) {
  std::vector<int> pos_of(g.atoms.size(), -1);
  for (size_t i = 0; i < atoms.size(); ++i) pos_of[atoms[i]] = static_cast<int>(i);

  int n_classes = 1 + *std::max_element(classes.begin(), classes.end());
  while (true) {
    using Key = std::pair<int, std::vector<std::pair<int, int>>>;
    std::vector<Key> keys(atoms.size());
    for (size_t i = 0; i < atoms.size(); ++i) {
      std::vector<std::pair<int, int>> nbrs;
      for (auto [v, bond] : g.adj[atoms[i]]) {
        if (pos_of[v] < 0) continue; // outside this component
        nbrs.emplace_back(classes[pos_of[v]], static_cast<int>(g.bonds[bond].order));
      }
      std::sort(nbrs.begin(), nbrs.end());
      keys[i] = {classes[i], std::move(nbrs)};
    }
    std::vector<int> order(atoms.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return keys[x] < keys[y]; });
    std::vector<int> next(atoms.size());
    int c = 0;
    for (size_t i = 0; i < order.size(); ++i) {
      if (i > 0 && keys[order[i]] != keys[order[i - 1]]) ++c;
      next[order[i]] = c;
    }
    if (c + 1 == n_classes) return next;
    n_classes = c + 1;
    classes = std::move(next);
  }
}

inline void enumerate_rankings(const MolGraph &g, const std::vector<int> &atoms,
                               std::vector<int> classes,
                               std::vector<std::vector<int>> &out) {
  // Find the smallest non-singleton class.
  const int n = static_cast<int>(atoms.size());
  std::vector<int> count(n, 0);
  for (int c : classes) ++count[c];
  int target = -1;
  for (int c = 0; c < n; ++c) {
    if (count[c] > 1) {
      target = c;
      break;
    }
  }
  if (target < 0) {
    out.push_back(classes); // discrete: classes are ranks within the component
    return;
  }
  for (int i = 0; i < n; ++i) {
    if (classes[i] != target) continue;
    std::vector<int> split(n);
    for (int j = 0; j < n; ++j) {
      split[j] = 2 * classes[j] + (j == i ? 0 : 1);
    }
    enumerate_rankings(g, atoms, refine_classes(g, atoms, split), out);
  }
}

inline std::string canonical_component(const MolGraph &g,
                                       const std::vector<int> &atoms) {
  // Initial invariant: (element, aromatic, charge, degree, H count).
  std::vector<std::tuple<int, int, int, int, int>> inv(atoms.size());
  for (size_t i = 0; i < atoms.size(); ++i) {
    const Atom &a = g.atoms[atoms[i]];
    int deg = 0;
    for (auto [v, bond] : g.adj[atoms[i]]) {
      (void)bond;
      (void)v;
      ++deg;
    }
    inv[i] = {a.element, a.aromatic ? 1 : 0, a.formal_charge, deg, a.total_h()};
  }
  std::vector<int> order(atoms.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return inv[x] < inv[y]; });
  std::vector<int> classes(atoms.size());
  int c = 0;
  for (size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && inv[order[i]] != inv[order[i - 1]]) ++c;
    classes[order[i]] = c;
  }

  std::vector<std::vector<int>> rankings;
  enumerate_rankings(g, atoms, refine_classes(g, atoms, classes), rankings);

  std::string best;
  std::vector<int> full_rank(g.atoms.size(), 1 << 29);
  for (const auto &ranking : rankings) {
    for (size_t i = 0; i < atoms.size(); ++i) full_rank[atoms[i]] = ranking[i];
    std::string candidate = write_component(g, full_rank, [&] {
      int start = atoms[0];
      for (int a : atoms) {
        if (full_rank[a] < full_rank[start]) start = a;
      }
      return start;
    }());
    if (best.empty() || candidate < best) best = std::move(candidate);
  }
  return best;
}

} // namespace detail

// Canonical SMILES: invariant under any relabeling of the input graph and
// idempotent through reparsing. Components are canonicalized independently
// and joined in sorted order.
inline std::string canonicalize(const MolGraph &g) {
  int n_comp = 0;
  const std::vector<int> comp = detail::component_labels(g, &n_comp);
  std::vector<std::vector<int>> members(n_comp);
  for (size_t i = 0; i < g.atoms.size(); ++i) {
    members[comp[i]].push_back(static_cast<int>(i));
  }
  std::vector<std::string> parts;
  parts.reserve(members.size());
  for (const auto &atoms : members) {
    parts.push_back(detail::canonical_component(g, atoms));
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += '.';
    out += parts[i];
  }
  return out;
}

inline std::string canonical_form(std::string_view smiles) {
  return canonicalize(parse_smiles(smiles));
}

// Random-order rewrite of the molecule: a valid SMILES of an isomorphic
// graph with a pseudo-random start atom and traversal, deterministic per
// seed.
inline std::string randomize_smiles(const MolGraph &g, uint64_t seed) {
  Rng rng(derive_seed(seed, 0x5a11e5));
  std::vector<int> rank = rng.permutation(static_cast<int>(g.atoms.size()));
  return write_smiles(g, rank);
}

} // namespace molfuse
