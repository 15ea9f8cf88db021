//
// Project molfuse - Copyright 2026 The molfuse Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cmath>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "molfuse/common.hpp"
#include "molfuse/io.hpp"
#include "molfuse/rng.hpp"
#include "molfuse/smiles.hpp"

namespace molfuse {

enum class PropertySource { kBuiltin, kIngested };

// Ordered list of property names; the order is positional identity for the
// model and must not change over a model's lifetime.
struct PropertySpec {
  std::vector<std::string> names;
  std::vector<PropertySource> sources;

  int dim() const { return static_cast<int>(names.size()); }

  int index_of(const std::string &name) const {
    for (size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  bool all_builtin() const {
    for (auto s : sources) {
      if (s != PropertySource::kBuiltin) return false;
    }
    return true;
  }

  // The 12 graph-computable properties used by default.
  static PropertySpec builtin() {
    PropertySpec spec;
    spec.names = {
        "molecular_weight",  "atom_count_with_H",  "heavy_atom_count",
        "bond_count",        "ring_count",         "aromatic_ring_count",
        "HB_donor_count",    "HB_acceptor_count",  "rotatable_bond_count",
        "formal_charge_sum", "halogen_count",      "heteroatom_count",
    };
    spec.sources.assign(spec.names.size(), PropertySource::kBuiltin);
    return spec;
  }

  static PropertySpec ingested(std::vector<std::string> names) {
    PropertySpec spec;
    spec.names = std::move(names);
    spec.sources.assign(spec.names.size(), PropertySource::kIngested);
    return spec;
  }
};

struct PropertyVector {
  std::vector<double> raw;
  std::vector<double> normalized;
  std::vector<uint8_t> known;

  int dim() const { return static_cast<int>(raw.size()); }

  static PropertyVector of_raw(std::vector<double> values) {
    PropertyVector pv;
    pv.known.assign(values.size(), 1);
    pv.normalized.assign(values.size(), 0.0);
    pv.raw = std::move(values);
    return pv;
  }

  static PropertyVector all_unknown(int dim) {
    PropertyVector pv;
    pv.raw.assign(static_cast<size_t>(dim), 0.0);
    pv.normalized.assign(static_cast<size_t>(dim), 0.0);
    pv.known.assign(static_cast<size_t>(dim), 0);
    return pv;
  }
};

// Per-property standardization statistics over the pre-training corpus.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> stdev; // sample (n-1) deviation, floored at 1e-8

  int dim() const { return static_cast<int>(mean.size()); }

  double normalize_one(int i, double v) const { return (v - mean[i]) / stdev[i]; }
  double denormalize_one(int i, double z) const { return z * stdev[i] + mean[i]; }

  void apply(PropertyVector &pv) const {
    for (int i = 0; i < pv.dim(); ++i) {
      pv.normalized[static_cast<size_t>(i)] =
          pv.known[static_cast<size_t>(i)]
              ? normalize_one(i, pv.raw[static_cast<size_t>(i)])
              : 0.0;
    }
  }
};

// Deterministic values for the builtin property set, in PropertySpec order.
inline std::vector<double> compute_builtin(const MolGraph &g) {
  // Element counts first so the mass sum has an atom-order-independent
  // floating point result.
  std::array<int, detail::kElements.size()> element_count{};
  int h_total = 0;
  int heavy = 0;
  int hbd = 0, hba = 0;
  int charge = 0, halogens = 0, hetero = 0;
  for (const Atom &a : g.atoms) {
    const auto sym = a.symbol();
    element_count[a.element] += 1;
    h_total += a.total_h();
    if (sym != "H") ++heavy;
    if (sym == "N" || sym == "O") {
      ++hba;
      if (a.total_h() >= 1) ++hbd;
    }
    charge += a.formal_charge;
    if (sym == "F" || sym == "Cl" || sym == "Br" || sym == "I") ++halogens;
    if (sym != "C" && sym != "H") ++hetero;
  }

  int aromatic_rings = 0;
  for (const auto &ring : g.rings) {
    bool all_aromatic = true;
    for (int a : ring) {
      if (!g.atoms[static_cast<size_t>(a)].aromatic) all_aromatic = false;
    }
    if (all_aromatic) ++aromatic_rings;
  }

  int rotatable = 0;
  for (size_t i = 0; i < g.bonds.size(); ++i) {
    const Bond &b = g.bonds[i];
    if (b.order != BondOrder::kSingle || g.bond_in_ring[i]) continue;
    if (g.atoms[b.a].symbol() == "H" || g.atoms[b.b].symbol() == "H") continue;
    if (g.heavy_degree(b.a) >= 2 && g.heavy_degree(b.b) >= 2) ++rotatable;
  }

  return {
      weight,
      static_cast<double>(g.atoms.size() + static_cast<size_t>(h_total)),
      static_cast<double>(heavy),
      static_cast<double>(g.bonds.size()),
      static_cast<double>(g.cycle_rank()),
      static_cast<double>(aromatic_rings),
      static_cast<double>(hbd),
      static_cast<double>(hba),
      static_cast<double>(rotatable),
      static_cast<double>(charge),
      static_cast<double>(halogens),
      static_cast<double>(hetero),
  };
}

// Sample mean and (n-1) standard deviation per property, computed over the
// slots that are known. A property with fewer than two known values gets
// the floored deviation.
inline Normalizer fit_normalizer(std::span<const PropertyVector> corpus) {
  if (corpus.size() < 2) raise(Errc::kEmptyCorpus, "need at least 2 molecules");
  const int dim = corpus[0].dim();
  Normalizer nz;
  nz.mean.assign(static_cast<size_t>(dim), 0.0);
  nz.stdev.assign(static_cast<size_t>(dim), 1e-8);
  for (int i = 0; i < dim; ++i) {
    double sum = 0.0;
    long n = 0;
    for (const auto &pv : corpus) {
      if (pv.known[static_cast<size_t>(i)]) {
        sum += pv.raw[static_cast<size_t>(i)];
        ++n;
      }
    }
    if (n == 0) continue;
    const double mean = sum / static_cast<double>(n);
    nz.mean[static_cast<size_t>(i)] = mean;
    if (n < 2) continue;
    double ss = 0.0;
    for (const auto &pv : corpus) {
      if (pv.known[static_cast<size_t>(i)]) {
        const double d = pv.raw[static_cast<size_t>(i)] - mean;
        ss += d * d;
      }
    }
    nz.stdev[static_cast<size_t>(i)] =
        std::max(std::sqrt(ss / static_cast<double>(n - 1)), 1e-8);
  }
  return nz;
}

// Flips each known slot to unknown independently with probability `rate`.
inline PropertyVector mask_pv(const PropertyVector &pv, double rate,
                              uint64_t seed) {
  Rng rng(derive_seed(seed, 0x6d61736bULL));
  PropertyVector out = pv;
  for (size_t i = 0; i < out.known.size(); ++i) {
    if (out.known[i] && rng.uniform() < rate) {
      out.known[i] = 0;
      out.normalized[i] = 0.0;
    }
  }
  return out;
}

// CSV ingestion: header "smiles,<name1>,...,<nameP>", numeric cells or empty
// (= unknown). Keys are canonical SMILES.
inline std::map<std::string, PropertyVector>
ingest_properties(const std::string &path, const PropertySpec &spec) {
  std::ifstream in(path);
  if (!in) raise(Errc::kIoError, "cannot open file", path);
  std::string line;
  if (!std::getline(in, line)) raise(Errc::kParseError, "empty file", path);
  auto header = split(trim(line), ',');
  if (static_cast<int>(header.size()) != spec.dim() + 1) {
    raise(Errc::kDimensionMismatch,
          "header has " + std::to_string(header.size() - 1) +
              " properties, spec expects " + std::to_string(spec.dim()),
          path);
  }
  std::map<std::string, PropertyVector> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    auto cells = split(t, ',');
    if (static_cast<int>(cells.size()) != spec.dim() + 1) {
      raise(Errc::kDimensionMismatch,
            "line " + std::to_string(lineno) + " has " +
                std::to_string(cells.size() - 1) + " cells, spec expects " +
                std::to_string(spec.dim()),
            t);
    }
    PropertyVector pv = PropertyVector::all_unknown(spec.dim());
    for (int i = 0; i < spec.dim(); ++i) {
      const std::string cell = trim(cells[static_cast<size_t>(i) + 1]);
      if (cell.empty()) continue;
      char *end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        raise(Errc::kParseError,
              "non-numeric cell at line " + std::to_string(lineno), cell);
      }
      pv.raw[static_cast<size_t>(i)] = v;
      pv.known[static_cast<size_t>(i)] = 1;
    }
    std::string key;
    try {
      key = canonical_form(cells[0]);
    } catch (const Error &e) {
      raise(Errc::kParseError,
            "bad SMILES at line " + std::to_string(lineno) + ": " + e.message(),
            cells[0]);
    }
    out[key] = std::move(pv);
  }
  return out;
}

// Full property vector for a molecule under a spec: builtin slots computed
// from the graph, ingested slots looked up by canonical form (unknown when
// absent).
inline PropertyVector
build_property_vector(const MolGraph &g, const PropertySpec &spec,
                      const std::map<std::string, PropertyVector> *ingested) {
  PropertyVector pv = PropertyVector::all_unknown(spec.dim());
  std::vector<double> builtin;
  const PropertySpec b = PropertySpec::builtin();
  const PropertyVector *row = nullptr;
  if (ingested) {
    auto it = ingested->find(canonicalize(g));
    if (it != ingested->end()) row = &it->second;
  }
  for (int i = 0; i < spec.dim(); ++i) {
    if (spec.sources[static_cast<size_t>(i)] == PropertySource::kBuiltin) {
      if (builtin.empty()) builtin = compute_builtin(g);
      const int j = b.index_of(spec.names[static_cast<size_t>(i)]);
      if (j < 0) {
        raise(Errc::kConfigError,
              "unknown builtin property '" + spec.names[static_cast<size_t>(i)] + "'");
      }
      pv.raw[static_cast<size_t>(i)] = builtin[static_cast<size_t>(j)];
      pv.known[static_cast<size_t>(i)] = 1;
    } else if (row && row->known[static_cast<size_t>(i)]) {
      pv.raw[static_cast<size_t>(i)] = row->raw[static_cast<size_t>(i)];
      pv.known[static_cast<size_t>(i)] = 1;
    }
  }
  return pv;
}

} // namespace molfuse
