//
// Project molfuse - Copyright 2026 The molfuse Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <catch2/catch_amalgamated.hpp>

#include "molfuse/smiles.hpp"

using namespace molfuse;

namespace {

int total_h(const MolGraph &g) {
  int h = 0;
  for (const Atom &a : g.atoms) h += a.total_h();
  return h;
}

int atom_count_with_h(const MolGraph &g) {
  return static_cast<int>(g.atoms.size()) + total_h(g);
}

} // namespace

TEST_CASE("parse benzene", "[smiles]") {
  MolGraph g = parse_smiles("c1ccccc1");
  REQUIRE(g.atoms.size() == 6);
  for (const Atom &a : g.atoms) {
    CHECK(a.symbol() == "C");
    CHECK(a.aromatic);
    CHECK(a.total_h() == 1);
  }
  REQUIRE(g.bonds.size() == 6);
  for (const Bond &b : g.bonds) CHECK(b.aromatic());
  CHECK(g.rings.size() == 1);
  CHECK(total_h(g) == 6);
  CHECK(atom_count_with_h(g) == 12);
}

TEST_CASE("parse error cases", "[smiles]") {
  CHECK_THROWS_MATCHES(parse_smiles(""), Error, Catch::Matchers::Predicate<Error>([](const Error &e) {
                         return e.code() == Errc::kEmptyInput;
                       }));
  CHECK_THROWS_MATCHES(parse_smiles("C1CC"), Error, Catch::Matchers::Predicate<Error>([](const Error &e) {
                         return e.code() == Errc::kSyntax;
                       }));
  CHECK_THROWS_MATCHES(parse_smiles("C(C"), Error, Catch::Matchers::Predicate<Error>([](const Error &e) {
                         return e.code() == Errc::kSyntax;
                       }));
  CHECK_THROWS_MATCHES(parse_smiles("CC)C"), Error, Catch::Matchers::Predicate<Error>([](const Error &e) {
                         return e.code() == Errc::kSyntax;
                       }));
  CHECK_THROWS_MATCHES(parse_smiles("CxC"), Error, Catch::Matchers::Predicate<Error>([](const Error &e) {
                         return e.code() == Errc::kSyntax;
                       }));
  // Pentavalent carbon.
  CHECK_THROWS_MATCHES(parse_smiles("C(C)(C)(C)(C)C"), Error,
                       Catch::Matchers::Predicate<Error>([](const Error &e) {
                         return e.code() == Errc::kValence;
                       }));
  // Aromatic atoms must sit in a ring.
  CHECK_THROWS_MATCHES(parse_smiles("cc"), Error, Catch::Matchers::Predicate<Error>([](const Error &e) {
                         return e.code() == Errc::kValence;
                       }));
  CHECK_THROWS_MATCHES(parse_smiles("C:C"), Error, Catch::Matchers::Predicate<Error>([](const Error &e) {
                         return e.code() == Errc::kValence;
                       }));
}

TEST_CASE("parse acetic acid", "[smiles]") {
  MolGraph g = parse_smiles("CC(=O)O");
  REQUIRE(g.atoms.size() == 4);
  int doubles = 0, singles = 0;
  for (const Bond &b : g.bonds) {
    if (b.order == BondOrder::kDouble) ++doubles;
    if (b.order == BondOrder::kSingle) ++singles;
  }
  CHECK(g.bonds.size() == 3);
  CHECK(doubles == 1);
  CHECK(singles == 2);
  CHECK(g.rings.empty());
  CHECK(total_h(g) == 4);
}

TEST_CASE("bracket atoms and charges", "[smiles]") {
  MolGraph g = parse_smiles("[NH4+]");
  REQUIRE(g.atoms.size() == 1);
  CHECK(g.atoms[0].symbol() == "N");
  CHECK(g.atoms[0].formal_charge == 1);
  CHECK(g.atoms[0].total_h() == 4);

  MolGraph anion = parse_smiles("CC(=O)[O-]");
  int charge = 0;
  for (const Atom &a : anion.atoms) charge += a.formal_charge;
  CHECK(charge == -1);

  MolGraph pyrrole = parse_smiles("c1cc[nH]c1");
  int n_hydrogens = 0;
  for (const Atom &a : pyrrole.atoms) {
    if (a.symbol() == "N") n_hydrogens = a.total_h();
  }
  CHECK(n_hydrogens == 1);

  CHECK(parse_smiles("[Na+].[Cl-]").atoms.size() == 2);
  CHECK_THROWS_AS(parse_smiles("[Xx]"), Error);
  CHECK_THROWS_AS(parse_smiles("[CH4"), Error);
}

TEST_CASE("stereo marks accepted and discarded", "[smiles]") {
  MolGraph g = parse_smiles("C[C@@H](N)C(=O)O");
  CHECK(g.atoms.size() == 6);
  MolGraph h = parse_smiles("F/C=C/F");
  CHECK(h.bonds.size() == 3);
  int doubles = 0;
  for (const Bond &b : h.bonds) {
    if (b.order == BondOrder::kDouble) ++doubles;
  }
  CHECK(doubles == 1);
}

TEST_CASE("aromatic hydrogen counting in fused systems", "[smiles]") {
  MolGraph naph = parse_smiles("c1ccc2ccccc2c1");
  CHECK(naph.atoms.size() == 10);
  CHECK(naph.rings.size() == 2);
  CHECK(total_h(naph) == 8);

  MolGraph pyridine = parse_smiles("c1ccncc1");
  CHECK(total_h(pyridine) == 5);

  MolGraph furan = parse_smiles("c1ccoc1");
  CHECK(total_h(furan) == 4);

  MolGraph thiophene = parse_smiles("c1ccsc1");
  CHECK(total_h(thiophene) == 4);

  MolGraph imidazole = parse_smiles("c1cnc[nH]1");
  CHECK(total_h(imidazole) == 4);
}

TEST_CASE("ring closure variants", "[smiles]") {
  // Order attached at the opening mention only.
  MolGraph g = parse_smiles("C=1CCCCC1");
  int doubles = 0;
  for (const Bond &b : g.bonds) {
    if (b.order == BondOrder::kDouble) ++doubles;
  }
  CHECK(doubles == 1);
  CHECK(parse_smiles("C%10CCCCC%10").rings.size() == 1);
  CHECK_THROWS_AS(parse_smiles("C=1CCCCC-1"), Error);
  CHECK_THROWS_AS(parse_smiles("C11C"), Error);
  CHECK_THROWS_AS(parse_smiles("C12CC12"), Error);
}

TEST_CASE("write smiles round trips", "[smiles]") {
  MolGraph carbon = parse_smiles("C");
  CHECK(write_smiles(carbon) == "C");

  MolGraph benzene = parse_smiles("c1ccccc1");
  for (uint64_t seed = 0; seed < 5; ++seed) {
    MolGraph re = parse_smiles(randomize_smiles(benzene, seed));
    CHECK(re.atoms.size() == 6);
    CHECK(re.rings.size() == 1);
    for (const Atom &a : re.atoms) CHECK(a.aromatic);
  }

  MolGraph ethanol = parse_smiles("CCO");
  std::vector<int> order_a{0, 1, 2};
  std::vector<int> order_b{2, 1, 0};
  const std::string sa = write_smiles(ethanol, order_a);
  const std::string sb = write_smiles(ethanol, order_b);
  CHECK(canonical_form(sa) == canonical_form(sb));
}

TEST_CASE("canonicalize basics", "[smiles]") {
  CHECK(canonical_form("OCC") == canonical_form("CCO"));
  CHECK(canonical_form("C") == "C");
  CHECK(canonical_form("c1ccccc1") == canonical_form("c1ccccc1"));
  // Idempotence through reparsing.
  const std::string canon = canonical_form("CC(=O)Oc1ccccc1C(=O)O");
  CHECK(canonical_form(canon) == canon);
}

TEST_CASE("canonicalize invariant under random rewrites", "[smiles]") {
  const std::vector<std::string> molecules = {
      "CCO",
      "CC(=O)O",
      "c1ccccc1",
      "Cc1ccccc1",
      "c1ccc2ccccc2c1",
      "CC(C)CC1=CC=C(C=C1)C(C)C(=O)O",
      "CN1CCC[C@H]1c1cccnc1",
      "CC(=O)Oc1ccccc1C(=O)O",
      "O=C(O)CC(O)(CC(=O)O)C(=O)O",
      "c1cc[nH]c1",
      "ClC(Cl)Cl",
      "C1CC2CCC1CC2",
      "[O-]C(=O)c1ccccc1.[Na+]",
  };
  for (const auto &s : molecules) {
    MolGraph g = parse_smiles(s);
    const std::string canon = canonicalize(g);
    for (uint64_t seed = 1; seed <= 100; ++seed) {
      const std::string rewrite = randomize_smiles(g, seed);
      CHECK(canonical_form(rewrite) == canon);
    }
  }
}

TEST_CASE("randomize smiles determinism", "[smiles]") {
  MolGraph g = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
  CHECK(randomize_smiles(g, 7) == randomize_smiles(g, 7));
  MolGraph single = parse_smiles("C");
  CHECK(randomize_smiles(single, 1) == "C");
  CHECK(randomize_smiles(single, 99) == "C");
}

TEST_CASE("cycle rank equality", "[smiles]") {
  const std::vector<std::string> molecules = {
      "C", "CCO", "c1ccccc1", "c1ccc2ccccc2c1", "C1CC2CCC1CC2",
      "CC(=O)Oc1ccccc1C(=O)O", "C.C", "C1CC1.C1CC1"};
  for (const auto &s : molecules) {
    MolGraph g = parse_smiles(s);
    CHECK(static_cast<int>(g.rings.size()) == g.cycle_rank());
    // Every listed ring is a closed walk in the bond set.
    for (const auto &ring : g.rings) {
      for (size_t i = 0; i < ring.size(); ++i) {
        const int u = ring[i];
        const int v = ring[(i + 1) % ring.size()];
        bool found = false;
        for (auto [nbr, bond] : g.adj[u]) {
          (void)bond;
          if (nbr == v) found = true;
        }
        CHECK(found);
      }
    }
  }
}

TEST_CASE("multi component molecules", "[smiles]") {
  MolGraph g = parse_smiles("CCO.CC(=O)O");
  CHECK(g.n_components == 2);
  const std::string canon = canonicalize(g);
  CHECK(canonical_form("CC(=O)O.CCO") == canon);
  // Ring closure across a dot bonds the pieces.
  MolGraph weird = parse_smiles("C1.C1");
  CHECK(weird.bonds.size() == 1);
  CHECK(weird.n_components == 1);
}

TEST_CASE("biphenyl single bond between aromatic atoms", "[smiles]") {
  MolGraph g = parse_smiles("c1ccccc1-c1ccccc1");
  CHECK(g.atoms.size() == 12);
  int aromatic_bonds = 0, single_bonds = 0;
  for (const Bond &b : g.bonds) {
    if (b.aromatic()) ++aromatic_bonds;
    if (b.order == BondOrder::kSingle) ++single_bonds;
  }
  CHECK(aromatic_bonds == 12);
  CHECK(single_bonds == 1);
  // The rewrite must keep that single bond explicit.
  const std::string canon = canonicalize(g);
  MolGraph re = parse_smiles(canon);
  int re_single = 0;
  for (const Bond &b : re.bonds) {
    if (b.order == BondOrder::kSingle) ++re_single;
  }
  CHECK(re_single == 1);
}

TEST_CASE("validity predicate", "[smiles]") {
  CHECK(is_valid_smiles("CCO"));
  CHECK_FALSE(is_valid_smiles("C1CC"));
  CHECK_FALSE(is_valid_smiles(""));
  CHECK_FALSE(is_valid_smiles("not a molecule"));
}
