#include <doctest.h>

#include "equigan/chem/canonical.hpp"
#include "equigan/chem/smiles.hpp"
#include "equigan/chem/valence.hpp"
#include "support.hpp"

using namespace equigan;
using namespace equigan::chem;
using testing::molecule;

namespace {

ErrorCode parse_error(const std::string& smiles) {
  try {
    parse_smiles(smiles);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("parsed without error: " << smiles);
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("organic atoms get hydrogens to their lowest valence") {
  const auto methane = parse_smiles("C");
  REQUIRE(methane.atoms.size() == 1);
  CHECK(methane.atoms[0] == AtomDescriptor{"C", 0, 4});

  const auto formaldehyde = parse_smiles("C=O");
  REQUIRE(formaldehyde.atoms.size() == 2);
  CHECK(formaldehyde.atoms[0] == AtomDescriptor{"C", 0, 2});
  CHECK(formaldehyde.atoms[1] == AtomDescriptor{"O", 0, 0});
  REQUIRE(formaldehyde.bonds.size() == 1);
  CHECK(formaldehyde.bonds[0].type == BondType::Double);

  const auto ammonium = parse_smiles("[NH4+]");
  CHECK(ammonium.atoms[0] == AtomDescriptor{"N", 1, 4});
  CHECK(parse_smiles("[O-]C").atoms[0] == AtomDescriptor{"O", -1, 0});
}

TEST_CASE("rings, branches and aromatic atoms") {
  const auto g = molecule("c1ccccc1");
  CHECK(g.n() == 6);
  for (const auto& e : g.edges()) CHECK(e.type == BondType::Aromatic);
  for (int i = 0; i < 6; ++i) CHECK(g.atom(i).explicit_h == 1);
  CHECK(check_valence(g));

  const auto branched = molecule("CC(C)(C)O");
  CHECK(branched.n() == 5);
  CHECK(branched.edges().size() == 4);
  CHECK(branched.atom(1).explicit_h == 0);

  const auto cyclopropane = molecule("C1CC1");
  CHECK(cyclopropane.edges().size() == 3);
  CHECK(molecule("C%12CC%12").edges().size() == 3);
  CHECK(molecule("C#N").bond(0, 1) == BondType::Triple);
}

TEST_CASE("malformed input names its error") {
  CHECK(parse_error("C(") == ErrorCode::UnclosedBranch);
  CHECK(parse_error("C1CC") == ErrorCode::UnclosedRing);
  CHECK(parse_error("Cl") == ErrorCode::UnknownElement);
  CHECK(parse_error("C)") == ErrorCode::SyntaxError);
  CHECK(parse_error("C=") == ErrorCode::SyntaxError);
  CHECK(parse_error("F/C=C/F") == ErrorCode::SyntaxError);
  CHECK(parse_error("[13CH4]") == ErrorCode::SyntaxError);
  CHECK(parse_error("FF(F)") == ErrorCode::ValenceOverflow);
  CHECK(parse_error("C11") == ErrorCode::SyntaxError);
}

TEST_CASE("syntax errors carry the offending position") {
  try {
    parse_smiles("CC)C");
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("position 2") != std::string::npos);
  }
}

TEST_CASE("write_smiles on small molecules") {
  CHECK(write_smiles(molecule("C")) == "C");
  CHECK(write_smiles(molecule("O=C")) == write_smiles(molecule("C=O")));
  const std::string s = write_smiles(molecule("C=O"));
  CHECK((s == "C=O" || s == "O=C"));
  CHECK(write_smiles(molecule("[NH4+]")) == "[NH4+]");
}

TEST_CASE("write then parse keeps the certificate") {
  for (const char* smiles : {"c1ccccc1O", "CC(=O)[O-]", "C1CC2CC1C2", "N#CC(C)(C)C#N", "c1cc[nH+]cc1", "OC1=CC=CC1",
                             "C[N+](C)(C)C", "c1ccncc1"}) {
    CAPTURE(std::string(smiles));
    const auto g = molecule(smiles);
    const auto back = parse_smiles(write_smiles(g), g.vocab_ptr());
    CHECK(canonical_certificate(back) == canonical_certificate(g));
  }
  Rng rng(17);
  for (int t = 0; t < 300; ++t) {
    const auto g = testing::random_molecule(rng, 9);
    REQUIRE(check_valence(g));
    const std::string s = write_smiles(g);
    CAPTURE(s);
    CHECK(canonical_certificate(parse_smiles(s, g.vocab_ptr())) == canonical_certificate(g));
  }
}

TEST_CASE("check_valence") {
  auto vocab = std::make_shared<AtomVocab>();
  const int ch4 = vocab->add({"C", 0, 4});
  const int c0 = vocab->add({"C", 0, 0});
  const int ch3 = vocab->add({"C", 0, 3});
  const int o_minus = vocab->add({"O", -1, 0});
  CHECK(check_valence(MolecularGraph::from_edges({ch4}, {}, vocab)));

  std::vector<MolecularGraph::Edge> five;
  for (int j = 1; j <= 5; ++j) five.push_back({0, j, BondType::Single});
  CHECK_FALSE(check_valence(MolecularGraph::from_edges({c0, ch3, ch3, ch3, ch3, ch3}, five, vocab)));

  CHECK(check_valence(MolecularGraph::from_edges({ch3, o_minus}, {{0, 1, BondType::Single}}, vocab)));
  // Two methanes are fine atom by atom but disconnected.
  CHECK_FALSE(check_valence(MolecularGraph::from_edges({ch4, ch4}, {}, vocab)));
}

TEST_CASE("fused aromatic atoms exceed carbon valence under the 1.5 convention") {
  CHECK(parse_error("c1ccc2ccccc2c1") == ErrorCode::ValenceOverflow);
}

TEST_CASE("aromatic bonds must lie on aromatic cycles") {
  auto vocab = std::make_shared<AtomVocab>();
  const int ch = vocab->add({"C", 0, 1});
  const int ch2 = vocab->add({"C", 0, 2});
  // Valence-correct aromatic bond outside any ring: C(H2):C(H2) gives 1.5 + 2.
  auto lone = MolecularGraph::from_edges({ch2, ch2}, {{0, 1, BondType::Aromatic}}, vocab);
  CHECK_FALSE(check_valence(lone));
  std::vector<MolecularGraph::Edge> ring;
  for (int i = 0; i < 6; ++i) ring.push_back({i, (i + 1) % 6, BondType::Aromatic});
  CHECK(check_valence(MolecularGraph::from_edges({ch, ch, ch, ch, ch, ch}, ring, vocab)));
}

TEST_CASE("check_valence is permutation invariant") {
  Rng rng(23);
  for (int t = 0; t < 100; ++t) {
    const auto g = testing::random_molecule(rng, 9);
    const auto h = apply_permutation(g, Permutation::random(g.n(), rng));
    CHECK(check_valence(g) == check_valence(h));
  }
}

TEST_CASE("certificates") {
  CHECK(canonical_certificate(molecule("C")) == canonical_certificate(molecule("C")));

  const auto cco = molecule("CCO");
  Rng rng(29);
  for (int t = 0; t < 6; ++t)
    CHECK(canonical_certificate(apply_permutation(cco, Permutation::random(3, rng))) == canonical_certificate(cco));

  const auto coc = molecule("COC");
  CHECK_FALSE(testing::brute_force_isomorphic(cco, coc));
  CHECK(canonical_certificate(cco) != canonical_certificate(coc));
}

TEST_CASE("certificates ignore vocabulary indexing") {
  auto forward = std::make_shared<AtomVocab>(std::vector<AtomDescriptor>{{"C", 0, 3}, {"O", 0, 1}});
  auto reversed = std::make_shared<AtomVocab>(std::vector<AtomDescriptor>{{"O", 0, 1}, {"C", 0, 3}});
  const auto a = MolecularGraph::from_edges({0, 1}, {{0, 1, BondType::Single}}, forward);
  const auto b = MolecularGraph::from_edges({0, 1}, {{0, 1, BondType::Single}}, reversed);
  CHECK(canonical_certificate(a) == canonical_certificate(b));
}

TEST_CASE("certificates agree with brute force on random molecules") {
  Rng rng(31);
  int isomorphic = 0;
  for (int t = 0; t < 400; ++t) {
    const auto g = testing::random_molecule(rng, 6);
    // Half the pairs are relabelings, half independent draws.
    const auto h = t % 2 ? apply_permutation(g, Permutation::random(g.n(), rng)) : testing::random_molecule(rng, 6);
    const bool iso = testing::brute_force_isomorphic(g, h);
    isomorphic += iso;
    CHECK(iso == (canonical_certificate(g) == canonical_certificate(h)));
  }
  CHECK(isomorphic >= 200);
}

TEST_CASE("canonical order is a relabeling onto the certificate") {
  Rng rng(37);
  for (int t = 0; t < 50; ++t) {
    const auto g = testing::random_molecule(rng, 9);
    const auto form = canonical_form(g);
    CHECK(serialize_labeling(g, form.order) == form.certificate.bytes);
    CHECK(Certificate::from_hex(form.certificate.hex()) == form.certificate);
  }
}
