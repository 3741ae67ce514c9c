#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "equigan/chem/valence.hpp"
#include "equigan/graph.hpp"

namespace equigan::chem {

/// Vocabulary-free molecule: atom descriptors plus a bond list.
struct ParsedMolecule {
  std::vector<AtomDescriptor> atoms;
  std::vector<MolecularGraph::Edge> bonds;
};

/// Parses the supported SMILES subset: organic-subset atoms C N O F and
/// aromatic c n o, bracket atoms with H count and charge, bonds - = # :,
/// ring closures (digits and %nn), branches, and '.' component breaks.
/// Unbracketed atoms receive hydrogens up to their smallest allowed valence.
ParsedMolecule parse_smiles(std::string_view smiles, const ValenceTable& table = ValenceTable::standard());

/// Encodes a parsed molecule against `vocab`; throws UnknownAtomType for
/// descriptors missing from it.
MolecularGraph to_graph(const ParsedMolecule& molecule, std::shared_ptr<const AtomVocab> vocab);

/// parse_smiles followed by to_graph.
MolecularGraph parse_smiles(std::string_view smiles, std::shared_ptr<const AtomVocab> vocab,
                            const ValenceTable& table = ValenceTable::standard());

/// Writes `graph` in canonical atom order. parse_smiles of the result is
/// isomorphic to `graph` for every validate-passing encoding.
std::string write_smiles(const MolecularGraph& graph, const ValenceTable& table = ValenceTable::standard());

}  // namespace equigan::chem
