#pragma once

#include <string>
#include <vector>

#include "taxo/classification.hpp"
#include "taxo/taxonomy.hpp"

namespace taxo {

/// One symbol per attribute, in taxonomy order. '-' marks an unset
/// attribute, '*' a multi-selected one (lossy by design); any letter is a
/// declared code letter at that position.
struct CompactCode {
    std::string text;

    friend bool operator==(const CompactCode&, const CompactCode&) = default;
};

inline constexpr char kUnsetSymbol = '-';
inline constexpr char kMultiSymbol = '*';

/// One decodable letter of an attribute's code position. Subtyped
/// characteristics contribute one letter per subtype; plain ones
/// contribute their own letter.
struct LetterBinding {
    char letter;
    const CharacteristicDef* characteristic;
    const SubtypeDef* subtype;  ///< nullptr for plain characteristics
};

/// The letter bindings of an attribute's code position, in declaration
/// order.
std::vector<LetterBinding> position_bindings(const AttributeDef& attribute);

/// The letters legal at an attribute's position, excluding '-' and '*'.
std::string position_alphabet(const AttributeDef& attribute);

/// Encodes a classification as a compact code. Precondition: `c` is valid
/// against `t` in partial mode (enforced; throws ValidationFailure).
CompactCode encode(const Taxonomy& t, const AssetClassification& c);

/// Decodes a compact code into a partial classification. '*' positions
/// come back unset with a note "multi-valued in source code". Throws
/// CodecError on wrong length or an illegal symbol (reporting position,
/// symbol and the legal alphabet there).
AssetClassification decode(const Taxonomy& t, const std::string& code);

/// Canonical serialization: keys sorted except normative arrays, 2-space
/// indentation, trailing newline, byte-stable across runs.
std::string serialize_taxonomy(const Taxonomy& t);

/// Canonical classification document. Unset attributes are omitted from
/// `selections`; their notes, if any, land in a top-level `notes` object.
/// Multi-select characteristic arrays follow the attribute's declaration
/// order. Precondition: `c` valid against `t` in partial mode.
std::string serialize_classification(const Taxonomy& t, const AssetClassification& c);

}  // namespace taxo
