#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "taxo/errors.hpp"

namespace taxo {

/// How an attribute's characteristics relate to each other. Cumulative
/// attributes are ordered: each characteristic subsumes the previous one,
/// so comparisons go by position rather than by id set.
enum class Ordering { unordered, cumulative };

/// A named refinement of a characteristic (e.g. a ledger token that is
/// native to its chain vs. issued on top of an existing protocol).
/// The code letter is what the compact codec emits when the subtype is
/// selected.
struct SubtypeDef {
    std::string id;
    std::string label;
    char code_letter = '\0';

    friend bool operator==(const SubtypeDef&, const SubtypeDef&) = default;
};

/// One admissible value of an attribute: a cell of the morphological box.
struct CharacteristicDef {
    std::string id;
    std::string label;
    char code_letter = '\0';
    std::string description;
    std::vector<SubtypeDef> subtypes;

    const SubtypeDef* find_subtype(const std::string& subtype_id) const;

    friend bool operator==(const CharacteristicDef&, const CharacteristicDef&) = default;
};

/// One classification dimension: a row of the morphological box.
struct AttributeDef {
    std::string id;
    std::string name;
    std::string question;
    Ordering ordering = Ordering::unordered;
    bool multi_select_allowed = true;
    std::vector<CharacteristicDef> characteristics;

    const CharacteristicDef* find_characteristic(const std::string& characteristic_id) const;
    std::optional<std::size_t> characteristic_index(const std::string& characteristic_id) const;

    friend bool operator==(const AttributeDef&, const AttributeDef&) = default;
};

/// A taxonomy document: an ordered sequence of attribute definitions.
/// The order is normative — it fixes compact-code symbol positions and
/// render row order. Values are immutable once built and safe to share
/// across threads.
struct Taxonomy {
    std::string id;
    std::string name;
    std::string version;
    std::vector<AttributeDef> attributes;

    const AttributeDef* find_attribute(const std::string& attribute_id) const;
    std::optional<std::size_t> attribute_index(const std::string& attribute_id) const;

    /// Total number of characteristic cells across all attributes.
    std::size_t characteristic_count() const;

    friend bool operator==(const Taxonomy&, const Taxonomy&) = default;
};

/// One broken structural rule of a taxonomy document. Violations are data,
/// not exceptions: validate_taxonomy collects every one it finds.
struct SchemaViolation {
    std::string code;     ///< stable machine key, e.g. "duplicate_attribute_id"
    std::string path;     ///< location, e.g. "attributes[3].characteristics[1]"
    std::string message;

    friend bool operator==(const SchemaViolation&, const SchemaViolation&) = default;
};

/// Thrown when a parsed taxonomy fails structural validation. Carries the
/// full violation list.
struct SchemaError : Error {
    std::vector<SchemaViolation> violations;
    explicit SchemaError(std::vector<SchemaViolation> v);
};

/// The built-in 14-attribute asset taxonomy. Immutable singleton.
const Taxonomy& builtin_taxonomy();

/// Checks every structural invariant of a taxonomy (unique ids, >= 2
/// characteristics per attribute, code-letter uniqueness and
/// decodability, id token format). Empty result means valid.
std::vector<SchemaViolation> validate_taxonomy(const Taxonomy& taxonomy);

/// Parses a taxonomy document (strict UTF-8 JSON, unknown keys rejected)
/// and validates it. Throws ParseError on malformed text, SchemaError on
/// structural violations.
Taxonomy parse_taxonomy(const std::string& text);

}  // namespace taxo
