#include "taxo/taxonomy.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "json_strict.hpp"

namespace taxo {

const SubtypeDef* CharacteristicDef::find_subtype(const std::string& subtype_id) const {
    for (const auto& s : subtypes)
        if (s.id == subtype_id) return &s;
    return nullptr;
}

const CharacteristicDef* AttributeDef::find_characteristic(const std::string& characteristic_id) const {
    for (const auto& c : characteristics)
        if (c.id == characteristic_id) return &c;
    return nullptr;
}

std::optional<std::size_t> AttributeDef::characteristic_index(const std::string& characteristic_id) const {
    for (std::size_t i = 0; i < characteristics.size(); ++i)
        if (characteristics[i].id == characteristic_id) return i;
    return std::nullopt;
}

const AttributeDef* Taxonomy::find_attribute(const std::string& attribute_id) const {
    for (const auto& a : attributes)
        if (a.id == attribute_id) return &a;
    return nullptr;
}

std::optional<std::size_t> Taxonomy::attribute_index(const std::string& attribute_id) const {
    for (std::size_t i = 0; i < attributes.size(); ++i)
        if (attributes[i].id == attribute_id) return i;
    return std::nullopt;
}

std::size_t Taxonomy::characteristic_count() const {
    std::size_t n = 0;
    for (const auto& a : attributes) n += a.characteristics.size();
    return n;
}

SchemaError::SchemaError(std::vector<SchemaViolation> v)
    : Error([&v] {
          std::ostringstream os;
          os << "taxonomy has " << v.size() << (v.size() == 1 ? " violation" : " violations");
          for (const auto& viol : v) os << "\n  " << viol.path << ": " << viol.message;
          return os.str();
      }()),
      violations(std::move(v)) {}

// ---------------------------------------------------------------------------
// Built-in taxonomy

const Taxonomy& builtin_taxonomy() {
    static const Taxonomy instance = [] {
        Taxonomy t;
        t.id = "asset-taxonomy";
        t.name = "Asset Taxonomy";
        t.version = "1.0";
        t.attributes = {
            {"claim_structure", "Claim structure", "Does the asset represent a claim?",
             Ordering::unordered, true,
             {{"no_claim", "No claim(s)", 'N',
               "No demand against an issuer or other party attaches to the asset.", {}},
              {"flexible_claim", "Flexible claim(s)", 'F',
               "Attached claims exist, but holding or exercising them depends on conditions.", {}},
              {"fixed_claim", "Fixed claim(s)", 'X',
               "Attached claims are unconditional and cannot be restricted.", {}}}},
            {"technology", "Technology", "Which technology is the asset based on?",
             Ordering::unordered, true,
             {{"physical", "Physical", 'P', "The asset exists as a physical object.", {}},
              {"digital", "Digital", 'D',
               "The asset exists electronically, without a distributed ledger.", {}},
              {"dlt", "Distributed ledger technology", 'T',
               "The asset is recorded on a distributed ledger.",
               {{"native", "Native token", 'T'},
                {"protocol", "Protocol token", 'R'}}}}},
            {"underlying", "Underlying", "Which underlying or collateral is the asset's value based on?",
             Ordering::unordered, true,
             {{"none", "No underlying", 'N', "The asset's value does not derive from another asset.", {}},
              {"company", "Company", 'C', "The asset's value represents a stake in a company.", {}},
              {"bankable_asset", "Bankable asset", 'B',
               "The value rests on an asset that can be held in a bank or custody account.", {}},
              {"cryptographic_asset", "Cryptographic asset", 'Y',
               "The value derives from another ledger-based asset.", {}},
              {"tangible_asset", "Tangible asset", 'T', "The value derives from a physical asset.", {}},
              {"contract", "Contract", 'K', "The value derives from a contractual agreement.", {}}}},
            {"consensus", "Consensus/Validation mechanism",
             "How is the agreement on the finality of the asset reached?", Ordering::unordered, true,
             {{"instant_finality", "Instant finality", 'I',
               "Agreement on the asset's state is definitive once reached.", {}},
              {"probabilistic_finality", "Probabilistic finality", 'P',
               "Agreement on the asset's state carries a confidence level rather than certainty.", {}}}},
            {"legal_status", "Legal status", "What is the regulatory framework governing the asset?",
             Ordering::unordered, true,
             {{"regulated", "Regulated", 'R',
               "Issuance, redemption and governance are subject to regulatory requirements.", {}},
              {"unregulated", "Unregulated", 'U', "No specific regulatory framework applies.", {}}}},
            {"governance", "Governance", "In which way is the asset governed?", Ordering::unordered, true,
             {{"centralised", "Centralised", 'C',
               "An authoritative party or consortium governs the asset.", {}},
              {"decentralised", "Decentralised", 'D', "No central party controls the asset.", {}}}},
            {"information_complexity", "Information complexity",
             "What type of information complexity is associated with the asset?", Ordering::cumulative,
             true,
             {{"value", "Value", 'V', "The asset carries a plain value.", {}},
              {"contract", "Contract", 'C',
               "The asset carries conditional terms on top of its value.", {}},
              {"turing_complete", "Turing completeness", 'T',
               "The asset is programmable on a Turing-complete system.", {}}}},
            {"legal_structure", "Legal structure", "What is the legal form of the asset?",
             Ordering::unordered, true,
             {{"none", "No legal structure", 'N', "No legal structure governs the asset.", {}},
              {"foundation", "Foundation", 'F', "Governed through a foundation or trust.", {}},
              {"note_bond", "Note/bond", 'B', "Structured as a note or bond.", {}},
              {"share", "Share", 'S', "Structured as a share.", {}},
              {"other", "Other", 'O', "Any other legal wrapper.", {}}}},
            {"information_interface", "Information interface",
             "How does the asset receive and/or send relevant information?", Ordering::unordered, true,
             {{"none", "No interface", 'N', "The asset neither receives nor emits information.", {}},
              {"qualitative", "Qualitative", 'Q',
               "Information flows indirectly through an authorised body.", {}},
              {"quantitative", "Quantitative", 'A',
               "Information flows automatically from authorised sources.", {}}}},
            {"total_supply", "Total supply", "To which limit can the asset be generated?",
             Ordering::unordered, true,
             {{"fixed", "Fixed", 'F', "The number of units that can ever exist is capped.", {}},
              {"conditional", "Conditional", 'C',
               "The supply limit depends on predefined conditions.", {}},
              {"flexible", "Flexible", 'X',
               "Authorised parties manage the supply at their discretion.", {}}}},
            {"issuance", "Issuance", "How is the asset generated?", Ordering::unordered, true,
             {{"once", "Once", 'O', "Units are created in a single initial issuance.", {}},
              {"conditional", "Conditional", 'C',
               "New units are created when predefined conditions are met.", {}},
              {"flexible", "Flexible", 'F',
               "Authorised parties create new units at their discretion.", {}}}},
            {"redemption", "Redemption", "How is the number of outstanding assets reduced?",
             Ordering::unordered, true,
             {{"none", "No redemption", 'N', "Outstanding units cannot be reduced.", {}},
              {"fixed", "Fixed", 'F', "Reduction follows a predefined protocol.", {}},
              {"conditional", "Conditional", 'C',
               "Reduction happens when predefined conditions are met.", {}},
              {"flexible", "Flexible", 'X',
               "Authorised parties reduce outstanding units at their discretion.", {}}}},
            {"transferability", "Transferability",
             "Can the asset's ownership be transferred to another party?", Ordering::unordered, true,
             {{"transferable", "Transferable", 'T', "Ownership can pass to another party.", {}},
              {"non_transferable", "Non-transferable", 'N',
               "Ownership cannot pass to another party.", {}}}},
            {"fungibility", "Fungibility",
             "Can the asset be interchanged with another asset of the same type?", Ordering::unordered,
             true,
             {{"fungible", "Fungible", 'F',
               "Any unit substitutes for any other unit of the same type.", {}},
              {"non_fungible", "Non-fungible", 'N',
               "Units are unique and not interchangeable.", {}}}},
        };
        return t;
    }();
    return instance;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool is_id_token(const std::string& s) {
    if (s.empty()) return false;
    if (s[0] < 'a' || s[0] > 'z') return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    });
}

bool is_code_letter(char c) { return c >= 'A' && c <= 'Z'; }

std::string attr_path(std::size_t i) { return "attributes[" + std::to_string(i) + "]"; }

std::string char_path(std::size_t i, std::size_t j) {
    return attr_path(i) + ".characteristics[" + std::to_string(j) + "]";
}

void validate_attribute(const AttributeDef& a, std::size_t ai, std::vector<SchemaViolation>& out) {
    if (!is_id_token(a.id))
        out.push_back({"invalid_id", attr_path(ai), "attribute id \"" + a.id +
                                                        "\" is not a snake-case token"});
    if (a.characteristics.size() < 2)
        out.push_back({"too_few_characteristics", attr_path(ai),
                       "attribute \"" + a.id + "\" requires >=2 characteristics, has " +
                           std::to_string(a.characteristics.size())});

    std::map<std::string, std::size_t> char_ids;
    std::map<char, std::string> position_letters;  // letter -> owner description
    for (std::size_t j = 0; j < a.characteristics.size(); ++j) {
        const auto& c = a.characteristics[j];
        if (!is_id_token(c.id))
            out.push_back({"invalid_id", char_path(ai, j),
                           "characteristic id \"" + c.id + "\" is not a snake-case token"});
        if (auto [it, fresh] = char_ids.emplace(c.id, j); !fresh)
            out.push_back({"duplicate_characteristic_id", char_path(ai, j),
                           "characteristic id \"" + c.id + "\" already used at " +
                               char_path(ai, it->second)});
        if (!is_code_letter(c.code_letter))
            out.push_back({"invalid_code_letter", char_path(ai, j),
                           "code_letter must be an uppercase ASCII letter"});

        // Sibling characteristic letters must be unique regardless of
        // subtyping; the decodable position alphabet is checked below.
        for (std::size_t k = 0; k < j; ++k) {
            if (a.characteristics[k].code_letter == c.code_letter)
                out.push_back({"duplicate_code_letter", char_path(ai, j),
                               std::string("code_letter '") + c.code_letter + "' already used at " +
                                   char_path(ai, k)});
        }

        if (c.subtypes.empty()) {
            if (auto [it, fresh] = position_letters.emplace(c.code_letter, c.id); !fresh && is_code_letter(c.code_letter))
                out.push_back({"ambiguous_position_letter", char_path(ai, j),
                               std::string("letter '") + c.code_letter +
                                   "' is not decodable: also claimed by \"" + it->second + "\""});
            continue;
        }

        std::map<std::string, std::size_t> sub_ids;
        bool own_letter_covered = false;
        for (std::size_t s = 0; s < c.subtypes.size(); ++s) {
            const auto& sub = c.subtypes[s];
            const std::string path = char_path(ai, j) + ".subtypes[" + std::to_string(s) + "]";
            if (!is_id_token(sub.id))
                out.push_back({"invalid_id", path,
                               "subtype id \"" + sub.id + "\" is not a snake-case token"});
            if (auto [it, fresh] = sub_ids.emplace(sub.id, s); !fresh)
                out.push_back({"duplicate_subtype_id", path,
                               "subtype id \"" + sub.id + "\" already used in this characteristic"});
            if (!is_code_letter(sub.code_letter)) {
                out.push_back({"invalid_code_letter", path,
                               "subtype code_letter must be an uppercase ASCII letter"});
                continue;
            }
            if (auto [it, fresh] = position_letters.emplace(sub.code_letter, c.id + "/" + sub.id); !fresh)
                out.push_back({"ambiguous_position_letter", path,
                               std::string("letter '") + sub.code_letter +
                                   "' is not decodable: also claimed by \"" + it->second + "\""});
            if (sub.code_letter == c.code_letter) own_letter_covered = true;
        }
        if (!own_letter_covered && is_code_letter(c.code_letter))
            out.push_back({"undecodable_code_letter", char_path(ai, j),
                           "subtyped characteristic \"" + c.id +
                               "\" must reuse one of its subtypes' code letters"});
    }
}

}  // namespace

std::vector<SchemaViolation> validate_taxonomy(const Taxonomy& t) {
    std::vector<SchemaViolation> out;
    if (t.id.empty()) out.push_back({"missing_id", "id", "taxonomy id must not be empty"});
    if (t.attributes.empty())
        out.push_back({"empty_taxonomy", "attributes", "taxonomy has no attributes"});

    std::map<std::string, std::size_t> attr_ids;
    for (std::size_t i = 0; i < t.attributes.size(); ++i) {
        const auto& a = t.attributes[i];
        if (auto [it, fresh] = attr_ids.emplace(a.id, i); !fresh)
            out.push_back({"duplicate_attribute_id", attr_path(i),
                           "attribute id \"" + a.id + "\" already used at " + attr_path(it->second)});
        validate_attribute(a, i, out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

using detail::json;

Ordering parse_ordering(const std::string& s, const std::string& where) {
    if (s == "unordered") return Ordering::unordered;
    if (s == "cumulative") return Ordering::cumulative;
    throw ParseError(where + ".ordering: expected \"unordered\" or \"cumulative\", got \"" + s + "\"");
}

SubtypeDef parse_subtype(const json& node, const std::string& where) {
    detail::require_object(node, where);
    detail::check_keys(node, where, {"id", "label", "code_letter"}, {});
    SubtypeDef s;
    s.id = detail::get_string(node, "id", where);
    s.label = detail::get_string(node, "label", where);
    s.code_letter = detail::get_code_letter(node, "code_letter", where);
    return s;
}

CharacteristicDef parse_characteristic(const json& node, const std::string& where) {
    detail::require_object(node, where);
    detail::check_keys(node, where, {"id", "label", "code_letter", "description"}, {"subtypes"});
    CharacteristicDef c;
    c.id = detail::get_string(node, "id", where);
    c.label = detail::get_string(node, "label", where);
    c.code_letter = detail::get_code_letter(node, "code_letter", where);
    c.description = detail::get_string(node, "description", where);
    if (node.contains("subtypes")) {
        const auto& arr = detail::get_array(node, "subtypes", where);
        for (std::size_t i = 0; i < arr.size(); ++i)
            c.subtypes.push_back(parse_subtype(arr[i], where + ".subtypes[" + std::to_string(i) + "]"));
    }
    return c;
}

AttributeDef parse_attribute(const json& node, const std::string& where) {
    detail::require_object(node, where);
    detail::check_keys(node, where,
                       {"id", "name", "question", "ordering", "multi_select_allowed", "characteristics"},
                       {});
    AttributeDef a;
    a.id = detail::get_string(node, "id", where);
    a.name = detail::get_string(node, "name", where);
    a.question = detail::get_string(node, "question", where);
    a.ordering = parse_ordering(detail::get_string(node, "ordering", where), where);
    a.multi_select_allowed = detail::get_bool(node, "multi_select_allowed", where);
    const auto& arr = detail::get_array(node, "characteristics", where);
    for (std::size_t i = 0; i < arr.size(); ++i)
        a.characteristics.push_back(
            parse_characteristic(arr[i], where + ".characteristics[" + std::to_string(i) + "]"));
    return a;
}

}  // namespace

Taxonomy parse_taxonomy(const std::string& text) {
    const json doc = detail::parse_document(text);
    detail::require_object(doc, "document");
    detail::check_keys(doc, "document", {"id", "name", "version", "attributes"}, {});

    Taxonomy t;
    t.id = detail::get_string(doc, "id", "document");
    t.name = detail::get_string(doc, "name", "document");
    t.version = detail::get_string(doc, "version", "document");
    const auto& arr = detail::get_array(doc, "attributes", "document");
    for (std::size_t i = 0; i < arr.size(); ++i)
        t.attributes.push_back(parse_attribute(arr[i], attr_path(i)));

    if (auto violations = validate_taxonomy(t); !violations.empty())
        throw SchemaError(std::move(violations));
    return t;
}

}  // namespace taxo
