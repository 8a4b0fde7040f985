#include "taxo/classification.hpp"

#include <algorithm>
#include <sstream>

#include "json_strict.hpp"

namespace taxo {

ValidationFailure::ValidationFailure(ValidationReport r)
    : Error([&r] {
          std::ostringstream os;
          os << "classification has " << r.errors.size()
             << (r.errors.size() == 1 ? " error" : " errors");
          for (const auto& e : r.errors) {
              os << "\n  ";
              if (!e.attribute_id.empty()) os << e.attribute_id << ": ";
              os << e.message;
          }
          return os.str();
      }()),
      report(std::move(r)) {}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool selection_contains(const AssetClassification& c, const std::string& attribute_id,
                        const std::string& characteristic_id) {
    auto it = c.selections.find(attribute_id);
    return it != c.selections.end() && it->second.characteristic_ids.contains(characteristic_id);
}

void validate_selection(const AttributeDef& attr, const Selection& sel,
                        std::vector<ValidationIssue>& errors) {
    if (sel.characteristic_ids.empty()) {
        errors.push_back({"empty_selection", attr.id, "selection has no characteristics"});
        return;
    }
    for (const auto& cid : sel.characteristic_ids) {
        if (!attr.find_characteristic(cid))
            errors.push_back({"unknown_characteristic", attr.id,
                              "unknown characteristic \"" + cid + "\" for attribute \"" + attr.id + "\""});
    }
    if (sel.characteristic_ids.size() > 1 && !attr.multi_select_allowed)
        errors.push_back({"multi_select_not_allowed", attr.id,
                          "attribute \"" + attr.id + "\" does not allow multiple characteristics"});
    if (sel.subtype_id) {
        if (sel.characteristic_ids.size() != 1) {
            errors.push_back({"invalid_subtype", attr.id,
                              "a subtype requires exactly one selected characteristic"});
        } else {
            const auto* ch = attr.find_characteristic(*sel.characteristic_ids.begin());
            if (ch && !ch->find_subtype(*sel.subtype_id))
                errors.push_back({"invalid_subtype", attr.id,
                                  "characteristic \"" + ch->id + "\" does not declare subtype \"" +
                                      *sel.subtype_id + "\""});
        }
    }
}

}  // namespace

ValidationReport validate_classification(const Taxonomy& t, const AssetClassification& c,
                                         ValidationMode mode) {
    if (c.taxonomy_id != t.id || c.taxonomy_version != t.version) {
        ValidationReport mismatch{mode, {}, {}};
        mismatch.errors.push_back(
            {"taxonomy_mismatch", "",
             "classification references taxonomy \"" + c.taxonomy_id + "\" v" + c.taxonomy_version +
                 ", expected \"" + t.id + "\" v" + t.version});
        throw ValidationFailure(std::move(mismatch));
    }

    ValidationReport report{mode, {}, {}};
    for (const auto& [attr_id, sel] : c.selections) {
        const auto* attr = t.find_attribute(attr_id);
        if (!attr) {
            report.errors.push_back(
                {"unknown_attribute", attr_id, "taxonomy has no attribute \"" + attr_id + "\""});
            continue;
        }
        validate_selection(*attr, sel, report.errors);
    }
    for (const auto& [attr_id, _] : c.notes) {
        if (!t.find_attribute(attr_id))
            report.errors.push_back(
                {"unknown_attribute", attr_id, "note references unknown attribute \"" + attr_id + "\""});
    }
    if (mode == ValidationMode::strict) {
        for (const auto& attr : t.attributes) {
            if (!c.selections.contains(attr.id))
                report.errors.push_back(
                    {"unset_attribute", attr.id, "attribute \"" + attr.id + "\" is not set"});
        }
    }
    if (report.errors.empty()) report.lint_findings = lint(t, c);
    return report;
}

void require_valid(const Taxonomy& t, const AssetClassification& c, ValidationMode mode) {
    auto report = validate_classification(t, c, mode);
    if (!report.is_valid()) throw ValidationFailure(std::move(report));
}

// ---------------------------------------------------------------------------
// Lints

namespace {

// Rule conditions read a selection with contains-semantics: "attr=x" holds
// when x is among the selected characteristics. Rules fire only when every
// involved attribute is set.
std::optional<LintFinding> rule_l1(const Taxonomy&, const AssetClassification& c) {
    if (selection_contains(c, "technology", "physical") &&
        selection_contains(c, "consensus", "probabilistic_finality"))
        return LintFinding{"L1",
                           {"technology", "consensus"},
                           "physical assets normally settle with instant finality"};
    return std::nullopt;
}

std::optional<LintFinding> rule_l2(const Taxonomy&, const AssetClassification& c) {
    if (!selection_contains(c, "issuance", "once")) return std::nullopt;
    auto supply = c.selections.find("total_supply");
    if (supply == c.selections.end()) return std::nullopt;
    if (!supply->second.characteristic_ids.contains("fixed"))
        return LintFinding{"L2",
                           {"issuance", "total_supply"},
                           "a single issuance normally implies a fixed total supply"};
    return std::nullopt;
}

std::optional<LintFinding> rule_l3(const Taxonomy&, const AssetClassification& c) {
    if (selection_contains(c, "technology", "dlt") &&
        selection_contains(c, "consensus", "instant_finality"))
        return LintFinding{"L3",
                           {"technology", "consensus"},
                           "ledger-based assets normally settle with probabilistic finality"};
    return std::nullopt;
}

std::optional<LintFinding> rule_l4(const Taxonomy&, const AssetClassification& c) {
    if (selection_contains(c, "redemption", "none") &&
        selection_contains(c, "total_supply", "flexible") &&
        selection_contains(c, "issuance", "once"))
        return LintFinding{"L4",
                           {"redemption", "total_supply", "issuance"},
                           "flexible supply with one issuance and no redemption is contradictory"};
    return std::nullopt;
}

}  // namespace

const std::vector<LintRule>& builtin_lint_rules() {
    static const std::vector<LintRule> rules = {
        {"L1", "physical technology with probabilistic finality", rule_l1},
        {"L2", "single issuance without a fixed total supply", rule_l2},
        {"L3", "ledger technology with instant finality", rule_l3},
        {"L4", "flexible supply, single issuance, no redemption", rule_l4},
    };
    return rules;
}

std::vector<LintFinding> lint(const Taxonomy& t, const AssetClassification& c) {
    return lint(t, c, builtin_lint_rules());
}

std::vector<LintFinding> lint(const Taxonomy& t, const AssetClassification& c,
                              const std::vector<LintRule>& rules) {
    std::vector<LintFinding> findings;
    for (const auto& rule : rules) {
        if (auto finding = rule.check(t, c)) findings.push_back(std::move(*finding));
    }
    return findings;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

using detail::json;

Selection parse_selection(const json& node, const std::string& where, std::string* note_out) {
    detail::require_object(node, where);
    detail::check_keys(node, where, {"characteristics"}, {"subtype", "note"});
    Selection sel;
    const auto& arr = detail::get_array(node, "characteristics", where);
    if (arr.empty()) throw ParseError(where + ".characteristics: must not be empty");
    for (const auto& item : arr) {
        if (!item.is_string())
            throw ParseError(where + ".characteristics: expected an array of strings");
        if (!sel.characteristic_ids.insert(item.get<std::string>()).second)
            throw ParseError(where + ".characteristics: duplicate entry \"" +
                             item.get<std::string>() + "\"");
    }
    if (node.contains("subtype")) sel.subtype_id = detail::get_string(node, "subtype", where);
    if (node.contains("note")) *note_out = detail::get_string(node, "note", where);
    return sel;
}

}  // namespace

AssetClassification parse_classification(const std::string& text) {
    const json doc = detail::parse_document(text);
    detail::require_object(doc, "document");
    detail::check_keys(doc, "document", {"asset_name", "taxonomy_id", "taxonomy_version", "selections"},
                       {"notes"});

    AssetClassification c;
    c.asset_name = detail::get_string(doc, "asset_name", "document");
    c.taxonomy_id = detail::get_string(doc, "taxonomy_id", "document");
    c.taxonomy_version = detail::get_string(doc, "taxonomy_version", "document");

    const auto& selections = doc.at("selections");
    detail::require_object(selections, "selections");
    for (const auto& item : selections.items()) {
        const std::string where = "selections." + item.key();
        std::string note;
        c.selections[item.key()] = parse_selection(item.value(), where, &note);
        if (!note.empty()) c.notes[item.key()] = note;
    }

    if (doc.contains("notes")) {
        const auto& notes = doc.at("notes");
        detail::require_object(notes, "notes");
        for (const auto& item : notes.items()) {
            if (!item.value().is_string())
                throw ParseError("notes." + item.key() + ": expected a string");
            if (c.selections.contains(item.key()))
                throw ParseError("notes." + item.key() +
                                 ": note for a set attribute belongs in its selections entry");
            c.notes[item.key()] = item.value().get<std::string>();
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Builder

ClassificationBuilder::ClassificationBuilder(const Taxonomy& t, std::string asset_name) {
    value_.asset_name = std::move(asset_name);
    value_.taxonomy_id = t.id;
    value_.taxonomy_version = t.version;
}

ClassificationBuilder& ClassificationBuilder::select(const std::string& attribute_id,
                                                     std::set<std::string> characteristic_ids,
                                                     std::optional<std::string> subtype_id) {
    value_.selections[attribute_id] = Selection{std::move(characteristic_ids), std::move(subtype_id)};
    return *this;
}

ClassificationBuilder& ClassificationBuilder::note(const std::string& attribute_id, std::string text) {
    value_.notes[attribute_id] = std::move(text);
    return *this;
}

// ---------------------------------------------------------------------------
// Fixture corpus

namespace {

AssetClassification make_cash() {
    return ClassificationBuilder(builtin_taxonomy(), "Cash")
        .select("technology", {"physical"})
        .note("technology", "banknotes and coins are physical objects")
        .select("underlying", {"none"})
        .note("underlying", "value rests on public trust in the issuing central bank")
        .select("consensus", {"instant_finality"})
        .note("consensus", "physical possession settles the state deterministically")
        .select("legal_status", {"regulated"})
        .note("legal_status", "regulated as legal tender under national law")
        .select("governance", {"centralised"})
        .note("governance", "governed centrally by the central bank")
        .select("information_complexity", {"value"})
        .note("information_complexity", "represents a plain denomination value")
        .select("legal_structure", {"other"})
        .note("legal_structure", "legal-tender regime for central bank money")
        .select("information_interface", {"none"})
        .note("information_interface", "no source feeds information to or from the asset")
        .select("total_supply", {"flexible"})
        .note("total_supply", "no cap; supply managed by the central bank")
        .select("issuance", {"flexible"})
        .note("issuance", "the central bank issues units at its discretion")
        .select("redemption", {"flexible"})
        .note("redemption", "the central bank withdraws units at its discretion")
        .select("transferability", {"transferable"})
        .note("transferability", "designed to pass from hand to hand")
        .select("fungibility", {"fungible"})
        .note("fungibility", "units of equal denomination are interchangeable")
        .note("claim_structure", "not assessed")
        .build();
}

AssetClassification make_bitcoin() {
    return ClassificationBuilder(builtin_taxonomy(), "Bitcoin")
        .select("claim_structure", {"no_claim"})
        .note("claim_structure", "no legal claim attaches to holding the asset")
        .select("technology", {"dlt"}, "native")
        .note("technology", "native token of its own blockchain")
        .select("underlying", {"none"})
        .note("underlying", "value rests on trust in the protocol, not on an underlying asset")
        .select("consensus", {"probabilistic_finality"})
        .note("consensus", "proof-of-work; finality is probabilistic")
        .select("governance", {"decentralised"})
        .note("governance", "no central governing party")
        .select("information_complexity", {"contract"})
        .note("information_complexity", "transfers run through script contracts; not Turing-complete")
        .select("legal_structure", {"none"})
        .note("legal_structure", "no legal structure governs the asset")
        .select("information_interface", {"none"})
        .note("information_interface", "no oracle interface")
        .select("total_supply", {"fixed"})
        .note("total_supply", "supply capped at 21 million units")
        .select("issuance", {"conditional"})
        .note("issuance", "new units only through block rewards")
        .select("redemption", {"none"})
        .note("redemption", "units cannot be removed from the system")
        .select("transferability", {"transferable"})
        .note("transferability", "designed as a means of payment")
        .select("fungibility", {"fungible"})
        .note("fungibility", "units are interchangeable")
        .note("legal_status", "not assessed; no explicit regulatory treatment assumed")
        .build();
}

AssetClassification make_ether() {
    return ClassificationBuilder(builtin_taxonomy(), "Ether")
        .select("claim_structure", {"no_claim"})
        .note("claim_structure", "no legal claims attach to the token")
        .select("technology", {"dlt"}, "native")
        .note("technology", "native token of its platform")
        .select("underlying", {"none"})
        .note("underlying", "no underlying associated with the token")
        .select("consensus", {"probabilistic_finality"})
        .note("consensus", "proof-of-work consensus")
        .select("legal_status", {"unregulated"})
        .note("legal_status", "the token itself is not regulated")
        .select("governance", {"decentralised"})
        .note("governance", "decentralised platform governance")
        .select("information_complexity", {"turing_complete"})
        .note("information_complexity", "the platform is Turing-complete")
        .select("legal_structure", {"foundation"})
        .note("legal_structure", "platform stewarded by a foundation")
        .select("information_interface", {"quantitative"})
        .note("information_interface", "decentralised oracle systems feed the platform")
        .select("issuance", {"conditional"})
        .note("issuance", "new units through block rewards")
        .select("redemption", {"none"})
        .note("redemption", "existing units cannot be destroyed")
        .select("transferability", {"transferable"})
        .select("fungibility", {"fungible"})
        .note("total_supply", "no hard cap stated; mapping to a supply characteristic left open")
        .build();
}

AssetClassification make_crowdlitoken() {
    return ClassificationBuilder(builtin_taxonomy(), "Crowdlitoken")
        .select("claim_structure", {"fixed_claim"})
        .note("claim_structure", "carries fixed voting and interest-payment claims")
        .select("technology", {"dlt"}, "protocol")
        .note("technology", "ERC-20 token on an existing blockchain")
        .select("underlying", {"company"})
        .note("underlying", "value derives from the issuing company")
        .select("consensus", {"probabilistic_finality"})
        .note("consensus", "host chain uses proof-of-work")
        .select("legal_status", {"regulated"})
        .note("legal_status", "regulated under existing law")
        .select("governance", {"centralised"})
        .note("governance", "managed centrally by the issuer")
        .select("information_complexity", {"contract"})
        .note("information_complexity", "represents a contract with fixed claims")
        .select("legal_structure", {"note_bond"})
        .note("legal_structure", "structured as notes/bonds")
        .select("information_interface", {"qualitative"})
        .note("information_interface", "token holders vote on management proposals")
        .select("total_supply", {"flexible"})
        .note("total_supply", "the issuer manages the supply")
        .select("issuance", {"flexible"})
        .note("issuance", "issued flexibly by the company")
        .select("redemption", {"flexible"})
        .note("redemption", "burnt flexibly, for example through buybacks")
        .select("transferability", {"transferable"})
        .note("transferability", "transferable; subscription requires completed KYC/AML checks")
        .select("fungibility", {"fungible"})
        .build();
}

AssetClassification make_cryptokitties() {
    return ClassificationBuilder(builtin_taxonomy(), "CryptoKitties")
        .select("claim_structure", {"no_claim"})
        .note("claim_structure", "no claims against a counterparty")
        .select("technology", {"dlt"}, "protocol")
        .note("technology", "ERC-721 tokens on an existing blockchain")
        .select("underlying", {"none"})
        .note("underlying", "no specific underlying")
        .select("consensus", {"probabilistic_finality"})
        .note("consensus", "host chain uses proof-of-work")
        .select("legal_status", {"unregulated"})
        .note("legal_status", "no regulatory or legal governance")
        .select("governance", {"decentralised"})
        .note("governance", "token ownership is governed on-chain")
        .select("legal_structure", {"none"})
        .select("information_interface", {"none"})
        .note("information_interface", "no oracle interface relates to the tokens")
        .select("total_supply", {"fixed"})
        .note("total_supply", "the contract caps the population at about four billion")
        .select("issuance", {"conditional"})
        .note("issuance", "new tokens only through breeding")
        .select("redemption", {"none"})
        .note("redemption", "tokens cannot be destroyed")
        .select("transferability", {"transferable"})
        .select("fungibility", {"non_fungible"})
        .note("fungibility", "every token is unique")
        .note("information_complexity", "not assessed")
        .build();
}

AssetClassification make_traditional_share() {
    return ClassificationBuilder(builtin_taxonomy(), "Traditional share")
        .select("claim_structure", {"fixed_claim"})
        .note("claim_structure", "fixed voting and profit-participation claims")
        .select("technology", {"physical", "digital"})
        .note("technology", "certificates exist in physical or electronic form")
        .select("underlying", {"company"})
        .note("underlying", "fundamental value of the corporation")
        .select("consensus", {"instant_finality"})
        .note("consensus", "the share registry settles the state definitively")
        .select("legal_status", {"regulated"})
        .note("legal_status", "subject to national corporate law")
        .select("governance", {"centralised"})
        .note("governance", "governed through corporate bodies")
        .select("information_complexity", {"contract"})
        .note("information_complexity", "a contract carrying fixed claims")
        .select("legal_structure", {"share"})
        .select("information_interface", {"qualitative"})
        .note("information_interface", "the general assembly acts as the information channel")
        .select("total_supply", {"flexible"})
        .note("total_supply", "capital changes are decided by the general assembly")
        .select("issuance", {"flexible"})
        .note("issuance", "capital increases at the corporation's discretion")
        .select("redemption", {"flexible"})
        .note("redemption", "buybacks reduce the outstanding shares")
        .select("transferability", {"transferable"})
        .note("transferability", "typically transferable; registered-share restrictions exist")
        .select("fungibility", {"fungible"})
        .note("fungibility", "substitutable with shares of the same company")
        .build();
}

}  // namespace

const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> names = {"cash",          "bitcoin",
                                                   "ether",         "crowdlitoken",
                                                   "cryptokitties", "traditional_share"};
    return names;
}

const std::vector<AssetClassification>& fixture_classifications() {
    static const std::vector<AssetClassification> corpus = {
        make_cash(),          make_bitcoin(),      make_ether(),
        make_crowdlitoken(),  make_cryptokitties(), make_traditional_share(),
    };
    return corpus;
}

const AssetClassification* fixture_classification(const std::string& name) {
    const auto& names = fixture_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return &fixture_classifications()[i];
    return nullptr;
}

}  // namespace taxo
