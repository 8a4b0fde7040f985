#include "taxo/codec.hpp"

#include <algorithm>

#include "json_strict.hpp"

namespace taxo {

std::vector<LetterBinding> position_bindings(const AttributeDef& attribute) {
    std::vector<LetterBinding> out;
    for (const auto& ch : attribute.characteristics) {
        if (ch.subtypes.empty()) {
            out.push_back({ch.code_letter, &ch, nullptr});
        } else {
            for (const auto& sub : ch.subtypes) out.push_back({sub.code_letter, &ch, &sub});
        }
    }
    return out;
}

std::string position_alphabet(const AttributeDef& attribute) {
    std::string out;
    for (const auto& binding : position_bindings(attribute)) out.push_back(binding.letter);
    return out;
}

// ---------------------------------------------------------------------------
// Compact code

CompactCode encode(const Taxonomy& t, const AssetClassification& c) {
    require_valid(t, c, ValidationMode::partial);
    std::string text;
    text.reserve(t.attributes.size());
    for (const auto& attr : t.attributes) {
        auto it = c.selections.find(attr.id);
        if (it == c.selections.end()) {
            text.push_back(kUnsetSymbol);
            continue;
        }
        const Selection& sel = it->second;
        if (sel.characteristic_ids.size() > 1) {
            text.push_back(kMultiSymbol);
            continue;
        }
        const auto* ch = attr.find_characteristic(*sel.characteristic_ids.begin());
        if (sel.subtype_id) {
            text.push_back(ch->find_subtype(*sel.subtype_id)->code_letter);
        } else {
            text.push_back(ch->code_letter);
        }
    }
    return CompactCode{std::move(text)};
}

AssetClassification decode(const Taxonomy& t, const std::string& code) {
    if (code.size() != t.attributes.size())
        throw CodecError("expected " + std::to_string(t.attributes.size()) + " symbols, got " +
                         std::to_string(code.size()));

    AssetClassification c;
    c.asset_name = code;
    c.taxonomy_id = t.id;
    c.taxonomy_version = t.version;

    for (std::size_t i = 0; i < t.attributes.size(); ++i) {
        const auto& attr = t.attributes[i];
        const char symbol = code[i];
        if (symbol == kUnsetSymbol) continue;
        if (symbol == kMultiSymbol) {
            c.notes[attr.id] = "multi-valued in source code";
            continue;
        }
        const auto bindings = position_bindings(attr);
        auto hit = std::find_if(bindings.begin(), bindings.end(),
                                [symbol](const LetterBinding& b) { return b.letter == symbol; });
        if (hit == bindings.end()) {
            std::string legal;
            for (const auto& b : bindings) {
                legal.push_back(b.letter);
                legal += ",";
            }
            throw CodecError("position " + std::to_string(i + 1) + ": '" + symbol +
                             "' not in {" + legal + "-,*}");
        }
        Selection sel;
        sel.characteristic_ids.insert(hit->characteristic->id);
        if (hit->subtype) sel.subtype_id = hit->subtype->id;
        c.selections[attr.id] = std::move(sel);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Canonical serialization

namespace {

using detail::json;

json subtype_to_json(const SubtypeDef& s) {
    json out;
    out["id"] = s.id;
    out["label"] = s.label;
    out["code_letter"] = std::string(1, s.code_letter);
    return out;
}

json characteristic_to_json(const CharacteristicDef& c) {
    json out;
    out["id"] = c.id;
    out["label"] = c.label;
    out["code_letter"] = std::string(1, c.code_letter);
    out["description"] = c.description;
    if (!c.subtypes.empty()) {
        json subs = json::array();
        for (const auto& s : c.subtypes) subs.push_back(subtype_to_json(s));
        out["subtypes"] = std::move(subs);
    }
    return out;
}

json attribute_to_json(const AttributeDef& a) {
    json out;
    out["id"] = a.id;
    out["name"] = a.name;
    out["question"] = a.question;
    out["ordering"] = a.ordering == Ordering::cumulative ? "cumulative" : "unordered";
    out["multi_select_allowed"] = a.multi_select_allowed;
    json chars = json::array();
    for (const auto& c : a.characteristics) chars.push_back(characteristic_to_json(c));
    out["characteristics"] = std::move(chars);
    return out;
}

}  // namespace

std::string serialize_taxonomy(const Taxonomy& t) {
    json doc;
    doc["id"] = t.id;
    doc["name"] = t.name;
    doc["version"] = t.version;
    json attrs = json::array();
    for (const auto& a : t.attributes) attrs.push_back(attribute_to_json(a));
    doc["attributes"] = std::move(attrs);
    return detail::canonical_dump(doc);
}

std::string serialize_classification(const Taxonomy& t, const AssetClassification& c) {
    require_valid(t, c, ValidationMode::partial);

    json doc;
    doc["asset_name"] = c.asset_name;
    doc["taxonomy_id"] = c.taxonomy_id;
    doc["taxonomy_version"] = c.taxonomy_version;

    json selections = json::object();
    for (const auto& [attr_id, sel] : c.selections) {
        const auto* attr = t.find_attribute(attr_id);
        json entry;
        // Characteristic arrays follow the attribute's declaration order.
        std::vector<std::string> ordered(sel.characteristic_ids.begin(),
                                         sel.characteristic_ids.end());
        std::sort(ordered.begin(), ordered.end(), [attr](const auto& x, const auto& y) {
            return attr->characteristic_index(x) < attr->characteristic_index(y);
        });
        entry["characteristics"] = ordered;
        if (sel.subtype_id) entry["subtype"] = *sel.subtype_id;
        if (auto note = c.notes.find(attr_id); note != c.notes.end()) entry["note"] = note->second;
        selections[attr_id] = std::move(entry);
    }
    doc["selections"] = std::move(selections);

    json loose_notes = json::object();
    for (const auto& [attr_id, text] : c.notes) {
        if (!c.selections.contains(attr_id)) loose_notes[attr_id] = text;
    }
    if (!loose_notes.empty()) doc["notes"] = std::move(loose_notes);

    return detail::canonical_dump(doc);
}

}  // namespace taxo
