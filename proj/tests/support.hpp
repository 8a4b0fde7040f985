// Shared helpers for the test binaries: repository paths, deterministic
// random generators for taxonomies/classifications, and an independent
// cell-by-cell diff oracle.
#pragma once

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "taxo/analysis.hpp"
#include "taxo/classification.hpp"
#include "taxo/taxonomy.hpp"

namespace support {

inline std::string source_path(const std::string& relative) {
    return std::string(TAXO_SOURCE_DIR) + "/" + relative;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// A minimal n-attribute taxonomy with k plain characteristics each:
// attribute ids a0..a(n-1), characteristic ids a<i>_c0..; letters A, B, ...
inline taxo::Taxonomy toy_taxonomy(std::size_t attributes, std::size_t characteristics) {
    taxo::Taxonomy t;
    t.id = "toy";
    t.name = "Toy";
    t.version = "1";
    for (std::size_t i = 0; i < attributes; ++i) {
        taxo::AttributeDef attr;
        attr.id = "a" + std::to_string(i);
        attr.name = "Attribute " + std::to_string(i);
        attr.question = "Which value of " + attr.id + "?";
        for (std::size_t j = 0; j < characteristics; ++j) {
            taxo::CharacteristicDef ch;
            ch.id = attr.id + "_c" + std::to_string(j);
            ch.label = "Cell " + std::to_string(j);
            ch.code_letter = static_cast<char>('A' + j);
            ch.description = "Cell " + std::to_string(j) + " of " + attr.id + ".";
            attr.characteristics.push_back(std::move(ch));
        }
        t.attributes.push_back(std::move(attr));
    }
    return t;
}

// A random, structurally valid taxonomy: 2-6 characteristics per
// attribute, occasional subtypes and cumulative/single-select attributes.
inline taxo::Taxonomy random_taxonomy(std::mt19937_64& rng, std::size_t attributes) {
    taxo::Taxonomy t;
    t.id = "random-taxonomy";
    t.name = "Random Taxonomy";
    t.version = "1";
    std::uniform_int_distribution<std::size_t> n_chars(2, 6);
    std::uniform_int_distribution<int> percent(0, 99);

    for (std::size_t i = 0; i < attributes; ++i) {
        taxo::AttributeDef attr;
        attr.id = "attr_" + std::to_string(i);
        attr.name = "Attribute " + std::to_string(i);
        attr.question = "Which value of attribute " + std::to_string(i) + "?";
        attr.multi_select_allowed = percent(rng) < 70;

        std::string letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
        std::shuffle(letters.begin(), letters.end(), rng);
        std::size_t next_letter = 0;

        const std::size_t count = n_chars(rng);
        for (std::size_t j = 0; j < count; ++j) {
            taxo::CharacteristicDef ch;
            ch.id = "c_" + std::to_string(i) + "_" + std::to_string(j);
            ch.label = "Cell " + std::to_string(i) + "/" + std::to_string(j);
            ch.code_letter = letters[next_letter++];
            ch.description = "Random cell " + std::to_string(j) + ".";
            // A subtyped characteristic reuses its own letter for the
            // first subtype, keeping every letter decodable.
            if (percent(rng) < 25) {
                ch.subtypes.push_back({ch.id + "_s0", "Subtype 0", ch.code_letter});
                ch.subtypes.push_back({ch.id + "_s1", "Subtype 1", letters[next_letter++]});
            }
            attr.characteristics.push_back(std::move(ch));
        }
        if (percent(rng) < 20) {
            const bool any_subtypes = std::any_of(
                attr.characteristics.begin(), attr.characteristics.end(),
                [](const taxo::CharacteristicDef& c) { return !c.subtypes.empty(); });
            if (!any_subtypes) attr.ordering = taxo::Ordering::cumulative;
        }
        t.attributes.push_back(std::move(attr));
    }
    return t;
}

// A random classification that is valid in partial mode by construction.
// single_select limits every set attribute to one characteristic and
// resolves a subtype whenever the characteristic declares any.
inline taxo::AssetClassification random_classification(std::mt19937_64& rng,
                                                       const taxo::Taxonomy& t,
                                                       bool single_select) {
    taxo::AssetClassification c;
    c.asset_name = "Random asset";
    c.taxonomy_id = t.id;
    c.taxonomy_version = t.version;
    std::uniform_int_distribution<int> percent(0, 99);

    for (const auto& attr : t.attributes) {
        if (percent(rng) < 25) continue;  // unset
        taxo::Selection sel;
        if (single_select || !attr.multi_select_allowed || percent(rng) < 60) {
            std::uniform_int_distribution<std::size_t> pick(0, attr.characteristics.size() - 1);
            const auto& ch = attr.characteristics[pick(rng)];
            sel.characteristic_ids.insert(ch.id);
            if (!ch.subtypes.empty()) {
                std::uniform_int_distribution<std::size_t> sub(0, ch.subtypes.size() - 1);
                sel.subtype_id = ch.subtypes[sub(rng)].id;
            }
        } else {
            std::uniform_int_distribution<std::size_t> n_pick(2, attr.characteristics.size());
            std::vector<std::size_t> order(attr.characteristics.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::shuffle(order.begin(), order.end(), rng);
            const std::size_t n = std::min(n_pick(rng), order.size());
            for (std::size_t k = 0; k < n; ++k)
                sel.characteristic_ids.insert(attr.characteristics[order[k]].id);
        }
        c.selections[attr.id] = std::move(sel);
    }
    return c;
}

// Independent diff oracle: walks every cell of every attribute and
// compares raw membership, with no shortcuts shared with the library
// implementation. Valid for taxonomies without cumulative attributes or
// subtypes (the toy taxonomies used in oracle tests).
inline taxo::DiffReport oracle_diff(const taxo::Taxonomy& t, const taxo::AssetClassification& a,
                                    const taxo::AssetClassification& b) {
    taxo::DiffReport report;
    for (const auto& attr : t.attributes) {
        const auto left = a.selections.find(attr.id);
        const auto right = b.selections.find(attr.id);
        if (left == a.selections.end() || right == b.selections.end()) {
            report.undetermined.insert(attr.id);
            continue;
        }
        bool equal = true;
        for (const auto& ch : attr.characteristics) {
            const bool in_left = left->second.characteristic_ids.contains(ch.id);
            const bool in_right = right->second.characteristic_ids.contains(ch.id);
            if (in_left != in_right) equal = false;
        }
        if (equal) {
            report.shared.insert(attr.id);
        } else {
            report.differing.insert(attr.id);
            report.per_attribute.push_back({attr.id, left->second, right->second});
        }
    }
    return report;
}

// Every subset-or-unset state of one toy attribute: unset plus each
// non-empty characteristic subset, as (set?, selection) pairs.
inline std::vector<std::optional<taxo::Selection>> attribute_states(const taxo::AttributeDef& attr) {
    std::vector<std::optional<taxo::Selection>> states;
    states.push_back(std::nullopt);
    const std::size_t n = attr.characteristics.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        taxo::Selection sel;
        for (std::size_t j = 0; j < n; ++j)
            if (mask & (std::size_t{1} << j)) sel.characteristic_ids.insert(attr.characteristics[j].id);
        states.push_back(std::move(sel));
    }
    return states;
}

// Cartesian product of attribute states: every possible classification
// over a small taxonomy, including partially and fully unset ones.
inline std::vector<taxo::AssetClassification> all_classifications(const taxo::Taxonomy& t) {
    std::vector<taxo::AssetClassification> out;
    taxo::AssetClassification base;
    base.asset_name = "Enumerated";
    base.taxonomy_id = t.id;
    base.taxonomy_version = t.version;
    out.push_back(base);
    for (const auto& attr : t.attributes) {
        std::vector<taxo::AssetClassification> next;
        for (const auto& partial : out) {
            for (const auto& state : attribute_states(attr)) {
                taxo::AssetClassification c = partial;
                if (state) c.selections[attr.id] = *state;
                next.push_back(std::move(c));
            }
        }
        out = std::move(next);
    }
    return out;
}

}  // namespace support
