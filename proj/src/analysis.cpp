#include "taxo/analysis.hpp"

#include <algorithm>
#include <sstream>

#include "json_strict.hpp"

namespace taxo {

std::optional<double> SimilarityScore::value() const {
    if (denominator == 0) return std::nullopt;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

bool CoverageMatrix::is_covered(const std::string& framework_id,
                                const std::string& attribute_id) const {
    auto it = covered.find(framework_id);
    return it != covered.end() && it->second.contains(attribute_id);
}

const FrameworkDescriptor* CoverageMatrix::find_framework(const std::string& framework_id) const {
    for (const auto& f : frameworks)
        if (f.id == framework_id) return &f;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Diff & similarity

namespace {

// Highest selected characteristic index; the comparison key for
// cumulative attributes.
std::size_t max_selected_index(const AttributeDef& attr, const Selection& sel) {
    std::size_t best = 0;
    for (const auto& cid : sel.characteristic_ids)
        best = std::max(best, *attr.characteristic_index(cid));
    return best;
}

bool selections_equal(const AttributeDef& attr, const Selection& a, const Selection& b) {
    if (attr.ordering == Ordering::cumulative)
        return max_selected_index(attr, a) == max_selected_index(attr, b);
    return a == b;
}

}  // namespace

DiffReport diff(const Taxonomy& t, const AssetClassification& a, const AssetClassification& b) {
    require_valid(t, a, ValidationMode::partial);
    require_valid(t, b, ValidationMode::partial);

    DiffReport report;
    for (const auto& attr : t.attributes) {
        auto left = a.selections.find(attr.id);
        auto right = b.selections.find(attr.id);
        if (left == a.selections.end() || right == b.selections.end()) {
            report.undetermined.insert(attr.id);
        } else if (selections_equal(attr, left->second, right->second)) {
            report.shared.insert(attr.id);
        } else {
            report.differing.insert(attr.id);
            report.per_attribute.push_back({attr.id, left->second, right->second});
        }
    }
    return report;
}

SimilarityScore similarity(const Taxonomy& t, const AssetClassification& a,
                           const AssetClassification& b, SimilarityBasis basis) {
    const DiffReport report = diff(t, a, b);
    SimilarityScore score;
    score.basis = basis;
    score.numerator = report.shared.size();
    score.denominator = basis == SimilarityBasis::determined_only
                            ? report.shared.size() + report.differing.size()
                            : t.attributes.size();
    return score;
}

// ---------------------------------------------------------------------------
// Coverage matrix

namespace detail {
const char* embedded_coverage_matrix_json();  // generated translation unit
}

CoverageMatrix parse_coverage_matrix(const std::string& text) {
    const detail::json doc = detail::parse_document(text);
    detail::require_object(doc, "document");
    CoverageMatrix m;
    for (const auto& item : doc.items()) {
        if (!item.value().is_array())
            throw ParseError(item.key() + ": expected an array of attribute ids");
        auto& set = m.covered[item.key()];
        for (const auto& entry : item.value()) {
            if (!entry.is_string())
                throw ParseError(item.key() + ": expected an array of attribute ids");
            if (!set.insert(entry.get<std::string>()).second)
                throw ParseError(item.key() + ": duplicate attribute \"" +
                                 entry.get<std::string>() + "\"");
        }
        m.frameworks.push_back({item.key(), item.key()});
    }
    return m;
}

const CoverageMatrix& builtin_coverage_matrix() {
    static const CoverageMatrix matrix = [] {
        CoverageMatrix m = parse_coverage_matrix(detail::embedded_coverage_matrix_json());
        // Normative column order with display labels; the cell content
        // stays in the data file.
        const std::vector<FrameworkDescriptor> order = {
            {"iso10962", "ISO 10962 CFI"}, {"actus", "ACTUS"},
            {"finma", "FINMA guidance"},   {"oliveira", "Oliveira et al."},
            {"ballandies", "Ballandies et al."}, {"mme", "MME BCP framework"},
            {"itsa", "ITSA ITC"},          {"eea-tti", "EEA TTI taxonomy"},
        };
        if (m.frameworks.size() != order.size())
            throw StoreError("embedded coverage matrix lists " +
                             std::to_string(m.frameworks.size()) + " frameworks, expected " +
                             std::to_string(order.size()));
        for (const auto& f : order) {
            if (!m.covered.contains(f.id))
                throw StoreError("embedded coverage matrix is missing framework \"" + f.id + "\"");
        }
        m.frameworks = order;
        return m;
    }();
    return matrix;
}

FrameworkCoverage framework_coverage(const CoverageMatrix& m, const std::string& framework_id,
                                     const AssetClassification& c) {
    if (!m.find_framework(framework_id))
        throw NotFoundError("unknown framework \"" + framework_id + "\"");
    const auto& covered_attrs = m.covered.at(framework_id);
    FrameworkCoverage out;
    for (const auto& [attr_id, _] : c.selections) {
        if (covered_attrs.contains(attr_id))
            out.covered.insert(attr_id);
        else
            out.dropped.insert(attr_id);
    }
    return out;
}

CoverageCounts coverage_counts(const CoverageMatrix& m) {
    CoverageCounts counts;
    for (const auto& f : m.frameworks) {
        const auto& covered_attrs = m.covered.at(f.id);
        counts.per_framework[f.id] = covered_attrs.size();
        for (const auto& attr_id : covered_attrs) ++counts.per_attribute[attr_id];
    }
    return counts;
}

// ---------------------------------------------------------------------------
// Diff rendering

std::string format_selection(const Selection& s) {
    std::string out;
    for (const auto& cid : s.characteristic_ids) {
        if (!out.empty()) out += "+";
        out += cid;
    }
    if (s.subtype_id) out += "/" + *s.subtype_id;
    return out;
}

namespace {

// Attribute ids of `ids` in taxonomy order, comma-joined.
std::string join_in_order(const Taxonomy& t, const std::set<std::string>& ids) {
    std::string out;
    for (const auto& attr : t.attributes) {
        if (!ids.contains(attr.id)) continue;
        if (!out.empty()) out += ", ";
        out += attr.id;
    }
    return out.empty() ? "(none)" : out;
}

std::string format_score(const SimilarityScore& score) {
    std::ostringstream os;
    os << score.numerator << "/" << score.denominator;
    if (auto v = score.value())
        os << " = " << *v;
    else
        os << " (undefined)";
    os << (score.basis == SimilarityBasis::determined_only ? " [determined attributes]"
                                                           : " [all attributes]");
    return os.str();
}

}  // namespace

std::string format_diff_text(const Taxonomy& t, const DiffReport& report,
                             const std::optional<SimilarityScore>& score) {
    std::ostringstream os;
    os << "shared (" << report.shared.size() << "): " << join_in_order(t, report.shared) << "\n";
    os << "differing (" << report.differing.size() << "):";
    if (report.differing.empty()) {
        os << " (none)\n";
    } else {
        os << "\n";
        std::size_t attr_w = 0, left_w = 0;
        for (const auto& d : report.per_attribute) {
            attr_w = std::max(attr_w, d.attribute_id.size());
            left_w = std::max(left_w, format_selection(d.left).size());
        }
        for (const auto& d : report.per_attribute) {
            const std::string left = format_selection(d.left);
            os << "  " << d.attribute_id << std::string(attr_w - d.attribute_id.size() + 2, ' ')
               << left << std::string(left_w - left.size() + 2, ' ') << "| "
               << format_selection(d.right) << "\n";
        }
    }
    os << "undetermined (" << report.undetermined.size()
       << "): " << join_in_order(t, report.undetermined) << "\n";
    if (score) os << "similarity: " << format_score(*score) << "\n";
    return os.str();
}

namespace {

detail::json selection_to_json(const Selection& s) {
    detail::json out;
    out["characteristics"] = std::vector<std::string>(s.characteristic_ids.begin(),
                                                      s.characteristic_ids.end());
    if (s.subtype_id) out["subtype"] = *s.subtype_id;
    return out;
}

}  // namespace

std::string format_diff_json(const Taxonomy& t, const DiffReport& report,
                             const std::optional<SimilarityScore>& score) {
    using detail::json;
    json doc;
    auto in_order = [&t](const std::set<std::string>& ids) {
        std::vector<std::string> out;
        for (const auto& attr : t.attributes)
            if (ids.contains(attr.id)) out.push_back(attr.id);
        return out;
    };
    doc["shared"] = in_order(report.shared);
    doc["undetermined"] = in_order(report.undetermined);
    json differing = json::array();
    for (const auto& d : report.per_attribute) {
        json entry;
        entry["attribute"] = d.attribute_id;
        entry["left"] = selection_to_json(d.left);
        entry["right"] = selection_to_json(d.right);
        differing.push_back(std::move(entry));
    }
    doc["differing"] = std::move(differing);
    if (score) {
        json s;
        s["numerator"] = score->numerator;
        s["denominator"] = score->denominator;
        s["basis"] = score->basis == SimilarityBasis::determined_only ? "determined_only"
                                                                      : "all_attributes";
        if (auto v = score->value())
            s["value"] = *v;
        else
            s["value"] = nullptr;
        doc["similarity"] = std::move(s);
    }
    return detail::canonical_dump(doc);
}

}  // namespace taxo
