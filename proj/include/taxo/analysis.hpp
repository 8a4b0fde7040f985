#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taxo/classification.hpp"
#include "taxo/taxonomy.hpp"

namespace taxo {

/// The two selections of a differing attribute, side by side.
struct AttributeDiff {
    std::string attribute_id;
    Selection left;
    Selection right;

    friend bool operator==(const AttributeDiff&, const AttributeDiff&) = default;
};

/// Partition of all attribute ids into shared (both set, equal),
/// differing (both set, unequal) and undetermined (at least one side
/// unset). The three sets are disjoint and cover the whole taxonomy.
struct DiffReport {
    std::set<std::string> shared;
    std::set<std::string> differing;
    std::set<std::string> undetermined;
    std::vector<AttributeDiff> per_attribute;  ///< differing attributes, taxonomy order
};

enum class SimilarityBasis { determined_only, all_attributes };

/// |shared| over a basis-dependent denominator, kept as a rational.
/// `value()` is absent exactly when the denominator is zero
/// (determined-only basis with no mutually set attributes).
struct SimilarityScore {
    std::size_t numerator = 0;
    std::size_t denominator = 0;
    SimilarityBasis basis = SimilarityBasis::determined_only;

    std::optional<double> value() const;
};

struct FrameworkDescriptor {
    std::string id;
    std::string citation_label;

    friend bool operator==(const FrameworkDescriptor&, const FrameworkDescriptor&) = default;
};

/// Which prior classification frameworks cover which taxonomy attributes:
/// a boolean matrix keyed (framework id, attribute id). Immutable once
/// loaded.
struct CoverageMatrix {
    std::vector<FrameworkDescriptor> frameworks;
    std::map<std::string, std::set<std::string>> covered;

    bool is_covered(const std::string& framework_id, const std::string& attribute_id) const;
    const FrameworkDescriptor* find_framework(const std::string& framework_id) const;
};

struct FrameworkCoverage {
    std::set<std::string> covered;  ///< attributes set in c and covered by the framework
    std::set<std::string> dropped;  ///< attributes set in c but not covered
};

struct CoverageCounts {
    std::map<std::string, std::size_t> per_framework;  ///< attributes covered by each framework
    std::map<std::string, std::size_t> per_attribute;  ///< frameworks covering each attribute
};

/// Compares two classifications attribute by attribute. Cumulative
/// attributes compare by highest selected index; everything else by set
/// equality, subtype-sensitive. Symmetric in a and b. Both inputs must be
/// valid in partial mode and reference the same taxonomy (throws
/// ValidationFailure otherwise).
DiffReport diff(const Taxonomy& t, const AssetClassification& a, const AssetClassification& b);

SimilarityScore similarity(const Taxonomy& t, const AssetClassification& a,
                           const AssetClassification& b, SimilarityBasis basis);

/// The embedded 8-framework coverage matrix. Immutable singleton.
const CoverageMatrix& builtin_coverage_matrix();

/// Parses a coverage matrix document: {framework_id: [attribute_id, ...]}.
/// Frameworks are ordered by sorted id; citation labels default to the id.
CoverageMatrix parse_coverage_matrix(const std::string& text);

/// Splits the set attributes of `c` into those covered and dropped by one
/// framework. Throws NotFoundError for an unknown framework id.
FrameworkCoverage framework_coverage(const CoverageMatrix& m, const std::string& framework_id,
                                     const AssetClassification& c);

CoverageCounts coverage_counts(const CoverageMatrix& m);

/// Aligned two-column text rendering of a diff report.
std::string format_diff_text(const Taxonomy& t, const DiffReport& report,
                             const std::optional<SimilarityScore>& score = std::nullopt);

/// Canonical JSON rendering of a diff report (2-space indent, trailing
/// newline).
std::string format_diff_json(const Taxonomy& t, const DiffReport& report,
                             const std::optional<SimilarityScore>& score = std::nullopt);

/// Short human-readable form of one selection, e.g. "dlt/native" or
/// "digital+physical".
std::string format_selection(const Selection& s);

}  // namespace taxo
