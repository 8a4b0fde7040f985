#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taxo/taxonomy.hpp"

namespace taxo {

/// The characteristics an asset selects for one attribute. More than one
/// characteristic is allowed only where the attribute permits it; a
/// subtype may be named only when exactly one characteristic is selected
/// and that characteristic declares it.
struct Selection {
    std::set<std::string> characteristic_ids;
    std::optional<std::string> subtype_id;

    friend bool operator==(const Selection&, const Selection&) = default;
};

/// One asset's assignment of selections to taxonomy attributes. Attributes
/// absent from `selections` are unset. `notes` carries free-text
/// annotations per attribute id, for set and unset attributes alike.
struct AssetClassification {
    std::optional<std::string> asset_id;
    std::string asset_name;
    std::string taxonomy_id;
    std::string taxonomy_version;
    std::map<std::string, Selection> selections;
    std::map<std::string, std::string> notes;

    friend bool operator==(const AssetClassification&, const AssetClassification&) = default;
};

enum class ValidationMode { strict, partial };

struct ValidationIssue {
    std::string code;          ///< e.g. "unset_attribute", "unknown_characteristic"
    std::string attribute_id;  ///< empty for document-level issues
    std::string message;

    friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

/// A soft consistency warning. Lints never invalidate a classification.
struct LintFinding {
    std::string rule_id;
    std::set<std::string> attributes_involved;
    std::string message;

    friend bool operator==(const LintFinding&, const LintFinding&) = default;
};

struct ValidationReport {
    ValidationMode mode = ValidationMode::partial;
    std::vector<ValidationIssue> errors;
    std::vector<LintFinding> lint_findings;

    bool is_valid() const { return errors.empty(); }
};

/// Thrown where a valid classification is a precondition (encode, diff,
/// registry writes). Carries the failing report.
struct ValidationFailure : Error {
    ValidationReport report;
    explicit ValidationFailure(ValidationReport r);
};

/// A registered consistency rule. `check` returns a finding when the rule
/// fires; rules must only consider attributes that are set.
struct LintRule {
    std::string id;
    std::string description;
    std::function<std::optional<LintFinding>(const Taxonomy&, const AssetClassification&)> check;
};

/// The built-in rule set (L1..L4).
const std::vector<LintRule>& builtin_lint_rules();

/// Runs the built-in rules over the set attributes of `c`.
std::vector<LintFinding> lint(const Taxonomy& t, const AssetClassification& c);

/// Runs an explicit rule set (custom rules register by passing them here).
std::vector<LintFinding> lint(const Taxonomy& t, const AssetClassification& c,
                              const std::vector<LintRule>& rules);

/// Validates `c` against `t`. Strict mode additionally errors on every
/// unset attribute. Lints run in both modes over set attributes only.
/// Throws ValidationFailure if `c` references a different taxonomy
/// id/version than `t`.
ValidationReport validate_classification(const Taxonomy& t, const AssetClassification& c,
                                         ValidationMode mode);

/// Throws ValidationFailure unless `c` validates cleanly in `mode`.
void require_valid(const Taxonomy& t, const AssetClassification& c, ValidationMode mode);

/// Parses a classification document (strict UTF-8 JSON). Throws ParseError.
AssetClassification parse_classification(const std::string& text);

/// Incremental assembly of an immutable classification value.
class ClassificationBuilder {
public:
    explicit ClassificationBuilder(const Taxonomy& t, std::string asset_name);

    ClassificationBuilder& select(const std::string& attribute_id,
                                  std::set<std::string> characteristic_ids,
                                  std::optional<std::string> subtype_id = std::nullopt);
    ClassificationBuilder& note(const std::string& attribute_id, std::string text);

    AssetClassification build() const { return value_; }

private:
    AssetClassification value_;
};

/// The six example assets shipped as the reference corpus, in order:
/// cash, bitcoin, ether, crowdlitoken, cryptokitties, traditional_share.
/// All validate in partial mode against the built-in taxonomy with zero
/// errors and zero lint findings.
const std::vector<AssetClassification>& fixture_classifications();

/// Fixture lookup by snake-case name (e.g. "traditional_share");
/// nullptr when unknown.
const AssetClassification* fixture_classification(const std::string& name);

/// File-name stems for the fixture corpus, in corpus order.
const std::vector<std::string>& fixture_names();

}  // namespace taxo
