#pragma once

// Threat-category grouping, CVSS-based ranking and the base-versus-overall
// comparison.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sdnsec/catalog.hpp"
#include "sdnsec/cvss.hpp"
#include "sdnsec/stride.hpp"
#include "sdnsec/topology.hpp"

namespace sdnsec {

enum class RootThreat { UnauthorizedAccess, InformationDisclosure, DenialOfService };

inline constexpr RootThreat kAllRoots[] = {RootThreat::UnauthorizedAccess,
                                           RootThreat::InformationDisclosure,
                                           RootThreat::DenialOfService};

std::string_view to_string(RootThreat r);
std::optional<RootThreat> root_threat_from_string(std::string_view s);

struct RootThreatInfo {
    std::string id;
    std::string label;
    bool unpredictable = false;
    std::string reason;

    bool operator==(const RootThreatInfo&) const = default;
};

struct ThreatCategoryRecord {
    std::string id;  // TC<n>
    std::string name;
    cvss::Score base;
    cvss::Score overall;
    cvss::Severity severity = cvss::Severity::None;
    int rank = 0;
    RootThreat root = RootThreat::UnauthorizedAccess;
    std::optional<cvss::Vector> vector;
    std::vector<std::string> threats;  // catalog threat ids
    std::vector<std::string> members;  // candidate threat ids

    bool operator==(const ThreatCategoryRecord&) const = default;
};

struct Exclusion {
    std::string subject;
    std::string reason;

    bool operator==(const Exclusion&) const = default;
};

struct RankedAssessment {
    std::vector<ThreatCategoryRecord> records;  // rank order
    std::vector<Exclusion> excluded_roots;
    std::vector<Exclusion> excluded_candidates;

    bool operator==(const RankedAssessment&) const = default;
};

struct CategoryTable {
    std::vector<RootThreatInfo> roots;
    std::vector<ThreatCategoryRecord> categories;
};

// `root` and `category` blocks; a stated severity must match the base score.
CategoryTable parse_category_table(std::string_view text);
const CategoryTable& builtin_category_table();
std::vector<ThreatCategoryRecord> builtin_threat_categories();
std::vector<RootThreatInfo> builtin_root_threats();

// Dense ranking on base score, descending; ties share a rank and are
// ordered by id.
RankedAssessment rank(std::vector<ThreatCategoryRecord> records);

enum class EnvironmentalEffect { GreaterThanAssumed, LessThanAssumed, AsAssumed };
std::string_view to_string(EnvironmentalEffect e);
EnvironmentalEffect environmental_effect(const ThreatCategoryRecord& r);

struct ScoreCheck {
    std::string category;
    cvss::Score stored_base;
    cvss::Score computed_base;
    cvss::Score stored_overall;
    cvss::Score computed_overall;
    bool mismatch() const {
        return stored_base != computed_base || stored_overall != computed_overall;
    }
};

// Recomputes base and overall for a record carrying a vector.
std::optional<ScoreCheck> check_scores(const ThreatCategoryRecord& r);

enum class GroupingScope { Any, Single, Multiple, All, Partial };
std::string_view to_string(GroupingScope s);

struct GroupingRow {
    std::string name;
    RuleTarget subject;  // Component or FlowInterface
    StrideCategory category = StrideCategory::Spoofing;
    GroupingScope scope = GroupingScope::Any;
    std::optional<std::string> category_id;  // nullopt: excluded
    std::string reason;
};

using GroupingTable = std::vector<GroupingRow>;

GroupingTable parse_grouping_table(std::string_view text);
const GroupingTable& default_grouping_table();

class GroupingError : public std::runtime_error {
public:
    enum class Code { UnmappedCandidate, UnknownSubject, UnknownCategory, UnknownThreat };
    GroupingError(Code code, const std::string& what);
    Code code() const { return code_; }

private:
    Code code_;
};

struct GroupingResult {
    std::vector<ThreatCategoryRecord> records;  // id order, only TCs with members
    std::vector<Exclusion> excluded;
};

// Every candidate lands in exactly one category or in `excluded`. The model
// supplies each subject's kind or interface and the scope qualifier.
GroupingResult group_into_categories(const std::vector<CandidateThreat>& candidates,
                                     const SdnModel& model, const ThreatCatalog& catalog,
                                     const GroupingTable& table,
                                     const std::vector<ThreatCategoryRecord>& definitions);

struct RootPartition {
    std::vector<RootThreatInfo> scored;
    std::vector<Exclusion> excluded;
};

RootPartition exclude_unpredictable(const std::vector<RootThreatInfo>& roots);

// Stage 2 in one call: grouping, root exclusion and ranking.
RankedAssessment assess(const std::vector<CandidateThreat>& candidates, const SdnModel& model,
                        const ThreatCatalog& catalog, const GroupingTable& table,
                        const CategoryTable& categories);

// Rank | TC | Name | Base | Overall | Severity
std::string render_ranking_table(const RankedAssessment& a);

}  // namespace sdnsec
