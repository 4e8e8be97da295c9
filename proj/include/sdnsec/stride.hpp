#pragma once

// Per-element STRIDE analysis: a rule table applied to every component and
// data flow of a model.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sdnsec/topology.hpp"

namespace sdnsec {

enum class StrideCategory {
    Spoofing,
    Tampering,
    Repudiation,
    InformationDisclosure,
    DenialOfService,
    ElevationOfPrivilege,
};

inline constexpr StrideCategory kAllStride[] = {
    StrideCategory::Spoofing,        StrideCategory::Tampering,
    StrideCategory::Repudiation,     StrideCategory::InformationDisclosure,
    StrideCategory::DenialOfService, StrideCategory::ElevationOfPrivilege,
};

std::string_view to_string(StrideCategory c);
char stride_letter(StrideCategory c);
// Accepts the full name or the one-letter code.
std::optional<StrideCategory> stride_from_string(std::string_view s);

struct RuleTarget {
    enum class Kind { Component, AnyFlow, UnencryptedFlow, BoundaryCrossingFlow, FlowInterface };
    Kind kind = Kind::AnyFlow;
    ComponentKind component = ComponentKind::Host;  // Kind::Component
    Interface interface = Interface::DataPlane;     // Kind::FlowInterface

    bool matches(const Component& c) const;
    bool matches(const DataFlow& f, const SdnModel& m) const;
    bool targets_flows() const { return kind != Kind::Component; }

    // "component:<Kind>", "flow:any", "flow:unencrypted", "flow:crossing",
    // "flow:<interface>"
    static std::optional<RuleTarget> parse(std::string_view s);
    std::string to_string() const;

    bool operator==(const RuleTarget&) const = default;
};

struct StrideRule {
    std::string id;
    RuleTarget target;
    StrideCategory category = StrideCategory::Spoofing;
    // "{subject}" and "{protocol}" are substituted per finding.
    std::string description;
    bool enabled = true;

    bool operator==(const StrideRule&) const = default;
};

struct CandidateThreat {
    std::string id;  // "<subject>:<rule id>"
    std::string subject;
    StrideCategory category = StrideCategory::Spoofing;
    std::string description;
    std::string rule_id;

    bool operator==(const CandidateThreat&) const = default;
};

std::vector<StrideRule> default_rules();

// Rule override file: `rule <id>` blocks with target, category, description
// and enabled. A block whose id exists in `base` replaces that rule; new ids
// are appended.
std::vector<StrideRule> apply_rule_overrides(std::vector<StrideRule> base, std::string_view text);

// Requires a valid model (throws InvalidModel). One finding per element and
// matching enabled rule, sorted by (subject, category, rule id).
std::vector<CandidateThreat> analyze(const SdnModel& m, const std::vector<StrideRule>& rules);

struct FilterResult {
    std::vector<CandidateThreat> kept;
    std::vector<std::string> rejected;        // rule ids that removed something
    std::vector<std::string> unknown_rejects;  // warning: matched nothing
};

FilterResult filter_candidates(const std::vector<CandidateThreat>& cs,
                               const std::set<std::string>& reject);

}  // namespace sdnsec
