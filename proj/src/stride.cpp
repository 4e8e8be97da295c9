#include "sdnsec/stride.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <tuple>

#include "sdnsec/blocks.hpp"

namespace sdnsec {

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
}

std::string render(const StrideRule& rule, std::string_view subject, std::string_view protocol) {
    auto text = rule.description;
    replace_all(text, "{subject}", subject);
    replace_all(text, "{protocol}", protocol);
    return text;
}

StrideRule component_rule(std::string id, ComponentKind kind, StrideCategory cat,
                          std::string description) {
    RuleTarget t;
    t.kind = RuleTarget::Kind::Component;
    t.component = kind;
    return StrideRule{std::move(id), t, cat, std::move(description), true};
}

StrideRule flow_rule(std::string id, RuleTarget::Kind kind, StrideCategory cat,
                     std::string description) {
    RuleTarget t;
    t.kind = kind;
    return StrideRule{std::move(id), t, cat, std::move(description), true};
}

}  // namespace

std::string_view to_string(StrideCategory c) {
    switch (c) {
        case StrideCategory::Spoofing: return "Spoofing";
        case StrideCategory::Tampering: return "Tampering";
        case StrideCategory::Repudiation: return "Repudiation";
        case StrideCategory::InformationDisclosure: return "InformationDisclosure";
        case StrideCategory::DenialOfService: return "DenialOfService";
        case StrideCategory::ElevationOfPrivilege: return "ElevationOfPrivilege";
    }
    return "?";
}

char stride_letter(StrideCategory c) {
    static constexpr std::array kLetters{'S', 'T', 'R', 'I', 'D', 'E'};
    return kLetters[static_cast<std::size_t>(c)];
}

std::optional<StrideCategory> stride_from_string(std::string_view s) {
    for (auto c : kAllStride) {
        if (s == to_string(c) || (s.size() == 1 && s[0] == stride_letter(c))) return c;
    }
    return std::nullopt;
}

bool RuleTarget::matches(const Component& c) const {
    return kind == Kind::Component && c.kind == component;
}

bool RuleTarget::matches(const DataFlow& f, const SdnModel& m) const {
    switch (kind) {
        case Kind::Component: return false;
        case Kind::AnyFlow: return true;
        case Kind::UnencryptedFlow: return !f.encrypted;
        case Kind::BoundaryCrossingFlow: return m.crosses_boundary(f);
        case Kind::FlowInterface: return f.interface == interface;
    }
    return false;
}

std::optional<RuleTarget> RuleTarget::parse(std::string_view s) {
    RuleTarget t;
    if (s.starts_with("component:")) {
        const auto k = component_kind_from_string(s.substr(10));
        if (!k) return std::nullopt;
        t.kind = Kind::Component;
        t.component = *k;
        return t;
    }
    if (!s.starts_with("flow:")) return std::nullopt;
    const auto rest = s.substr(5);
    if (rest == "any") {
        t.kind = Kind::AnyFlow;
    } else if (rest == "unencrypted") {
        t.kind = Kind::UnencryptedFlow;
    } else if (rest == "crossing") {
        t.kind = Kind::BoundaryCrossingFlow;
    } else if (const auto i = interface_from_string(rest)) {
        t.kind = Kind::FlowInterface;
        t.interface = *i;
    } else {
        return std::nullopt;
    }
    return t;
}

std::string RuleTarget::to_string() const {
    switch (kind) {
        case Kind::Component: return "component:" + std::string(sdnsec::to_string(component));
        case Kind::AnyFlow: return "flow:any";
        case Kind::UnencryptedFlow: return "flow:unencrypted";
        case Kind::BoundaryCrossingFlow: return "flow:crossing";
        case Kind::FlowInterface: return "flow:" + std::string(sdnsec::to_string(interface));
    }
    return "?";
}

std::vector<StrideRule> default_rules() {
    using C = ComponentKind;
    using S = StrideCategory;
    using K = RuleTarget::Kind;
    return {
        component_rule("app.S", C::Application, S::Spoofing,
                       "Spoofed user or tenant identity against application {subject}"),
        component_rule("app.T", C::Application, S::Tampering,
                       "Tampering with policies submitted through application {subject}"),
        component_rule("app.R", C::Application, S::Repudiation,
                       "Requests issued through application {subject} cannot be attributed"),
        component_rule("app.I", C::Application, S::InformationDisclosure,
                       "Disclosure of tenant or network data through application {subject}"),
        component_rule("app.D", C::Application, S::DenialOfService,
                       "Denial of service against application {subject}"),
        component_rule("app.E", C::Application, S::ElevationOfPrivilege,
                       "Tenant user gains provider permissions on application {subject}"),

        component_rule("ctl.S", C::Controller, S::Spoofing,
                       "Spoofed identity of controller {subject} towards switches or applications"),
        component_rule("ctl.T", C::Controller, S::Tampering,
                       "Tampering with flow rules or configuration on controller {subject}"),
        component_rule("ctl.R", C::Controller, S::Repudiation,
                       "Changes made on controller {subject} cannot be attributed"),
        component_rule("ctl.I", C::Controller, S::InformationDisclosure,
                       "Disclosure of topology, flow tables or credentials held by controller "
                       "{subject}"),
        component_rule("ctl.D", C::Controller, S::DenialOfService,
                       "Resource exhaustion of controller {subject} halts flow setup"),
        component_rule("ctl.E", C::Controller, S::ElevationOfPrivilege,
                       "Privilege escalation to administrator on controller {subject}"),

        component_rule("fd.S", C::ForwardingDevice, S::Spoofing,
                       "Rogue device impersonates switch {subject} towards the controller"),
        component_rule("fd.T", C::ForwardingDevice, S::Tampering,
                       "Tampering with the flow table of switch {subject}"),
        component_rule("fd.R", C::ForwardingDevice, S::Repudiation,
                       "Flow table changes on switch {subject} are not logged"),
        component_rule("fd.I", C::ForwardingDevice, S::InformationDisclosure,
                       "Disclosure of traffic or flow table contents on switch {subject}"),
        component_rule("fd.D", C::ForwardingDevice, S::DenialOfService,
                       "Flow table or buffer exhaustion on switch {subject}"),
        component_rule("fd.E", C::ForwardingDevice, S::ElevationOfPrivilege,
                       "Unauthorized administrative access to switch {subject}"),

        component_rule("host.S", C::Host, S::Spoofing, "Address spoofing by host {subject}"),
        component_rule("host.I", C::Host, S::InformationDisclosure,
                       "Disclosure of tenant data on host {subject}"),
        component_rule("host.D", C::Host, S::DenialOfService,
                       "Denial of service against host {subject}"),

        flow_rule("flow.unencrypted.I", K::UnencryptedFlow, S::InformationDisclosure,
                  "Eavesdropping on unencrypted {protocol} flow {subject}"),
        flow_rule("flow.unencrypted.T", K::UnencryptedFlow, S::Tampering,
                  "Modification of unencrypted {protocol} flow {subject} in transit"),
        flow_rule("flow.any.D", K::AnyFlow, S::DenialOfService,
                  "Flooding or interruption of {protocol} flow {subject}"),
        flow_rule("flow.crossing.S", K::BoundaryCrossingFlow, S::Spoofing,
                  "Spoofed endpoint on {protocol} flow {subject} crossing a trust boundary"),
    };
}

std::vector<StrideRule> apply_rule_overrides(std::vector<StrideRule> base, std::string_view text) {
    static constexpr std::array<std::string_view, 4> kKeys{"target", "category", "description",
                                                           "enabled"};
    for (const auto& b : parse_blocks(text)) {
        if (b.keyword != "rule") {
            throw SyntaxError(b.line, 1, "unknown section '" + b.keyword + "' in rule file");
        }
        require_keys(b, kKeys);
        require_unique_keys(b);
        auto it = std::find_if(base.begin(), base.end(),
                               [&](const StrideRule& r) { return r.id == b.name; });
        StrideRule rule;
        if (it != base.end()) {
            rule = *it;
        } else {
            rule.id = b.name;
            // New rules must be complete.
            require_entry(b, "target");
            require_entry(b, "category");
            require_entry(b, "description");
        }
        if (const auto* e = b.find("target")) {
            const auto t = RuleTarget::parse(e->value);
            if (!t) throw SyntaxError(e->line, e->column, "unknown rule target '" + e->value + "'");
            rule.target = *t;
        }
        if (const auto* e = b.find("category")) {
            const auto c = stride_from_string(e->value);
            if (!c) throw SyntaxError(e->line, e->column, "unknown category '" + e->value + "'");
            rule.category = *c;
        }
        if (const auto* e = b.find("description")) rule.description = e->value;
        if (const auto* e = b.find("enabled")) rule.enabled = parse_bool(*e);
        if (it != base.end()) {
            *it = std::move(rule);
        } else {
            base.push_back(std::move(rule));
        }
    }
    return base;
}

std::vector<CandidateThreat> analyze(const SdnModel& m, const std::vector<StrideRule>& rules) {
    require_valid(m);
    std::vector<CandidateThreat> out;
    auto emit = [&](const std::string& subject, std::string_view protocol, const StrideRule& r) {
        out.push_back(CandidateThreat{subject + ":" + r.id, subject, r.category,
                                      render(r, subject, protocol), r.id});
    };
    for (const auto& r : rules) {
        if (!r.enabled) continue;
        if (r.target.targets_flows()) {
            for (const auto& f : m.flows) {
                if (r.target.matches(f, m)) emit(f.id, f.protocol, r);
            }
        } else {
            for (const auto& c : m.components) {
                if (r.target.matches(c)) emit(c.id, "", r);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const CandidateThreat& a, const CandidateThreat& b) {
        return std::tie(a.subject, a.category, a.rule_id) <
               std::tie(b.subject, b.category, b.rule_id);
    });
    // Two rules with the same id would produce indistinguishable findings.
    out.erase(std::unique(out.begin(), out.end(),
                          [](const CandidateThreat& a, const CandidateThreat& b) {
                              return a.id == b.id && a.category == b.category;
                          }),
              out.end());
    return out;
}

FilterResult filter_candidates(const std::vector<CandidateThreat>& cs,
                               const std::set<std::string>& reject) {
    FilterResult result;
    std::set<std::string> hit;
    for (const auto& c : cs) {
        if (reject.contains(c.rule_id)) {
            hit.insert(c.rule_id);
        } else {
            result.kept.push_back(c);
        }
    }
    for (const auto& id : reject) {
        if (hit.contains(id)) {
            result.rejected.push_back(id);
        } else {
            result.unknown_rejects.push_back(id);
        }
    }
    return result;
}

}  // namespace sdnsec
