#include "sdnsec/risk.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <sstream>

#include "sdnsec/blocks.hpp"

namespace sdnsec {

namespace {

constexpr std::string_view kCategoryAsset =
#include "sdnsec/assets/threat_categories.inc"
    ;

constexpr std::string_view kGroupingAsset =
#include "sdnsec/assets/grouping.inc"
    ;

cvss::Score parse_score(const Entry& e) {
    const auto s = cvss::Score::parse(e.value);
    if (!s) throw SyntaxError(e.line, e.column, "expected a score 0.0-10.0, got '" + e.value + "'");
    return *s;
}

bool by_id(const ThreatCategoryRecord& a, const ThreatCategoryRecord& b) {
    return natural_less(a.id, b.id);
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

}  // namespace

std::string_view to_string(RootThreat r) {
    switch (r) {
        case RootThreat::UnauthorizedAccess: return "UnauthorizedAccess";
        case RootThreat::InformationDisclosure: return "InformationDisclosure";
        case RootThreat::DenialOfService: return "DenialOfService";
    }
    return "?";
}

std::optional<RootThreat> root_threat_from_string(std::string_view s) {
    for (auto r : kAllRoots) {
        if (to_string(r) == s) return r;
    }
    return std::nullopt;
}

CategoryTable parse_category_table(std::string_view text) {
    static constexpr std::array<std::string_view, 3> kRootKeys{"label", "unpredictable", "reason"};
    static constexpr std::array<std::string_view, 8> kCategoryKeys{
        "name", "root", "base", "overall", "severity", "rank", "threats", "vector"};
    CategoryTable table;
    for (const auto& b : parse_blocks(text)) {
        if (b.keyword == "root") {
            require_keys(b, kRootKeys);
            require_unique_keys(b);
            RootThreatInfo r;
            r.id = b.name;
            r.label = require_entry(b, "label").value;
            if (const auto* e = b.find("unpredictable")) r.unpredictable = parse_bool(*e);
            if (const auto* e = b.find("reason")) r.reason = e->value;
            if (!r.unpredictable && !root_threat_from_string(r.id)) {
                throw SyntaxError(b.line, 1, "unknown scored root threat '" + r.id + "'");
            }
            table.roots.push_back(std::move(r));
        } else if (b.keyword == "category") {
            require_keys(b, kCategoryKeys);
            require_unique_keys(b);
            ThreatCategoryRecord r;
            r.id = b.name;
            r.name = require_entry(b, "name").value;
            const auto& root = require_entry(b, "root");
            const auto rt = root_threat_from_string(root.value);
            if (!rt) throw SyntaxError(root.line, root.column, "unknown root '" + root.value + "'");
            r.root = *rt;
            r.base = parse_score(require_entry(b, "base"));
            r.overall = parse_score(require_entry(b, "overall"));
            r.severity = cvss::severity(r.base);
            if (const auto* e = b.find("severity")) {
                const auto stated = cvss::severity_from_string(e->value);
                if (!stated || *stated != r.severity) {
                    throw SyntaxError(e->line, e->column,
                                      "severity '" + e->value + "' does not match base " +
                                          r.base.to_string());
                }
            }
            if (const auto* e = b.find("rank")) r.rank = static_cast<int>(parse_integer(*e));
            if (const auto* e = b.find("threats")) r.threats = split_list(e->value);
            if (const auto* e = b.find("vector")) {
                try {
                    r.vector = cvss::parse_vector(e->value);
                } catch (const cvss::VectorError& err) {
                    throw SyntaxError(e->line, e->column, err.what());
                }
            }
            if (std::any_of(table.categories.begin(), table.categories.end(),
                            [&](const ThreatCategoryRecord& x) { return x.id == r.id; })) {
                throw SyntaxError(b.line, 1, "duplicate category '" + r.id + "'");
            }
            table.categories.push_back(std::move(r));
        } else {
            throw SyntaxError(b.line, 1, "unknown section '" + b.keyword + "'");
        }
    }
    std::sort(table.categories.begin(), table.categories.end(), by_id);
    return table;
}

const CategoryTable& builtin_category_table() {
    static const CategoryTable table = parse_category_table(kCategoryAsset);
    return table;
}

std::vector<ThreatCategoryRecord> builtin_threat_categories() {
    return builtin_category_table().categories;
}

std::vector<RootThreatInfo> builtin_root_threats() { return builtin_category_table().roots; }

RankedAssessment rank(std::vector<ThreatCategoryRecord> records) {
    std::sort(records.begin(), records.end(),
              [](const ThreatCategoryRecord& a, const ThreatCategoryRecord& b) {
                  if (a.base != b.base) return a.base > b.base;
                  return natural_less(a.id, b.id);
              });
    int current = 0;
    std::optional<cvss::Score> previous;
    for (auto& r : records) {
        if (!previous || r.base != *previous) ++current;
        previous = r.base;
        r.rank = current;
        r.severity = cvss::severity(r.base);
    }
    return RankedAssessment{std::move(records), {}, {}};
}

std::string_view to_string(EnvironmentalEffect e) {
    switch (e) {
        case EnvironmentalEffect::GreaterThanAssumed: return "GreaterThanAssumed";
        case EnvironmentalEffect::LessThanAssumed: return "LessThanAssumed";
        case EnvironmentalEffect::AsAssumed: return "AsAssumed";
    }
    return "?";
}

EnvironmentalEffect environmental_effect(const ThreatCategoryRecord& r) {
    if (r.overall > r.base) return EnvironmentalEffect::GreaterThanAssumed;
    if (r.overall < r.base) return EnvironmentalEffect::LessThanAssumed;
    return EnvironmentalEffect::AsAssumed;
}

std::optional<ScoreCheck> check_scores(const ThreatCategoryRecord& r) {
    if (!r.vector) return std::nullopt;
    return ScoreCheck{r.id, r.base, cvss::base_score(*r.vector), r.overall,
                      cvss::overall_score(*r.vector)};
}

std::string_view to_string(GroupingScope s) {
    switch (s) {
        case GroupingScope::Any: return "any";
        case GroupingScope::Single: return "single";
        case GroupingScope::Multiple: return "multiple";
        case GroupingScope::All: return "all";
        case GroupingScope::Partial: return "partial";
    }
    return "?";
}

GroupingTable parse_grouping_table(std::string_view text) {
    static constexpr std::array<std::string_view, 5> kKeys{"subject", "category", "scope", "to",
                                                           "reason"};
    GroupingTable table;
    std::set<std::tuple<std::string, StrideCategory, GroupingScope>> keys;
    for (const auto& b : parse_blocks(text)) {
        if (b.keyword != "group") {
            throw SyntaxError(b.line, 1, "unknown section '" + b.keyword + "' in grouping table");
        }
        require_keys(b, kKeys);
        require_unique_keys(b);
        GroupingRow row;
        row.name = b.name;
        const auto& subject = require_entry(b, "subject");
        const auto target = RuleTarget::parse(subject.value);
        if (!target || (target->kind != RuleTarget::Kind::Component &&
                        target->kind != RuleTarget::Kind::FlowInterface)) {
            throw SyntaxError(subject.line, subject.column,
                              "subject must be component:<Kind> or flow:<interface>");
        }
        row.subject = *target;
        const auto& cat = require_entry(b, "category");
        const auto c = stride_from_string(cat.value);
        if (!c) throw SyntaxError(cat.line, cat.column, "unknown category '" + cat.value + "'");
        row.category = *c;
        if (const auto* e = b.find("scope")) {
            const std::array scopes{GroupingScope::Any, GroupingScope::Single,
                                    GroupingScope::Multiple, GroupingScope::All,
                                    GroupingScope::Partial};
            const auto it = std::find_if(scopes.begin(), scopes.end(),
                                         [&](GroupingScope s) { return to_string(s) == e->value; });
            if (it == scopes.end()) {
                throw SyntaxError(e->line, e->column, "unknown scope '" + e->value + "'");
            }
            const bool component = row.subject.kind == RuleTarget::Kind::Component;
            if ((component && (*it == GroupingScope::All || *it == GroupingScope::Partial)) ||
                (!component && (*it == GroupingScope::Single || *it == GroupingScope::Multiple))) {
                throw SyntaxError(e->line, e->column,
                                  "scope '" + e->value + "' does not apply to " + subject.value);
            }
            row.scope = *it;
        }
        const auto& to = require_entry(b, "to");
        if (to.value != "excluded") row.category_id = to.value;
        if (const auto* e = b.find("reason")) row.reason = e->value;
        if (to.value == "excluded" && row.reason.empty()) {
            throw SyntaxError(to.line, to.column, "an excluded row needs a reason");
        }
        if (!keys.emplace(row.subject.to_string(), row.category, row.scope).second) {
            throw SyntaxError(b.line, 1, "duplicate grouping key in '" + b.name + "'");
        }
        table.push_back(std::move(row));
    }
    return table;
}

const GroupingTable& default_grouping_table() {
    static const GroupingTable table = parse_grouping_table(kGroupingAsset);
    return table;
}

GroupingError::GroupingError(Code code, const std::string& what)
    : std::runtime_error(what), code_(code) {}

GroupingResult group_into_categories(const std::vector<CandidateThreat>& candidates,
                                     const SdnModel& model, const ThreatCatalog& catalog,
                                     const GroupingTable& table,
                                     const std::vector<ThreatCategoryRecord>& definitions) {
    for (const auto& def : definitions) {
        for (const auto& t : def.threats) {
            if (catalog.threat(t) == nullptr) {
                throw GroupingError(GroupingError::Code::UnknownThreat,
                                    def.id + " links unknown threat " + t);
            }
        }
    }

    // Categories reported per flow interface, for the all/partial qualifier.
    std::set<std::pair<std::string, StrideCategory>> flagged;
    for (const auto& c : candidates) flagged.emplace(c.subject, c.category);
    auto every_flow_flagged = [&](Interface iface, StrideCategory cat) {
        return std::all_of(model.flows.begin(), model.flows.end(), [&](const DataFlow& f) {
            return f.interface != iface || flagged.contains({f.id, cat});
        });
    };

    std::map<std::string, std::vector<std::string>> members;
    GroupingResult result;
    for (const auto& cand : candidates) {
        std::string subject_class;
        GroupingScope scope = GroupingScope::Any;
        const GroupingRow* exact = nullptr;
        const GroupingRow* fallback = nullptr;
        if (const auto* comp = model.component(cand.subject)) {
            subject_class = "component:" + std::string(to_string(comp->kind));
            scope = model.count(comp->kind) == 1 ? GroupingScope::Single : GroupingScope::Multiple;
            for (const auto& row : table) {
                if (!row.subject.matches(*comp) || row.category != cand.category) continue;
                if (row.scope == scope) exact = &row;
                if (row.scope == GroupingScope::Any) fallback = &row;
            }
        } else if (const auto* flow = model.flow(cand.subject)) {
            subject_class = "flow:" + std::string(to_string(flow->interface));
            scope = every_flow_flagged(flow->interface, cand.category) ? GroupingScope::All
                                                                        : GroupingScope::Partial;
            for (const auto& row : table) {
                if (row.subject.kind != RuleTarget::Kind::FlowInterface ||
                    row.subject.interface != flow->interface || row.category != cand.category) {
                    continue;
                }
                if (row.scope == scope) exact = &row;
                if (row.scope == GroupingScope::Any) fallback = &row;
            }
        } else {
            throw GroupingError(GroupingError::Code::UnknownSubject,
                                "candidate " + cand.id + " refers to unknown subject " +
                                    cand.subject);
        }

        const GroupingRow* row = exact != nullptr ? exact : fallback;
        if (row == nullptr) {
            throw GroupingError(GroupingError::Code::UnmappedCandidate,
                                "no grouping row for (" + subject_class + ", " +
                                    std::string(to_string(cand.category)) + ", " +
                                    std::string(to_string(scope)) + ") needed by " + cand.id);
        }
        if (!row->category_id) {
            result.excluded.push_back(Exclusion{cand.id, row->reason});
            continue;
        }
        members[*row->category_id].push_back(cand.id);
    }

    for (const auto& [id, ids] : members) {
        const auto def = std::find_if(definitions.begin(), definitions.end(),
                                      [&](const ThreatCategoryRecord& r) { return r.id == id; });
        if (def == definitions.end()) {
            throw GroupingError(GroupingError::Code::UnknownCategory,
                                "grouping table targets unknown category " + id);
        }
        auto record = *def;
        record.members = ids;
        std::sort(record.members.begin(), record.members.end());
        result.records.push_back(std::move(record));
    }
    std::sort(result.records.begin(), result.records.end(), by_id);
    return result;
}

RootPartition exclude_unpredictable(const std::vector<RootThreatInfo>& roots) {
    RootPartition out;
    for (const auto& r : roots) {
        if (r.unpredictable) {
            out.excluded.push_back(Exclusion{r.id, r.reason});
        } else {
            out.scored.push_back(r);
        }
    }
    return out;
}

RankedAssessment assess(const std::vector<CandidateThreat>& candidates, const SdnModel& model,
                        const ThreatCatalog& catalog, const GroupingTable& table,
                        const CategoryTable& categories) {
    auto grouped = group_into_categories(candidates, model, catalog, table, categories.categories);
    const auto roots = exclude_unpredictable(categories.roots);
    std::erase_if(grouped.records, [&](const ThreatCategoryRecord& r) {
        const bool scored =
            std::any_of(roots.scored.begin(), roots.scored.end(),
                        [&](const RootThreatInfo& s) { return s.id == to_string(r.root); });
        if (!scored) {
            for (const auto& m : r.members) {
                grouped.excluded.push_back(
                    Exclusion{m, "root threat " + std::string(to_string(r.root)) + " not scored"});
            }
        }
        return !scored;
    });
    auto ranked = rank(std::move(grouped.records));
    ranked.excluded_roots = roots.excluded;
    ranked.excluded_candidates = std::move(grouped.excluded);
    return ranked;
}

std::string render_ranking_table(const RankedAssessment& a) {
    std::size_t name_width = 4;
    for (const auto& r : a.records) name_width = std::max(name_width, r.name.size());
    std::ostringstream out;
    out << "| Rank | TC   | " << pad("Name", name_width) << " | Base | Overall | Severity |\n";
    out << "|------|------|-" << std::string(name_width, '-') << "-|------|---------|----------|\n";
    for (const auto& r : a.records) {
        out << "| " << pad(std::to_string(r.rank), 4) << " | " << pad(r.id, 4) << " | "
            << pad(r.name, name_width) << " | " << pad(r.base.to_string(), 4) << " | "
            << pad(r.overall.to_string(), 7) << " | "
            << pad(std::string(cvss::to_string(r.severity)), 8) << " |\n";
    }
    return out.str();
}

}  // namespace sdnsec
