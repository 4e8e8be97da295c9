#include "sdnsec/records.hpp"

#include <initializer_list>

namespace sdnsec::records {

namespace {

// Reverse lookup over an enum's string forms.
template <typename E>
E enum_from(const Json& j, std::initializer_list<E> values, std::string_view what) {
    const auto s = j.get<std::string>();
    for (auto v : values) {
        if (to_string(v) == s) return v;
    }
    throw ArtifactError("unknown " + std::string(what) + " '" + s + "'");
}

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw ArtifactError(std::string("artifact lacks field '") + key + "'");
    }
    return j.at(key);
}

void expect_schema(const Json& j, std::string_view schema) {
    const auto got = schema_of(j);
    if (got != schema) {
        throw ArtifactError("expected a " + std::string(schema) + " artifact, got '" + got + "'");
    }
}

cvss::Score score_from(const Json& j) {
    const auto s = cvss::Score::parse(j.get<std::string>());
    if (!s) throw ArtifactError("bad score '" + j.get<std::string>() + "'");
    return *s;
}

std::vector<std::string> strings(const Json& j) { return j.get<std::vector<std::string>>(); }

Json to_json(const CandidateThreat& c) {
    return Json{{"id", c.id},
                {"subject", c.subject},
                {"category", std::string(to_string(c.category))},
                {"rule", c.rule_id},
                {"description", c.description}};
}

CandidateThreat candidate_from(const Json& j) {
    CandidateThreat c;
    c.id = field(j, "id").get<std::string>();
    c.subject = field(j, "subject").get<std::string>();
    const auto cat = stride_from_string(field(j, "category").get<std::string>());
    if (!cat) throw ArtifactError("bad STRIDE category in " + c.id);
    c.category = *cat;
    c.rule_id = field(j, "rule").get<std::string>();
    c.description = field(j, "description").get<std::string>();
    return c;
}

Json to_json(const ThreatCategoryRecord& r) {
    Json j{{"id", r.id},
           {"name", r.name},
           {"rank", r.rank},
           {"base", r.base.to_string()},
           {"overall", r.overall.to_string()},
           {"severity", std::string(cvss::to_string(r.severity))},
           {"root", std::string(to_string(r.root))}};
    if (r.vector) j["vector"] = r.vector->to_string();
    j["threats"] = r.threats;
    j["members"] = r.members;
    return j;
}

ThreatCategoryRecord record_from(const Json& j) {
    ThreatCategoryRecord r;
    r.id = field(j, "id").get<std::string>();
    r.name = field(j, "name").get<std::string>();
    r.rank = field(j, "rank").get<int>();
    r.base = score_from(field(j, "base"));
    r.overall = score_from(field(j, "overall"));
    const auto sev = cvss::severity_from_string(field(j, "severity").get<std::string>());
    const auto root = root_threat_from_string(field(j, "root").get<std::string>());
    if (!sev || !root) throw ArtifactError("bad severity or root in " + r.id);
    r.severity = *sev;
    r.root = *root;
    if (j.contains("vector")) {
        try {
            r.vector = cvss::parse_vector(j.at("vector").get<std::string>());
        } catch (const cvss::VectorError& e) {
            throw ArtifactError(r.id + ": " + e.what());
        }
    }
    r.threats = strings(field(j, "threats"));
    r.members = strings(field(j, "members"));
    return r;
}

Json exclusions(const std::vector<Exclusion>& xs) {
    Json out = Json::array();
    for (const auto& x : xs) out.push_back({{"subject", x.subject}, {"reason", x.reason}});
    return out;
}

std::vector<Exclusion> exclusions_from(const Json& j) {
    std::vector<Exclusion> out;
    for (const auto& x : j) {
        out.push_back({field(x, "subject").get<std::string>(), field(x, "reason").get<std::string>()});
    }
    return out;
}

Json coverage_json(const std::vector<CoverageEntry>& cov) {
    Json out = Json::array();
    for (const auto& c : cov) out.push_back({{"threat", c.threat}, {"covered", c.covered}});
    return out;
}

}  // namespace

std::string schema_of(const Json& j) {
    if (j.is_object() && j.contains("schema") && j.at("schema").is_string()) {
        return j.at("schema").get<std::string>();
    }
    return {};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const Stage1& s) {
    Json j{{"schema", kStage1Schema}, {"model", s.model_name}, {"catalog", s.catalog}};
    j["candidates"] = Json::array();
    for (const auto& c : s.candidates) j["candidates"].push_back(to_json(c));
    j["rejected_rules"] = s.rejected;
    j["unknown_rejects"] = s.unknown_rejects;
    j["overlay"] = Json::array();
    for (const auto& e : s.overlay) {
        j["overlay"].push_back({{"element", e.element},
                                {"surface", std::string(to_string(e.surface))},
                                {"threats", e.threats}});
    }
    j["model_text"] = s.model_text;
    return j;
}

Stage1 stage1_from_json(const Json& j) {
    expect_schema(j, kStage1Schema);
    try {
        Stage1 s;
        s.model_name = field(j, "model").get<std::string>();
        s.catalog = field(j, "catalog").get<std::string>();
        for (const auto& c : field(j, "candidates")) s.candidates.push_back(candidate_from(c));
        s.rejected = strings(field(j, "rejected_rules"));
        s.unknown_rejects = strings(field(j, "unknown_rejects"));
        for (const auto& e : field(j, "overlay")) {
            const auto surface = surface_from_string(field(e, "surface").get<std::string>());
            if (!surface) throw ArtifactError("bad surface in overlay");
            s.overlay.push_back({field(e, "element").get<std::string>(), *surface,
                                 strings(field(e, "threats"))});
        }
        s.model_text = field(j, "model_text").get<std::string>();
        return s;
    } catch (const Json::exception& e) {
        throw ArtifactError(std::string("malformed stage 1 artifact: ") + e.what());
    }
}

Json to_json(const Stage2& s) {
    Json j{{"schema", kStage2Schema}, {"catalog", s.catalog}};
    j["records"] = Json::array();
    for (const auto& r : s.assessment.records) j["records"].push_back(to_json(r));
    j["excluded_roots"] = exclusions(s.assessment.excluded_roots);
    j["excluded_candidates"] = exclusions(s.assessment.excluded_candidates);
    j["score_checks"] = Json::array();
    for (const auto& c : s.checks) {
        j["score_checks"].push_back({{"category", c.category},
                                     {"stored_base", c.stored_base.to_string()},
                                     {"computed_base", c.computed_base.to_string()},
                                     {"stored_overall", c.stored_overall.to_string()},
                                     {"computed_overall", c.computed_overall.to_string()},
                                     {"mismatch", c.mismatch()}});
    }
    return j;
}

Stage2 stage2_from_json(const Json& j) {
    expect_schema(j, kStage2Schema);
    try {
        Stage2 s;
        s.catalog = field(j, "catalog").get<std::string>();
        for (const auto& r : field(j, "records")) s.assessment.records.push_back(record_from(r));
        s.assessment.excluded_roots = exclusions_from(field(j, "excluded_roots"));
        s.assessment.excluded_candidates = exclusions_from(field(j, "excluded_candidates"));
        for (const auto& c : field(j, "score_checks")) {
            s.checks.push_back({field(c, "category").get<std::string>(),
                                score_from(field(c, "stored_base")),
                                score_from(field(c, "computed_base")),
                                score_from(field(c, "stored_overall")),
                                score_from(field(c, "computed_overall"))});
        }
        return s;
    } catch (const Json::exception& e) {
        throw ArtifactError(std::string("malformed stage 2 artifact: ") + e.what());
    }
}

Json to_json(const Stage3& s) {
    const auto& r = s.result;
    Json events = Json::array();
    for (const auto& e : r.events) {
        events.push_back({{"t", e.t}, {"kind", std::string(to_string(e.kind))}, {"detail", e.detail}});
    }
    Json captured = Json::array();
    for (const auto& a : r.outcome.captured) {
        captured.push_back({{"kind", std::string(to_string(a.kind))}, {"detail", a.detail}});
    }
    Json outcome{{"success", r.outcome.success},
                 {"elapsed", r.outcome.elapsed},
                 {"attempts", r.outcome.attempts},
                 {"packets", r.outcome.packets},
                 {"disruption_time", r.outcome.disruption_time
                                         ? Json(*r.outcome.disruption_time)
                                         : Json(nullptr)},
                 {"captured", captured},
                 {"services_terminated", r.outcome.services_terminated},
                 {"scope", std::string(to_string(r.outcome.scope))}};
    const auto& v = s.verification;
    Json verification{{"category", v.category},
                      {"severity", std::string(cvss::to_string(v.severity))},
                      {"observed", std::string(to_string(v.observed))},
                      {"required", std::string(to_string(v.required))},
                      {"consistent", v.consistent},
                      {"explanation", v.explanation}};
    return Json{{"schema", kStage3Schema},
                {"scenario", s.scenario},
                {"kind", std::string(to_string(r.kind))},
                {"target", r.target},
                {"events", events},
                {"outcome", outcome},
                {"verification", verification}};
}

Stage3 stage3_from_json(const Json& j) {
    expect_schema(j, kStage3Schema);
    const auto scopes = {ImpactScope::None, ImpactScope::SingleHost, ImpactScope::AllTenants,
                             ImpactScope::WholeNetwork};
    try {
        Stage3 s;
        s.scenario = field(j, "scenario").get<std::string>();
        auto& r = s.result;
        r.kind = enum_from(field(j, "kind"),
                           {ScenarioKind::Dictionary, ScenarioKind::Eavesdrop, ScenarioKind::SynFlood},
                           "scenario kind");
        r.target = field(j, "target").get<std::string>();
        for (const auto& e : field(j, "events")) {
            r.events.push_back(
                {field(e, "t").get<double>(),
                 enum_from(field(e, "kind"),
                           {EventKind::AttackStarted, EventKind::CredentialFound,
                            EventKind::WordlistExhausted, EventKind::CaptureStarted,
                            EventKind::Captured, EventKind::CaptureStopped,
                            EventKind::ControllerSaturated, EventKind::ServiceTerminated,
                            EventKind::FloodStopped},
                           "event kind"),
                 field(e, "detail").get<std::string>()});
        }
        const auto& o = field(j, "outcome");
        r.outcome.success = field(o, "success").get<bool>();
        r.outcome.elapsed = field(o, "elapsed").get<double>();
        r.outcome.attempts = field(o, "attempts").get<std::uint64_t>();
        r.outcome.packets = field(o, "packets").get<std::uint64_t>();
        if (!field(o, "disruption_time").is_null()) {
            r.outcome.disruption_time = o.at("disruption_time").get<double>();
        }
        for (const auto& a : field(o, "captured")) {
            r.outcome.captured.push_back(
                {enum_from(field(a, "kind"),
                           {ArtifactKind::Metadata, ArtifactKind::Payload,
                            ArtifactKind::Credentials, ArtifactKind::Topology},
                           "artifact kind"),
                 field(a, "detail").get<std::string>()});
        }
        r.outcome.services_terminated = strings(field(o, "services_terminated"));
        r.outcome.scope = enum_from(field(o, "scope"), scopes, "scope");
        const auto& v = field(j, "verification");
        s.verification.scenario = r.kind;
        s.verification.category = field(v, "category").get<std::string>();
        const auto sev = cvss::severity_from_string(field(v, "severity").get<std::string>());
        if (!sev) throw ArtifactError("bad severity in verification");
        s.verification.severity = *sev;
        s.verification.observed = enum_from(field(v, "observed"), scopes, "scope");
        s.verification.required = enum_from(field(v, "required"), scopes, "scope");
        s.verification.consistent = field(v, "consistent").get<bool>();
        s.verification.explanation = field(v, "explanation").get<std::string>();
        return s;
    } catch (const Json::exception& e) {
        throw ArtifactError(std::string("malformed stage 3 artifact: ") + e.what());
    }
}

Json to_json(const CorrelationTree& t) {
    Json nodes = Json::array();
    for (const auto* n : t.preorder()) {
        nodes.push_back({{"id", n->id},
                         {"kind", std::string(to_string(n->kind))},
                         {"label", n->label},
                         {"tag", n->tag},
                         {"junction", std::string(to_string(n->junction))},
                         {"style", n->style},
                         {"children", n->children}});
    }
    return Json{{"schema", kCorrelationSchema}, {"roots", t.roots}, {"nodes", nodes}};
}

Json to_json(const Stage4& s) {
    std::vector<std::string> uncovered;
    for (const auto& c : s.coverage) {
        if (!c.covered) uncovered.push_back(c.threat);
    }
    return Json{{"schema", kStage4Schema},
                {"catalog", s.catalog},
                {"correlation", to_json(s.tree)},
                {"coverage", coverage_json(s.coverage)},
                {"uncovered", uncovered}};
}

Stage4 stage4_from_json(const Json& j) {
    expect_schema(j, kStage4Schema);
    try {
        Stage4 s;
        s.catalog = field(j, "catalog").get<std::string>();
        const auto& c = field(j, "correlation");
        expect_schema(c, kCorrelationSchema);
        s.tree.roots = strings(field(c, "roots"));
        for (const auto& n : field(c, "nodes")) {
            CorrelationNode node;
            node.id = field(n, "id").get<std::string>();
            node.kind = enum_from(field(n, "kind"),
                                  {NodeKind::RootThreat, NodeKind::SubThreat,
                                   NodeKind::Vulnerability, NodeKind::MitigationRef,
                                   NodeKind::CentralSolutionRef},
                                  "node kind");
            node.label = field(n, "label").get<std::string>();
            node.tag = field(n, "tag").get<std::string>();
            node.junction = enum_from(field(n, "junction"),
                                      {Junction::Disjunctive, Junction::Conjunctive}, "junction");
            node.style = field(n, "style").get<std::string>();
            node.children = strings(field(n, "children"));
            s.tree.nodes.emplace(node.id, std::move(node));
        }
        for (const auto& e : field(j, "coverage")) {
            s.coverage.push_back({field(e, "threat").get<std::string>(),
                                  field(e, "covered").get<bool>()});
        }
        return s;
    } catch (const Json::exception& e) {
        throw ArtifactError(std::string("malformed stage 4 artifact: ") + e.what());
    }
}

}  // namespace sdnsec::records
