#include "sdnsec/cli.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "sdnsec/attack_sim.hpp"
#include "sdnsec/blocks.hpp"
#include "sdnsec/catalog.hpp"
#include "sdnsec/correlation.hpp"
#include "sdnsec/records.hpp"
#include "sdnsec/risk.hpp"
#include "sdnsec/stride.hpp"
#include "sdnsec/topology.hpp"

namespace sdnsec::cli {

namespace {

using records::Json;

// Exit code 2: bad invocation, unreadable files, foreign artifacts.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exit code 1: the inputs were read but are inconsistent.
class Finding : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) throw UsageError("cannot write '" + path + "'");
}

std::string base_name(const std::string& path) {
    return std::filesystem::path(path).filename().string();
}

// Runs a parser over a file's text, prefixing syntax errors with the path.
template <typename F>
auto parse_file(const std::string& path, F parse) {
    const auto text = read_file(path);
    try {
        return parse(text);
    } catch (const SyntaxError& e) {
        throw Finding(path + ":" + e.what());
    }
}

Json read_artifact(const std::string& path, std::string_view stage) {
    const auto text = read_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error&) {
        throw UsageError("'" + path + "' is not a " + std::string(stage) + " artifact");
    }
}

ThreatCatalog load_catalog_option(const std::string& flag) {
    std::string path = flag;
    if (path.empty()) {
        if (const char* env = std::getenv(std::string(kCatalogEnv).c_str())) path = env;
    }
    if (path.empty()) return load_catalog();
    auto c = parse_file(path, [](const std::string& t) { return parse_catalog(t); });
    if (c.schema != kCatalogSchema) {
        throw UsageError("catalog '" + path + "' has schema " + std::to_string(c.schema) +
                         ", expected " + std::to_string(kCatalogSchema));
    }
    return c;
}

std::string join(const std::vector<std::string>& items, std::string_view sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i != 0) out += sep;
        out += items[i];
    }
    return out;
}

std::string or_none(const std::vector<std::string>& items) {
    return items.empty() ? "none" : join(items);
}

std::string seconds(double s) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.1f", s);
    return buf.data();
}

void emit(std::ostream& out, const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        out << content;
    } else {
        write_file(out_path, content);
    }
}

// ---- markdown sections -----------------------------------------------------

std::string stage1_section(const records::Stage1& s) {
    std::ostringstream md;
    md << "## Stage 1: threat and vulnerability analysis\n\n";
    md << "Model `" << s.model_name << "`, catalog `" << s.catalog << "`: "
       << s.candidates.size() << " candidate threats.\n\n";
    std::map<StrideCategory, int> per_category;
    for (const auto& c : s.candidates) ++per_category[c.category];
    md << "| STRIDE | Candidates |\n|---|---|\n";
    for (auto c : kAllStride) {
        md << "| " << to_string(c) << " | " << per_category[c] << " |\n";
    }
    md << "\n| Candidate | STRIDE | Description |\n|---|---|---|\n";
    for (const auto& c : s.candidates) {
        md << "| " << c.id << " | " << stride_letter(c.category) << " | " << c.description
           << " |\n";
    }
    md << "\n### Audit\n\n";
    md << "Rejected rules: " << or_none(s.rejected) << "\n";
    if (!s.unknown_rejects.empty()) {
        md << "Reject ids that matched nothing: " << join(s.unknown_rejects) << "\n";
    }
    md << "\n### Catalog overlay\n\n| Element | Surface | Threats |\n|---|---|---|\n";
    for (const auto& e : s.overlay) {
        md << "| " << e.element << " | " << to_string(e.surface) << " | " << join(e.threats)
           << " |\n";
    }
    return md.str();
}

std::string stage2_section(const records::Stage2& s) {
    std::ostringstream md;
    md << "## Stage 2: risk and impact analysis\n\n";
    md << render_ranking_table(s.assessment) << "\n";
    md << "| TC | Environment | Members |\n|---|---|---|\n";
    for (const auto& r : s.assessment.records) {
        md << "| " << r.id << " | " << to_string(environmental_effect(r)) << " | "
           << or_none(r.members) << " |\n";
    }
    md << "\nExcluded root threats:\n";
    if (s.assessment.excluded_roots.empty()) md << "- none\n";
    for (const auto& x : s.assessment.excluded_roots) {
        md << "- " << x.subject << ": " << x.reason << "\n";
    }
    md << "\nExcluded candidates:\n";
    if (s.assessment.excluded_candidates.empty()) md << "- none\n";
    for (const auto& x : s.assessment.excluded_candidates) {
        md << "- " << x.subject << ": " << x.reason << "\n";
    }
    if (!s.checks.empty()) {
        md << "\n| TC | Stored base | Computed base | Stored overall | Computed overall | Check "
              "|\n|---|---|---|---|---|---|\n";
        for (const auto& c : s.checks) {
            md << "| " << c.category << " | " << c.stored_base.to_string() << " | "
               << c.computed_base.to_string() << " | " << c.stored_overall.to_string() << " | "
               << c.computed_overall.to_string() << " | " << (c.mismatch() ? "MISMATCH" : "ok")
               << " |\n";
        }
    }
    return md.str();
}

std::string outcome_line(const SimResult& r) {
    const auto& o = r.outcome;
    switch (r.kind) {
        case ScenarioKind::Dictionary:
            if (o.success) {
                return "credentials found after " + std::to_string(o.attempts) + " attempts in " +
                       seconds(o.elapsed) + " s";
            }
            return "attack failed: password not in wordlist after " + std::to_string(o.attempts) +
                   " attempts (" + seconds(o.elapsed) + " s)";
        case ScenarioKind::Eavesdrop:
            if (o.payload_count() == 0) return "no payloads captured";
            return std::to_string(o.payload_count()) + " payload artifacts captured";
        case ScenarioKind::SynFlood:
            if (o.disruption_time) {
                return "disruption at " + seconds(*o.disruption_time) + " s, " +
                       std::to_string(o.packets) + " packets sent, services terminated: " +
                       or_none(o.services_terminated);
            }
            return "no disruption, " + std::to_string(o.packets) + " packets sent";
    }
    return {};
}

std::string stage3_section(const records::Stage3& s) {
    const auto& r = s.result;
    const auto& v = s.verification;
    std::ostringstream md;
    md << "### Scenario `" << s.scenario << "` (" << to_string(r.kind) << " against " << r.target
       << ")\n\n";
    md << "```text\n" << render_timeline(r) << "```\n\n";
    md << "Outcome: " << outcome_line(r) << "\n\n";
    for (const auto& a : r.outcome.captured) {
        md << "- captured " << to_string(a.kind) << ": " << a.detail << "\n";
    }
    if (!r.outcome.captured.empty()) md << "\n";
    md << "Verification against " << v.category << ": "
       << (v.consistent ? "consistent" : "INCONSISTENT") << " (" << v.explanation << ")\n";
    return md.str();
}

std::string stage4_section(const records::Stage4& s) {
    std::map<NodeKind, int> per_kind;
    for (const auto& [id, n] : s.tree.nodes) ++per_kind[n.kind];
    std::vector<std::string> uncovered;
    for (const auto& c : s.coverage) {
        if (!c.covered) uncovered.push_back(c.threat);
    }
    std::ostringstream md;
    md << "## Stage 4: threat and vulnerability mitigation\n\n";
    md << "Correlation map over catalog `" << s.catalog << "`: " << s.tree.nodes.size()
       << " nodes under " << s.tree.roots.size() << " root threats (" << join(s.tree.roots)
       << ").\n\n";
    md << "| Node kind | Count |\n|---|---|\n";
    for (auto k : {NodeKind::RootThreat, NodeKind::SubThreat, NodeKind::Vulnerability,
                   NodeKind::MitigationRef, NodeKind::CentralSolutionRef}) {
        md << "| " << to_string(k) << " | " << per_kind[k] << " |\n";
    }
    md << "\n| Sub-threat | Mitigations |\n|---|---|\n";
    for (const auto* n : s.tree.preorder()) {
        if (n->kind == NodeKind::SubThreat) {
            md << "| " << n->id << " | " << or_none(query_mitigations(s.tree, n->id)) << " |\n";
        }
    }
    md << "\nCoverage: " << (s.coverage.size() - uncovered.size()) << " of " << s.coverage.size()
       << " catalog threats have a mitigation; uncovered: " << or_none(uncovered) << "\n";
    return md.str();
}

// ---- commands ---------------------------------------------------------------

struct Options {
    std::string model;
    std::string out;
    std::string format = "markdown";
    std::string map_format = "dot";
    std::string rules;
    std::string grouping;
    std::string catalog;
    std::vector<std::string> reject;
    std::string stage1;
    std::string stage2;
    std::vector<std::string> stage3;
    std::string stage4;
    std::string vectors;
    std::string scenario;
    bool builtin = false;
    bool timestamp = false;
};

SdnModel load_model(const std::string& path) {
    return parse_file(path, [&](const std::string& t) {
        try {
            return parse_model(t);
        } catch (const ModelError& e) {
            throw Finding(path + ": " + e.what());
        }
    });
}

void require_format(const std::string& format, std::initializer_list<std::string_view> allowed) {
    for (auto a : allowed) {
        if (format == a) return;
    }
    throw UsageError("unsupported --format '" + format + "'");
}

int cmd_validate(const Options& o, std::ostream& out) {
    const auto text = read_file(o.model);
    SdnModel m;
    try {
        m = parse_model(text);
    } catch (const ModelError& e) {
        out << (e.code() == ModelError::Code::DanglingReference ? "DanglingReference "
                                                                 : "DuplicateId ")
            << e.subject() << ": line " << e.line() << "\n";
        return kFindings;
    } catch (const SyntaxError& e) {
        out << "SyntaxError " << o.model << ":" << e.what() << "\n";
        return kFindings;
    }
    const auto violations = validate_model(m);
    for (const auto& v : violations) {
        out << to_string(v.code) << " " << v.subject << ": " << v.detail << "\n";
    }
    if (!violations.empty()) return kFindings;
    out << base_name(o.model) << ": " << m.components.size() << " components, " << m.flows.size()
        << " flows, " << m.boundaries.size() << " trust boundaries, " << m.vpls.size()
        << " VPLS domains, no violations\n";
    return kOk;
}

int cmd_analyze(const Options& o, std::ostream& out) {
    require_format(o.format, {"markdown", "records"});
    const auto model = load_model(o.model);
    const auto catalog = load_catalog_option(o.catalog);
    auto rules = default_rules();
    if (!o.rules.empty()) {
        rules = parse_file(o.rules, [&](const std::string& t) {
            return apply_rule_overrides(std::move(rules), t);
        });
    }
    const auto candidates = analyze(model, rules);
    const auto filtered =
        filter_candidates(candidates, std::set<std::string>(o.reject.begin(), o.reject.end()));

    records::Stage1 s;
    s.model_name = base_name(o.model);
    s.model_text = render_model(model);
    s.catalog = catalog.name;
    s.candidates = filtered.kept;
    s.rejected = filtered.rejected;
    s.unknown_rejects = filtered.unknown_rejects;
    s.overlay = catalog_overlay(model, catalog);

    const auto artifact = records::dump(records::to_json(s));
    if (!o.out.empty()) write_file(o.out, artifact);
    out << (o.format == "records" ? artifact : stage1_section(s));
    return kOk;
}

std::vector<std::pair<std::string, cvss::Vector>> load_vectors(const std::string& path) {
    return parse_file(path, [&](const std::string& t) {
        std::vector<std::pair<std::string, cvss::Vector>> out;
        for (const auto& b : parse_blocks(t)) {
            if (b.keyword != "vector") throw SyntaxError(b.line, 1, "expected a 'vector' block");
            static constexpr std::array<std::string_view, 1> keys{"cvss"};
            require_keys(b, keys);
            require_unique_keys(b);
            const auto& e = require_entry(b, "cvss");
            try {
                out.emplace_back(b.name, cvss::parse_vector(e.value));
            } catch (const cvss::VectorError& err) {
                throw SyntaxError(e.line, e.column, err.what());
            }
        }
        return out;
    });
}

int cmd_rank(const Options& o, std::ostream& out, std::ostream& err) {
    require_format(o.format, {"markdown", "records"});
    if (o.builtin == !o.stage1.empty()) {
        throw UsageError("rank needs either --stage1 <artifact> (run 'analyze' first) or --builtin");
    }
    const auto catalog = load_catalog_option(o.catalog);
    records::Stage2 s;
    s.catalog = catalog.name;
    if (o.builtin) {
        s.assessment = rank(builtin_threat_categories());
        s.assessment.excluded_roots = exclude_unpredictable(builtin_root_threats()).excluded;
    } else {
        const auto stage1 = records::stage1_from_json(read_artifact(o.stage1, "stage 1"));
        SdnModel model;
        try {
            model = parse_model(stage1.model_text);
        } catch (const std::exception& e) {
            throw UsageError("stage 1 artifact carries an unreadable model: " +
                             std::string(e.what()));
        }
        const auto table =
            o.grouping.empty()
                ? default_grouping_table()
                : parse_file(o.grouping, [](const std::string& t) { return parse_grouping_table(t); });
        try {
            s.assessment = assess(stage1.candidates, model, catalog, table, builtin_category_table());
        } catch (const GroupingError& e) {
            if (e.code() != GroupingError::Code::UnmappedCandidate) throw;
            throw Finding(std::string(e.what()) +
                          "\nhint: add a 'group' row for this subject and STRIDE category to the "
                          "grouping table (--grouping), or drop the rule with --reject");
        }
    }
    int status = kOk;
    if (!o.vectors.empty()) {
        for (const auto& [id, vec] : load_vectors(o.vectors)) {
            auto it = std::find_if(s.assessment.records.begin(), s.assessment.records.end(),
                                   [&](const ThreatCategoryRecord& r) { return r.id == id; });
            if (it == s.assessment.records.end()) {
                throw Finding("vector given for " + id + ", which is not in the assessment");
            }
            auto probe = *it;
            probe.vector = vec;
            const auto check = check_scores(probe);
            s.checks.push_back(*check);
            if (check->mismatch()) {
                err << "warning: " << id << " stored base/overall " << check->stored_base.to_string()
                    << "/" << check->stored_overall.to_string() << " but the vector gives "
                    << check->computed_base.to_string() << "/"
                    << check->computed_overall.to_string() << "\n";
                status = kFindings;
            }
        }
    }
    const auto artifact = records::dump(records::to_json(s));
    if (!o.out.empty()) write_file(o.out, artifact);
    out << (o.format == "records" ? artifact : stage2_section(s));
    return status;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    require_format(o.format, {"markdown", "records"});
    const auto model = load_model(o.model);
    const auto scenario =
        parse_file(o.scenario, [](const std::string& t) { return parse_scenario(t); });
    auto tb = make_testbed(model, scenario.params);
    const auto result = run_attack(tb, scenario.spec);

    const auto tc_id = category_for(result.kind);
    std::optional<ThreatCategoryRecord> tc;
    if (!o.stage2.empty()) {
        for (const auto& r :
             records::stage2_from_json(read_artifact(o.stage2, "stage 2")).assessment.records) {
            if (r.id == tc_id) tc = r;
        }
    }
    if (!tc) {
        for (const auto& r : builtin_threat_categories()) {
            if (r.id == tc_id) tc = r;
        }
    }
    records::Stage3 s{scenario.name, result, verify_impact(result, *tc)};
    const auto artifact = records::dump(records::to_json(s));
    if (!o.out.empty()) write_file(o.out, artifact);
    out << (o.format == "records" ? artifact
                                  : "## Stage 3: attack modelling\n\n" + stage3_section(s));
    return kOk;
}

int cmd_map(const Options& o, std::ostream& out) {
    require_format(o.map_format, {"dot", "records"});
    if (o.stage2.empty()) {
        throw UsageError("map needs --stage2 <artifact> (run 'rank' first)");
    }
    if (!o.stage1.empty()) records::stage1_from_json(read_artifact(o.stage1, "stage 1"));
    const auto stage2 = records::stage2_from_json(read_artifact(o.stage2, "stage 2"));
    const auto catalog = load_catalog_option(o.catalog);
    records::Stage4 s{catalog.name, build_map(catalog, stage2.assessment), coverage_report(catalog)};
    const auto problems = check_tree(s.tree);
    if (!problems.empty()) throw Finding("correlation map is malformed: " + join(problems, "; "));

    const auto content =
        o.map_format == "dot" ? export_dot(s.tree) : records::dump(records::to_json(s));
    if (o.out.empty()) {
        out << content;
    } else {
        write_file(o.out, content);
        out << stage4_section(s);
    }
    return kOk;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

int cmd_report(const Options& o, std::ostream& out) {
    require_format(o.format, {"markdown", "records"});
    if (o.stage1.empty() && o.stage2.empty() && o.stage3.empty() && o.stage4.empty()) {
        throw UsageError("report needs at least one of --stage1, --stage2, --stage3, --stage4");
    }
    std::optional<records::Stage1> s1;
    std::optional<records::Stage2> s2;
    std::vector<records::Stage3> s3;
    std::optional<records::Stage4> s4;
    if (!o.stage1.empty()) s1 = records::stage1_from_json(read_artifact(o.stage1, "stage 1"));
    if (!o.stage2.empty()) s2 = records::stage2_from_json(read_artifact(o.stage2, "stage 2"));
    for (const auto& p : o.stage3) {
        s3.push_back(records::stage3_from_json(read_artifact(p, "stage 3")));
    }
    if (!o.stage4.empty()) s4 = records::stage4_from_json(read_artifact(o.stage4, "stage 4"));

    std::string content;
    if (o.format == "records") {
        Json j{{"schema", "sdnsec.report/1"}};
        if (o.timestamp) j["generated"] = utc_now();
        j["stage1"] = s1 ? records::to_json(*s1) : Json(nullptr);
        j["stage2"] = s2 ? records::to_json(*s2) : Json(nullptr);
        j["stage3"] = Json::array();
        for (const auto& s : s3) j["stage3"].push_back(records::to_json(s));
        j["stage4"] = s4 ? records::to_json(*s4) : Json(nullptr);
        content = records::dump(j);
    } else {
        std::ostringstream md;
        md << "# SDN security evaluation report\n\n";
        if (o.timestamp) md << "Generated " << utc_now() << "\n\n";
        md << (s1 ? stage1_section(*s1)
                  : "## Stage 1: threat and vulnerability analysis\n\nnot executed\n")
           << "\n";
        md << (s2 ? stage2_section(*s2) : "## Stage 2: risk and impact analysis\n\nnot executed\n")
           << "\n";
        md << "## Stage 3: attack modelling\n\n";
        if (s3.empty()) md << "not executed\n";
        for (std::size_t i = 0; i < s3.size(); ++i) {
            if (i != 0) md << "\n";
            md << stage3_section(s3[i]);
        }
        md << "\n";
        md << (s4 ? stage4_section(*s4)
                  : "## Stage 4: threat and vulnerability mitigation\n\nnot executed\n");
        content = md.str();
    }
    emit(out, o.out, content);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Security evaluation of SDN deployments", "sdnsec"};
    app.require_subcommand(1);
    Options o;

    auto* validate = app.add_subcommand("validate", "Check a model file against its invariants");
    validate->add_option("--model", o.model, "Model file")->required();

    auto* analyze_cmd = app.add_subcommand("analyze", "Stage 1: STRIDE candidates and catalog overlay");
    analyze_cmd->add_option("--model", o.model, "Model file")->required();
    analyze_cmd->add_option("--rules", o.rules, "Rule override file");
    analyze_cmd->add_option("--reject", o.reject, "Rule ids to drop")->delimiter(',');

    auto* rank_cmd = app.add_subcommand("rank", "Stage 2: group candidates and rank categories");
    rank_cmd->add_option("--stage1", o.stage1, "Stage 1 artifact");
    rank_cmd->add_flag("--builtin", o.builtin, "Rank the built-in categories without candidates");
    rank_cmd->add_option("--grouping", o.grouping, "Grouping table");
    rank_cmd->add_option("--vectors", o.vectors, "CVSS vectors to check stored scores against");

    auto* simulate = app.add_subcommand("simulate", "Stage 3: run an attack scenario");
    simulate->add_option("--model", o.model, "Model file")->required();
    simulate->add_option("--scenario", o.scenario, "Scenario file")->required();
    simulate->add_option("--stage2", o.stage2, "Stage 2 artifact to verify against");

    auto* map = app.add_subcommand("map", "Stage 4: correlation map and coverage");
    map->add_option("--stage1", o.stage1, "Stage 1 artifact");
    map->add_option("--stage2", o.stage2, "Stage 2 artifact");

    auto* report = app.add_subcommand("report", "Consolidated report over stage artifacts");
    report->add_option("--stage1", o.stage1, "Stage 1 artifact");
    report->add_option("--stage2", o.stage2, "Stage 2 artifact");
    report->add_option("--stage3", o.stage3, "Stage 3 artifacts");
    report->add_option("--stage4", o.stage4, "Stage 4 artifact");
    report->add_flag("--timestamp", o.timestamp, "Stamp the report with the current UTC time");

    for (auto* sub : {analyze_cmd, rank_cmd, map, report}) {
        sub->add_option("--catalog", o.catalog, "Catalog file (default: $SDNSEC_CATALOG or built-in)");
    }
    for (auto* sub : {validate, analyze_cmd, rank_cmd, simulate, map, report}) {
        sub->add_option("--out", o.out, "Output file");
    }
    for (auto* sub : {analyze_cmd, rank_cmd, simulate, report}) {
        sub->add_option("--format", o.format, "markdown or records")->capture_default_str();
    }
    map->add_option("--format", o.map_format, "dot or records")->capture_default_str();

    std::vector<const char*> argv{"sdnsec"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (validate->parsed()) {
            std::ostringstream text;
            const int status = cmd_validate(o, text);
            emit(out, o.out, text.str());
            return status;
        }
        if (analyze_cmd->parsed()) return cmd_analyze(o, out);
        if (rank_cmd->parsed()) return cmd_rank(o, out, err);
        if (simulate->parsed()) return cmd_simulate(o, out);
        if (map->parsed()) return cmd_map(o, out);
        return cmd_report(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const records::ArtifactError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidModel& e) {
        for (const auto& v : e.violations()) {
            err << to_string(v.code) << " " << v.subject << ": " << v.detail << "\n";
        }
        err << "error: " << e.what() << "\n";
        return kFindings;
    } catch (const std::exception& e) {
        // Syntax, catalog, grouping, simulation and tree errors: the inputs
        // were readable but do not fit together.
        err << "error: " << e.what() << "\n";
        return kFindings;
    }
}

}  // namespace sdnsec::cli
