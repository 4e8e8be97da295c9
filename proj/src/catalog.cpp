#include "sdnsec/catalog.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

#include "sdnsec/blocks.hpp"

namespace sdnsec {

namespace {

constexpr std::string_view kShippedCatalog =
#include "sdnsec/assets/catalog.inc"
    ;

constexpr std::array kSurfaceNames{
    std::pair{Surface::Application, "application"}, std::pair{Surface::Control, "control"},
    std::pair{Surface::Data, "data"},               std::pair{Surface::Northbound, "northbound"},
    std::pair{Surface::Southbound, "southbound"},   std::pair{Surface::EastWest, "eastwest"}};

std::set<Surface> parse_surfaces(const Entry& e) {
    std::set<Surface> out;
    for (const auto& s : split_list(e.value)) {
        const auto v = surface_from_string(s);
        if (!v) throw SyntaxError(e.line, e.column, "unknown surface '" + s + "'");
        out.insert(*v);
    }
    return out;
}

std::vector<std::string> bullets_of(const Block& b) {
    std::vector<std::string> out;
    for (const auto* e : b.find_all("bullet")) out.push_back(e->value);
    return out;
}

void require_single(const Block& b, std::initializer_list<std::string_view> keys) {
    for (auto k : keys) {
        if (b.find_all(k).size() > 1) {
            throw SyntaxError(b.find_all(k)[1]->line, 1, "duplicate key '" + std::string(k) + "'");
        }
    }
}

// "T6" -> 6; 0 when the id does not carry the given prefix.
int number_of(std::string_view id, char prefix) {
    if (id.size() < 2 || id[0] != prefix) return 0;
    int n = 0;
    for (char c : id.substr(1)) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return 0;
        n = n * 10 + (c - '0');
    }
    return n;
}

}  // namespace

std::string_view to_string(CatalogSource s) { return s == CatalogSource::MITRE ? "MITRE" : "OWASP"; }

std::string_view to_string(Surface s) {
    for (const auto& [v, n] : kSurfaceNames) {
        if (v == s) return n;
    }
    return "?";
}

std::optional<CatalogSource> catalog_source_from_string(std::string_view s) {
    if (s == "MITRE") return CatalogSource::MITRE;
    if (s == "OWASP") return CatalogSource::OWASP;
    return std::nullopt;
}

std::optional<Surface> surface_from_string(std::string_view s) {
    for (const auto& [v, n] : kSurfaceNames) {
        if (n == s) return v;
    }
    return std::nullopt;
}

Surface surface_of(Layer l) {
    switch (l) {
        case Layer::Application: return Surface::Application;
        case Layer::Control: return Surface::Control;
        case Layer::Data: return Surface::Data;
    }
    return Surface::Data;
}

Surface surface_of(Interface i) {
    switch (i) {
        case Interface::Northbound: return Surface::Northbound;
        case Interface::Southbound: return Surface::Southbound;
        case Interface::EastWest: return Surface::EastWest;
        case Interface::DataPlane: return Surface::Data;
        case Interface::Management: return Surface::Control;
    }
    return Surface::Data;
}

bool natural_less(std::string_view a, std::string_view b) {
    auto split = [](std::string_view s) {
        auto digits = s.find_first_of("0123456789");
        if (digits == std::string_view::npos) return std::pair{s, -1L};
        const auto suffix = s.substr(digits);
        if (!std::all_of(suffix.begin(), suffix.end(),
                         [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            return std::pair{s, -1L};
        }
        return std::pair{s.substr(0, digits), std::stol(std::string(suffix))};
    };
    const auto [pa, na] = split(a);
    const auto [pb, nb] = split(b);
    if (pa != pb) return a < b;
    if (na != nb) return na < nb;
    return a < b;
}

bool CentralSolution::mitigates(std::string_view threat) const {
    return std::any_of(covers.begin(), covers.end(),
                       [&](const Coverage& c) { return c.threat == threat; });
}

const Threat* ThreatCatalog::threat(std::string_view id) const {
    for (const auto& t : threats) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

const Vulnerability* ThreatCatalog::vulnerability_for(std::string_view t) const {
    for (const auto& v : vulnerabilities) {
        if (v.threat == t) return &v;
    }
    return nullptr;
}

const Mitigation* ThreatCatalog::mitigation_for(std::string_view t) const {
    for (const auto& m : mitigations) {
        if (m.threat == t) return &m;
    }
    return nullptr;
}

const CentralSolution* ThreatCatalog::solution(std::string_view id) const {
    for (const auto& s : solutions) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

CatalogError::CatalogError(Code code, const std::string& what)
    : std::runtime_error(what), code_(code) {}

ThreatCatalog parse_catalog(std::string_view text) {
    static constexpr std::array<std::string_view, 2> kCatalogKeys{"schema", "description"};
    static constexpr std::array<std::string_view, 5> kThreatKeys{"name", "source", "surfaces",
                                                                 "surfaces-note", "bullet"};
    static constexpr std::array<std::string_view, 3> kVulnKeys{"threat", "bullet",
                                                               "no-easy-mapping"};
    static constexpr std::array<std::string_view, 4> kMitKeys{"threat", "applicable", "bullet",
                                                              "note"};
    static constexpr std::array<std::string_view, 4> kSolutionKeys{"name", "surfaces", "summary",
                                                                   "covers"};
    ThreatCatalog c;
    bool header = false;
    std::set<std::string> ids;
    for (const auto& b : parse_blocks(text)) {
        if (b.keyword != "catalog" && !ids.insert(b.name).second) {
            throw SyntaxError(b.line, 1, "duplicate id '" + b.name + "'");
        }
        if (b.keyword == "catalog") {
            require_keys(b, kCatalogKeys);
            require_unique_keys(b);
            const auto& schema = require_entry(b, "schema");
            c.schema = static_cast<int>(parse_integer(schema));
            if (c.schema != kCatalogSchema) {
                throw SyntaxError(schema.line, schema.column,
                                  "unsupported catalog schema " + schema.value);
            }
            c.name = b.name;
            header = true;
        } else if (b.keyword == "threat") {
            require_keys(b, kThreatKeys);
            require_single(b, {"name", "source", "surfaces", "surfaces-note"});
            Threat t;
            t.id = b.name;
            t.name = require_entry(b, "name").value;
            const auto& src = require_entry(b, "source");
            const auto s = catalog_source_from_string(src.value);
            if (!s) throw SyntaxError(src.line, src.column, "unknown source '" + src.value + "'");
            t.source = *s;
            t.surfaces = parse_surfaces(require_entry(b, "surfaces"));
            if (const auto* e = b.find("surfaces-note")) t.surfaces_note = e->value;
            t.description = bullets_of(b);
            c.threats.push_back(std::move(t));
        } else if (b.keyword == "vulnerability") {
            require_keys(b, kVulnKeys);
            require_single(b, {"threat", "no-easy-mapping"});
            Vulnerability v;
            v.id = b.name;
            v.threat = require_entry(b, "threat").value;
            if (const auto* e = b.find("no-easy-mapping")) v.no_easy_mapping = parse_bool(*e);
            v.bullets = bullets_of(b);
            c.vulnerabilities.push_back(std::move(v));
        } else if (b.keyword == "mitigation") {
            require_keys(b, kMitKeys);
            require_single(b, {"threat", "applicable", "note"});
            Mitigation m;
            m.id = b.name;
            m.threat = require_entry(b, "threat").value;
            m.applicable = parse_bool(require_entry(b, "applicable"));
            if (const auto* e = b.find("note")) m.note = e->value;
            m.bullets = bullets_of(b);
            c.mitigations.push_back(std::move(m));
        } else if (b.keyword == "solution") {
            require_keys(b, kSolutionKeys);
            require_single(b, {"name", "surfaces", "summary"});
            CentralSolution s;
            s.id = b.name;
            s.name = require_entry(b, "name").value;
            s.surfaces = parse_surfaces(require_entry(b, "surfaces"));
            s.summary = require_entry(b, "summary").value;
            for (const auto* e : b.find_all("covers")) {
                const auto bar = e->value.find('|');
                if (bar == std::string::npos) {
                    throw SyntaxError(e->line, e->column, "expected '<threat> | <provenance>'");
                }
                s.covers.push_back(Coverage{std::string(trim(e->value.substr(0, bar))),
                                            std::string(trim(e->value.substr(bar + 1)))});
            }
            c.solutions.push_back(std::move(s));
        } else {
            throw SyntaxError(b.line, 1, "unknown section '" + b.keyword + "' in catalog");
        }
    }
    if (!header) throw SyntaxError(1, 1, "catalog header block missing");

    const auto by_id = [](const auto& a, const auto& b) { return natural_less(a.id, b.id); };
    std::sort(c.threats.begin(), c.threats.end(), by_id);
    std::sort(c.vulnerabilities.begin(), c.vulnerabilities.end(), by_id);
    std::sort(c.mitigations.begin(), c.mitigations.end(), by_id);

    if (const auto problems = check_catalog(c); !problems.empty()) {
        throw CatalogError(CatalogError::Code::Inconsistent, problems.front());
    }
    return c;
}

std::vector<std::string> check_catalog(const ThreatCatalog& c) {
    std::vector<std::string> problems;
    std::map<std::string, int> vuln_refs;
    std::map<std::string, int> mit_refs;
    for (const auto& v : c.vulnerabilities) {
        if (c.threat(v.threat) == nullptr) {
            problems.push_back(v.id + " references unknown threat " + v.threat);
        } else if (number_of(v.id, 'V') != number_of(v.threat, 'T')) {
            problems.push_back(v.id + " must belong to T" + v.id.substr(1));
        }
        ++vuln_refs[v.threat];
    }
    for (const auto& m : c.mitigations) {
        if (c.threat(m.threat) == nullptr) {
            problems.push_back(m.id + " references unknown threat " + m.threat);
        } else if (number_of(m.id, 'M') != number_of(m.threat, 'T')) {
            problems.push_back(m.id + " must belong to T" + m.id.substr(1));
        }
        ++mit_refs[m.threat];
    }
    for (const auto& t : c.threats) {
        if (vuln_refs[t.id] != 1) {
            problems.push_back(t.id + " has " + std::to_string(vuln_refs[t.id]) +
                               " vulnerabilities, expected 1");
        }
        if (mit_refs[t.id] != 1) {
            problems.push_back(t.id + " has " + std::to_string(mit_refs[t.id]) +
                               " mitigations, expected 1");
        }
    }
    for (const auto& s : c.solutions) {
        for (const auto& cov : s.covers) {
            if (c.threat(cov.threat) == nullptr) {
                problems.push_back(s.id + " covers unknown threat " + cov.threat);
            }
        }
    }
    return problems;
}

const ThreatCatalog& load_catalog() {
    static const ThreatCatalog catalog = parse_catalog(kShippedCatalog);
    return catalog;
}

MitigationSet mitigations_for(std::string_view threat, const ThreatCatalog& c) {
    if (c.threat(threat) == nullptr) {
        throw CatalogError(CatalogError::Code::UnknownThreatId,
                           "unknown threat id '" + std::string(threat) + "'");
    }
    MitigationSet out;
    if (const auto* m = c.mitigation_for(threat); m != nullptr && m->applicable) out.direct = m;
    for (const auto& s : c.solutions) {
        if (s.mitigates(threat)) out.central.push_back(&s);
    }
    return out;
}

std::vector<Threat> threats_by_source(CatalogSource src, const ThreatCatalog& c) {
    std::vector<Threat> out;
    std::copy_if(c.threats.begin(), c.threats.end(), std::back_inserter(out),
                 [&](const Threat& t) { return t.source == src; });
    return out;
}

std::vector<CoverageEntry> coverage_report(const ThreatCatalog& c) {
    std::vector<CoverageEntry> out;
    for (const auto& t : c.threats) {
        const auto set = mitigations_for(t.id, c);
        out.push_back(CoverageEntry{t.id, set.direct != nullptr || !set.central.empty()});
    }
    return out;
}

std::vector<OverlayEntry> catalog_overlay(const SdnModel& m, const ThreatCatalog& c) {
    std::vector<OverlayEntry> out;
    const auto entry = [&](const std::string& id, Surface s) {
        OverlayEntry e{id, s, {}};
        for (const auto& t : c.threats) {
            if (t.surfaces.contains(s)) e.threats.push_back(t.id);
        }
        out.push_back(std::move(e));
    };
    for (const auto& comp : m.components) {
        if (comp.kind != ComponentKind::AttackerHost) entry(comp.id, surface_of(comp.layer));
    }
    for (const auto& f : m.flows) entry(f.id, surface_of(f.interface));
    std::sort(out.begin(), out.end(),
              [](const OverlayEntry& a, const OverlayEntry& b) { return a.element < b.element; });
    return out;
}

}  // namespace sdnsec
