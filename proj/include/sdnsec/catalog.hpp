#pragma once

// Threat / vulnerability / mitigation knowledge base with the central
// solutions that cover several threats at once.

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sdnsec/topology.hpp"

namespace sdnsec {

enum class CatalogSource { MITRE, OWASP };

// Layers and interfaces a threat can affect.
enum class Surface { Application, Control, Data, Northbound, Southbound, EastWest };

std::string_view to_string(CatalogSource s);
std::string_view to_string(Surface s);
std::optional<CatalogSource> catalog_source_from_string(std::string_view s);
std::optional<Surface> surface_from_string(std::string_view s);

Surface surface_of(Layer l);
// Management flows count as control-plane surface.
Surface surface_of(Interface i);

struct Threat {
    std::string id;  // T<n>
    std::string name;
    CatalogSource source = CatalogSource::MITRE;
    std::vector<std::string> description;
    std::set<Surface> surfaces;
    std::string surfaces_note;

    bool operator==(const Threat&) const = default;
};

struct Vulnerability {
    std::string id;  // V<n>
    std::string threat;
    std::vector<std::string> bullets;
    bool no_easy_mapping = false;

    bool operator==(const Vulnerability&) const = default;
};

struct Mitigation {
    std::string id;  // M<n>
    std::string threat;
    bool applicable = true;
    std::vector<std::string> bullets;
    std::string note;

    bool operator==(const Mitigation&) const = default;
};

struct Coverage {
    std::string threat;
    std::string provenance;

    bool operator==(const Coverage&) const = default;
};

struct CentralSolution {
    std::string id;  // PbSA, BlockchainSDN, TENNISON
    std::string name;
    std::set<Surface> surfaces;
    std::string summary;
    std::vector<Coverage> covers;

    bool mitigates(std::string_view threat) const;
    bool operator==(const CentralSolution&) const = default;
};

struct ThreatCatalog {
    std::string name;
    int schema = 1;
    std::vector<Threat> threats;
    std::vector<Vulnerability> vulnerabilities;
    std::vector<Mitigation> mitigations;
    std::vector<CentralSolution> solutions;

    const Threat* threat(std::string_view id) const;
    const Vulnerability* vulnerability_for(std::string_view threat) const;
    const Mitigation* mitigation_for(std::string_view threat) const;
    const CentralSolution* solution(std::string_view id) const;

    bool operator==(const ThreatCatalog&) const = default;
};

class CatalogError : public std::runtime_error {
public:
    enum class Code { UnknownThreatId, Inconsistent };
    CatalogError(Code code, const std::string& what);
    Code code() const { return code_; }

private:
    Code code_;
};

inline constexpr int kCatalogSchema = 1;

// The shipped catalog (embedded at build time).
const ThreatCatalog& load_catalog();
// Parses and checks a catalog file; throws SyntaxError or CatalogError.
ThreatCatalog parse_catalog(std::string_view text);
// Structural problems: broken Tn<->Vn<->Mn bijections, dangling references.
std::vector<std::string> check_catalog(const ThreatCatalog& c);

struct MitigationSet {
    const Mitigation* direct = nullptr;  // null when not applicable
    std::vector<const CentralSolution*> central;
};

MitigationSet mitigations_for(std::string_view threat, const ThreatCatalog& c);
std::vector<Threat> threats_by_source(CatalogSource src, const ThreatCatalog& c);

struct CoverageEntry {
    std::string threat;
    bool covered = false;

    bool operator==(const CoverageEntry&) const = default;
};

std::vector<CoverageEntry> coverage_report(const ThreatCatalog& c);

struct OverlayEntry {
    std::string element;  // component or flow id
    Surface surface = Surface::Data;
    std::vector<std::string> threats;

    bool operator==(const OverlayEntry&) const = default;
};

// Which catalog threats apply to each modelled component and flow, judged by
// the surface it sits on. Attacker nodes are not assets and are skipped.
std::vector<OverlayEntry> catalog_overlay(const SdnModel& m, const ThreatCatalog& c);

// Orders "T2" before "T10" (prefix, then numeric suffix).
bool natural_less(std::string_view a, std::string_view b);

}  // namespace sdnsec
