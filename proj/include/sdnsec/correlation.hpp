#pragma once

// Threat tree linking root threats, threat categories, vulnerabilities and
// the mitigations or central solutions that address them.

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sdnsec/catalog.hpp"
#include "sdnsec/risk.hpp"

namespace sdnsec {

enum class NodeKind { RootThreat, SubThreat, Vulnerability, MitigationRef, CentralSolutionRef };
enum class Junction { Disjunctive, Conjunctive };

std::string_view to_string(NodeKind k);
std::string_view to_string(Junction j);

struct CorrelationNode {
    std::string id;
    NodeKind kind = NodeKind::SubThreat;
    std::string label;
    // Concept shared by all nodes standing for the same catalog entry
    // ("V6", "M6", "PbSA"); equals the id for roots and categories.
    std::string tag;
    std::vector<std::string> children;
    Junction junction = Junction::Disjunctive;
    // Export hint; root threats are drawn as circles.
    std::string style;

    bool is_leaf_kind() const {
        return kind == NodeKind::MitigationRef || kind == NodeKind::CentralSolutionRef;
    }
    bool operator==(const CorrelationNode&) const = default;
};

struct CorrelationTree {
    std::vector<std::string> roots;
    std::map<std::string, CorrelationNode> nodes;

    const CorrelationNode* node(std::string_view id) const;
    // Pre-order walk from the roots, children in stored order.
    std::vector<const CorrelationNode*> preorder() const;

    bool operator==(const CorrelationTree&) const = default;
};

class TreeError : public std::runtime_error {
public:
    enum class Code { InconsistentInputs, UnknownNode };
    TreeError(Code code, const std::string& what);
    Code code() const { return code_; }

private:
    Code code_;
};

// One root per root threat, categories beneath their root, the linked
// threats' vulnerabilities beneath each category, and beneath each
// vulnerability its direct mitigation and covering central solutions.
CorrelationTree build_map(const ThreatCatalog& catalog, const RankedAssessment& assessment);

// Structural problems: cycles, nodes with several parents or none,
// unreachable nodes, and parent/child kinds out of order.
std::vector<std::string> check_tree(const CorrelationTree& tree);

// `id` is a node id or a tag. Returns the tags of all mitigation and
// central-solution leaves below, deduplicated, in pre-order.
std::vector<std::string> query_mitigations(const CorrelationTree& tree, std::string_view id);
// `id` is a node id or a tag. Returns the ids of all root and sub-threat
// ancestors, deduplicated, in pre-order.
std::vector<std::string> query_threats(const CorrelationTree& tree, std::string_view id);

std::string export_dot(const CorrelationTree& tree);

inline constexpr std::string_view kCorrelationSchema = "sdnsec.correlation/1";

}  // namespace sdnsec
