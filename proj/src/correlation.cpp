#include "sdnsec/correlation.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace sdnsec {

namespace {

std::string root_label(RootThreat r) {
    for (const auto& info : builtin_root_threats()) {
        if (info.id == to_string(r)) return info.label;
    }
    return std::string(to_string(r));
}

std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    out += '"';
    return out;
}

bool edge_allowed(NodeKind parent, NodeKind child) {
    switch (parent) {
        case NodeKind::RootThreat:
        case NodeKind::SubThreat:
            return child == NodeKind::SubThreat || child == NodeKind::Vulnerability;
        case NodeKind::Vulnerability:
            return child == NodeKind::MitigationRef || child == NodeKind::CentralSolutionRef;
        default: return false;
    }
}

std::vector<const CorrelationNode*> resolve(const CorrelationTree& tree, std::string_view id) {
    if (const auto* n = tree.node(id)) return {n};
    std::vector<const CorrelationNode*> out;
    for (const auto* n : tree.preorder()) {
        if (n->tag == id) out.push_back(n);
    }
    if (out.empty()) {
        throw TreeError(TreeError::Code::UnknownNode, "no node or tag '" + std::string(id) + "'");
    }
    return out;
}

}  // namespace

std::string_view to_string(NodeKind k) {
    switch (k) {
        case NodeKind::RootThreat: return "RootThreat";
        case NodeKind::SubThreat: return "SubThreat";
        case NodeKind::Vulnerability: return "Vulnerability";
        case NodeKind::MitigationRef: return "MitigationRef";
        case NodeKind::CentralSolutionRef: return "CentralSolutionRef";
    }
    return "?";
}

std::string_view to_string(Junction j) {
    return j == Junction::Disjunctive ? "Disjunctive" : "Conjunctive";
}

const CorrelationNode* CorrelationTree::node(std::string_view id) const {
    const auto it = nodes.find(std::string(id));
    return it == nodes.end() ? nullptr : &it->second;
}

std::vector<const CorrelationNode*> CorrelationTree::preorder() const {
    std::vector<const CorrelationNode*> out;
    std::set<std::string> visited;
    std::vector<std::string> stack(roots.rbegin(), roots.rend());
    while (!stack.empty()) {
        const auto id = stack.back();
        stack.pop_back();
        const auto* n = node(id);
        if (n == nullptr || !visited.insert(id).second) continue;
        out.push_back(n);
        for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

TreeError::TreeError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}

CorrelationTree build_map(const ThreatCatalog& catalog, const RankedAssessment& assessment) {
    CorrelationTree tree;
    auto add = [&](CorrelationNode n) -> CorrelationNode& {
        auto [it, inserted] = tree.nodes.emplace(n.id, n);
        if (!inserted) {
            throw TreeError(TreeError::Code::InconsistentInputs, "duplicate node " + n.id);
        }
        return it->second;
    };

    for (auto r : kAllRoots) {
        const std::string id(to_string(r));
        tree.roots.push_back(id);
        add(CorrelationNode{id, NodeKind::RootThreat, root_label(r), id, {}, {}, "circle"});
    }

    auto records = assessment.records;
    std::sort(records.begin(), records.end(),
              [](const ThreatCategoryRecord& a, const ThreatCategoryRecord& b) {
                  return natural_less(a.id, b.id);
              });
    for (const auto& rec : records) {
        CorrelationNode sub{rec.id,
                            NodeKind::SubThreat,
                            rec.id + ": " + rec.name + " (base " + rec.base.to_string() + ", " +
                                std::string(cvss::to_string(rec.severity)) + ")",
                            rec.id,
                            {},
                            {}};
        for (const auto& tid : rec.threats) {
            const auto* threat = catalog.threat(tid);
            const auto* vuln = catalog.vulnerability_for(tid);
            if (threat == nullptr || vuln == nullptr) {
                throw TreeError(TreeError::Code::InconsistentInputs,
                                rec.id + " references " + tid + ", which the catalog lacks");
            }
            CorrelationNode vnode{rec.id + "." + vuln->id,
                                  NodeKind::Vulnerability,
                                  vuln->id + " (" + threat->id + " " + threat->name + ")",
                                  vuln->id,
                                  {},
                                  {}};
            const auto set = mitigations_for(tid, catalog);
            if (set.direct != nullptr) {
                const auto id = vnode.id + "." + set.direct->id;
                add(CorrelationNode{id, NodeKind::MitigationRef, set.direct->id, set.direct->id,
                                    {}, {}});
                vnode.children.push_back(id);
            }
            for (const auto* sol : set.central) {
                const auto id = vnode.id + "." + sol->id;
                add(CorrelationNode{id, NodeKind::CentralSolutionRef, sol->id + "\n" + sol->name,
                                    sol->id, {}, {}});
                vnode.children.push_back(id);
            }
            sub.children.push_back(vnode.id);
            add(std::move(vnode));
        }
        tree.nodes.at(std::string(to_string(rec.root))).children.push_back(rec.id);
        add(std::move(sub));
    }
    return tree;
}

std::vector<std::string> check_tree(const CorrelationTree& tree) {
    std::vector<std::string> problems;
    std::map<std::string, int> indegree;
    for (const auto& [id, n] : tree.nodes) {
        indegree.try_emplace(id, 0);
        if (n.id != id) problems.push_back("node key " + id + " holds id " + n.id);
        for (const auto& c : n.children) {
            const auto* child = tree.node(c);
            if (child == nullptr) {
                problems.push_back(id + " has missing child " + c);
                continue;
            }
            ++indegree[c];
            if (!edge_allowed(n.kind, child->kind)) {
                problems.push_back(std::string(to_string(n.kind)) + " " + id + " -> " +
                                   std::string(to_string(child->kind)) + " " + c);
            }
        }
    }
    const std::set<std::string> roots(tree.roots.begin(), tree.roots.end());
    for (const auto& r : tree.roots) {
        const auto* n = tree.node(r);
        if (n == nullptr) {
            problems.push_back("missing root " + r);
        } else if (n->kind != NodeKind::RootThreat) {
            problems.push_back("root " + r + " is not a RootThreat");
        }
    }
    for (const auto& [id, deg] : indegree) {
        if (roots.contains(id) && deg != 0) problems.push_back("root " + id + " has a parent");
        if (!roots.contains(id) && deg != 1) {
            problems.push_back(id + " has " + std::to_string(deg) + " parents");
        }
    }

    // Kahn's algorithm: every node must be consumed, otherwise a cycle exists.
    auto remaining = indegree;
    std::vector<std::string> ready;
    for (const auto& [id, deg] : remaining) {
        if (deg == 0) ready.push_back(id);
    }
    std::size_t consumed = 0;
    while (!ready.empty()) {
        const auto id = ready.back();
        ready.pop_back();
        ++consumed;
        for (const auto& c : tree.nodes.at(id).children) {
            if (tree.node(c) != nullptr && --remaining[c] == 0) ready.push_back(c);
        }
    }
    if (consumed != tree.nodes.size()) problems.push_back("tree contains a cycle");

    if (tree.preorder().size() != tree.nodes.size()) {
        problems.push_back("some nodes are unreachable from the roots");
    }
    return problems;
}

std::vector<std::string> query_mitigations(const CorrelationTree& tree, std::string_view id) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto* start : resolve(tree, id)) {
        std::vector<const CorrelationNode*> stack{start};
        while (!stack.empty()) {
            const auto* n = stack.back();
            stack.pop_back();
            if (n->is_leaf_kind() && seen.insert(n->tag).second) out.push_back(n->tag);
            for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) {
                stack.push_back(tree.node(*it));
            }
        }
    }
    return out;
}

std::vector<std::string> query_threats(const CorrelationTree& tree, std::string_view id) {
    std::map<std::string, std::string> parent;
    for (const auto& [pid, n] : tree.nodes) {
        for (const auto& c : n.children) parent[c] = pid;
    }
    std::set<std::string> ancestors;
    for (const auto* start : resolve(tree, id)) {
        for (auto it = parent.find(start->id); it != parent.end(); it = parent.find(it->second)) {
            const auto* p = tree.node(it->second);
            if (p->kind == NodeKind::RootThreat || p->kind == NodeKind::SubThreat) {
                ancestors.insert(p->id);
            }
        }
    }
    std::vector<std::string> out;
    for (const auto* n : tree.preorder()) {
        if (ancestors.contains(n->id)) out.push_back(n->id);
    }
    return out;
}

std::string export_dot(const CorrelationTree& tree) {
    std::ostringstream out;
    out << "digraph correlation_map {\n";
    out << "  rankdir=TB;\n";
    out << "  node [shape=box, fontname=\"Helvetica\"];\n";
    const auto order = tree.preorder();
    for (const auto* n : order) {
        out << "  " << dot_quote(n->id) << " [label=" << dot_quote(n->label);
        switch (n->kind) {
            case NodeKind::RootThreat: out << ", style=bold"; break;
            case NodeKind::Vulnerability: out << ", shape=ellipse"; break;
            case NodeKind::MitigationRef: out << ", style=filled, fillcolor=palegreen"; break;
            case NodeKind::CentralSolutionRef:
                out << ", shape=box3d, style=filled, fillcolor=lightblue";
                break;
            case NodeKind::SubThreat: break;
        }
        if (!n->style.empty()) out << ", shape=" << n->style;
        if (n->junction == Junction::Conjunctive) out << ", xlabel=\"AND\"";
        out << ", class=" << dot_quote(to_string(n->kind)) << "];\n";
    }
    for (const auto* n : order) {
        for (const auto& c : n->children) {
            out << "  " << dot_quote(n->id) << " -> " << dot_quote(c);
            if (n->junction == Junction::Conjunctive) out << " [arrowtail=none, label=\"AND\"]";
            out << ";\n";
        }
    }
    out << "}\n";
    return out.str();
}

}  // namespace sdnsec
