#include "sdnsec/topology.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "sdnsec/blocks.hpp"

namespace sdnsec {

namespace {

constexpr std::array kKindNames{std::pair{ComponentKind::Application, "Application"},
                                std::pair{ComponentKind::Controller, "Controller"},
                                std::pair{ComponentKind::ForwardingDevice, "ForwardingDevice"},
                                std::pair{ComponentKind::Host, "Host"},
                                std::pair{ComponentKind::AttackerHost, "AttackerHost"}};
constexpr std::array kLayerNames{std::pair{Layer::Application, "application"},
                                 std::pair{Layer::Control, "control"},
                                 std::pair{Layer::Data, "data"}};
constexpr std::array kInterfaceNames{std::pair{Interface::Northbound, "northbound"},
                                     std::pair{Interface::Southbound, "southbound"},
                                     std::pair{Interface::EastWest, "eastwest"},
                                     std::pair{Interface::DataPlane, "dataplane"},
                                     std::pair{Interface::Management, "management"}};

template <typename Table, typename E>
std::string_view name_of(const Table& table, E value) {
    for (const auto& [v, n] : table) {
        if (v == value) return n;
    }
    return "?";
}

template <typename E, typename Table>
std::optional<E> value_of(const Table& table, std::string_view name) {
    for (const auto& [v, n] : table) {
        if (n == name) return v;
    }
    return std::nullopt;
}

template <typename T, typename Key>
void sort_by(std::vector<T>& items, Key key) {
    std::sort(items.begin(), items.end(),
              [&](const T& a, const T& b) { return key(a) < key(b); });
}

std::set<std::string> parse_members(const Block& b) {
    const auto& e = require_entry(b, "members");
    const auto list = split_list(e.value);
    return {list.begin(), list.end()};
}

std::string join(const std::set<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ", ";
        out += s;
    }
    return out;
}

// Layers the two endpoints of an interface must sit on, unordered.
bool interface_fits(Interface i, Layer a, Layer b) {
    auto pair_is = [&](Layer x, Layer y) { return (a == x && b == y) || (a == y && b == x); };
    switch (i) {
        case Interface::Northbound: return pair_is(Layer::Application, Layer::Control);
        case Interface::Southbound: return pair_is(Layer::Control, Layer::Data);
        case Interface::EastWest: return pair_is(Layer::Control, Layer::Control);
        case Interface::DataPlane: return pair_is(Layer::Data, Layer::Data);
        case Interface::Management: return true;
    }
    return false;
}

SdnModel sorted(SdnModel m) {
    sort_by(m.components, [](const Component& c) { return c.id; });
    sort_by(m.flows, [](const DataFlow& f) { return f.id; });
    sort_by(m.boundaries, [](const TrustBoundary& b) { return b.name; });
    sort_by(m.vpls, [](const VplsDomain& d) { return d.name; });
    return m;
}

}  // namespace

std::string_view to_string(ComponentKind k) { return name_of(kKindNames, k); }
std::string_view to_string(Layer l) { return name_of(kLayerNames, l); }
std::string_view to_string(Interface i) { return name_of(kInterfaceNames, i); }

std::optional<ComponentKind> component_kind_from_string(std::string_view s) {
    return value_of<ComponentKind>(kKindNames, s);
}
std::optional<Layer> layer_from_string(std::string_view s) {
    return value_of<Layer>(kLayerNames, s);
}
std::optional<Interface> interface_from_string(std::string_view s) {
    return value_of<Interface>(kInterfaceNames, s);
}

Layer layer_of(ComponentKind k) {
    switch (k) {
        case ComponentKind::Application: return Layer::Application;
        case ComponentKind::Controller: return Layer::Control;
        default: return Layer::Data;
    }
}

const Component* SdnModel::component(std::string_view id) const {
    for (const auto& c : components) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

const DataFlow* SdnModel::flow(std::string_view id) const {
    for (const auto& f : flows) {
        if (f.id == id) return &f;
    }
    return nullptr;
}

std::size_t SdnModel::count(ComponentKind kind) const {
    return static_cast<std::size_t>(std::count_if(
        components.begin(), components.end(), [&](const Component& c) { return c.kind == kind; }));
}

bool SdnModel::crosses_boundary(const DataFlow& f) const {
    return std::any_of(boundaries.begin(), boundaries.end(), [&](const TrustBoundary& b) {
        return b.members.contains(f.src) != b.members.contains(f.dst);
    });
}

const VplsDomain* SdnModel::domain_of(std::string_view host) const {
    for (const auto& d : vpls) {
        if (d.members.contains(std::string(host))) return &d;
    }
    return nullptr;
}

ModelError::ModelError(Code code, std::string subject, std::size_t line)
    : std::runtime_error((code == Code::DanglingReference ? "dangling reference '"
                                                          : "duplicate id '") +
                         subject + "' at line " + std::to_string(line)),
      code_(code),
      subject_(std::move(subject)),
      line_(line) {}

SdnModel parse_model(std::string_view text) {
    static constexpr std::array<std::string_view, 3> kComponentKeys{"kind", "layer", "attr.*"};
    static constexpr std::array<std::string_view, 5> kFlowKeys{"src", "dst", "interface",
                                                               "protocol", "encrypted"};
    static constexpr std::array<std::string_view, 1> kMemberKeys{"members"};

    SdnModel m;
    std::set<std::string> ids;
    std::set<std::string> boundary_names;
    std::set<std::string> vpls_names;
    std::map<std::string, std::size_t> ref_lines;  // unresolved references

    const auto blocks = parse_blocks(text);
    for (const auto& b : blocks) {
        if (b.keyword == "component") {
            require_keys(b, kComponentKeys);
            require_unique_keys(b);
            if (!ids.insert(b.name).second) {
                throw ModelError(ModelError::Code::DuplicateId, b.name, b.line);
            }
            Component c;
            c.id = b.name;
            const auto& kind = require_entry(b, "kind");
            const auto k = component_kind_from_string(kind.value);
            if (!k) throw SyntaxError(kind.line, kind.column, "unknown kind '" + kind.value + "'");
            c.kind = *k;
            c.layer = layer_of(c.kind);
            if (const auto* layer = b.find("layer")) {
                const auto l = layer_from_string(layer->value);
                if (!l) {
                    throw SyntaxError(layer->line, layer->column,
                                      "unknown layer '" + layer->value + "'");
                }
                c.layer = *l;
            }
            for (const auto& e : b.entries) {
                if (e.key.starts_with("attr.")) c.attributes[e.key.substr(5)] = e.value;
            }
            m.components.push_back(std::move(c));
        } else if (b.keyword == "flow") {
            require_keys(b, kFlowKeys);
            require_unique_keys(b);
            if (!ids.insert(b.name).second) {
                throw ModelError(ModelError::Code::DuplicateId, b.name, b.line);
            }
            DataFlow f;
            f.id = b.name;
            const auto& src = require_entry(b, "src");
            const auto& dst = require_entry(b, "dst");
            f.src = src.value;
            f.dst = dst.value;
            ref_lines.emplace(f.src, src.line);
            ref_lines.emplace(f.dst, dst.line);
            const auto& iface = require_entry(b, "interface");
            const auto i = interface_from_string(iface.value);
            if (!i) {
                throw SyntaxError(iface.line, iface.column,
                                  "unknown interface '" + iface.value + "'");
            }
            f.interface = *i;
            f.protocol = require_entry(b, "protocol").value;
            if (const auto* enc = b.find("encrypted")) f.encrypted = parse_bool(*enc);
            m.flows.push_back(std::move(f));
        } else if (b.keyword == "boundary" || b.keyword == "vpls") {
            require_keys(b, kMemberKeys);
            require_unique_keys(b);
            auto& names = b.keyword == "boundary" ? boundary_names : vpls_names;
            if (!names.insert(b.name).second) {
                throw ModelError(ModelError::Code::DuplicateId, b.name, b.line);
            }
            auto members = parse_members(b);
            const auto line = b.find("members")->line;
            for (const auto& id : members) ref_lines.emplace(id, line);
            if (b.keyword == "boundary") {
                m.boundaries.push_back(TrustBoundary{b.name, std::move(members)});
            } else {
                m.vpls.push_back(VplsDomain{b.name, std::move(members)});
            }
        } else {
            throw SyntaxError(b.line, 1, "unknown section '" + b.keyword + "'");
        }
    }

    // References may point forward, so resolve once everything is declared.
    // Report the earliest dangling reference in the file.
    std::optional<std::pair<std::size_t, std::string>> first_dangling;
    for (const auto& [id, line] : ref_lines) {
        if (m.component(id) == nullptr &&
            (!first_dangling || line < first_dangling->first)) {
            first_dangling = {line, id};
        }
    }
    if (first_dangling) {
        throw ModelError(ModelError::Code::DanglingReference, first_dangling->second,
                         first_dangling->first);
    }
    return m;
}

std::string render_model(const SdnModel& model) {
    const auto m = sorted(model);
    std::ostringstream out;
    for (const auto& c : m.components) {
        out << "component " << c.id << "\n";
        out << "  kind = " << to_string(c.kind) << "\n";
        out << "  layer = " << to_string(c.layer) << "\n";
        for (const auto& [k, v] : c.attributes) out << "  attr." << k << " = " << v << "\n";
        out << "\n";
    }
    for (const auto& f : m.flows) {
        out << "flow " << f.id << "\n";
        out << "  src = " << f.src << "\n";
        out << "  dst = " << f.dst << "\n";
        out << "  interface = " << to_string(f.interface) << "\n";
        out << "  protocol = " << f.protocol << "\n";
        out << "  encrypted = " << (f.encrypted ? "true" : "false") << "\n\n";
    }
    for (const auto& b : m.boundaries) {
        out << "boundary " << b.name << "\n  members = " << join(b.members) << "\n\n";
    }
    for (const auto& d : m.vpls) {
        out << "vpls " << d.name << "\n  members = " << join(d.members) << "\n\n";
    }
    auto text = out.str();
    if (!text.empty()) text.pop_back();  // single trailing newline
    return text;
}

std::string_view to_string(ViolationCode c) {
    switch (c) {
        case ViolationCode::DuplicateId: return "DuplicateId";
        case ViolationCode::DanglingReference: return "DanglingReference";
        case ViolationCode::LayerMismatch: return "LayerMismatch";
        case ViolationCode::SelfLoop: return "SelfLoop";
        case ViolationCode::InterfaceMismatch: return "InterfaceMismatch";
        case ViolationCode::EmptyBoundary: return "EmptyBoundary";
        case ViolationCode::VplsNonHost: return "VplsNonHost";
        case ViolationCode::VplsOverlap: return "VplsOverlap";
        case ViolationCode::NoController: return "NoController";
    }
    return "?";
}

std::vector<Violation> validate_model(const SdnModel& m) {
    std::vector<Violation> out;
    auto report = [&](ViolationCode code, std::string subject, std::string detail) {
        out.push_back(Violation{code, std::move(subject), std::move(detail)});
    };

    std::map<std::string, int> id_uses;
    for (const auto& c : m.components) ++id_uses[c.id];
    for (const auto& f : m.flows) ++id_uses[f.id];
    for (const auto& [id, n] : id_uses) {
        if (n > 1) report(ViolationCode::DuplicateId, id, std::to_string(n) + " declarations");
    }

    for (const auto& c : m.components) {
        if (c.layer != layer_of(c.kind)) {
            report(ViolationCode::LayerMismatch, c.id,
                   std::string(to_string(c.kind)) + " declared on layer " +
                       std::string(to_string(c.layer)));
        }
    }
    if (m.count(ComponentKind::Controller) == 0) {
        report(ViolationCode::NoController, "", "model has no Controller");
    }

    for (const auto& f : m.flows) {
        const auto* src = m.component(f.src);
        const auto* dst = m.component(f.dst);
        if (src == nullptr) report(ViolationCode::DanglingReference, f.id, "src " + f.src);
        if (dst == nullptr) report(ViolationCode::DanglingReference, f.id, "dst " + f.dst);
        if (f.src == f.dst) report(ViolationCode::SelfLoop, f.id, "src equals dst");
        if (src != nullptr && dst != nullptr && !interface_fits(f.interface, src->layer, dst->layer)) {
            report(ViolationCode::InterfaceMismatch, f.id,
                   std::string(to_string(f.interface)) + " between " +
                       std::string(to_string(src->layer)) + " and " +
                       std::string(to_string(dst->layer)));
        }
    }

    for (const auto& b : m.boundaries) {
        if (b.members.empty()) report(ViolationCode::EmptyBoundary, b.name, "no members");
        for (const auto& id : b.members) {
            if (m.component(id) == nullptr) {
                report(ViolationCode::DanglingReference, b.name, "member " + id);
            }
        }
    }

    std::map<std::string, std::vector<std::string>> host_domains;
    for (const auto& d : m.vpls) {
        for (const auto& id : d.members) {
            const auto* c = m.component(id);
            if (c == nullptr) {
                report(ViolationCode::DanglingReference, d.name, "member " + id);
            } else if (c->kind != ComponentKind::Host) {
                report(ViolationCode::VplsNonHost, d.name,
                       id + " is " + std::string(to_string(c->kind)));
            }
            host_domains[id].push_back(d.name);
        }
    }
    for (auto& [host, domains] : host_domains) {
        if (domains.size() > 1) {
            std::sort(domains.begin(), domains.end());
            std::string detail = "member of";
            for (const auto& d : domains) detail += " " + d;
            report(ViolationCode::VplsOverlap, host, detail);
        }
    }

    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

InvalidModel::InvalidModel(std::vector<Violation> violations)
    : std::runtime_error("model has " + std::to_string(violations.size()) + " violation(s)" +
                         (violations.empty() ? std::string()
                                             : ", first: " +
                                                   std::string(to_string(violations[0].code)) +
                                                   " " + violations[0].subject)),
      violations_(std::move(violations)) {}

void require_valid(const SdnModel& m) {
    auto v = validate_model(m);
    if (!v.empty()) throw InvalidModel(std::move(v));
}

SdnModel reference_testbed() {
    SdnModel m;
    m.components.push_back(
        {"onos", ComponentKind::Controller, Layer::Control, {{"auth", "password"}, {"os", "linux"}}});
    m.components.push_back(
        {"kali", ComponentKind::AttackerHost, Layer::Data, {{"os", "kali-linux"}}});
    for (int s = 1; s <= 3; ++s) {
        const auto sw = "s" + std::to_string(s);
        m.components.push_back(
            {sw, ComponentKind::ForwardingDevice, Layer::Data, {{"software", "openvswitch"}}});
        m.flows.push_back({"of-" + sw, "onos", sw, Interface::Southbound, "OpenFlow", false});
        for (int h = 1; h <= 3; ++h) {
            const auto host = "h" + std::to_string((s - 1) * 3 + h);
            m.components.push_back({host, ComponentKind::Host, Layer::Data, {{"os", "linux"}}});
            m.flows.push_back({"dp-" + host, host, sw, Interface::DataPlane, "Ethernet", false});
        }
    }
    m.flows.push_back({"dp-kali", "kali", "s1", Interface::DataPlane, "Ethernet", false});
    // Operator Telnet session from h1 into the controller CLI.
    m.flows.push_back({"mgmt-telnet", "h1", "onos", Interface::Management, "Telnet", false});

    m.boundaries.push_back({"control-plane", {"onos"}});
    m.boundaries.push_back(
        {"data-plane", {"h1", "h2", "h3", "h4", "h5", "h6", "h7", "h8", "h9", "s1", "s2", "s3"}});
    // Each tenant has one VM behind every switch.
    m.vpls.push_back({"vpls1", {"h1", "h4", "h7"}});
    m.vpls.push_back({"vpls2", {"h2", "h5", "h8"}});
    m.vpls.push_back({"vpls3", {"h3", "h6", "h9"}});
    return sorted(std::move(m));
}

SdnModel reference_stride_model() {
    SdnModel m;
    m.components.push_back({"app", ComponentKind::Application, Layer::Application, {}});
    m.components.push_back({"ctl1", ComponentKind::Controller, Layer::Control, {}});
    m.components.push_back({"ctl2", ComponentKind::Controller, Layer::Control, {}});
    m.components.push_back({"sw1", ComponentKind::ForwardingDevice, Layer::Data, {}});
    m.flows.push_back({"nb-app-ctl1", "app", "ctl1", Interface::Northbound, "REST", false});
    m.flows.push_back({"ew-ctl1-ctl2", "ctl1", "ctl2", Interface::EastWest, "BGP", false});
    m.flows.push_back({"sb-ctl1-sw1", "ctl1", "sw1", Interface::Southbound, "OpenFlow", false});
    m.flows.push_back({"sb-ctl2-sw1", "ctl2", "sw1", Interface::Southbound, "OpenFlow", false});
    return sorted(std::move(m));
}

}  // namespace sdnsec
