#pragma once

// Declarative model of an SDN deployment: components on three layers, the
// data flows between them, trust boundaries and VPLS tenant domains.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sdnsec {

enum class ComponentKind { Application, Controller, ForwardingDevice, Host, AttackerHost };
enum class Layer { Application, Control, Data };
enum class Interface { Northbound, Southbound, EastWest, DataPlane, Management };

std::string_view to_string(ComponentKind k);
std::string_view to_string(Layer l);
std::string_view to_string(Interface i);
std::optional<ComponentKind> component_kind_from_string(std::string_view s);
std::optional<Layer> layer_from_string(std::string_view s);
std::optional<Interface> interface_from_string(std::string_view s);

Layer layer_of(ComponentKind k);

struct Component {
    std::string id;
    ComponentKind kind = ComponentKind::Host;
    Layer layer = Layer::Data;
    std::map<std::string, std::string> attributes;

    bool operator==(const Component&) const = default;
};

struct DataFlow {
    std::string id;
    std::string src;
    std::string dst;
    Interface interface = Interface::DataPlane;
    std::string protocol;
    bool encrypted = false;

    bool operator==(const DataFlow&) const = default;
};

struct TrustBoundary {
    std::string name;
    std::set<std::string> members;

    bool operator==(const TrustBoundary&) const = default;
};

struct VplsDomain {
    std::string name;
    std::set<std::string> members;

    bool operator==(const VplsDomain&) const = default;
};

struct SdnModel {
    std::vector<Component> components;
    std::vector<DataFlow> flows;
    std::vector<TrustBoundary> boundaries;
    std::vector<VplsDomain> vpls;

    const Component* component(std::string_view id) const;
    const DataFlow* flow(std::string_view id) const;
    std::size_t count(ComponentKind kind) const;
    // True when exactly one endpoint of the flow sits inside some boundary.
    bool crosses_boundary(const DataFlow& f) const;
    // Domain containing the host, if any.
    const VplsDomain* domain_of(std::string_view host) const;

    bool operator==(const SdnModel&) const = default;
};

class ModelError : public std::runtime_error {
public:
    enum class Code { DanglingReference, DuplicateId };
    ModelError(Code code, std::string subject, std::size_t line);
    Code code() const { return code_; }
    const std::string& subject() const { return subject_; }
    std::size_t line() const { return line_; }

private:
    Code code_;
    std::string subject_;
    std::size_t line_;
};

// Throws SyntaxError (malformed text, unknown keys) or ModelError.
SdnModel parse_model(std::string_view text);
// Stable text form: components, flows, boundaries, vpls, each sorted by id.
std::string render_model(const SdnModel& m);

enum class ViolationCode {
    DuplicateId,
    DanglingReference,
    LayerMismatch,
    SelfLoop,
    InterfaceMismatch,
    EmptyBoundary,
    VplsNonHost,
    VplsOverlap,
    NoController,
};

std::string_view to_string(ViolationCode c);

struct Violation {
    ViolationCode code;
    std::string subject;
    std::string detail;

    auto operator<=>(const Violation&) const = default;
};

// Empty iff every model invariant holds. Sorted, so the result does not
// depend on declaration order.
std::vector<Violation> validate_model(const SdnModel& m);

// Raised by operations whose precondition is a model with no violations.
class InvalidModel : public std::runtime_error {
public:
    explicit InvalidModel(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

// Throws InvalidModel unless validate_model(m) is empty.
void require_valid(const SdnModel& m);

// One ONOS-style controller, three switches with three VMs each, a Kali
// attacker node and three VPLS tenant domains.
SdnModel reference_testbed();
// One application, two controllers, one forwarding device.
SdnModel reference_stride_model();

}  // namespace sdnsec
