#pragma once

// Discrete-time model of the tenant testbed under three attacks: a
// dictionary attack on a credentialed service, passive capture of a flow
// and a SYN flood against the controller.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sdnsec/risk.hpp"
#include "sdnsec/topology.hpp"

namespace sdnsec {

// The clock advances in ticks of 0.1 simulated seconds.
inline constexpr int kTicksPerSecond = 10;

inline constexpr std::uint64_t kDefaultCapacity = 4'000'000;
inline constexpr std::uint64_t kDefaultWordlistSize = 14'344'392;
inline constexpr int kDefaultOpenFlowPort = 6653;

// Attempt rates calibrated against the reported cracking times at the
// default password index (1000 attempts).
inline constexpr double kPatatorRate = 250.0;
inline constexpr double kHydraRate = 1000.0 / 1320.0;

struct Credential {
    std::string host;
    std::string username;
    std::string password;
    std::uint64_t wordlist_index = 0;

    bool operator==(const Credential&) const = default;
};

struct SimParams {
    std::uint64_t capacity = kDefaultCapacity;
    std::map<std::string, Credential> credentials;  // service -> credential
};

// Telnet on the controller with the vendor default login.
SimParams default_params();

class SimError : public std::runtime_error {
public:
    enum class Code {
        InvalidModel,
        InvalidSpec,
        UnknownHost,
        UnknownFlow,
        TargetNotFound,
        TargetNotController,
        ScenarioMismatch,
    };
    SimError(Code code, const std::string& what);
    Code code() const { return code_; }

private:
    Code code_;
};

struct SimTestbed {
    SdnModel model;
    std::uint64_t capacity = kDefaultCapacity;
    std::set<std::pair<std::string, std::string>> flow_rules;  // directed host pairs
    std::map<std::string, Credential> credentials;
    std::map<std::string, bool> services_up;  // per VPLS domain
    bool saturated = false;
    std::int64_t clock = 0;  // ticks
    std::set<std::string> compromised;  // services whose login was found

    double seconds() const { return static_cast<double>(clock) / kTicksPerSecond; }
    bool all_services_up() const;
    bool operator==(const SimTestbed&) const = default;
};

// Throws InvalidModel for a model with violations, SimError(InvalidModel)
// for one without VPLS domains.
SimTestbed make_testbed(const SdnModel& m, const SimParams& params = default_params());

// Both ends must be hosts; reachable iff they share a domain whose service
// is up and the controller is not saturated.
bool ping(const SimTestbed& tb, std::string_view src, std::string_view dst);

struct DictionarySpec {
    std::string service;
    std::uint64_t wordlist_size = kDefaultWordlistSize;
    double rate = kPatatorRate;  // attempts per second
};

struct EavesdropSpec {
    std::string flow;
    double duration = 10.0;
};

struct SynFloodSpec {
    std::string target;
    int port = kDefaultOpenFlowPort;
    double rate = 500'000.0;  // packets per second
    double duration = 8.0;
};

using AttackSpec = std::variant<DictionarySpec, EavesdropSpec, SynFloodSpec>;

enum class ScenarioKind { Dictionary, Eavesdrop, SynFlood };
std::string_view to_string(ScenarioKind k);
ScenarioKind kind_of(const AttackSpec& spec);

enum class EventKind {
    AttackStarted,
    CredentialFound,
    WordlistExhausted,
    CaptureStarted,
    Captured,
    CaptureStopped,
    ControllerSaturated,
    ServiceTerminated,
    FloodStopped,
};
std::string_view to_string(EventKind k);

struct SimEvent {
    double t = 0.0;  // simulated seconds since the testbed was built
    EventKind kind = EventKind::AttackStarted;
    std::string detail;

    bool operator==(const SimEvent&) const = default;
};

enum class ArtifactKind { Metadata, Payload, Credentials, Topology };
std::string_view to_string(ArtifactKind k);

struct CapturedArtifact {
    ArtifactKind kind = ArtifactKind::Metadata;
    std::string detail;

    bool operator==(const CapturedArtifact&) const = default;
};

enum class ImpactScope { None, SingleHost, AllTenants, WholeNetwork };
std::string_view to_string(ImpactScope s);

struct SimOutcome {
    bool success = false;
    double elapsed = 0.0;  // seconds from attack start to success or end
    std::uint64_t attempts = 0;
    std::uint64_t packets = 0;
    std::optional<double> disruption_time;  // seconds from attack start
    std::vector<CapturedArtifact> captured;
    std::vector<std::string> services_terminated;
    ImpactScope scope = ImpactScope::None;

    // Everything captured beyond endpoint metadata.
    std::size_t payload_count() const;
    bool operator==(const SimOutcome&) const = default;
};

struct SimResult {
    ScenarioKind kind = ScenarioKind::Dictionary;
    std::string target;
    std::vector<SimEvent> events;
    SimOutcome outcome;

    bool operator==(const SimResult&) const = default;
};

SimResult run_dictionary_attack(SimTestbed& tb, const DictionarySpec& spec);
SimResult run_eavesdrop(SimTestbed& tb, const EavesdropSpec& spec);
SimResult run_syn_flood(SimTestbed& tb, const SynFloodSpec& spec);
SimResult run_attack(SimTestbed& tb, const AttackSpec& spec);

// Restores every service and clears saturation; the clock is kept.
SimTestbed reconfigure_vpls(SimTestbed tb);

struct VerificationReport {
    ScenarioKind scenario = ScenarioKind::Dictionary;
    std::string category;
    cvss::Severity severity = cvss::Severity::None;
    ImpactScope observed = ImpactScope::None;
    ImpactScope required = ImpactScope::None;
    bool consistent = false;
    std::string explanation;

    bool operator==(const VerificationReport&) const = default;
};

// Dictionary -> TC2, Eavesdrop -> TC3, SynFlood -> TC4.
std::string_view category_for(ScenarioKind k);

// Throws SimError(ScenarioMismatch) when `tc` is not the scenario's category.
VerificationReport verify_impact(const SimResult& result, const ThreatCategoryRecord& tc);

struct Scenario {
    std::string name;
    AttackSpec spec;
    SimParams params;
};

// One `scenario` block, optional `testbed` block (capacity) and optional
// `credential <service>` blocks replacing the default credential store.
Scenario parse_scenario(std::string_view text);

std::string render_timeline(const SimResult& r);

}  // namespace sdnsec
