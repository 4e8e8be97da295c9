#include "sdnsec/attack_sim.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "sdnsec/blocks.hpp"

namespace sdnsec {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i != 0) out += sep;
        out += items[i];
    }
    return out;
}

std::string format_rate(double r) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%g", r);
    return buf.data();
}

std::int64_t ticks_ceil(double seconds) {
    return static_cast<std::int64_t>(std::ceil(seconds * kTicksPerSecond - 1e-9));
}

void require_positive(double v, std::string_view what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw SimError(SimError::Code::InvalidSpec, std::string(what) + " must be positive");
    }
}

const Component& require_host(const SimTestbed& tb, std::string_view id) {
    const auto* c = tb.model.component(id);
    if (c == nullptr || c->kind != ComponentKind::Host) {
        throw SimError(SimError::Code::UnknownHost, "'" + std::string(id) + "' is not a host");
    }
    return *c;
}

std::set<std::pair<std::string, std::string>> compute_flow_rules(const SdnModel& m) {
    std::set<std::pair<std::string, std::string>> rules;
    for (const auto& d : m.vpls) {
        for (const auto& a : d.members) {
            for (const auto& b : d.members) {
                if (a != b) rules.emplace(a, b);
            }
        }
    }
    return rules;
}

ImpactScope scope_of_host(const SimTestbed& tb, std::string_view host) {
    const auto* c = tb.model.component(host);
    if (c != nullptr && c->kind == ComponentKind::Controller) return ImpactScope::WholeNetwork;
    return ImpactScope::SingleHost;
}

}  // namespace

SimParams default_params() {
    SimParams p;
    p.credentials["telnet@onos"] = Credential{"onos", "onos", "rocks", 999};
    return p;
}

SimError::SimError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}

bool SimTestbed::all_services_up() const {
    return std::all_of(services_up.begin(), services_up.end(),
                       [](const auto& kv) { return kv.second; });
}

SimTestbed make_testbed(const SdnModel& m, const SimParams& params) {
    require_valid(m);
    if (m.vpls.empty()) {
        throw SimError(SimError::Code::InvalidModel, "the testbed needs at least one VPLS domain");
    }
    if (params.capacity == 0) {
        throw SimError(SimError::Code::InvalidSpec, "controller capacity must be positive");
    }
    SimTestbed tb;
    tb.model = m;
    tb.capacity = params.capacity;
    tb.credentials = params.credentials;
    tb.flow_rules = compute_flow_rules(m);
    for (const auto& d : m.vpls) tb.services_up[d.name] = true;
    return tb;
}

bool ping(const SimTestbed& tb, std::string_view src, std::string_view dst) {
    require_host(tb, src);
    require_host(tb, dst);
    if (tb.saturated) return false;
    if (!tb.flow_rules.contains({std::string(src), std::string(dst)})) return false;
    const auto* d = tb.model.domain_of(src);
    return d != nullptr && tb.services_up.at(d->name);
}

std::string_view to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Dictionary: return "dictionary";
        case ScenarioKind::Eavesdrop: return "eavesdrop";
        case ScenarioKind::SynFlood: return "syn-flood";
    }
    return "?";
}

ScenarioKind kind_of(const AttackSpec& spec) {
    return static_cast<ScenarioKind>(spec.index());
}

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::AttackStarted: return "attack-started";
        case EventKind::CredentialFound: return "credential-found";
        case EventKind::WordlistExhausted: return "wordlist-exhausted";
        case EventKind::CaptureStarted: return "capture-started";
        case EventKind::Captured: return "captured";
        case EventKind::CaptureStopped: return "capture-stopped";
        case EventKind::ControllerSaturated: return "controller-saturated";
        case EventKind::ServiceTerminated: return "service-terminated";
        case EventKind::FloodStopped: return "flood-stopped";
    }
    return "?";
}

std::string_view to_string(ArtifactKind k) {
    switch (k) {
        case ArtifactKind::Metadata: return "metadata";
        case ArtifactKind::Payload: return "payload";
        case ArtifactKind::Credentials: return "credentials";
        case ArtifactKind::Topology: return "topology";
    }
    return "?";
}

std::string_view to_string(ImpactScope s) {
    switch (s) {
        case ImpactScope::None: return "none";
        case ImpactScope::SingleHost: return "single-host";
        case ImpactScope::AllTenants: return "all-tenants";
        case ImpactScope::WholeNetwork: return "whole-network";
    }
    return "?";
}

std::size_t SimOutcome::payload_count() const {
    return static_cast<std::size_t>(
        std::count_if(captured.begin(), captured.end(),
                      [](const CapturedArtifact& a) { return a.kind != ArtifactKind::Metadata; }));
}

SimResult run_dictionary_attack(SimTestbed& tb, const DictionarySpec& spec) {
    require_positive(spec.rate, "attempt rate");
    const auto it = tb.credentials.find(spec.service);
    if (it == tb.credentials.end()) {
        throw SimError(SimError::Code::TargetNotFound,
                       "no credentialed service '" + spec.service + "'");
    }
    const auto& cred = it->second;
    const double start = tb.seconds();

    SimResult r;
    r.kind = ScenarioKind::Dictionary;
    r.target = spec.service;
    r.events.push_back({start, EventKind::AttackStarted,
                        spec.service + ", wordlist of " + std::to_string(spec.wordlist_size) +
                            " at " + format_rate(spec.rate) + " attempts/s"});

    const bool found = cred.wordlist_index < spec.wordlist_size;
    r.outcome.success = found;
    r.outcome.attempts = found ? cred.wordlist_index + 1 : spec.wordlist_size;
    r.outcome.elapsed = static_cast<double>(r.outcome.attempts) / spec.rate;
    if (found) {
        r.outcome.captured.push_back(
            {ArtifactKind::Credentials, spec.service + " " + cred.username + "/" + cred.password});
        r.outcome.scope = scope_of_host(tb, cred.host);
        r.events.push_back({start + r.outcome.elapsed, EventKind::CredentialFound,
                            cred.username + "/" + cred.password + " after " +
                                std::to_string(r.outcome.attempts) + " attempts"});
        tb.compromised.insert(spec.service);
    } else {
        r.events.push_back({start + r.outcome.elapsed, EventKind::WordlistExhausted,
                            "password not in wordlist after " +
                                std::to_string(r.outcome.attempts) + " attempts"});
    }
    tb.clock += ticks_ceil(r.outcome.elapsed);
    return r;
}

SimResult run_eavesdrop(SimTestbed& tb, const EavesdropSpec& spec) {
    require_positive(spec.duration, "capture duration");
    const auto* f = tb.model.flow(spec.flow);
    if (f == nullptr) throw SimError(SimError::Code::UnknownFlow, "no flow '" + spec.flow + "'");
    const double start = tb.seconds();

    SimResult r;
    r.kind = ScenarioKind::Eavesdrop;
    r.target = f->id;
    r.events.push_back({start, EventKind::CaptureStarted,
                        f->id + " (" + f->protocol + ", " + f->src + " -> " + f->dst + ")"});

    auto& cap = r.outcome.captured;
    cap.push_back({ArtifactKind::Metadata,
                   "endpoints " + f->src + " -> " + f->dst + ", protocol " + f->protocol +
                       (f->encrypted ? ", encrypted" : ", cleartext")});
    if (!f->encrypted) {
        cap.push_back({ArtifactKind::Payload, f->protocol + " payload"});
        if (iequals(f->protocol, "Telnet")) {
            for (const auto& [service, cred] : tb.credentials) {
                if (cred.host == f->src || cred.host == f->dst) {
                    cap.push_back({ArtifactKind::Credentials,
                                   service + " " + cred.username + "/" + cred.password});
                    r.outcome.scope = std::max(r.outcome.scope, scope_of_host(tb, cred.host));
                }
            }
        } else if (iequals(f->protocol, "OpenFlow")) {
            std::vector<std::string> switches, hosts, services;
            for (const auto& c : tb.model.components) {
                if (c.kind == ComponentKind::ForwardingDevice) switches.push_back(c.id);
                if (c.kind == ComponentKind::Host) hosts.push_back(c.id);
            }
            for (const auto& d : tb.model.vpls) services.push_back(d.name);
            cap.push_back({ArtifactKind::Topology, "switches " + join(switches, ",") + "; hosts " +
                                                       join(hosts, ",") + "; services " +
                                                       join(services, ",")});
            r.outcome.scope = std::max(r.outcome.scope, ImpactScope::AllTenants);
        }
        r.outcome.scope = std::max(r.outcome.scope, ImpactScope::SingleHost);
    }
    for (const auto& a : cap) {
        r.events.push_back({start, EventKind::Captured,
                            std::string(to_string(a.kind)) + ": " + a.detail});
    }
    if (r.outcome.payload_count() == 0) {
        r.events.push_back({start, EventKind::Captured, "no payloads captured"});
    }
    r.outcome.success = r.outcome.payload_count() > 0;
    r.outcome.elapsed = spec.duration;
    tb.clock += ticks_ceil(spec.duration);
    r.events.push_back({tb.seconds(), EventKind::CaptureStopped, f->id});
    return r;
}

SimResult run_syn_flood(SimTestbed& tb, const SynFloodSpec& spec) {
    require_positive(spec.rate, "flood rate");
    require_positive(spec.duration, "flood duration");
    if (spec.port <= 0 || spec.port > 65535) {
        throw SimError(SimError::Code::InvalidSpec, "port out of range");
    }
    const auto* c = tb.model.component(spec.target);
    if (c == nullptr || c->kind != ComponentKind::Controller) {
        throw SimError(SimError::Code::TargetNotController,
                       "'" + spec.target + "' is not a controller");
    }
    const std::int64_t start = tb.clock;
    const auto at = [&](std::int64_t tick) {
        return static_cast<double>(start + tick) / kTicksPerSecond;
    };
    const double cap = static_cast<double>(tb.capacity);
    const auto cumulative = [&](std::int64_t tick) {
        return spec.rate * static_cast<double>(tick) / kTicksPerSecond;
    };
    // First tick whose cumulative packet count meets the capacity.
    auto k = static_cast<std::int64_t>(std::ceil(cap * kTicksPerSecond / spec.rate));
    while (k > 1 && cumulative(k - 1) >= cap) --k;
    while (cumulative(k) < cap) ++k;
    const auto duration_ticks = ticks_ceil(spec.duration);

    SimResult r;
    r.kind = ScenarioKind::SynFlood;
    r.target = spec.target + ":" + std::to_string(spec.port);
    r.events.push_back({at(0), EventKind::AttackStarted,
                        "SYN flood on " + r.target + " at " + format_rate(spec.rate) +
                            " packets/s"});

    double active = spec.duration;
    if (tb.saturated) {
        r.outcome.disruption_time = 0.0;
    } else if (k <= duration_ticks) {
        const double t = static_cast<double>(k) / kTicksPerSecond;
        active = std::min(spec.duration, t);
        r.outcome.disruption_time = t;
        tb.saturated = true;
        r.events.push_back({at(k), EventKind::ControllerSaturated,
                            spec.target + " saturated after " +
                                std::to_string(static_cast<std::uint64_t>(
                                    std::floor(spec.rate * t + 1e-6))) +
                                " packets"});
        for (auto& [name, up] : tb.services_up) {
            if (!up) continue;
            up = false;
            r.outcome.services_terminated.push_back(name);
            r.events.push_back({at(k), EventKind::ServiceTerminated, name});
        }
    }
    r.outcome.packets = static_cast<std::uint64_t>(std::floor(spec.rate * active + 1e-6));
    r.outcome.success = r.outcome.disruption_time.has_value();
    r.outcome.scope = r.outcome.success ? ImpactScope::WholeNetwork : ImpactScope::None;
    r.outcome.elapsed = spec.duration;
    tb.clock += duration_ticks;
    r.events.push_back({at(duration_ticks), EventKind::FloodStopped,
                        std::to_string(r.outcome.packets) + " packets sent" +
                            (tb.saturated ? ", services stay down" : "")});
    return r;
}

SimResult run_attack(SimTestbed& tb, const AttackSpec& spec) {
    return std::visit(
        [&](const auto& s) -> SimResult {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DictionarySpec>) {
                return run_dictionary_attack(tb, s);
            } else if constexpr (std::is_same_v<T, EavesdropSpec>) {
                return run_eavesdrop(tb, s);
            } else {
                return run_syn_flood(tb, s);
            }
        },
        spec);
}

SimTestbed reconfigure_vpls(SimTestbed tb) {
    tb.saturated = false;
    tb.flow_rules = compute_flow_rules(tb.model);
    for (auto& [name, up] : tb.services_up) up = true;
    return tb;
}

std::string_view category_for(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Dictionary: return "TC2";
        case ScenarioKind::Eavesdrop: return "TC3";
        case ScenarioKind::SynFlood: return "TC4";
    }
    return "?";
}

VerificationReport verify_impact(const SimResult& result, const ThreatCategoryRecord& tc) {
    if (tc.id != category_for(result.kind)) {
        throw SimError(SimError::Code::ScenarioMismatch,
                       std::string(to_string(result.kind)) + " verifies " +
                           std::string(category_for(result.kind)) + ", not " + tc.id);
    }
    VerificationReport v;
    v.scenario = result.kind;
    v.category = tc.id;
    v.severity = cvss::severity(tc.base);
    v.observed = result.outcome.scope;
    if (result.kind == ScenarioKind::SynFlood) {
        // A single controller is a single point of failure for every tenant.
        v.required = ImpactScope::WholeNetwork;
    } else if (v.severity >= cvss::Severity::High) {
        v.required = ImpactScope::AllTenants;
    } else if (v.severity > cvss::Severity::None) {
        v.required = ImpactScope::SingleHost;
    }
    v.consistent = v.observed >= v.required;
    v.explanation = "observed " + std::string(to_string(v.observed)) + " impact, " + tc.id + " (" +
                    std::string(cvss::to_string(v.severity)) + ") requires at least " +
                    std::string(to_string(v.required));
    return v;
}

Scenario parse_scenario(std::string_view text) {
    const auto blocks = parse_blocks(text);
    Scenario sc;
    sc.params = default_params();
    bool custom_credentials = false;
    const Block* scenario = nullptr;
    for (const auto& b : blocks) {
        require_unique_keys(b);
        if (b.keyword == "scenario") {
            if (scenario != nullptr) throw SyntaxError(b.line, 1, "more than one scenario block");
            scenario = &b;
        } else if (b.keyword == "testbed") {
            static constexpr std::array<std::string_view, 1> keys{"capacity"};
            require_keys(b, keys);
            if (const auto* e = b.find("capacity")) {
                const auto v = parse_integer(*e);
                if (v <= 0) throw SyntaxError(e->line, e->column, "capacity must be positive");
                sc.params.capacity = static_cast<std::uint64_t>(v);
            }
        } else if (b.keyword == "credential") {
            static constexpr std::array<std::string_view, 4> keys{"host", "username", "password",
                                                                  "index"};
            require_keys(b, keys);
            if (!custom_credentials) sc.params.credentials.clear();
            custom_credentials = true;
            const auto& idx = require_entry(b, "index");
            const auto v = parse_integer(idx);
            if (v < 0) throw SyntaxError(idx.line, idx.column, "index must not be negative");
            sc.params.credentials[b.name] =
                Credential{require_entry(b, "host").value, require_entry(b, "username").value,
                           require_entry(b, "password").value, static_cast<std::uint64_t>(v)};
        } else {
            throw SyntaxError(b.line, 1, "unknown block '" + b.keyword + "'");
        }
    }
    if (scenario == nullptr) throw SyntaxError(1, 1, "no scenario block");
    const auto& b = *scenario;
    sc.name = b.name;
    const auto& type = require_entry(b, "type");
    const auto positive = [](const Entry& e) {
        const double v = parse_double(e);
        if (!(v > 0.0)) throw SyntaxError(e.line, e.column, e.key + " must be positive");
        return v;
    };
    if (type.value == "dictionary") {
        static constexpr std::array<std::string_view, 5> keys{"type", "service", "wordlist-size",
                                                              "rate", "preset"};
        require_keys(b, keys);
        DictionarySpec d;
        d.service = require_entry(b, "service").value;
        if (const auto* e = b.find("wordlist-size")) {
            const auto v = parse_integer(*e);
            if (v <= 0) throw SyntaxError(e->line, e->column, "wordlist-size must be positive");
            d.wordlist_size = static_cast<std::uint64_t>(v);
        }
        const auto* rate = b.find("rate");
        const auto* preset = b.find("preset");
        if (rate != nullptr && preset != nullptr) {
            throw SyntaxError(preset->line, 1, "give either rate or preset");
        }
        if (rate != nullptr) d.rate = positive(*rate);
        if (preset != nullptr) {
            if (preset->value == "patator") {
                d.rate = kPatatorRate;
            } else if (preset->value == "hydra") {
                d.rate = kHydraRate;
            } else {
                throw SyntaxError(preset->line, preset->column,
                                  "unknown preset '" + preset->value + "'");
            }
        }
        sc.spec = d;
    } else if (type.value == "eavesdrop") {
        static constexpr std::array<std::string_view, 3> keys{"type", "flow", "duration"};
        require_keys(b, keys);
        EavesdropSpec e;
        e.flow = require_entry(b, "flow").value;
        if (const auto* d = b.find("duration")) e.duration = positive(*d);
        sc.spec = e;
    } else if (type.value == "syn-flood") {
        static constexpr std::array<std::string_view, 5> keys{"type", "target", "port", "rate",
                                                              "duration"};
        require_keys(b, keys);
        SynFloodSpec s;
        s.target = require_entry(b, "target").value;
        if (const auto* e = b.find("port")) {
            const auto v = parse_integer(*e);
            if (v <= 0 || v > 65535) throw SyntaxError(e->line, e->column, "port out of range");
            s.port = static_cast<int>(v);
        }
        if (const auto* e = b.find("rate")) s.rate = positive(*e);
        if (const auto* e = b.find("duration")) s.duration = positive(*e);
        sc.spec = s;
    } else {
        throw SyntaxError(type.line, type.column, "unknown scenario type '" + type.value + "'");
    }
    return sc;
}

std::string render_timeline(const SimResult& r) {
    std::string out;
    for (const auto& e : r.events) {
        std::array<char, 64> head{};
        std::snprintf(head.data(), head.size(), "%10.1f s  %-20s ", e.t,
                      std::string(to_string(e.kind)).c_str());
        out += head.data();
        out += e.detail;
        out += '\n';
    }
    return out;
}

}  // namespace sdnsec
