#include <doctest.h>

#include <algorithm>
#include <random>

#include "sdnsec/blocks.hpp"
#include "sdnsec/topology.hpp"
#include "support.hpp"

using namespace sdnsec;

namespace {

SdnModel random_model(std::mt19937& rng) {
    const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const ComponentKind kinds[] = {ComponentKind::Application, ComponentKind::Controller,
                                   ComponentKind::ForwardingDevice, ComponentKind::Host,
                                   ComponentKind::AttackerHost};
    const Interface ifaces[] = {Interface::Northbound, Interface::Southbound, Interface::EastWest,
                                Interface::DataPlane, Interface::Management};
    const char* values[] = {"linux", "a b", "x=y", "v1.2,3", "@home"};
    SdnModel m;
    const int n = pick(1, 12);
    for (int i = 0; i < n; ++i) {
        Component c;
        c.id = "c" + std::to_string(i);
        c.kind = kinds[pick(0, 4)];
        c.layer = layer_of(c.kind);
        for (int a = pick(0, 2); a > 0; --a) c.attributes["k" + std::to_string(pick(0, 3))] = values[pick(0, 4)];
        m.components.push_back(c);
    }
    for (int i = pick(0, 10); i > 0; --i) {
        DataFlow f;
        f.id = "f" + std::to_string(i);
        f.src = "c" + std::to_string(pick(0, n - 1));
        f.dst = "c" + std::to_string(pick(0, n - 1));
        f.interface = ifaces[pick(0, 4)];
        f.protocol = pick(0, 1) ? "OpenFlow" : "TLS 1.3";
        f.encrypted = pick(0, 1) == 1;
        m.flows.push_back(f);
    }
    for (int i = pick(0, 2); i > 0; --i) {
        TrustBoundary b{"b" + std::to_string(i), {}};
        for (int k = pick(1, 3); k > 0; --k) b.members.insert("c" + std::to_string(pick(0, n - 1)));
        m.boundaries.push_back(b);
    }
    for (int i = pick(0, 2); i > 0; --i) {
        VplsDomain d{"v" + std::to_string(i), {}};
        for (int k = pick(1, 3); k > 0; --k) d.members.insert("c" + std::to_string(pick(0, n - 1)));
        m.vpls.push_back(d);
    }
    return m;
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937& rng) {
    std::shuffle(v.begin(), v.end(), rng);
}

}  // namespace

TEST_CASE("topology: reference testbed shape") {
    const auto m = reference_testbed();
    CHECK(m.components.size() == 14);
    CHECK(m.count(ComponentKind::Controller) == 1);
    CHECK(m.count(ComponentKind::ForwardingDevice) == 3);
    CHECK(m.count(ComponentKind::Host) == 9);
    CHECK(m.count(ComponentKind::AttackerHost) == 1);
    CHECK(m.vpls.size() == 3);
    CHECK(validate_model(m).empty());
    REQUIRE(m.domain_of("h4") != nullptr);
    CHECK(m.domain_of("h4")->name == "vpls1");
    CHECK(m.domain_of("kali") == nullptr);
    const auto* telnet = m.flow("mgmt-telnet");
    REQUIRE(telnet != nullptr);
    CHECK(telnet->protocol == "Telnet");
    CHECK_FALSE(telnet->encrypted);
    CHECK(m.crosses_boundary(*telnet));
    CHECK_FALSE(m.crosses_boundary(*m.flow("dp-h1")));
}

TEST_CASE("topology: shipped model files equal the built-in models") {
    CHECK(parse_model(test::slurp(test::source_path("data/models/reference_testbed.sdn"))) ==
          parse_model(render_model(reference_testbed())));
    CHECK(parse_model(test::slurp(test::source_path("data/models/reference_stride.sdn"))) ==
          parse_model(render_model(reference_stride_model())));
}

TEST_CASE("topology: render/parse round trip on random models") {
    std::mt19937 rng(7);
    for (int i = 0; i < 300; ++i) {
        const auto m = random_model(rng);
        const auto text = render_model(m);
        const auto back = parse_model(text);
        CHECK(render_model(back) == text);
        CHECK(back.components.size() == m.components.size());
        CHECK(back.flows.size() == m.flows.size());
        auto shuffled = m;
        shuffle(shuffled.components, rng);
        shuffle(shuffled.flows, rng);
        CHECK(render_model(shuffled) == text);
    }
}

TEST_CASE("topology: validation does not depend on declaration order") {
    std::mt19937 rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto m = random_model(rng);
        auto shuffled = m;
        shuffle(shuffled.components, rng);
        shuffle(shuffled.flows, rng);
        shuffle(shuffled.boundaries, rng);
        shuffle(shuffled.vpls, rng);
        CHECK(validate_model(shuffled) == validate_model(m));
    }
}

TEST_CASE("topology: defaults and forward references") {
    const auto m = parse_model(
        "flow f\n  src = a\n  dst = b\n  interface = southbound\n  protocol = OpenFlow\n"
        "component a\n  kind = Controller\n"
        "component b\n  kind = ForwardingDevice\n");
    CHECK(m.component("a")->layer == Layer::Control);
    CHECK(m.component("b")->layer == Layer::Data);
    CHECK_FALSE(m.flow("f")->encrypted);
    CHECK(validate_model(m).empty());
}

TEST_CASE("topology: parse errors") {
    SUBCASE("dangling reference reports the earliest line") {
        try {
            parse_model("component a\n  kind = Controller\nflow f\n  src = a\n  dst = ghost\n"
                        "  interface = southbound\n  protocol = OpenFlow\n"
                        "vpls v\n  members = zz\n");
            FAIL("no error");
        } catch (const ModelError& e) {
            CHECK(e.code() == ModelError::Code::DanglingReference);
            CHECK(e.subject() == "ghost");
            CHECK(e.line() == 5);
        }
    }
    SUBCASE("ids are unique across components and flows") {
        try {
            parse_model("component a\n  kind = Host\nflow a\n  src = a\n  dst = a\n"
                        "  interface = dataplane\n  protocol = x\n");
            FAIL("no error");
        } catch (const ModelError& e) {
            CHECK(e.code() == ModelError::Code::DuplicateId);
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("unknown values are syntax errors") {
        CHECK_THROWS_AS(parse_model("component a\n  kind = Router\n"), SyntaxError);
        CHECK_THROWS_AS(parse_model("component a\n  kind = Host\n  colour = red\n"), SyntaxError);
        CHECK_THROWS_AS(parse_model("switch a\n  kind = Host\n"), SyntaxError);
        CHECK_THROWS_AS(parse_model("component a\n  kind = Host\n  kind = Host\n"), SyntaxError);
    }
}

TEST_CASE("topology: each violation code") {
    const auto codes = [](const SdnModel& m) {
        std::vector<ViolationCode> out;
        for (const auto& v : validate_model(m)) out.push_back(v.code);
        return out;
    };
    const auto base = reference_testbed();
    using V = std::vector<ViolationCode>;

    auto m = base;
    m.components.push_back(m.components.front());
    CHECK(codes(m) == V{ViolationCode::DuplicateId});

    m = base;
    m.flows.push_back({"x", "h1", "nowhere", Interface::DataPlane, "Ethernet", false});
    CHECK(codes(m) == V{ViolationCode::DanglingReference});

    m = base;
    m.components.push_back({"odd", ComponentKind::Host, Layer::Control, {}});
    CHECK(codes(m) == V{ViolationCode::LayerMismatch});

    m = base;
    m.flows.push_back({"loop", "h1", "h1", Interface::DataPlane, "Ethernet", false});
    CHECK(codes(m) == V{ViolationCode::SelfLoop});

    m = base;
    m.flows.push_back({"nb", "h1", "onos", Interface::Northbound, "REST", false});
    CHECK(codes(m) == V{ViolationCode::InterfaceMismatch});

    m = base;
    m.boundaries.push_back({"empty", {}});
    CHECK(codes(m) == V{ViolationCode::EmptyBoundary});

    m = base;
    m.vpls.push_back({"vpls4", {"s1"}});
    CHECK(codes(m) == V{ViolationCode::VplsNonHost});

    m = base;
    m.vpls.push_back({"vpls4", {"h1"}});
    CHECK(codes(m) == V{ViolationCode::VplsOverlap});

    m = base;
    std::erase_if(m.components, [](const Component& c) { return c.kind == ComponentKind::Controller; });
    std::erase_if(m.flows, [](const DataFlow& f) { return f.dst == "onos" || f.src == "onos"; });
    std::erase_if(m.boundaries, [](const TrustBoundary& b) { return b.name == "control-plane"; });
    CHECK(codes(m) == V{ViolationCode::NoController});

    CHECK_THROWS_AS(require_valid(m), InvalidModel);
    CHECK_NOTHROW(require_valid(base));
}

TEST_CASE("topology: interface fit") {
    auto m = reference_stride_model();
    CHECK(validate_model(m).empty());
    m.flows.push_back({"mgmt", "app", "sw1", Interface::Management, "SSH", true});
    CHECK(validate_model(m).empty());
    m.flows.push_back({"bad-ew", "ctl1", "sw1", Interface::EastWest, "BGP", false});
    REQUIRE(validate_model(m).size() == 1);
    CHECK(validate_model(m)[0].subject == "bad-ew");
}
