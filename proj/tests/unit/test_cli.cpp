#include <doctest.h>

#include <cstdlib>

#include "sdnsec/records.hpp"
#include "support.hpp"

using namespace sdnsec;
using test::run_cli;

namespace {

const std::string kTestbed = test::source_path("data/models/reference_testbed.sdn");
const std::string kStride = test::source_path("data/models/reference_stride.sdn");

std::string scenario(const std::string& name) {
    return test::source_path("data/scenarios/" + name + ".scn");
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("cli: usage") {
    CHECK(run_cli({}).status == cli::kUsage);
    CHECK(run_cli({"frobnicate"}).status == cli::kUsage);
    CHECK(run_cli({"validate"}).status == cli::kUsage);
    const auto help = run_cli({"--help"});
    CHECK(help.status == cli::kOk);
    CHECK(contains(help.out, "simulate"));
}

TEST_CASE("cli: validate") {
    auto r = run_cli({"validate", "--model", kTestbed});
    CHECK(r.status == cli::kOk);
    CHECK(r.out ==
          "reference_testbed.sdn: 14 components, 14 flows, 2 trust boundaries, 3 VPLS domains, "
          "no violations\n");

    const auto dir = test::scratch("cli-validate");
    test::spit(dir / "dangling.sdn",
               "component a\n  kind = Host\n  layer = data\n"
               "flow f\n  src = a\n  dst = zz\n  interface = dataplane\n  protocol = x\n"
               "  encrypted = false\n");
    r = run_cli({"validate", "--model", (dir / "dangling.sdn").string()});
    CHECK(r.status == cli::kFindings);
    CHECK(r.out == "DanglingReference zz: line 6\n");

    test::spit(dir / "headless.sdn",
               "component a\n  kind = Host\n  layer = data\n"
               "component b\n  kind = Host\n  layer = data\n");
    r = run_cli({"validate", "--model", (dir / "headless.sdn").string()});
    CHECK(r.status == cli::kFindings);
    CHECK(contains(r.out, "NoController"));

    test::spit(dir / "broken.sdn", "component a\n  kind = Toaster\n");
    r = run_cli({"validate", "--model", (dir / "broken.sdn").string()});
    CHECK(r.status == cli::kFindings);
    CHECK(contains(r.out, "line 2, column 10: unknown kind"));

    r = run_cli({"validate", "--model", (dir / "missing.sdn").string()});
    CHECK(r.status == cli::kUsage);
    CHECK(contains(r.err, "cannot read"));
}

TEST_CASE("cli: analyze") {
    auto r = run_cli({"analyze", "--model", kStride});
    REQUIRE(r.status == cli::kOk);
    for (const auto* cat : {"| Spoofing | 4 |", "| Tampering | 8 |", "| Repudiation | 4 |",
                            "| InformationDisclosure | 8 |", "| DenialOfService | 8 |",
                            "| ElevationOfPrivilege | 4 |"}) {
        CHECK_MESSAGE(contains(r.out, cat), cat);
    }
    CHECK(contains(r.out, "36 candidate threats"));

    r = run_cli({"analyze", "--model", kStride, "--reject", "ctl.D,bogus"});
    CHECK(r.status == cli::kOk);
    CHECK(contains(r.out, "Rejected rules: ctl.D\n"));
    CHECK(contains(r.out, "Reject ids that matched nothing: bogus\n"));
    CHECK_FALSE(contains(r.out, "ctl1:ctl.D"));

    const auto dir = test::scratch("cli-analyze");
    r = run_cli({"analyze", "--model", kStride, "--format", "records", "--out",
                 (dir / "s1.json").string()});
    CHECK(r.status == cli::kOk);
    const auto j = records::Json::parse(test::slurp(dir / "s1.json"));
    CHECK(j.at("schema") == records::kStage1Schema);
    CHECK(j.at("candidates").size() == 36);

    CHECK(run_cli({"analyze", "--model", kStride, "--format", "yaml"}).status == cli::kUsage);
}

TEST_CASE("cli: rank") {
    auto r = run_cli({"rank"});
    CHECK(r.status == cli::kUsage);
    CHECK(contains(r.err, "analyze"));

    const auto dir = test::scratch("cli-rank");
    run_cli({"analyze", "--model", kTestbed, "--out", (dir / "s1.json").string()});
    CHECK(run_cli({"rank", "--builtin", "--stage1", (dir / "s1.json").string()}).status ==
          cli::kUsage);

    r = run_cli({"rank", "--builtin"});
    CHECK(r.status == cli::kOk);
    CHECK(contains(r.out, "| 7    | TC14 "));

    test::spit(dir / "vectors.txt",
               "vector TC1\n  cvss = CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:L/I:N/A:N\n");
    r = run_cli({"rank", "--builtin", "--vectors", (dir / "vectors.txt").string()});
    CHECK(r.status == cli::kFindings);
    CHECK(contains(r.err, "TC1 stored base/overall 9.0/7.9 but the vector gives 5.3/5.3"));

    test::spit(dir / "not-json.json", "hello");
    CHECK(run_cli({"rank", "--stage1", (dir / "not-json.json").string()}).status == cli::kUsage);
    r = run_cli({"rank", "--stage1", (dir / "s1.json").string(), "--out",
                 (dir / "s2.json").string()});
    CHECK(r.status == cli::kOk);
    // A stage 2 artifact is not a stage 1 artifact.
    CHECK(run_cli({"rank", "--stage1", (dir / "s2.json").string()}).status == cli::kUsage);
}

TEST_CASE("cli: simulate") {
    const auto dir = test::scratch("cli-simulate");
    auto r = run_cli({"simulate", "--model", kTestbed, "--scenario", scenario("syn-flood")});
    CHECK(r.status == cli::kOk);
    CHECK(contains(r.out, "controller-saturated"));
    CHECK(contains(r.out, "Verification against TC4: consistent"));

    auto text = test::slurp(kTestbed);
    for (auto pos = text.find("encrypted = false"); pos != std::string::npos;
         pos = text.find("encrypted = false", pos)) {
        text.replace(pos, 17, "encrypted = true");
    }
    test::spit(dir / "encrypted.sdn", text);
    for (const auto* s : {"eavesdrop-telnet", "eavesdrop-openflow"}) {
        r = run_cli({"simulate", "--model", (dir / "encrypted.sdn").string(), "--scenario",
                     scenario(s)});
        CHECK(r.status == cli::kOk);
        CHECK(contains(r.out, "no payloads captured"));
    }

    test::spit(dir / "short.scn",
               "scenario short\n  type = dictionary\n  service = telnet@onos\n  wordlist-size = 10\n");
    r = run_cli({"simulate", "--model", kTestbed, "--scenario", (dir / "short.scn").string()});
    CHECK(r.status == cli::kOk);
    CHECK(contains(r.out, "password not in wordlist after 10 attempts"));

    test::spit(dir / "bad.scn", "scenario bad\n  type = syn-flood\n  target = s1\n");
    CHECK(run_cli({"simulate", "--model", kTestbed, "--scenario", (dir / "bad.scn").string()})
              .status != cli::kOk);

    r = run_cli({"simulate", "--model", kTestbed, "--scenario", scenario("dictionary-patator"),
                 "--format", "records", "--out", (dir / "s3.json").string()});
    CHECK(r.status == cli::kOk);
    CHECK(records::schema_of(records::Json::parse(test::slurp(dir / "s3.json"))) ==
          records::kStage3Schema);
}

TEST_CASE("cli: map") {
    const auto dir = test::scratch("cli-map");
    CHECK(run_cli({"map"}).status == cli::kUsage);
    run_cli({"analyze", "--model", kTestbed, "--out", (dir / "s1.json").string()});
    run_cli({"rank", "--stage1", (dir / "s1.json").string(), "--out", (dir / "s2.json").string()});
    CHECK(run_cli({"map", "--stage1", (dir / "s1.json").string()}).status == cli::kUsage);

    auto r = run_cli({"map", "--stage2", (dir / "s2.json").string()});
    CHECK(r.status == cli::kOk);
    CHECK(r.out.rfind("digraph correlation_map {\n", 0) == 0);

    r = run_cli({"map", "--stage2", (dir / "s2.json").string(), "--format", "records"});
    CHECK(r.status == cli::kOk);
    const auto j = records::Json::parse(r.out);
    CHECK(j.at("schema") == records::kStage4Schema);
    CHECK(j.at("correlation").at("schema") == kCorrelationSchema);

    CHECK(run_cli({"map", "--stage2", (dir / "s2.json").string(), "--format", "svg"}).status ==
          cli::kUsage);
}

TEST_CASE("cli: report") {
    const auto dir = test::scratch("cli-report");
    CHECK(run_cli({"report"}).status == cli::kUsage);
    run_cli({"analyze", "--model", kTestbed, "--out", (dir / "s1.json").string()});

    auto r = run_cli({"report", "--stage1", (dir / "s1.json").string()});
    CHECK(r.status == cli::kOk);
    CHECK(contains(r.out, "## Stage 1"));
    CHECK(contains(r.out, "not executed"));

    const auto a = run_cli({"report", "--stage1", (dir / "s1.json").string()});
    CHECK(a.out == r.out);

    r = run_cli({"report", "--stage1", (dir / "s1.json").string(), "--timestamp"});
    CHECK(contains(r.out, "Generated 20"));
}

TEST_CASE("cli: catalog override through the environment") {
    const auto dir = test::scratch("cli-catalog");
    auto text = test::slurp(test::source_path("data/catalog.txt"));
    const auto pos = text.find("T15");
    REQUIRE(pos != std::string::npos);
    test::spit(dir / "catalog.txt", text);

    ::setenv(std::string(cli::kCatalogEnv).c_str(), (dir / "catalog.txt").string().c_str(), 1);
    auto r = run_cli({"analyze", "--model", kTestbed});
    CHECK(r.status == cli::kOk);

    ::setenv(std::string(cli::kCatalogEnv).c_str(), (dir / "missing.txt").string().c_str(), 1);
    r = run_cli({"analyze", "--model", kTestbed});
    CHECK(r.status == cli::kUsage);

    // An explicit --catalog wins over the environment.
    r = run_cli({"analyze", "--model", kTestbed, "--catalog", (dir / "catalog.txt").string()});
    CHECK(r.status == cli::kOk);
    ::unsetenv(std::string(cli::kCatalogEnv).c_str());
}
