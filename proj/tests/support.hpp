#pragma once

// Helpers shared by the unit tests and the acceptance runner.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sdnsec/cli.hpp"
#include "sdnsec/topology.hpp"

namespace sdnsec::test {

inline std::filesystem::path source_dir() { return SDNSEC_SOURCE_DIR; }
inline std::filesystem::path binary_dir() { return SDNSEC_BINARY_DIR; }

inline std::string source_path(const std::string& rel) { return (source_dir() / rel).string(); }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
    const auto dir = binary_dir() / "scratch" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

struct CliRun {
    int status = -1;
    std::string out;
    std::string err;
};

inline CliRun run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliRun r;
    r.status = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

// Everything the reference pipeline writes, keyed by golden file name, plus
// the exit status of each step.
struct PipelineOutput {
    std::map<std::string, std::string> files;
    std::vector<std::pair<std::string, int>> statuses;

    bool all_ok() const {
        for (const auto& [step, status] : statuses) {
            if (status != 0) return false;
        }
        return true;
    }
};

inline const std::vector<std::string>& pipeline_scenarios() {
    static const std::vector<std::string> names{"syn-flood", "dictionary-patator",
                                                "eavesdrop-telnet"};
    return names;
}

// validate -> analyze -> rank -> simulate -> map -> report on the reference
// testbed, working in `dir`.
inline PipelineOutput run_reference_pipeline(const std::filesystem::path& dir) {
    PipelineOutput p;
    const auto model = source_path("data/models/reference_testbed.sdn");
    const auto file = [&](const std::string& name) { return (dir / name).string(); };
    const auto step = [&](const std::string& name, const std::vector<std::string>& args) {
        auto r = run_cli(args);
        p.statuses.emplace_back(name, r.status);
        p.files[name + ".out"] = r.out;
    };

    step("validate", {"validate", "--model", model});
    step("analyze", {"analyze", "--model", model, "--out", file("stage1.json")});
    step("rank", {"rank", "--stage1", file("stage1.json"), "--out", file("stage2.json")});
    std::vector<std::string> report{"report", "--stage1", file("stage1.json"), "--stage2",
                                    file("stage2.json")};
    for (const auto& s : pipeline_scenarios()) {
        step("simulate-" + s, {"simulate", "--model", model, "--scenario",
                               source_path("data/scenarios/" + s + ".scn"), "--stage2",
                               file("stage2.json"), "--out", file("stage3-" + s + ".json")});
        report.push_back("--stage3");
        report.push_back(file("stage3-" + s + ".json"));
    }
    step("map-dot", {"map", "--stage1", file("stage1.json"), "--stage2", file("stage2.json"),
                     "--format", "dot", "--out", file("map.dot")});
    step("map-records", {"map", "--stage1", file("stage1.json"), "--stage2",
                         file("stage2.json"), "--format", "records", "--out", file("stage4.json")});
    report.insert(report.end(), {"--stage4", file("stage4.json"), "--out", file("report.md")});
    step("report", report);

    for (const auto& name : {"stage1.json", "stage2.json", "map.dot", "stage4.json", "report.md"}) {
        p.files[name] = slurp(dir / name);
    }
    for (const auto& s : pipeline_scenarios()) {
        p.files["stage3-" + s + ".json"] = slurp(dir / ("stage3-" + s + ".json"));
    }
    return p;
}

// Random valid tenant network: one controller, up to four switches, up to
// 30 hosts, up to 5 non-empty VPLS domains; some hosts stay outside every
// domain.
inline SdnModel random_tenant_model(std::mt19937& rng) {
    const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    SdnModel m;
    m.components.push_back({"ctl", ComponentKind::Controller, Layer::Control, {}});
    const int switches = pick(1, 4);
    for (int s = 0; s < switches; ++s) {
        const auto id = "sw" + std::to_string(s);
        m.components.push_back({id, ComponentKind::ForwardingDevice, Layer::Data, {}});
        m.flows.push_back({"sb-" + id, "ctl", id, Interface::Southbound, "OpenFlow", false});
    }
    const int hosts = pick(2, 30);
    const int domains = pick(1, std::min(5, hosts));
    std::vector<std::vector<std::string>> members(static_cast<std::size_t>(domains));
    for (int h = 0; h < hosts; ++h) {
        const auto id = "h" + std::to_string(h);
        m.components.push_back({id, ComponentKind::Host, Layer::Data, {}});
        m.flows.push_back({"dp-" + id, id, "sw" + std::to_string(pick(0, switches - 1)),
                           Interface::DataPlane, "Ethernet", false});
        // The first `domains` hosts seed one domain each so none is empty.
        const int d = h < domains ? h : pick(-1, domains - 1);
        if (d >= 0) members[static_cast<std::size_t>(d)].push_back(id);
    }
    for (int d = 0; d < domains; ++d) {
        const auto& mem = members[static_cast<std::size_t>(d)];
        m.vpls.push_back({"vpls" + std::to_string(d), {mem.begin(), mem.end()}});
    }
    return m;
}

}  // namespace sdnsec::test
