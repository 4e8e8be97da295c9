#pragma once

// JSON artifacts passed between pipeline stages. Every artifact carries a
// "schema" string; readers reject anything else.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sdnsec/attack_sim.hpp"
#include "sdnsec/catalog.hpp"
#include "sdnsec/correlation.hpp"
#include "sdnsec/risk.hpp"
#include "sdnsec/stride.hpp"

namespace sdnsec::records {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kStage1Schema = "sdnsec.stage1/1";
inline constexpr std::string_view kStage2Schema = "sdnsec.stage2/1";
inline constexpr std::string_view kStage3Schema = "sdnsec.stage3/1";
inline constexpr std::string_view kStage4Schema = "sdnsec.stage4/1";

class ArtifactError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Stage1 {
    std::string model_name;
    std::string model_text;  // rendered model, so later stages need no model file
    std::string catalog;
    std::vector<CandidateThreat> candidates;
    std::vector<std::string> rejected;
    std::vector<std::string> unknown_rejects;
    std::vector<OverlayEntry> overlay;

    bool operator==(const Stage1&) const = default;
};

struct Stage2 {
    std::string catalog;
    RankedAssessment assessment;
    std::vector<ScoreCheck> checks;
};

struct Stage3 {
    std::string scenario;
    SimResult result;
    VerificationReport verification;
};

struct Stage4 {
    std::string catalog;
    CorrelationTree tree;
    std::vector<CoverageEntry> coverage;
};

Json to_json(const Stage1& s);
Json to_json(const Stage2& s);
Json to_json(const Stage3& s);
Json to_json(const Stage4& s);
Json to_json(const CorrelationTree& t);

// Throw ArtifactError on a wrong schema or missing fields.
Stage1 stage1_from_json(const Json& j);
Stage2 stage2_from_json(const Json& j);
Stage3 stage3_from_json(const Json& j);
Stage4 stage4_from_json(const Json& j);

// The schema string of an artifact, empty if absent.
std::string schema_of(const Json& j);

// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

}  // namespace sdnsec::records
