#include "sdnsec/cvss.hpp"

#include <algorithm>
#include <cmath>
#include <string_view>

namespace sdnsec::cvss {

namespace {

struct MetricInfo {
    std::string_view name;
    std::string_view allowed;  // legal value letters
};

constexpr std::array<MetricInfo, kMetricCount> kMetrics{{
    {"AV", "NALP"}, {"AC", "LH"},   {"PR", "NLH"},   {"UI", "NR"},   {"S", "UC"},
    {"C", "HLN"},   {"I", "HLN"},   {"A", "HLN"},    {"E", "XHFPU"}, {"RL", "XUWTO"},
    {"RC", "XCRU"}, {"CR", "XHML"}, {"IR", "XHML"},  {"AR", "XHML"}, {"MAV", "XNALP"},
    {"MAC", "XLH"}, {"MPR", "XNLH"}, {"MUI", "XNR"}, {"MS", "XUC"},  {"MC", "XHLN"},
    {"MI", "XHLN"}, {"MA", "XHLN"},
}};

constexpr std::string_view kPrefix = "CVSS:3.1/";

std::size_t index(Metric m) { return static_cast<std::size_t>(m); }

double attack_vector(char v) {
    switch (v) {
        case 'N': return 0.85;
        case 'A': return 0.62;
        case 'L': return 0.55;
        default: return 0.2;
    }
}

double attack_complexity(char v) { return v == 'L' ? 0.77 : 0.44; }

double privileges(char v, bool scope_changed) {
    switch (v) {
        case 'N': return 0.85;
        case 'L': return scope_changed ? 0.68 : 0.62;
        default: return scope_changed ? 0.5 : 0.27;
    }
}

double user_interaction(char v) { return v == 'N' ? 0.85 : 0.62; }

double impact_weight(char v) {
    switch (v) {
        case 'H': return 0.56;
        case 'L': return 0.22;
        default: return 0.0;
    }
}

double exploit_maturity(char v) {
    switch (v) {
        case 'F': return 0.97;
        case 'P': return 0.94;
        case 'U': return 0.91;
        default: return 1.0;
    }
}

double remediation_level(char v) {
    switch (v) {
        case 'W': return 0.97;
        case 'T': return 0.96;
        case 'O': return 0.95;
        default: return 1.0;
    }
}

double report_confidence(char v) {
    switch (v) {
        case 'R': return 0.96;
        case 'U': return 0.92;
        default: return 1.0;
    }
}

double requirement(char v) {
    switch (v) {
        case 'H': return 1.5;
        case 'L': return 0.5;
        default: return 1.0;
    }
}

// Multiplied left to right, as the reference calculator does.
double apply_temporal(double score, const Vector& v) {
    return score * exploit_maturity(v.get(Metric::E)) * remediation_level(v.get(Metric::RL)) *
           report_confidence(v.get(Metric::RC));
}

}  // namespace

std::optional<Score> Score::parse(std::string_view s) {
    // Accepts "d", "dd", "d.d", "dd.d" with either decimal separator.
    int whole = 0;
    int tenth = 0;
    std::size_t i = 0;
    if (s.empty()) return std::nullopt;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') whole = whole * 10 + (s[i++] - '0');
    if (i == 0 || i > 2) return std::nullopt;
    if (i < s.size()) {
        if ((s[i] != '.' && s[i] != ',') || i + 2 != s.size()) return std::nullopt;
        if (s[i + 1] < '0' || s[i + 1] > '9') return std::nullopt;
        tenth = s[i + 1] - '0';
    }
    const int tenths = whole * 10 + tenth;
    if (tenths > 100) return std::nullopt;
    return Score::from_tenths(tenths);
}

std::string Score::to_string() const {
    return std::to_string(tenths_ / 10) + "." + std::to_string(tenths_ % 10);
}

std::string_view to_string(Severity s) {
    switch (s) {
        case Severity::None: return "None";
        case Severity::Low: return "Low";
        case Severity::Medium: return "Medium";
        case Severity::High: return "High";
        case Severity::Critical: return "Critical";
    }
    return "?";
}

std::optional<Severity> severity_from_string(std::string_view s) {
    for (auto v : {Severity::None, Severity::Low, Severity::Medium, Severity::High,
                   Severity::Critical}) {
        if (to_string(v) == s) return v;
    }
    return std::nullopt;
}

std::string_view to_string(Metric m) { return kMetrics[index(m)].name; }

void Vector::set(Metric m, char value) {
    const auto& info = kMetrics[index(m)];
    if (info.allowed.find(value) == std::string_view::npos) {
        throw VectorError(VectorError::Code::BadValue, std::string(info.name),
                          "invalid value '" + std::string(1, value) + "' for " +
                              std::string(info.name));
    }
    values_[index(m)] = value;
}

char Vector::effective(Metric modified) const {
    const auto v = get(modified);
    if (v != 'X') return v;
    // MAV..MA mirror AV..A in the same order.
    const auto base = static_cast<Metric>(index(modified) - index(Metric::MAV));
    return get(base);
}

bool Vector::has_environmental() const {
    for (auto i = index(Metric::CR); i < kMetricCount; ++i) {
        if (values_[i] != 'X') return true;
    }
    return false;
}

std::string Vector::to_string() const {
    std::string out(kPrefix.substr(0, kPrefix.size() - 1));
    for (std::size_t i = 0; i < kMetricCount; ++i) {
        if (values_[i] == 'X') continue;
        out += '/';
        out += kMetrics[i].name;
        out += ':';
        out += values_[i];
    }
    return out;
}

VectorError::VectorError(Code code, std::string metric, const std::string& what)
    : std::invalid_argument(what), code_(code), metric_(std::move(metric)) {}

Vector parse_vector(std::string_view s) {
    if (!s.starts_with(kPrefix)) {
        throw VectorError(VectorError::Code::BadPrefix, "", "vector must start with CVSS:3.1/");
    }
    Vector v;
    std::array<bool, kMetricCount> seen{};
    std::string_view rest = s.substr(kPrefix.size());
    while (!rest.empty()) {
        const auto slash = rest.find('/');
        const auto part = rest.substr(0, slash);
        rest = slash == std::string_view::npos ? std::string_view{} : rest.substr(slash + 1);
        const auto colon = part.find(':');
        const auto key = part.substr(0, colon);
        const auto it = std::find_if(kMetrics.begin(), kMetrics.end(),
                                     [&](const MetricInfo& m) { return m.name == key; });
        if (it == kMetrics.end()) {
            throw VectorError(VectorError::Code::UnknownMetric, std::string(key),
                              "unknown metric '" + std::string(key) + "'");
        }
        const auto m = static_cast<Metric>(it - kMetrics.begin());
        if (seen[index(m)]) {
            throw VectorError(VectorError::Code::DuplicateMetric, std::string(key),
                              "duplicate metric '" + std::string(key) + "'");
        }
        seen[index(m)] = true;
        if (colon == std::string_view::npos || part.size() != colon + 2) {
            throw VectorError(VectorError::Code::BadValue, std::string(key),
                              "malformed component '" + std::string(part) + "'");
        }
        v.set(m, part[colon + 1]);
    }
    for (std::size_t i = 0; i < kBaseMetricCount; ++i) {
        if (!seen[i]) {
            throw VectorError(VectorError::Code::MissingBaseMetric, std::string(kMetrics[i].name),
                              "missing base metric " + std::string(kMetrics[i].name));
        }
    }
    return v;
}

Score roundup(double x) {
    const auto scaled = static_cast<long long>(std::llround(x * 100000.0));
    if (scaled % 10000 == 0) return Score::from_tenths(static_cast<int>(scaled / 10000));
    return Score::from_tenths(static_cast<int>(scaled / 10000 + 1));
}

Score base_score(const Vector& v) {
    const bool changed = v.get(Metric::S) == 'C';
    const double iss = 1.0 - (1.0 - impact_weight(v.get(Metric::C))) *
                                 (1.0 - impact_weight(v.get(Metric::I))) *
                                 (1.0 - impact_weight(v.get(Metric::A)));
    const double impact =
        changed ? 7.52 * (iss - 0.029) - 3.25 * std::pow(iss - 0.02, 15) : 6.42 * iss;
    const double exploitability = 8.22 * attack_vector(v.get(Metric::AV)) *
                                  attack_complexity(v.get(Metric::AC)) *
                                  privileges(v.get(Metric::PR), changed) *
                                  user_interaction(v.get(Metric::UI));
    if (impact <= 0) return Score{};
    if (changed) return roundup(std::min(1.08 * (impact + exploitability), 10.0));
    return roundup(std::min(impact + exploitability, 10.0));
}

Score temporal_score(const Vector& v) {
    return roundup(apply_temporal(base_score(v).value(), v));
}

Score environmental_score(const Vector& v) {
    const bool changed = v.effective(Metric::MS) == 'C';
    const double miss =
        std::min(1.0 - (1.0 - requirement(v.get(Metric::CR)) * impact_weight(v.effective(Metric::MC))) *
                           (1.0 - requirement(v.get(Metric::IR)) * impact_weight(v.effective(Metric::MI))) *
                           (1.0 - requirement(v.get(Metric::AR)) * impact_weight(v.effective(Metric::MA))),
                 0.915);
    const double impact = changed
                              ? 7.52 * (miss - 0.029) - 3.25 * std::pow(miss * 0.9731 - 0.02, 13)
                              : 6.42 * miss;
    const double exploitability = 8.22 * attack_vector(v.effective(Metric::MAV)) *
                                  attack_complexity(v.effective(Metric::MAC)) *
                                  privileges(v.effective(Metric::MPR), changed) *
                                  user_interaction(v.effective(Metric::MUI));
    if (impact <= 0) return Score{};
    const Score capped = changed ? roundup(std::min(1.08 * (impact + exploitability), 10.0))
                                 : roundup(std::min(impact + exploitability, 10.0));
    return roundup(apply_temporal(capped.value(), v));
}

Score overall_score(const Vector& v) {
    return v.has_environmental() ? environmental_score(v) : temporal_score(v);
}

Severity severity(Score s) {
    const int t = s.tenths();
    if (t == 0) return Severity::None;
    if (t < 40) return Severity::Low;
    if (t < 70) return Severity::Medium;
    if (t < 90) return Severity::High;
    return Severity::Critical;
}

}  // namespace sdnsec::cvss
