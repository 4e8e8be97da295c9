#pragma once

// CVSS v3.1 calculator: vector parsing, base / temporal / environmental
// scores and qualitative severity bands.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sdnsec::cvss {

// A score on the 0.0-10.0 scale with exactly one decimal, stored in tenths.
class Score {
public:
    constexpr Score() = default;
    static constexpr Score from_tenths(int tenths) { return Score(tenths); }
    // Parses "9.0" / "9,0" / "10".
    static std::optional<Score> parse(std::string_view s);

    constexpr int tenths() const { return tenths_; }
    constexpr double value() const { return tenths_ / 10.0; }
    std::string to_string() const;

    constexpr auto operator<=>(const Score&) const = default;

private:
    constexpr explicit Score(int tenths) : tenths_(tenths) {}
    int tenths_ = 0;
};

enum class Severity { None, Low, Medium, High, Critical };

std::string_view to_string(Severity s);
std::optional<Severity> severity_from_string(std::string_view s);

// Metric identifiers in canonical vector order.
enum class Metric : std::uint8_t {
    AV, AC, PR, UI, S, C, I, A,
    E, RL, RC,
    CR, IR, AR, MAV, MAC, MPR, MUI, MS, MC, MI, MA,
};
inline constexpr std::size_t kMetricCount = 22;
inline constexpr std::size_t kBaseMetricCount = 8;

std::string_view to_string(Metric m);

// Values are the single-letter codes from the vector string; 'X' marks an
// optional metric that is not defined.
class Vector {
public:
    char get(Metric m) const { return values_[static_cast<std::size_t>(m)]; }
    void set(Metric m, char value);
    // Modified metric with X resolved to the base value.
    char effective(Metric modified) const;
    bool has_environmental() const;
    // "CVSS:3.1/..." in canonical order; metrics equal to X are omitted.
    std::string to_string() const;

    bool operator==(const Vector&) const = default;

private:
    std::array<char, kMetricCount> values_ = make_defaults();
    static constexpr std::array<char, kMetricCount> make_defaults() {
        std::array<char, kMetricCount> v{};
        v.fill('X');
        return v;
    }
};

class VectorError : public std::invalid_argument {
public:
    enum class Code { BadPrefix, UnknownMetric, BadValue, DuplicateMetric, MissingBaseMetric };
    VectorError(Code code, std::string metric, const std::string& what);
    Code code() const { return code_; }
    const std::string& metric() const { return metric_; }

private:
    Code code_;
    std::string metric_;
};

Vector parse_vector(std::string_view s);

// Smallest one-decimal value >= x, using the scaled-integer rule so that
// floating point noise such as 8.000001 does not bump the result.
Score roundup(double x);

Score base_score(const Vector& v);
Score temporal_score(const Vector& v);
Score environmental_score(const Vector& v);
// Environmental score when any environmental metric is defined, else temporal.
Score overall_score(const Vector& v);

Severity severity(Score s);

}  // namespace sdnsec::cvss
