#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fheat/geometry.hpp"
#include "fheat/report.hpp"
#include "fheat/space.hpp"

namespace fheat {
namespace verify {

/// One manifest entry: a named check plus its parameter object.
struct CheckSpec {
    std::string check;
    nlohmann::json params = nlohmann::json::object();
};

/// Reproducible run description. Reports derive only from the manifest
/// contents and the binary, so re-running a saved manifest reproduces the
/// report bytes.
struct Manifest {
    int version = 1;
    std::uint64_t seed = 20250801;
    std::string command = "verify";
    std::string tool_version;
    std::string timestamp; // recorded at creation; echoed, never refreshed
    std::vector<CheckSpec> checks;

    nlohmann::ordered_json to_json() const;
    static Manifest from_json(const nlohmann::json& j);
    static Manifest default_manifest();
};

const std::vector<std::string>& known_checks();

struct VerifyResult {
    std::vector<BoundReport> reports;
    bool all_hard_passed = true;
};

/// Runs every listed check (checks execute in parallel; reports are merged
/// in a deterministic order). Throws precondition_error for unknown names.
VerifyResult run_manifest(const Manifest& manifest);

/// Valid comparison queries at base point 0 and the given scale R: radii
/// satisfy the annulus ordering and balls stay inside |x| <= max_extent.
std::vector<geometry::VolumeQuery> random_volume_queries(double scale,
                                                         double max_extent,
                                                         int count,
                                                         std::mt19937_64& rng);

/// Disjoint interval pairs inside [lo, hi] with gap >= min_gap.
std::vector<std::pair<Interval, Interval>> random_disjoint_intervals(
    double lo, double hi, double min_gap, int count, std::mt19937_64& rng);

/// Deterministic per-check RNG stream.
std::mt19937_64 seeded_rng(std::uint64_t seed, const std::string& tag);

} // namespace verify
} // namespace fheat
