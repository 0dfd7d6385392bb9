#pragma once

#include <map>
#include <string>

#include "fheat/space.hpp"

namespace fheat {

/// Key-value configuration: `key = value` lines, '#' comments, blank lines
/// ignored. Keys are case-sensitive.
std::map<std::string, std::string> parse_kv_text(const std::string& text);
std::map<std::string, std::string> parse_kv_file(const std::string& path);

/// Space construction recipe; the documented grammar is
///   profile = <spec>        (euclid, steady:+1, shrinking, expanding,
///                            constant:<c>, linear:<k>, quadratic:<s>,
///                            power:<m>)
///   dim     = <n>           (1 for the line, >= 2 radial)
///   L       = <half-width>
///   nodes   = <count>
///   rule    = simpson | trapezoid
struct SpaceConfig {
    std::string profile = "euclid";
    int dim = 1;
    double L = 12.0;
    int nodes = 2048;
    std::string rule = "simpson";

    WeightedSpace build() const;
    static SpaceConfig from_kv(const std::map<std::string, std::string>& kv);
    std::map<std::string, std::string> to_kv() const;
};

} // namespace fheat
