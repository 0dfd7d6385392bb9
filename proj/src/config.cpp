#include "fheat/config.hpp"

#include <fstream>
#include <sstream>

#include "fheat/errors.hpp"

namespace fheat {

namespace {
std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}
} // namespace

std::map<std::string, std::string> parse_kv_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw precondition_error("config line " + std::to_string(lineno) +
                                     " is not 'key = value': " + line);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw precondition_error("config line " + std::to_string(lineno) +
                                     " has an empty key or value");
        kv[key] = val;
    }
    return kv;
}

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open())
        throw precondition_error("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_kv_text(buf.str());
}

WeightedSpace SpaceConfig::build() const {
    ProfilePtr p = parse_profile_spec(profile);
    QuadRule qr;
    if (rule == "simpson") qr = QuadRule::simpson;
    else if (rule == "trapezoid") qr = QuadRule::trapezoid;
    else throw precondition_error("unknown quadrature rule '" + rule + "'");
    if (dim == 1) return WeightedSpace::line(p, L, nodes, qr);
    return WeightedSpace::radial(dim, p, L, nodes, qr);
}

SpaceConfig SpaceConfig::from_kv(const std::map<std::string, std::string>& kv) {
    SpaceConfig cfg;
    for (const auto& [key, val] : kv) {
        if (key == "profile") cfg.profile = val;
        else if (key == "dim") cfg.dim = std::stoi(val);
        else if (key == "L") cfg.L = std::stod(val);
        else if (key == "nodes") cfg.nodes = std::stoi(val);
        else if (key == "rule") cfg.rule = val;
        else throw precondition_error("unknown space config key '" + key + "'");
    }
    return cfg;
}

std::map<std::string, std::string> SpaceConfig::to_kv() const {
    std::ostringstream Ls;
    Ls << L;
    return {{"profile", profile},
            {"dim", std::to_string(dim)},
            {"L", Ls.str()},
            {"nodes", std::to_string(nodes)},
            {"rule", rule}};
}

} // namespace fheat
