#include "fheat/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace fheat {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::ordered_json report_json(const BoundReport& r) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["claim"] = r.claim;
    j["inputs"] = r.inputs;
    j["digest"] = r.digest;
    j["measured"] = r.measured;
    j["bound"] = r.bound;
    j["margin"] = r.margin;
    j["pass"] = r.pass;
    j["hard"] = r.hard;
    j["notes"] = r.notes;
    if (!r.extras.empty()) {
        nlohmann::ordered_json e;
        for (const auto& [k, v] : r.extras) e[k] = v;
        j["extras"] = e;
    }
    return j;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

} // namespace

std::string input_digest(const std::string& canonical) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string BoundReport::to_json() const { return report_json(*this).dump(); }

std::string BoundReport::csv_header() {
    return "name,digest,claim,measured,bound,margin,pass,hard,inputs,notes";
}

std::string BoundReport::to_csv_row() const {
    std::ostringstream os;
    os << csv_escape(name) << ',' << digest << ',' << csv_escape(claim) << ','
       << fmt_double(measured) << ',' << fmt_double(bound) << ','
       << fmt_double(margin) << ',' << (pass ? "true" : "false") << ','
       << (hard ? "true" : "false") << ',' << csv_escape(inputs) << ','
       << csv_escape(notes);
    return os.str();
}

BoundReport make_hard_report(std::string name, std::string claim,
                             std::string inputs, double measured, double bound,
                             double tol, std::string notes) {
    BoundReport r;
    r.name = std::move(name);
    r.claim = std::move(claim);
    r.inputs = std::move(inputs);
    r.digest = input_digest(r.name + "|" + r.inputs);
    r.measured = measured;
    r.bound = bound;
    r.hard = true;
    r.notes = std::move(notes);
    if (measured <= 0.0 && bound >= 0.0) {
        r.pass = true;
        r.margin = 1.0;
    } else if (std::isinf(bound) && bound > 0.0) {
        r.pass = true;
        r.margin = 1.0;
    } else {
        r.pass = measured <= bound * (1.0 + tol) ||
                 measured <= bound + tol * std::abs(measured);
        r.margin = bound != 0.0 ? (bound - measured) / std::abs(bound)
                                : (measured <= 0.0 ? 1.0 : -1.0);
    }
    return r;
}

BoundReport make_log_report(std::string name, std::string claim,
                            std::string inputs, double log_measured,
                            double log_bound, double tol, std::string notes) {
    BoundReport r;
    r.name = std::move(name);
    r.claim = std::move(claim);
    r.inputs = std::move(inputs);
    r.digest = input_digest(r.name + "|" + r.inputs);
    r.measured = std::exp(log_measured); // may flush to 0/inf; logs kept in extras
    r.bound = std::exp(log_bound);
    r.hard = true;
    r.notes = std::move(notes);
    r.extras["log_measured"] = log_measured;
    r.extras["log_bound"] = log_bound;
    if (std::isinf(log_measured) && log_measured < 0.0) {
        r.pass = true;
        r.margin = 1.0;
    } else {
        r.pass = log_measured <= log_bound + std::log1p(tol);
        r.margin = log_bound - log_measured;
    }
    return r;
}

std::string reports_to_json(const std::vector<BoundReport>& reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(report_json(r));
    return arr.dump(2);
}

std::string reports_to_csv(const std::vector<BoundReport>& reports) {
    std::ostringstream os;
    os << BoundReport::csv_header() << '\n';
    for (const auto& r : reports) os << r.to_csv_row() << '\n';
    return os.str();
}

void sort_reports(std::vector<BoundReport>& reports) {
    std::stable_sort(reports.begin(), reports.end(),
                     [](const BoundReport& a, const BoundReport& b) {
                         if (a.name != b.name) return a.name < b.name;
                         return a.digest < b.digest;
                     });
}

std::string aggregate_summary(const std::vector<BoundReport>& reports) {
    struct Row {
        int total = 0;
        int failed = 0;
        double worst_margin = std::numeric_limits<double>::infinity();
        bool hard = true;
        std::string claim;
    };
    std::map<std::string, Row> rows;
    for (const auto& r : reports) {
        Row& row = rows[r.name];
        ++row.total;
        if (!r.pass) ++row.failed;
        row.worst_margin = std::min(row.worst_margin, r.margin);
        row.hard = r.hard;
        row.claim = r.claim;
    }
    std::ostringstream os;
    size_t name_w = 4;
    for (const auto& [name, _] : rows) name_w = std::max(name_w, name.size());
    char line[512];
    std::snprintf(line, sizeof(line), "%-*s  %-6s  %6s  %6s  %-12s  %s\n",
                  static_cast<int>(name_w), "check", "status", "rows", "failed",
                  "worst margin", "claim");
    os << line;
    for (const auto& [name, row] : rows) {
        const char* status = row.failed == 0 ? (row.hard ? "pass" : "ok")
                                             : (row.hard ? "FAIL" : "warn");
        std::snprintf(line, sizeof(line), "%-*s  %-6s  %6d  %6d  %-12.3g  %s\n",
                      static_cast<int>(name_w), name.c_str(), status, row.total,
                      row.failed, row.worst_margin, row.claim.c_str());
        os << line;
    }
    bool any_failed = false;
    for (const auto& r : reports)
        if (!r.pass) any_failed = true;
    if (any_failed) {
        os << "\nfailing rows:\n";
        std::vector<BoundReport> bad;
        for (const auto& r : reports)
            if (!r.pass) bad.push_back(r);
        os << summary_table(bad);
    }
    return os.str();
}

std::string summary_table(const std::vector<BoundReport>& reports) {
    std::ostringstream os;
    size_t name_w = 4;
    for (const auto& r : reports) name_w = std::max(name_w, r.name.size());
    char line[512];
    std::snprintf(line, sizeof(line), "%-*s  %-6s  %-12s  %-12s  %-10s  %s\n",
                  static_cast<int>(name_w), "name", "status", "measured",
                  "bound", "margin", "inputs");
    os << line;
    for (const auto& r : reports) {
        std::snprintf(line, sizeof(line), "%-*s  %-6s  %-12.5g  %-12.5g  %-10.3g  %s\n",
                      static_cast<int>(name_w), r.name.c_str(),
                      r.pass ? (r.hard ? "pass" : "ok") : (r.hard ? "FAIL" : "warn"),
                      r.measured, r.bound, r.margin, r.inputs.c_str());
        os << line;
    }
    return os.str();
}

} // namespace fheat
