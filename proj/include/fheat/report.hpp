#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fheat {

/// Outcome of one inequality or fitted-constant check.
///
/// Hard checks compare `measured` against `bound` (in log space when the
/// magnitudes overflow) and set `pass` from measured <= bound*(1+tol).
/// Fitted checks record the constant and pass on their stability criterion.
/// `margin` is the relative slack (bound-measured)/|bound| for hard checks,
/// or the stability headroom for fitted ones.
struct BoundReport {
    std::string name;        // operation identifier
    std::string claim;       // stable description of the inequality checked
    std::string inputs;      // human-readable input summary
    std::string digest;      // deterministic digest of the inputs
    double measured = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    bool pass = false;
    bool hard = true;        // hard pass/fail vs fitted/recorded
    std::string notes;
    std::map<std::string, double> extras;

    std::string to_json() const;
    static std::string csv_header();
    std::string to_csv_row() const;
};

/// FNV-1a digest of a canonical input string, hex-encoded.
std::string input_digest(const std::string& canonical);

/// Build a hard report, comparing in log space so that astronomically
/// large bounds (e.g. e^{4A} factors) stay meaningful. Passes when
/// measured <= bound * (1 + tol), with nonpositive measured always passing
/// against a nonnegative bound.
BoundReport make_hard_report(std::string name, std::string claim,
                             std::string inputs, double measured, double bound,
                             double tol, std::string notes = "");

/// Same comparison but with both sides supplied as natural logarithms.
BoundReport make_log_report(std::string name, std::string claim,
                            std::string inputs, double log_measured,
                            double log_bound, double tol,
                            std::string notes = "");

std::string reports_to_json(const std::vector<BoundReport>& reports);
std::string reports_to_csv(const std::vector<BoundReport>& reports);

/// Sort by name, then digest: deterministic merge order for parallel runs.
void sort_reports(std::vector<BoundReport>& reports);

/// Render an aligned human-readable summary table, one row per report.
std::string summary_table(const std::vector<BoundReport>& reports);

/// Aggregate by check name: row count, failures, worst margin. Failing rows
/// are listed individually underneath.
std::string aggregate_summary(const std::vector<BoundReport>& reports);

} // namespace fheat
