// Command-line front end: closed-form / spectral / time-stepped kernel
// tables, eigensolver output, and the verification suite with reproducible
// run manifests.

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fheat/bounds.hpp"
#include "fheat/closedform.hpp"
#include "fheat/config.hpp"
#include "fheat/errors.hpp"
#include "fheat/evolution.hpp"
#include "fheat/spectral.hpp"
#include "fheat/verify.hpp"
#include "fheat/version.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// "v" -> {v};  "lo:hi:n" -> n equally spaced values
std::vector<double> parse_grid(const std::string& spec) {
    auto c1 = spec.find(':');
    if (c1 == std::string::npos) return {std::stod(spec)};
    auto c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw fheat::precondition_error("grid spec must be 'v' or 'lo:hi:n': " + spec);
    double lo = std::stod(spec.substr(0, c1));
    double hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    int n = std::stoi(spec.substr(c2 + 1));
    if (n < 1) throw fheat::precondition_error("grid count must be >= 1");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

std::filesystem::path resolve_output(const std::string& name) {
    std::filesystem::path p(name);
    if (p.is_absolute()) return p;
    if (const char* dir = std::getenv("FHEAT_OUTPUT_DIR"))
        return std::filesystem::path(dir) / p;
    return p;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open())
        throw fheat::numeric_error("cannot write " + path.string());
    out << content;
}

struct KernelArgs {
    std::string profile = "euclid";
    std::string method = "closed";
    std::string xs = "0", ys = "0", ts;
    double L = 12.0;
    int nodes = 2048;
    int K = 200;
    double width_factor = 4.0;
    std::string out = "kernel.csv";
    bool json = false;
    std::string space_config;
};

// key-value file overrides the individual space flags
fheat::WeightedSpace space_from(const std::string& config_path,
                                const std::string& profile, double L,
                                int nodes) {
    if (!config_path.empty())
        return fheat::SpaceConfig::from_kv(fheat::parse_kv_file(config_path))
            .build();
    fheat::SpaceConfig cfg;
    cfg.profile = profile;
    cfg.L = L;
    cfg.nodes = nodes;
    return cfg.build();
}

std::string now_string() {
    std::time_t t = std::time(nullptr);
    char buf[40];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

nlohmann::ordered_json kernel_manifest(const KernelArgs& a) {
    nlohmann::ordered_json j;
    j["command"] = "kernel";
    j["tool_version"] = fheat::kVersion;
    j["timestamp"] = now_string();
    j["args"] = {"kernel",        "--profile", a.profile, "--method", a.method,
                 "--x",           a.xs,        "--y",     a.ys,       "--t",
                 a.ts,            "--L",       fmt17(a.L), "--nodes",
                 std::to_string(a.nodes),      "--k",     std::to_string(a.K),
                 "--out",         a.out};
    if (!a.space_config.empty()) {
        j["args"].push_back("--space-config");
        j["args"].push_back(a.space_config);
    }
    if (a.json) j["args"].push_back("--json");
    return j;
}

int run_kernel(const KernelArgs& a) {
    if (a.ts.empty()) throw CLI::ValidationError("--t is required");
    auto xs = parse_grid(a.xs), ys = parse_grid(a.ys), ts = parse_grid(a.ts);

    struct Row {
        double x, y, t, H, err;
    };
    std::vector<Row> rows;

    if (a.method == "closed") {
        fheat::SolitonKernel kernel = fheat::SolitonKernel::parse(a.profile);
        for (double t : ts)
            for (double y : ys)
                for (double x : xs)
                    rows.push_back({x, y, t, kernel.eval(x, y, t), 0.0});
    } else if (a.method == "spectral") {
        fheat::WeightedSpace space =
            space_from(a.space_config, a.profile, a.L, a.nodes);
        fheat::EigenSystem es =
            fheat::eigensolve(space, space.lo(), space.hi(), a.K);
        for (double t : ts)
            for (double y : ys)
                for (double x : xs) {
                    auto v = es.kernel(x, y, t);
                    rows.push_back({x, y, t, v.value, v.tail_bound});
                }
    } else if (a.method == "pde") {
        fheat::WeightedSpace space =
            space_from(a.space_config, a.profile, a.L, a.nodes);
        for (double t : ts)
            for (double y : ys) {
                auto slice = fheat::kernel_from_delta(
                    space, y, t, a.width_factor * space.spacing());
                for (double x : xs)
                    rows.push_back({x, y, t, slice.value_at(x),
                                    slice.reported_error});
            }
    } else {
        throw CLI::ValidationError("--method must be closed, spectral, or pde");
    }

    auto path = resolve_output(a.out);
    if (a.json) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : rows)
            arr.push_back({{"x", r.x}, {"y", r.y}, {"t", r.t}, {"H", r.H},
                           {"error", r.err}});
        write_file(path, arr.dump(2) + "\n");
    } else {
        std::string csv = "x,y,t,H,error\n";
        for (const auto& r : rows)
            csv += fmt17(r.x) + "," + fmt17(r.y) + "," + fmt17(r.t) + "," +
                   fmt17(r.H) + "," + fmt17(r.err) + "\n";
        write_file(path, csv);
    }
    write_file(path.string() + ".manifest.json",
               kernel_manifest(a).dump(2) + "\n");
    std::cout << "wrote " << rows.size() << " rows to " << path.string() << "\n";
    return kExitPass;
}

struct SpectrumArgs {
    std::string profile = "euclid";
    std::string domain = "0:3.141592653589793";
    int K = 8;
    double L = 16.0;
    int nodes = 2048;
    bool exhaust = false;
    bool neumann = false;
    std::string out;
    std::string space_config;
};

int run_spectrum(const SpectrumArgs& a) {
    fheat::WeightedSpace space =
        a.space_config.empty()
            ? fheat::WeightedSpace::line(fheat::parse_profile_spec(a.profile),
                                         a.L, a.nodes)
            : fheat::SpaceConfig::from_kv(fheat::parse_kv_file(a.space_config))
                  .build();

    if (a.exhaust) {
        auto trace = fheat::bottom_of_spectrum(space,
                                               fheat::Exhaustion::dyadic(space));
        std::cout << "half_width,lambda1\n";
        for (size_t i = 0; i < trace.lambda1.size(); ++i)
            std::cout << fmt17(trace.half_width[i]) << ","
                      << fmt17(trace.lambda1[i]) << "\n";
        std::cout << "extrapolated," << fmt17(trace.extrapolated) << "\n";
        if (!trace.monotone) {
            std::cerr << "warning: eigenvalue sequence not monotone\n";
            return kExitNumeric;
        }
        return kExitPass;
    }

    auto colon = a.domain.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--domain must be 'a:b'");
    double lo = std::stod(a.domain.substr(0, colon));
    double hi = std::stod(a.domain.substr(colon + 1));
    fheat::EigenSystem es = fheat::eigensolve(
        space, lo, hi, a.K,
        a.neumann ? fheat::BoundaryCondition::weighted_neumann
                  : fheat::BoundaryCondition::dirichlet_zero,
        a.nodes);

    std::cout << "k,lambda\n";
    for (int k = 0; k < es.K(); ++k)
        std::cout << k + 1 << "," << fmt17(es.lambda(k)) << "\n";

    if (!a.out.empty()) {
        nlohmann::ordered_json j;
        j["domain"] = {lo, hi};
        j["bc"] = a.neumann ? "weighted-neumann" : "dirichlet-zero";
        j["profile"] = a.profile;
        j["lambda"] = es.eigenvalues();
        j["nodes"] = es.op().nodes();
        nlohmann::ordered_json psi = nlohmann::ordered_json::array();
        for (int k = 0; k < es.K(); ++k) psi.push_back(es.psi(k));
        j["psi"] = psi;
        write_file(resolve_output(a.out), j.dump() + "\n");
        std::cout << "wrote eigen table to " << resolve_output(a.out).string()
                  << "\n";
    }
    return kExitPass;
}

struct VerifyArgs {
    std::string manifest_path;
    bool use_default = false;
    std::string out = "report.json";
    std::string csv;
    std::uint64_t seed = 0;
    bool quiet = false;
    std::string emit_default;
};

int run_verify(const VerifyArgs& a) {
    if (!a.emit_default.empty()) {
        auto m = fheat::verify::Manifest::default_manifest();
        m.timestamp = now_string();
        write_file(resolve_output(a.emit_default), m.to_json().dump(2) + "\n");
        std::cout << "wrote default manifest to "
                  << resolve_output(a.emit_default).string() << "\n";
        return kExitPass;
    }
    fheat::verify::Manifest manifest;
    if (a.use_default) {
        manifest = fheat::verify::Manifest::default_manifest();
        manifest.timestamp = now_string(); // echoed verbatim on rerun
    } else if (!a.manifest_path.empty()) {
        std::ifstream in(a.manifest_path);
        if (!in.is_open())
            throw fheat::precondition_error("cannot open manifest " + a.manifest_path);
        nlohmann::json j;
        in >> j;
        manifest = fheat::verify::Manifest::from_json(j);
    } else {
        throw CLI::ValidationError("verify needs --manifest <path> or --default");
    }
    if (a.seed != 0) manifest.seed = a.seed;

    auto result = fheat::verify::run_manifest(manifest);

    nlohmann::ordered_json doc;
    doc["schema_version"] = fheat::kReportSchemaVersion;
    doc["manifest"] = manifest.to_json();
    doc["reports"] = nlohmann::ordered_json::parse(
        fheat::reports_to_json(result.reports));
    doc["all_hard_passed"] = result.all_hard_passed;
    write_file(resolve_output(a.out), doc.dump(2) + "\n");
    if (!a.csv.empty())
        write_file(resolve_output(a.csv), fheat::reports_to_csv(result.reports));

    if (!a.quiet) {
        std::cout << fheat::aggregate_summary(result.reports);
        size_t hard = 0, hard_pass = 0, fitted = 0;
        for (const auto& r : result.reports) {
            if (r.hard) {
                ++hard;
                if (r.pass) ++hard_pass;
            } else {
                ++fitted;
            }
        }
        std::cout << "\n" << hard_pass << "/" << hard << " hard checks passed, "
                  << fitted << " fitted checks recorded\n";
        std::cout << "report written to " << resolve_output(a.out).string() << "\n";
    }
    return result.all_hard_passed ? kExitPass : kExitCheckFailure;
}

int run_rerun(const std::string& manifest_path, CLI::App& app);

int dispatch(CLI::App& app, int argc, char** argv) {
    KernelArgs ka;
    SpectrumArgs sa;
    VerifyArgs va;
    std::string rerun_path;

    auto* kernel = app.add_subcommand("kernel", "evaluate a heat kernel on a grid");
    kernel->add_option("--profile", ka.profile, "profile spec (euclid, steady:+1, ...)");
    kernel->add_option("--method", ka.method, "closed | spectral | pde");
    kernel->add_option("--x", ka.xs, "x value or lo:hi:n");
    kernel->add_option("--y", ka.ys, "y value or lo:hi:n");
    kernel->add_option("--t", ka.ts, "t value or lo:hi:n (required)");
    kernel->add_option("--L", ka.L, "truncation half-width");
    kernel->add_option("--nodes", ka.nodes, "grid nodes");
    kernel->add_option("--k", ka.K, "spectral mode count");
    kernel->add_option("--width-factor", ka.width_factor,
                       "mollifier width in grid spacings (pde)");
    kernel->add_option("--out", ka.out, "output table path");
    kernel->add_flag("--json", ka.json, "write JSON instead of CSV");
    kernel->add_option("--space-config", ka.space_config,
                       "key-value space file (overrides profile/L/nodes)");

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the weighted operator");
    spectrum->add_option("--profile", sa.profile, "profile spec");
    spectrum->add_option("--domain", sa.domain, "interval a:b");
    spectrum->add_option("--k", sa.K, "mode count");
    spectrum->add_option("--L", sa.L, "truncation half-width");
    spectrum->add_option("--nodes", sa.nodes, "grid nodes");
    spectrum->add_flag("--exhaust", sa.exhaust,
                       "first-eigenvalue trace along the dyadic exhaustion");
    spectrum->add_flag("--neumann", sa.neumann, "weighted Neumann boundary");
    spectrum->add_option("--out", sa.out, "eigen table JSON path");
    spectrum->add_option("--space-config", sa.space_config,
                         "key-value space file (overrides profile/L/nodes)");

    auto* verify = app.add_subcommand("verify", "run the verification suite");
    verify->add_option("--manifest", va.manifest_path, "manifest JSON path");
    verify->add_flag("--default", va.use_default, "use the built-in manifest");
    verify->add_option("--out", va.out, "report JSON path");
    verify->add_option("--csv", va.csv, "report CSV path");
    verify->add_option("--seed", va.seed, "override the manifest seed");
    verify->add_flag("--quiet", va.quiet, "suppress the summary table");
    verify->add_option("--emit-default", va.emit_default,
                       "write the built-in manifest to a file and exit");

    auto* rerun = app.add_subcommand("rerun", "re-execute a saved run manifest");
    rerun->add_option("path", rerun_path, "manifest JSON path")->required();

    app.require_subcommand(1);
    app.parse(argc, argv);

    if (kernel->parsed()) return run_kernel(ka);
    if (spectrum->parsed()) return run_spectrum(sa);
    if (verify->parsed()) return run_verify(va);
    if (rerun->parsed()) return run_rerun(rerun_path, app);
    throw CLI::ValidationError("no subcommand given");
}

int run_rerun(const std::string& manifest_path, CLI::App&) {
    std::ifstream in(manifest_path);
    if (!in.is_open())
        throw fheat::precondition_error("cannot open manifest " + manifest_path);
    nlohmann::json j;
    in >> j;
    if (!j.contains("args"))
        throw fheat::precondition_error("manifest has no saved args");
    auto args = j.at("args").get<std::vector<std::string>>();
    std::vector<char*> argv;
    std::string prog = "fheat";
    argv.push_back(prog.data());
    for (auto& s : args) argv.push_back(s.data());
    CLI::App app{"fheat rerun"};
    return dispatch(app, static_cast<int>(argv.size()), argv.data());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted heat kernels, spectra, volumes, and inequality checks"};
    try {
        return dispatch(app, argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    } catch (const fheat::precondition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const fheat::truncation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const fheat::resolution_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
}
