#include "fheat/verify.hpp"

#include <cmath>
#include <future>
#include <numbers>
#include <sstream>

#include "fheat/bounds.hpp"
#include "fheat/closedform.hpp"
#include "fheat/config.hpp"
#include "fheat/errors.hpp"
#include "fheat/evolution.hpp"
#include "fheat/spectral.hpp"
#include "fheat/version.hpp"

namespace fheat {
namespace verify {

namespace {

using nlohmann::json;

double jget(const json& p, const char* key, double dflt) {
    return p.contains(key) ? p.at(key).get<double>() : dflt;
}
int jgeti(const json& p, const char* key, int dflt) {
    return p.contains(key) ? p.at(key).get<int>() : dflt;
}
std::string jgets(const json& p, const char* key, const std::string& dflt) {
    return p.contains(key) ? p.at(key).get<std::string>() : dflt;
}
std::vector<std::string> jget_profiles(const json& p,
                                       std::vector<std::string> dflt) {
    if (!p.contains("profiles")) return dflt;
    return p.at("profiles").get<std::vector<std::string>>();
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v(n);
    double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i) v[i] = std::exp(la + (lb - la) * i / (n - 1));
    return v;
}

WeightedSpace line_space(const std::string& profile, double L, int nodes) {
    return WeightedSpace::line(parse_profile_spec(profile), L, nodes);
}

using CheckFn = std::vector<BoundReport> (*)(const json&, std::mt19937_64&);

// ---- registry entries -------------------------------------------------

std::vector<BoundReport> check_volume_comparison(const json& p,
                                                 std::mt19937_64& rng) {
    auto profiles = jget_profiles(p, {"euclid", "steady:+1", "shrinking", "power:1"});
    int count = jgeti(p, "count", 50);
    double scale = jget(p, "scale", 3.0);
    double L = jget(p, "L", 3.0 * scale + 0.5);
    int nodes = jgeti(p, "nodes", 1024);
    std::vector<BoundReport> out;
    for (const auto& pr : profiles) {
        WeightedSpace space = line_space(pr, L, nodes);
        auto queries = random_volume_queries(scale, L, count, rng);
        for (const auto& q : queries)
            out.push_back(geometry::volume_comparison_check(space, q));
    }
    return out;
}

std::vector<BoundReport> check_doubling(const json& p, std::mt19937_64& rng) {
    auto profiles = jget_profiles(p, {"euclid", "steady:+1", "shrinking", "power:1"});
    int count = jgeti(p, "count", 25);
    double scale = jget(p, "scale", 3.0);
    double L = jget(p, "L", 3.0 * scale + 0.5);
    int nodes = jgeti(p, "nodes", 1024);
    std::uniform_real_distribution<double> ur(0.05, 0.45 * scale);
    std::uniform_real_distribution<double> uc(-0.25 * scale, 0.25 * scale);
    std::vector<BoundReport> out;
    for (const auto& pr : profiles) {
        WeightedSpace space = line_space(pr, L, nodes);
        for (int i = 0; i < count; ++i) {
            double r = ur(rng), c = uc(rng);
            out.push_back(geometry::doubling_check(space, c, r, 0.0, scale));
        }
    }
    // radial models at the pole, sharp for the zero weight
    for (int n : {2, 3}) {
        for (const char* pr : {"euclid", "shrinking"}) {
            WeightedSpace ball =
                WeightedSpace::radial(n, parse_profile_spec(pr), L, nodes);
            for (int i = 0; i < count / 4 + 1; ++i)
                out.push_back(
                    geometry::doubling_check(ball, 0.0, ur(rng), 0.0, scale));
        }
    }
    return out;
}

std::vector<BoundReport> check_ball_overlap(const json& p, std::mt19937_64& rng) {
    auto profiles = jget_profiles(p, {"euclid", "steady:+1", "shrinking", "power:1"});
    int count = jgeti(p, "count", 25);
    double scale = jget(p, "scale", 3.0);
    double L = jget(p, "L", 3.0 * scale + 0.5);
    int nodes = jgeti(p, "nodes", 1024);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<BoundReport> out;
    for (const auto& pr : profiles) {
        WeightedSpace space = line_space(pr, L, nodes);
        for (int i = 0; i < count; ++i) {
            double q = scale / 4.0;
            double s = (0.15 + 0.8 * u01(rng)) * q;
            double r = (0.3 + 0.7 * u01(rng)) * s;
            double xmax = std::min(s, q);
            double x = (2.0 * u01(rng) - 1.0) * xmax;
            double reach = std::min(s, q - std::abs(x));
            double y = x + (2.0 * u01(rng) - 1.0) * reach;
            out.push_back(
                geometry::ball_overlap_check(space, x, y, r, s, 0.0, scale));
        }
    }
    return out;
}

std::vector<BoundReport> check_monotone_quantity(const json& p,
                                                 std::mt19937_64& rng) {
    auto profiles = jget_profiles(p, {"euclid", "steady:+1", "shrinking", "power:1"});
    int count = jgeti(p, "count", 10);
    double L = jget(p, "L", 10.0);
    int nodes = jgeti(p, "nodes", 1024);
    std::uniform_real_distribution<double> uo(-1.0, 1.0);
    std::vector<double> r_grid = linspace(1e-4, 2.0, 200);
    std::vector<BoundReport> out;
    for (const auto& pr : profiles) {
        WeightedSpace space = line_space(pr, L, nodes);
        for (int i = 0; i < count; ++i) {
            int dir = (rng() & 1) ? +1 : -1;
            out.push_back(geometry::monotone_quantity_check(space, uo(rng),
                                                            r_grid, dir));
        }
    }
    return out;
}

std::vector<BoundReport> check_mean_curvature(const json& p,
                                              std::mt19937_64& rng) {
    auto profiles = jget_profiles(p, {"euclid", "steady:+1", "shrinking", "power:1"});
    int count = jgeti(p, "count", 10);
    double L = jget(p, "L", 10.0);
    int nodes = jgeti(p, "nodes", 1024);
    std::uniform_real_distribution<double> uo(-1.0, 1.0);
    std::vector<double> r_grid = linspace(0.01, 2.0, 100);
    std::vector<BoundReport> out;
    for (const auto& pr : profiles) {
        WeightedSpace space = line_space(pr, L, nodes);
        for (int i = 0; i < count; ++i) {
            int dir = (rng() & 1) ? +1 : -1;
            out.push_back(
                geometry::mean_curvature_check(space, uo(rng), r_grid, dir));
        }
    }
    return out;
}

std::vector<BoundReport> check_volume_growth(const json& p, std::mt19937_64&) {
    auto profiles = jget_profiles(p, {"euclid", "steady:+1", "shrinking"});
    double L = jget(p, "L", 16.0);
    int nodes = jgeti(p, "nodes", 1024);
    std::vector<double> R_grid = linspace(1.0, 0.95 * L, 24);
    std::vector<BoundReport> out;
    for (const auto& pr : profiles) {
        WeightedSpace space = line_space(pr, L, nodes);
        out.push_back(geometry::volume_growth_check(space, 0.0, R_grid));
    }
    return out;
}

std::vector<BoundReport> check_davies(const json& p, std::mt19937_64& rng) {
    int pairs = jgeti(p, "pairs", 25);
    int t_points = jgeti(p, "t_points", 10);
    double L = jget(p, "L", 12.0);
    int nodes = jgeti(p, "nodes", 2048);
    auto profiles = jget_profiles(p, {"steady:+1", "euclid"});
    std::vector<double> t_grid = logspace(0.05, 2.0, t_points);
    std::vector<BoundReport> out;
    for (const auto& pr : profiles) {
        WeightedSpace space = line_space(pr, L, nodes);
        SolitonKernel kernel = SolitonKernel::parse(pr);
        double lambda1 = jget(p, "lambda1", pr.rfind("steady", 0) == 0 ? 0.25 : 0.0);
        auto source = bounds::closed_form_source(kernel);
        auto sets = random_disjoint_intervals(-6.0, 6.0, 0.1, pairs, rng);
        for (const auto& [B1, B2] : sets)
            out.push_back(
                bounds::davies_check(space, source, B1, B2, t_grid, lambda1));
    }
    return out;
}

std::vector<BoundReport> check_davies_j(const json& p, std::mt19937_64&) {
    double L = jget(p, "L", 8.0);
    int nodes = jgeti(p, "nodes", 1024);
    WeightedSpace space = line_space(jgets(p, "profile", "euclid"), L, nodes);
    EigenSystem es = eigensolve(space, 0.0, std::numbers::pi, jgeti(p, "K", 64),
                                BoundaryCondition::dirichlet_zero, 1024);
    Interval B1{1.0, 1.5};
    std::vector<BoundReport> out;
    for (double alpha : {0.0, 0.5, 1.0, 1.5, 2.0})
        for (double t0 : {0.05, 0.1, 0.2, 0.3}) {
            std::vector<double> grid = linspace(t0, t0 + 1.0, 9);
            out.push_back(bounds::davies_j_monotonicity(es, B1, alpha, t0, grid));
        }
    return out;
}

std::vector<BoundReport> check_envelope(const json& p, std::mt19937_64&) {
    double L = jget(p, "L", 12.0);
    int nodes = jgeti(p, "nodes", 1024);
    std::string pr = jgets(p, "profile", "steady:+1");
    WeightedSpace space = line_space(pr, L, nodes);
    SolitonKernel kernel = SolitonKernel::parse(pr);
    auto source = bounds::closed_form_source(kernel);

    bounds::EnvelopeParams params;
    params.base = 0.0;
    params.scale = 8.0;
    params.xs = linspace(-2.0, 2.0, 17);
    params.ys = params.xs;
    params.ts = logspace(0.05, 1.0, 9);

    std::vector<BoundReport> out;
    double prev_c = std::numeric_limits<double>::infinity();
    bool monotone = true;
    double worst_ratio = 0.0;
    for (double eps : {0.25, 0.5, 1.0, 2.0}) {
        params.eps = eps;
        auto rep = bounds::gaussian_envelope_fit(space, source, params,
                                                 bounds::EnvelopeForm::single);
        double c = rep.extras.at("c_refined");
        if (c > prev_c * (1.0 + 1e-12)) monotone = false;
        worst_ratio = std::max(worst_ratio, c / prev_c);
        prev_c = c;
        out.push_back(std::move(rep));
    }
    auto mono = make_hard_report("envelope_monotone",
                                 "fitted envelope constant nonincreasing in eps",
                                 pr + " eps={0.25,0.5,1,2}",
                                 monotone ? worst_ratio : worst_ratio, 1.0, 1e-12);
    mono.pass = monotone;
    out.push_back(std::move(mono));
    return out;
}

std::vector<BoundReport> check_stochastic_completeness(const json& p,
                                                       std::mt19937_64&) {
    double L = jget(p, "L", 12.0);
    int nodes = jgeti(p, "nodes", 4096);
    auto profiles = jget_profiles(p, {"steady:+1", "shrinking"});
    std::vector<BoundReport> out;
    for (const auto& pr : profiles) {
        WeightedSpace space = line_space(pr, L, nodes);
        SolitonKernel kernel = SolitonKernel::parse(pr);
        out.push_back(bounds::stochastic_completeness_check(
            space, kernel, {0.0, 1.0, -0.5}, {0.1, 0.5, 1.0}));
    }
    return out;
}

std::vector<BoundReport> check_laplacian_l2(const json& p, std::mt19937_64& rng) {
    double L = jget(p, "L", 12.0);
    auto profiles = jget_profiles(p, {"euclid", "steady:+1"});
    std::uniform_real_distribution<double> ux(0.5, 2.5);
    std::uniform_real_distribution<double> ut(0.05, 2.0);
    std::vector<BoundReport> out;
    for (const auto& pr : profiles) {
        WeightedSpace space = line_space(pr, L, 1024);
        EigenSystem es = eigensolve(space, 0.0, std::numbers::pi, 64,
                                    BoundaryCondition::dirichlet_zero, 1024);
        for (int i = 0; i < jgeti(p, "count", 10); ++i)
            out.push_back(laplacian_l2_bound_check(es, ux(rng), ut(rng)));
    }
    return out;
}

std::vector<BoundReport> check_green_identity(const json& p,
                                              std::mt19937_64& rng) {
    double L = jget(p, "L", 12.0);
    auto profiles = jget_profiles(p, {"euclid", "steady:+1"});
    std::uniform_real_distribution<double> uc(-2.0, 2.0);
    std::uniform_real_distribution<double> uw(0.3, 1.0);
    std::vector<BoundReport> out;
    for (const auto& pr : profiles) {
        WeightedSpace space = line_space(pr, L, 1024);
        EigenSystem es = eigensolve(space, -4.0, 4.0, 64,
                                    BoundaryCondition::dirichlet_zero, 1024);
        for (int i = 0; i < jgeti(p, "count", 5); ++i) {
            BumpFunction u(uc(rng), uw(rng));
            out.push_back(green_identity_check(es, u, 0.5, 0.5));
        }
    }
    return out;
}

std::vector<BoundReport> check_poincare(const json& p, std::mt19937_64& rng) {
    auto profiles = jget_profiles(p, {"euclid", "steady:+1"});
    double r = jget(p, "r", 1.0);
    std::vector<BoundReport> out;
    for (const auto& pr : profiles) {
        WeightedSpace space = line_space(pr, 8.0, 1024);
        auto family = default_test_family(0.0, r, jgeti(p, "family", 24),
                                          static_cast<unsigned>(rng()));
        out.push_back(poincare_fit(space, 0.0, r, family));
    }
    return out;
}

std::vector<BoundReport> check_sobolev(const json& p, std::mt19937_64& rng) {
    auto profiles = jget_profiles(p, {"euclid", "steady:+1"});
    std::vector<BoundReport> out;
    for (const auto& pr : profiles) {
        WeightedSpace space = line_space(pr, 8.0, 1024);
        auto family = default_test_family(0.0, 1.0, jgeti(p, "family", 32),
                                          static_cast<unsigned>(rng()));
        out.push_back(sobolev_fit(space, 0.0, 1.0, jget(p, "p", 4.0), family));
    }
    return out;
}

std::vector<BoundReport> check_liouville(const json& p, std::mt19937_64&) {
    return {bounds::liouville_example_check(jgeti(p, "m", 1))};
}

std::vector<BoundReport> check_liouville_log(const json&, std::mt19937_64&) {
    return {bounds::liouville_example_check(std::nullopt)};
}

std::vector<BoundReport> check_l1_contraction(const json& p, std::mt19937_64&) {
    double L = jget(p, "L", 8.0);
    int nodes = jgeti(p, "nodes", 1024);
    auto profiles = jget_profiles(p, {"euclid", "steady:+1"});
    std::vector<BoundReport> out;
    for (const auto& pr : profiles) {
        WeightedSpace space = line_space(pr, L, nodes);
        BumpFunction bump(0.0, 1.0);
        auto u0 = [bump](double x) { return bump(x); };
        out.push_back(l1_contraction_check(space, u0, 0.5, 10,
                                           BoundaryCondition::dirichlet_zero));
        out.push_back(l1_contraction_check(space, u0, 0.5, 10,
                                           BoundaryCondition::weighted_neumann));
    }
    return out;
}

std::vector<BoundReport> check_kernel_residual(const json& p, std::mt19937_64&) {
    std::vector<double> xs = linspace(-2.0, 2.0, 21);
    std::vector<double> ts = linspace(0.1, 1.0, 10);
    double tol = jget(p, "tol", 1e-5);
    std::vector<BoundReport> out;
    for (const char* name : {"euclid", "steady:+1", "shrinking", "expanding"}) {
        SolitonKernel kernel = SolitonKernel::parse(name);
        auto res = pde_residual(kernel, 0.0, xs, ts);
        auto rep = make_hard_report(
            "kernel_residual", "closed-form kernel satisfies its equation",
            std::string(name) + " x=[-2,2] t=[0.1,1]", res.residual_extrap, tol,
            0.0);
        rep.extras["residual_h"] = res.residual_h;
        rep.extras["residual_h2"] = res.residual_h2;
        out.push_back(std::move(rep));
    }
    return out;
}

std::vector<BoundReport> check_spectrum_bottom(const json& p, std::mt19937_64&) {
    double L = jget(p, "L", 16.0);
    int nodes = jgeti(p, "nodes", 2048);
    WeightedSpace space = line_space(jgets(p, "profile", "steady:+1"), L, nodes);
    auto trace = bottom_of_spectrum(space, Exhaustion::dyadic(space));
    auto rep = make_hard_report("spectrum_bottom",
                                "exhaustion limit of the first eigenvalue",
                                space.describe(),
                                std::abs(trace.extrapolated - 0.25), 0.01, 0.0);
    rep.extras["extrapolated"] = trace.extrapolated;
    for (size_t i = 0; i < trace.lambda1.size(); ++i)
        rep.extras["lambda1_" + std::to_string(i)] = trace.lambda1[i];
    rep.pass = rep.pass && trace.monotone;
    if (!trace.monotone) rep.notes = "exhaustion sequence not monotone";

    SolitonKernel kernel(KernelKind::steady_plus);
    auto fit = fit_decay_rate(
        [&](double t) { return kernel.log_eval(0.0, 0.0, t); },
        linspace(10.0, 40.0, 31));
    auto rep2 = make_hard_report("kernel_decay_rate",
                                 "long-time on-diagonal decay rate",
                                 "steady:+1 t=[10,40]",
                                 std::abs(fit.rate - 0.25), 0.01, 0.0);
    rep2.extras["fitted_rate"] = fit.rate;
    return {rep, rep2};
}

std::vector<BoundReport> check_cross_method(const json& p, std::mt19937_64&) {
    double L = jget(p, "L", 12.0);
    int nodes = jgeti(p, "nodes", 2048);
    int K = jgeti(p, "K", 200);
    std::string pr = jgets(p, "profile", "steady:+1");
    WeightedSpace space = line_space(pr, L, nodes);
    SolitonKernel kernel = SolitonKernel::parse(pr);
    EigenSystem es = eigensolve(space, -L, L, K);

    std::vector<double> xs = linspace(-2.0, 2.0, 17);
    std::vector<double> ts = {0.1, 0.5, 1.0};
    double tol = jget(p, "tol", 2e-3);

    // pointwise-relative agreement within two standard deviations of the
    // kernel; peak-normalized agreement on the full grid
    double worst_spec = 0.0, worst_pde = 0.0;
    for (double t : ts) {
        auto slice = kernel_from_delta(space, 0.0, t, 4.0 * space.spacing());
        double reach = 2.0 * std::sqrt(2.0 * t);
        double peak = 0.0;
        for (double x : xs) peak = std::max(peak, kernel.eval(x, 0.0, t));
        for (double x : xs) {
            double ref = kernel.eval(x, 0.0, t);
            double es_err = std::abs(es.kernel_value(x, 0.0, t) - ref);
            double pde_err = std::abs(slice.value_at(x) - ref);
            double scale = std::abs(x) <= reach ? ref : peak;
            worst_spec = std::max(worst_spec, es_err / scale);
            worst_pde = std::max(worst_pde, pde_err / scale);
        }
    }
    auto r1 = make_hard_report("cross_method_spectral",
                               "expansion kernel matches the closed form",
                               pr + " interior grid", worst_spec, tol, 0.0);
    auto r2 = make_hard_report("cross_method_pde",
                               "time-stepped kernel matches the closed form",
                               pr + " interior grid", worst_pde, tol, 0.0);
    return {r1, r2};
}

std::vector<BoundReport> check_delta_limit(const json& p, std::mt19937_64&) {
    int nodes = jgeti(p, "nodes", 16385);
    std::vector<BoundReport> out;
    std::vector<double> ts = {1e-2, 1e-3, 1e-4, 1e-5};
    {
        WeightedSpace space = line_space("euclid", 4.0, nodes);
        SolitonKernel kernel(KernelKind::euclidean);
        out.push_back(
            delta_limit_check(kernel, space, 0.0, BumpFunction(0.0, 0.5), ts));
    }
    {
        WeightedSpace space = line_space("steady:+1", 4.0, nodes);
        SolitonKernel kernel(KernelKind::steady_plus);
        out.push_back(
            delta_limit_check(kernel, space, 1.0, BumpFunction(1.0, 0.5), ts));
    }
    return out;
}

std::vector<BoundReport> check_mean_value(const json& p, std::mt19937_64&) {
    double L = jget(p, "L", 8.0);
    int nodes = jgeti(p, "nodes", 1024);
    std::string pr = jgets(p, "profile", "steady:+1");
    WeightedSpace space = line_space(pr, L, nodes);

    double r = 1.0, s_end = 1.2;
    std::vector<double> times = linspace(s_end - r * r, s_end, 33);
    std::vector<double> cs;
    std::vector<BoundReport> out;
    for (double y0 : {0.0, 0.4, -0.6, 1.0, 0.2}) {
        BumpFunction bump(y0, 2.5);
        EvolutionState state(space, BoundaryCondition::dirichlet_zero,
                             [&](double x) { return bump(x) + 0.05; });
        auto trace = evolve_trace(std::move(state), times);
        auto rep = mean_value_check(trace, space, 0.0, r, s_end, 0.5, 0.75);
        cs.push_back(rep.measured);
        out.push_back(std::move(rep));
    }
    std::sort(cs.begin(), cs.end());
    double median = cs[cs.size() / 2];
    double stability = cs.back() / median;
    auto rep = make_hard_report("mean_value_stability",
                                "fitted mean-value constants stable across solutions",
                                pr + " family of 5 solutions", stability, 10.0, 0.0);
    out.push_back(std::move(rep));
    return out;
}

std::vector<BoundReport> check_semigroup(const json& p, std::mt19937_64&) {
    double L = jget(p, "L", 12.0);
    int nodes = jgeti(p, "nodes", 4096);
    double tol = jget(p, "tol", 1e-6);
    std::vector<BoundReport> out;
    for (const char* name : {"euclid", "steady:+1", "shrinking"}) {
        WeightedSpace space = line_space(name, L, nodes);
        SolitonKernel kernel = SolitonKernel::parse(name);
        double worst = 0.0;
        for (auto [x, y, t, s] : {std::tuple{0.3, -0.2, 0.25, 0.4},
                                  std::tuple{1.0, 0.5, 0.1, 0.3},
                                  std::tuple{-1.5, 0.8, 0.5, 0.5}}) {
            double composed = space.integrate_measure(
                [&](double z) {
                    return kernel.eval(x, z, t) * kernel.eval(z, y, s);
                },
                space.lo(), space.hi());
            double direct = kernel.eval(x, y, t + s);
            worst = std::max(worst, std::abs(composed - direct) / direct);
        }
        out.push_back(make_hard_report("semigroup",
                                       "kernel composition reproduces the kernel",
                                       std::string(name) + " three (x,y,t,s) probes",
                                       worst, tol, 0.0));
    }
    return out;
}

struct RegistryEntry {
    const char* name;
    CheckFn fn;
};

const RegistryEntry kRegistry[] = {
    {"volume_comparison", check_volume_comparison},
    {"doubling", check_doubling},
    {"ball_overlap", check_ball_overlap},
    {"monotone_quantity", check_monotone_quantity},
    {"mean_curvature", check_mean_curvature},
    {"volume_growth", check_volume_growth},
    {"davies", check_davies},
    {"davies_j", check_davies_j},
    {"envelope", check_envelope},
    {"stochastic_completeness", check_stochastic_completeness},
    {"laplacian_l2", check_laplacian_l2},
    {"green_identity", check_green_identity},
    {"poincare", check_poincare},
    {"sobolev", check_sobolev},
    {"liouville", check_liouville},
    {"liouville_log", check_liouville_log},
    {"l1_contraction", check_l1_contraction},
    {"kernel_residual", check_kernel_residual},
    {"spectrum_bottom", check_spectrum_bottom},
    {"cross_method", check_cross_method},
    {"delta_limit", check_delta_limit},
    {"mean_value", check_mean_value},
    {"semigroup", check_semigroup},
};

CheckFn find_check(const std::string& name) {
    for (const auto& e : kRegistry)
        if (name == e.name) return e.fn;
    std::ostringstream os;
    os << "unknown check '" << name << "'; valid names:";
    for (const auto& e : kRegistry) os << " " << e.name;
    throw precondition_error(os.str());
}

} // namespace

nlohmann::ordered_json Manifest::to_json() const {
    nlohmann::ordered_json j;
    j["version"] = version;
    j["command"] = command;
    j["seed"] = seed;
    j["tool_version"] = tool_version.empty() ? std::string(kVersion) : tool_version;
    j["timestamp"] = timestamp;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json e;
        e["check"] = c.check;
        if (!c.params.empty()) e["params"] = c.params;
        j["checks"].push_back(e);
    }
    return j;
}

Manifest Manifest::from_json(const nlohmann::json& j) {
    Manifest m;
    m.version = j.value("version", 1);
    m.seed = j.value("seed", std::uint64_t{20250801});
    m.command = j.value("command", std::string("verify"));
    m.tool_version = j.value("tool_version", std::string(kVersion));
    m.timestamp = j.value("timestamp", std::string());
    if (!j.contains("checks") || !j.at("checks").is_array() ||
        j.at("checks").empty())
        throw precondition_error("manifest must list at least one check");
    for (const auto& e : j.at("checks")) {
        CheckSpec spec;
        spec.check = e.at("check").get<std::string>();
        if (e.contains("params")) spec.params = e.at("params");
        find_check(spec.check); // validate eagerly
        m.checks.push_back(std::move(spec));
    }
    return m;
}

Manifest Manifest::default_manifest() {
    Manifest m;
    m.tool_version = kVersion;
    for (const char* name :
         {"kernel_residual", "volume_comparison", "doubling", "ball_overlap",
          "monotone_quantity", "mean_curvature", "davies", "davies_j",
          "stochastic_completeness", "laplacian_l2", "green_identity",
          "poincare", "liouville", "l1_contraction", "semigroup"})
        m.checks.push_back({name, nlohmann::json::object()});
    return m;
}

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& e : kRegistry) v.push_back(e.name);
        return v;
    }();
    return names;
}

std::mt19937_64 seeded_rng(std::uint64_t seed, const std::string& tag) {
    std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ull;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return std::mt19937_64(h);
}

VerifyResult run_manifest(const Manifest& manifest) {
    std::vector<std::future<std::vector<BoundReport>>> futures;
    for (size_t i = 0; i < manifest.checks.size(); ++i) {
        const auto& spec = manifest.checks[i];
        CheckFn fn = find_check(spec.check);
        futures.push_back(std::async(std::launch::async, [&, fn, i] {
            auto rng = seeded_rng(manifest.seed,
                                  spec.check + "#" + std::to_string(i));
            return fn(manifest.checks[i].params, rng);
        }));
    }
    VerifyResult result;
    for (auto& f : futures) {
        auto batch = f.get();
        for (auto& r : batch) {
            if (r.hard && !r.pass) result.all_hard_passed = false;
            result.reports.push_back(std::move(r));
        }
    }
    sort_reports(result.reports);
    return result;
}

std::vector<geometry::VolumeQuery> random_volume_queries(double scale,
                                                         double max_extent,
                                                         int count,
                                                         std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<geometry::VolumeQuery> out;
    out.reserve(count);
    long attempts = 0;
    const long budget = 1000L * count + 1000;
    while (static_cast<int>(out.size()) < count) {
        if (++attempts > budget)
            throw precondition_error(
                "query generator cannot satisfy the truncation constraints; "
                "enlarge the domain");
        geometry::VolumeQuery q;
        q.scale = scale;
        q.base = 0.0;
        q.center = (2.0 * u01(rng) - 1.0) * 0.9 * scale;
        q.r1 = (0.02 + 0.25 * u01(rng)) * scale;
        q.r2 = q.r1 + (0.03 + 0.25 * u01(rng)) * scale;
        q.R1 = q.r1 + 0.2 * u01(rng) * scale;
        q.R2 = std::max(q.r2, q.R1) + (0.03 + 0.25 * u01(rng)) * scale;
        if (q.R2 >= 0.98 * scale) continue;
        if (std::abs(q.center) + q.R2 >= max_extent) continue;
        q.validate();
        out.push_back(q);
    }
    return out;
}

std::vector<std::pair<Interval, Interval>> random_disjoint_intervals(
    double lo, double hi, double min_gap, int count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<std::pair<Interval, Interval>> out;
    out.reserve(count);
    while (static_cast<int>(out.size()) < count) {
        double len1 = 0.2 + 1.3 * u01(rng);
        double len2 = 0.2 + 1.3 * u01(rng);
        double gap = min_gap + 3.0 * u01(rng);
        double total = len1 + gap + len2;
        if (total >= hi - lo) continue;
        double start = lo + (hi - lo - total) * u01(rng);
        Interval B1{start, start + len1};
        Interval B2{B1.hi + gap, B1.hi + gap + len2};
        if (u01(rng) < 0.5) std::swap(B1, B2);
        out.emplace_back(B1, B2);
    }
    return out;
}

} // namespace verify
} // namespace fheat
