#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fheat/bounds.hpp"
#include "fheat/errors.hpp"
#include "fheat/evolution.hpp"
#include "fheat/verify.hpp"

using namespace fheat;
using namespace fheat::bounds;

namespace {
constexpr double kPi = std::numbers::pi;

WeightedSpace line_of(const std::string& spec, double L = 12.0, int nodes = 2048) {
    return WeightedSpace::line(parse_profile_spec(spec), L, nodes);
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v(n);
    double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i) v[i] = std::exp(la + (lb - la) * i / (n - 1));
    return v;
}
} // namespace

TEST_CASE("two-set integral estimate on worked examples") {
    WeightedSpace steady = line_of("steady:+1");
    auto src = closed_form_source(SolitonKernel(KernelKind::steady_plus));
    auto rep = davies_check(steady, src, {0.0, 1.0}, {3.0, 4.0}, {1.0}, 0.25);
    CHECK(rep.pass);
    // frozen quadrature oracle of LHS/RHS at t = 1
    CHECK(rep.measured == doctest::Approx(0.0904).epsilon(0.01));

    WeightedSpace flat = line_of("euclid");
    auto src0 = closed_form_source(SolitonKernel(KernelKind::euclidean));
    auto rep0 = davies_check(flat, src0, {-1.0, 0.0}, {2.0, 3.0}, {0.5}, 0.0);
    CHECK(rep0.pass);
    CHECK(rep0.measured == doctest::Approx(0.0571).epsilon(0.01));
    CHECK(rep0.extras.at("distance") == doctest::Approx(2.0));

    // coinciding sets: the mass bound direction
    auto same = davies_check(steady, src, {0.0, 1.0}, {0.0, 1.0},
                             {0.05, 0.2, 1.0}, 0.25);
    CHECK(same.pass);

    CHECK_THROWS_AS(
        davies_check(flat, src0, {1.0, 1.0}, {2.0, 3.0}, {0.5}, 0.0),
        precondition_error);
}

TEST_CASE("two-set estimate holds over randomized disjoint pairs") {
    auto rng = verify::seeded_rng(77, "bounds-davies");
    auto pairs = verify::random_disjoint_intervals(-6.0, 6.0, 0.1, 30, rng);
    auto t_grid = logspace(0.05, 2.0, 10);

    WeightedSpace steady = line_of("steady:+1");
    auto src = closed_form_source(SolitonKernel(KernelKind::steady_plus));
    WeightedSpace flat = line_of("euclid");
    auto src0 = closed_form_source(SolitonKernel(KernelKind::euclidean));
    for (const auto& [B1, B2] : pairs) {
        CHECK(davies_check(steady, src, B1, B2, t_grid, 0.25).pass);
        CHECK(davies_check(flat, src0, B1, B2, t_grid, 0.0).pass);
    }
}

TEST_CASE("the estimate is falsifiable: an inflated eigenvalue breaks it") {
    WeightedSpace flat = line_of("euclid");
    auto src = closed_form_source(SolitonKernel(KernelKind::euclidean));
    // lambda far above the true bottom (0) shrinks the right side below
    // the actual mass at larger times
    auto rep = davies_check(flat, src, {-1.0, 0.0}, {0.5, 1.5}, {2.0}, 50.0);
    CHECK_FALSE(rep.pass);
    CHECK(rep.measured > 1.0);
}

TEST_CASE("spectral source obeys the estimate with its own bottom eigenvalue") {
    WeightedSpace steady = line_of("steady:+1");
    auto es = std::make_shared<EigenSystem>(
        eigensolve(steady, -12.0, 12.0, 200));
    auto src = spectral_source(es);
    auto rep = davies_check(steady, src, {-2.0, -1.0}, {1.5, 2.5},
                            logspace(0.1, 1.5, 6), es->lambda(0));
    CHECK(rep.pass);
}

TEST_CASE("exponential-weight energy decay") {
    WeightedSpace flat = line_of("euclid", 8.0, 1024);
    EigenSystem es = eigensolve(flat, 0.0, kPi, 64,
                                BoundaryCondition::dirichlet_zero, 1024);
    Interval B1{1.0, 1.5};

    for (double alpha : {0.0, 1.0, 2.0})
        for (double t0 : {0.05, 0.2}) {
            std::vector<double> grid;
            for (int i = 0; i <= 8; ++i) grid.push_back(t0 + i * 0.125);
            auto rep = davies_j_monotonicity(es, B1, alpha, t0, grid);
            CAPTURE(alpha);
            CAPTURE(t0);
            CHECK(rep.pass);
        }

    // times below t0 are filtered, not failed
    auto rep = davies_j_monotonicity(es, B1, 1.0, 0.2, {0.1, 0.2, 0.5});
    CHECK(rep.pass);
    CHECK(rep.extras.at("filtered_times") == 1.0);
    CHECK(rep.notes.find("filtered") != std::string::npos);

    CHECK_THROWS_AS(davies_j_monotonicity(es, B1, -1.0, 0.1, {0.2}),
                    precondition_error);
}

TEST_CASE("envelope constant: flat on-diagonal arithmetic") {
    WeightedSpace flat = line_of("euclid");
    auto src = closed_form_source(SolitonKernel(KernelKind::euclidean));
    EnvelopeParams params;
    params.eps = 1.0;
    params.base = 0.0;
    params.scale = 8.0;
    params.xs = {-1.0, -0.5, 0.0, 0.5, 1.0};
    params.ys = params.xs;
    params.ts = logspace(0.05, 1.0, 7);

    // restricted to the diagonal the integrand is exactly 1/sqrt(pi)
    for (size_t i = 0; i < params.xs.size(); ++i) {
        EnvelopeParams one = params;
        one.xs = {params.xs[i]};
        one.ys = {params.xs[i]};
        auto rep = gaussian_envelope_fit(flat, src, one, EnvelopeForm::single);
        CHECK(rep.extras.at("c_refined") ==
              doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-6));
    }

    auto full = gaussian_envelope_fit(flat, src, params, EnvelopeForm::single);
    CHECK(full.pass);
    CHECK(std::isfinite(full.measured));
}

TEST_CASE("envelope constants: steady profile, stability and eps-monotone") {
    WeightedSpace steady = line_of("steady:+1");
    auto src = closed_form_source(SolitonKernel(KernelKind::steady_plus));
    EnvelopeParams params;
    params.base = 0.0;
    params.scale = 8.0;
    std::vector<double> xs;
    for (int i = 0; i <= 16; ++i) xs.push_back(-2.0 + 0.25 * i);
    params.xs = xs;
    params.ys = xs;
    params.ts = logspace(0.05, 1.0, 9);

    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {0.25, 0.5, 1.0, 2.0}) {
        params.eps = eps;
        auto rep = gaussian_envelope_fit(steady, src, params,
                                         EnvelopeForm::single);
        CHECK(rep.pass); // finite and refinement-stable at 5%
        double c = rep.extras.at("c_refined");
        CHECK(c <= prev * (1.0 + 1e-12)); // nonincreasing in eps
        prev = c;
    }

    params.eps = 1.0;
    auto split = gaussian_envelope_fit(steady, src, params, EnvelopeForm::split);
    CHECK(split.pass);

    params.ts = {100.0}; // all outside (0, R^2/4)
    CHECK_THROWS_AS(
        gaussian_envelope_fit(steady, src, params, EnvelopeForm::single),
        precondition_error);
}

TEST_CASE("unit mass of steady and shrinking kernels") {
    for (const char* name : {"steady:+1", "shrinking"}) {
        WeightedSpace space = line_of(name, 12.0, 4096);
        SolitonKernel kernel = SolitonKernel::parse(name);
        auto rep = stochastic_completeness_check(space, kernel, {0.0, 1.0, -0.5},
                                                 {0.1, 0.5, 1.0});
        CAPTURE(name);
        CHECK(rep.pass);
        CHECK(rep.extras.at("worst_deviation") < 1e-6);
    }

    // power-law profile declares no growth constants
    WeightedSpace power = line_of("power:1", 4.0, 512);
    SolitonKernel any = SolitonKernel::parse("euclid");
    CHECK_NOTHROW(stochastic_completeness_check(line_of("euclid", 12.0, 4096),
                                                any, {0.0}, {0.5}));
}

TEST_CASE("absorbing-boundary kernel shows the expected deficit") {
    WeightedSpace steady = line_of("steady:+1");
    EigenSystem es = eigensolve(steady, -2.0, 2.0, 64,
                                BoundaryCondition::dirichlet_zero, 512);
    auto rep = dirichlet_mass_check(es, 0.0, {0.2, 0.5, 1.0});
    CHECK(rep.pass);
    CHECK(rep.extras.at("final_mass") < 0.99);
    CHECK(rep.notes.find("deficit") != std::string::npos);
}

TEST_CASE("semigroup identity across kernel sources") {
    WeightedSpace space = line_of("steady:+1", 12.0, 2048);
    SolitonKernel kernel(KernelKind::steady_plus);
    EigenSystem es = eigensolve(space, -12.0, 12.0, 200);
    auto slice = kernel_from_delta(space, -0.5, 0.4, 4.0 * space.spacing());

    // stepped-kernel slice composed with the expansion kernel reproduces
    // the closed form at the compound time, within the combined budgets
    double x = 0.6, t_spec = 0.3;
    double composed = space.integrate_measure(
        [&](double z) { return es.kernel_value(x, z, t_spec) * slice.value_at(z); },
        -6.0, 6.0);
    double direct = kernel.eval(x, -0.5, t_spec + 0.4);
    double budget = slice.reported_error + 2e-3;
    CHECK(std::abs(composed - direct) / direct <= budget);
}

TEST_CASE("sharpness example: harmonic, integrable once, not twice") {
    auto rep = liouville_example_check(1);
    CHECK(rep.pass);
    CHECK(rep.extras.at("harmonic_residual") <= 1e-4);
    CHECK(rep.extras.at("l1_converged") == 1.0);
    CHECK(rep.extras.at("l1_last_increment_rel") < 1e-8);
    CHECK(rep.extras.at("l1_value") > 0.0);
    CHECK(rep.extras.at("l2_diverges") == 1.0);
    // increments blow up doubly-exponentially in the dyadic index
    CHECK(rep.extras.at("l2_log_increment_5") >
          rep.extras.at("l2_log_increment_4") + 100.0);

    CHECK_THROWS_AS(liouville_example_check(0), precondition_error);
}

TEST_CASE("quadratic borderline: logarithmic divergence with the 1/(2x) tail") {
    auto rep = liouville_example_check(std::nullopt);
    CHECK(rep.pass);
    CHECK(rep.measured == doctest::Approx(1.0).epsilon(0.2));
    CHECK(rep.extras.at("final_truncation") > 0.0);
}

TEST_CASE("higher power index m = 2 behaves the same way") {
    // slower tail (R^{-2/5}) needs a longer truncation schedule; the
    // increments beyond x_direct come from the analytic tail model
    bounds::LiouvilleOptions opt;
    opt.l1_doublings = 80;
    auto rep = liouville_example_check(2, opt);
    CHECK(rep.pass);
    CHECK(rep.extras.at("harmonic_residual") <= 1e-4);
    CHECK(rep.extras.at("l1_last_increment_rel") < 1e-8);
}
