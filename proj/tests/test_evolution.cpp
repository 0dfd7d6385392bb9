#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fheat/closedform.hpp"
#include "fheat/errors.hpp"
#include "fheat/evolution.hpp"
#include "fheat/spectral.hpp"

using namespace fheat;

namespace {
constexpr double kPi = std::numbers::pi;

WeightedSpace line_of(const std::string& spec, double L = 12.0, int nodes = 2048) {
    return WeightedSpace::line(parse_profile_spec(spec), L, nodes);
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}
} // namespace

TEST_CASE("one step acts on an eigenfunction by the expected factor") {
    WeightedSpace space = line_of("steady:+1", 8.0, 1024);
    EigenSystem es = eigensolve(space, -8.0, 8.0, 1);
    double lambda = es.lambda(0);

    DiscreteOperator op =
        DiscreteOperator::dirichlet(space.profile_ptr(), -8.0, 8.0, 1024);
    for (double dt : {0.05, 0.025}) {
        EvolutionState state(op, es.psi(0));
        state.step(dt);
        // Crank-Nicolson on an exact discrete mode: rational decay factor
        double measured = state.values()[300] / es.psi(0)[300];
        double exact = std::exp(-lambda * dt);
        CHECK(std::abs(measured - exact) <=
              std::pow(lambda * dt, 3) / 10.0 + 1e-12);
    }
}

TEST_CASE("halving dt quarters the decay error") {
    WeightedSpace space = line_of("euclid", 8.0, 512);
    EigenSystem es = eigensolve(space, -8.0, 8.0, 1);
    double lambda = es.lambda(0);
    DiscreteOperator op =
        DiscreteOperator::dirichlet(space.profile_ptr(), -8.0, 8.0, 512);

    auto decay_error = [&](double dt) {
        EvolutionState state(op, es.psi(0));
        int n = static_cast<int>(std::lround(1.0 / dt));
        for (int i = 0; i < n; ++i) state.step(dt);
        double measured = state.values()[200] / es.psi(0)[200];
        return std::abs(measured - std::exp(-lambda * 1.0));
    };
    double e1 = decay_error(0.05);
    double e2 = decay_error(0.025);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("constants are invariant under the conservative boundary") {
    WeightedSpace space = line_of("steady:+1", 6.0, 512);
    EvolutionState state(space, BoundaryCondition::weighted_neumann,
                         [](double) { return 2.5; });
    double m0 = state.mass();
    for (int i = 0; i < 20; ++i) state.step(0.01);
    for (double v : state.values()) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(state.mass() == doctest::Approx(m0).epsilon(1e-12));
}

TEST_CASE("flat-space Gaussian gains variance 2 dt") {
    WeightedSpace space = line_of("euclid", 12.0, 2048);
    double t0 = 0.25;
    EvolutionState state(space, BoundaryCondition::dirichlet_zero,
                         [&](double x) {
                             return std::exp(-x * x / (4.0 * t0)) /
                                    std::sqrt(4.0 * kPi * t0);
                         });
    double dt = 0.01;
    state.advance_to(0.05, dt);
    const auto& op = state.op();
    double m0 = 0.0, m2 = 0.0;
    for (int i = 0; i < op.size(); ++i) {
        double x = op.nodes()[i];
        m0 += state.values()[i];
        m2 += x * x * state.values()[i];
    }
    double variance = m2 / m0;
    CHECK(variance == doctest::Approx(2.0 * (t0 + 0.05)).epsilon(1e-5));
}

TEST_CASE("kernel from a point mass matches the closed forms") {
    WeightedSpace steady = line_of("steady:+1", 12.0, 2048);
    SolitonKernel ks(KernelKind::steady_plus);
    auto slice = kernel_from_delta(steady, 0.0, 0.5, 4.0 * steady.spacing());
    double worst = 0.0;
    for (double x : linspace(-2.0, 2.0, 41)) {
        double ref = ks.eval(x, 0.0, 0.5);
        worst = std::max(worst, std::abs(slice.value_at(x) - ref) / ref);
    }
    CHECK(worst <= 2e-3);
    CHECK(slice.reported_error > 0.0);

    WeightedSpace flat = line_of("euclid", 12.0, 2048);
    SolitonKernel ke(KernelKind::euclidean);
    auto slice0 = kernel_from_delta(flat, 0.0, 0.5, 4.0 * flat.spacing());
    worst = 0.0;
    for (double x : linspace(-2.0, 2.0, 41)) {
        double ref = ke.eval(x, 0.0, 0.5);
        worst = std::max(worst, std::abs(slice0.value_at(x) - ref) / ref);
    }
    CHECK(worst <= 2e-3);

    WeightedSpace shrink = line_of("shrinking", 12.0, 2048);
    SolitonKernel km(KernelKind::shrinking);
    auto slice2 = kernel_from_delta(shrink, 0.5, 0.3, 4.0 * shrink.spacing());
    worst = 0.0;
    for (double x : linspace(-1.5, 2.0, 36)) {
        double ref = km.eval(x, 0.5, 0.3);
        worst = std::max(worst, std::abs(slice2.value_at(x) - ref) / ref);
    }
    CHECK(worst <= 5e-3);
}

TEST_CASE("grid-delta initializer gives an exactly symmetric kernel") {
    WeightedSpace steady = line_of("steady:+1", 10.0, 1024);
    DiscreteOperator op =
        DiscreteOperator::dirichlet(steady.profile_ptr(), -10.0, 10.0, 1024);
    double a = op.nodes()[op.nearest_node(0.4)];
    double b = op.nodes()[op.nearest_node(-1.1)];

    auto from_a = kernel_from_delta(steady, a, 0.4, 0.0, DeltaInit::grid_delta);
    auto from_b = kernel_from_delta(steady, b, 0.4, 0.0, DeltaInit::grid_delta);
    double hab = from_a.value_at(b), hba = from_b.value_at(a);
    CHECK(hab == doctest::Approx(hba).epsilon(1e-8));

    // and it approximates the closed form through the same budget
    SolitonKernel ks(KernelKind::steady_plus);
    CHECK(hab == doctest::Approx(ks.eval(a, b, 0.4)).epsilon(2e-3));
}

TEST_CASE("mollifier width policing") {
    WeightedSpace space = line_of("euclid", 8.0, 512);
    CHECK_THROWS_AS(kernel_from_delta(space, 0.0, 0.5, space.spacing()),
                    resolution_error);
    CHECK_THROWS_AS(kernel_from_delta(space, 0.0, 1e-4, 4.0 * space.spacing()),
                    resolution_error); // mollifier wider than the target time
}

TEST_CASE("positivity floor on smooth nonnegative data") {
    WeightedSpace space = line_of("steady:+1", 8.0, 1024);
    BumpFunction bump(0.0, 1.0);
    EvolutionState state(space, BoundaryCondition::dirichlet_zero,
                         [&](double x) { return bump(x); });
    double peak = state.max_value();
    state.advance_to(1.0);
    CHECK(state.positivity_floor() >= -1e-9 * peak);
}

TEST_CASE("advancing in two legs agrees with one leg") {
    WeightedSpace space = line_of("steady:+1", 8.0, 512);
    BumpFunction bump(0.3, 1.0);
    auto ic = [&](double x) { return bump(x); };

    EvolutionState two(space, BoundaryCondition::dirichlet_zero, ic);
    two.advance_to(0.3, 0.005);
    two.advance_to(0.7, 0.005);
    EvolutionState one(space, BoundaryCondition::dirichlet_zero, ic);
    one.advance_to(0.7, 0.005);
    for (int i = 0; i < two.op().size(); i += 37)
        CHECK(two.values()[i] == doctest::Approx(one.values()[i]).epsilon(1e-12));
}

TEST_CASE("weighted mass trace: absorbing decreases, conservative holds") {
    WeightedSpace space = line_of("steady:+1", 4.0, 512);
    BumpFunction bump(0.0, 2.0);
    auto u0 = [&](double x) { return bump(x); };

    auto dirichlet = l1_contraction_check(space, u0, 1.0, 10,
                                          BoundaryCondition::dirichlet_zero);
    CHECK(dirichlet.pass);
    CHECK(dirichlet.extras.at("final_mass") <
          0.999 * dirichlet.extras.at("initial_mass"));

    auto neumann = l1_contraction_check(space, u0, 1.0, 10,
                                        BoundaryCondition::weighted_neumann);
    CHECK(neumann.pass);
    CHECK(neumann.measured <= 1e-8);

    auto zero = l1_contraction_check(space, [](double) { return 0.0; }, 0.5, 5,
                                     BoundaryCondition::dirichlet_zero);
    CHECK(zero.pass);
    CHECK(zero.extras.at("final_mass") == 0.0);

    CHECK_THROWS_AS(l1_contraction_check(space, [](double x) { return -x; }, 1.0,
                                         5, BoundaryCondition::dirichlet_zero),
                    precondition_error);
}

TEST_CASE("mean value constant of the constant solution") {
    WeightedSpace space = line_of("euclid", 8.0, 2048);
    SolutionTrace trace;
    DiscreteOperator op =
        DiscreteOperator::dirichlet(space.profile_ptr(), -8.0, 8.0, 2048);
    trace.nodes = op.nodes();
    double r = 1.0, s_end = 1.2;
    for (double t : linspace(s_end - r * r, s_end, 33)) {
        trace.times.push_back(t);
        trace.snapshots.emplace_back(op.size(), 1.0);
    }
    auto rep = mean_value_check(trace, space, 0.0, r, s_end, 0.5, 0.75);
    CHECK(rep.pass);
    // c = (d'-d)^{2+p} / d'^2 for u == 1 on the flat line, p = 4
    double oracle = std::pow(0.25, 6.0) / (0.75 * 0.75);
    CHECK(rep.measured == doctest::Approx(oracle).epsilon(0.02));

    CHECK_THROWS_AS(mean_value_check(trace, space, 0.0, r, s_end, 0.5, 0.5),
                    precondition_error);
}

TEST_CASE("snapshot CSV export") {
    WeightedSpace space = line_of("euclid", 4.0, 128);
    BumpFunction bump(0.0, 1.0);
    EvolutionState state(space, BoundaryCondition::dirichlet_zero,
                         [&](double x) { return bump(x); });
    auto trace = evolve_trace(std::move(state), {0.1, 0.2});
    std::string csv = trace_to_csv(trace);
    CHECK(csv.rfind("t,x,u\n", 0) == 0);
    size_t rows = std::count(csv.begin(), csv.end(), '\n');
    CHECK(rows == 1 + 2 * trace.nodes.size());
}

TEST_CASE("mean value constant of an evolved kernel slice is finite") {
    WeightedSpace space = line_of("steady:+1", 8.0, 1024);
    BumpFunction bump(0.0, 2.0);
    EvolutionState state(space, BoundaryCondition::dirichlet_zero,
                         [&](double x) { return bump(x) + 0.05; });
    double r = 1.0, s_end = 1.2;
    auto trace = evolve_trace(std::move(state), linspace(s_end - 1.0, s_end, 33));
    auto rep = mean_value_check(trace, space, 0.0, r, s_end, 0.5, 0.75);
    CHECK(rep.pass);
    CHECK(std::isfinite(rep.measured));
    CHECK(rep.measured > 0.0);
}

TEST_CASE("Poincare constant on the flat interval") {
    WeightedSpace space = line_of("euclid", 8.0, 1024);
    auto family = default_test_family(0.0, 1.0, 24, 7);
    auto rep = poincare_fit(space, 0.0, 1.0, family);
    CHECK(rep.pass);
    double optimal = rep.extras.at("optimal_constant");
    CHECK(optimal == doctest::Approx(4.0 / (kPi * kPi)).epsilon(2.5e-4));
    // the family includes the extremal mode, so the fit sandwiches
    CHECK(rep.measured <= optimal * 1.001);
    CHECK(rep.measured >= optimal * 0.995);

    // invariance of 1/(r^2 mu_1) under rescaling the ball
    auto rep2 = poincare_fit(space, 0.0, 2.0, default_test_family(0.0, 2.0, 8, 7));
    CHECK(rep2.extras.at("optimal_constant") ==
          doctest::Approx(4.0 / (kPi * kPi)).epsilon(2.5e-4));

    // weighted interval: fit stays below the weighted optimal constant
    WeightedSpace steady = line_of("steady:+1", 8.0, 1024);
    auto rep3 = poincare_fit(steady, 0.0, 1.0, default_test_family(0.0, 1.0, 50, 11));
    CHECK(rep3.pass);
    CHECK(std::isfinite(rep3.measured));
}

TEST_CASE("Sobolev fit is finite and stable") {
    WeightedSpace space = line_of("steady:+1", 8.0, 1024);
    auto family = default_test_family(0.0, 1.0, 32, 5);
    auto rep = sobolev_fit(space, 0.0, 1.0, 4.0, family);
    CHECK(rep.pass);
    CHECK(std::isfinite(rep.measured));
    CHECK_THROWS_AS(sobolev_fit(space, 0.0, 1.0, 2.0, family),
                    precondition_error);
    CHECK_THROWS_AS(sobolev_fit(space, 0.0, 1.0, 4.0, {}), precondition_error);
}
