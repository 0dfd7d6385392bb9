#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fheat/errors.hpp"
#include "fheat/geometry.hpp"
#include "fheat/verify.hpp"

using namespace fheat;
namespace geo = fheat::geometry;

namespace {
constexpr double kPi = std::numbers::pi;

WeightedSpace line_of(const std::string& spec, double L = 12.0, int nodes = 2048) {
    return WeightedSpace::line(parse_profile_spec(spec), L, nodes);
}
} // namespace

TEST_CASE("space quadrature reproduces analytic volumes") {
    WeightedSpace flat = line_of("euclid", 4.0, 512);
    CHECK(flat.total_measure() == doctest::Approx(8.0).epsilon(1e-12));

    WeightedSpace steady = line_of("steady:+1", 4.0, 512);
    CHECK(steady.total_measure() ==
          doctest::Approx(2.0 * std::sinh(4.0)).epsilon(1e-9));

    for (double w : flat.quad_weights()) CHECK(w > 0.0);
    for (double w : steady.quad_weights()) CHECK(w > 0.0);

    CHECK_THROWS_AS(WeightedSpace::line(parse_profile_spec("euclid"), 4.0, 12),
                    precondition_error);
}

TEST_CASE("ball volumes match closed forms") {
    WeightedSpace flat = line_of("euclid");
    CHECK(geo::weighted_ball_volume(flat, 0.0, 1.0) ==
          doctest::Approx(2.0).epsilon(1e-12));

    WeightedSpace steady = line_of("steady:+1");
    CHECK(geo::weighted_ball_volume(steady, 0.0, 1.0) ==
          doctest::Approx(2.0 * std::sinh(1.0)).epsilon(1e-10));

    WeightedSpace ball3 =
        WeightedSpace::radial(3, parse_profile_spec("euclid"), 4.0, 512);
    CHECK(geo::weighted_ball_volume(ball3, 0.0, 1.0) ==
          doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-12));
}

TEST_CASE("annulus volumes") {
    WeightedSpace flat = line_of("euclid");
    CHECK(geo::annulus_volume(flat, 0.0, 1.0, 2.0) ==
          doctest::Approx(2.0).epsilon(1e-12));

    // erf quadrature oracle for the Gaussian weight
    WeightedSpace shrink = line_of("shrinking");
    double oracle = std::sqrt(kPi) * std::erf(1.0);
    CHECK(geo::annulus_volume(shrink, 0.0, 0.0, 1.0) ==
          doctest::Approx(oracle).epsilon(1e-10));

    CHECK(geo::annulus_volume(flat, 0.3, 1.5, 1.5) == 0.0);

    // same quadrature path as the ball volume: exact equality
    WeightedSpace steady = line_of("steady:+1");
    CHECK(geo::annulus_volume(steady, 0.4, 0.0, 1.3) ==
          geo::weighted_ball_volume(steady, 0.4, 1.3));
}

TEST_CASE("sup of |f| over balls") {
    WeightedSpace steady = line_of("steady:+1");
    CHECK(geo::sup_abs_f(steady, 0.0, 3.0) == doctest::Approx(3.0));

    WeightedSpace c5 = line_of("constant:5");
    CHECK(geo::sup_abs_f(c5, 0.7, 2.0) == doctest::Approx(5.0));

    WeightedSpace shrink = line_of("shrinking");
    CHECK(geo::sup_abs_f(shrink, 1.0, 3.0) == doctest::Approx(16.0));
}

TEST_CASE("ball leaving the truncation names the needed half-width") {
    WeightedSpace flat = line_of("euclid", 2.0, 128);
    CHECK_THROWS_AS(geo::weighted_ball_volume(flat, 1.0, 1.5), truncation_error);
    try {
        geo::weighted_ball_volume(flat, 1.0, 1.5);
    } catch (const truncation_error& e) {
        CHECK(std::string(e.what()).find("2.5") != std::string::npos);
    }
}

TEST_CASE("volume comparison: identical annuli at equality") {
    WeightedSpace flat = line_of("euclid");
    geo::VolumeQuery q{0.0, 0.5, 1.0, 0.5, 1.0, 0.0, 3.0};
    auto rep = geo::volume_comparison_check(flat, q);
    CHECK(rep.pass);
    // f == 0: both sides equal the length ratio exactly
    CHECK(rep.extras.at("log_measured") ==
          doctest::Approx(rep.extras.at("log_bound")).epsilon(1e-10));
}

TEST_CASE("volume comparison: steady example passes with margin") {
    WeightedSpace steady = line_of("steady:+1");
    geo::VolumeQuery q{0.0, 0.5, 1.0, 1.0, 2.0, 0.0, 3.0};
    auto rep = geo::volume_comparison_check(steady, q);
    CHECK(rep.pass);
    CHECK(rep.extras.at("A") == doctest::Approx(9.0));
    double lhs = (std::sinh(2.0) - std::sinh(1.0)) / (std::sinh(1.0) - std::sinh(0.5));
    CHECK(std::exp(rep.extras.at("log_measured")) ==
          doctest::Approx(lhs).epsilon(1e-8));
}

TEST_CASE("volume comparison rejects degenerate queries") {
    WeightedSpace flat = line_of("euclid");
    geo::VolumeQuery bad{0.0, 0.5, 1.5, 0.5, 1.0, 0.0, 3.0}; // r2 > R2
    CHECK_THROWS_AS(geo::volume_comparison_check(flat, bad), precondition_error);

    geo::VolumeQuery zero{0.0, 0.0, 1.0, 0.5, 1.0, 0.0, 3.0}; // r1 = 0
    CHECK_THROWS_AS(geo::volume_comparison_check(flat, zero), precondition_error);

    WeightedSpace exp2 = line_of("expanding");
    geo::VolumeQuery q{0.0, 0.5, 1.0, 0.5, 1.0, 0.0, 3.0};
    CHECK_THROWS_AS(geo::volume_comparison_check(exp2, q), precondition_error);
}

TEST_CASE("monotone quantity: linear weight gives a constant") {
    WeightedSpace steady = line_of("steady:+1");
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(1e-4 + i * 0.02);

    auto rep = geo::monotone_quantity_check(steady, 0.0, grid);
    CHECK(rep.pass);
    CHECK(std::abs(rep.measured) < 1e-12); // equality along the whole ray

    auto rep_base = geo::monotone_quantity_check(steady, 0.5, grid, -1);
    CHECK(rep_base.pass);
    CHECK(std::abs(rep_base.measured) < 1e-12);
}

TEST_CASE("monotone quantity: convex decreases, concave violates") {
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(1e-4 + i * 0.02);

    WeightedSpace shrink = line_of("shrinking");
    auto ok = geo::monotone_quantity_check(shrink, 0.0, grid);
    CHECK(ok.pass);
    // M(r) = exp(-r^2/3): log decrement per step strictly negative
    CHECK(ok.measured < 0.0);

    WeightedSpace expanding = line_of("expanding");
    auto bad = geo::monotone_quantity_check(expanding, 0.0, grid);
    CHECK_FALSE(bad.pass);
    CHECK(bad.extras.count("first_violation_r") == 1);
    CHECK(bad.notes.find("violated") != std::string::npos);
}

TEST_CASE("mean curvature comparison") {
    std::vector<double> grid;
    for (int i = 1; i <= 100; ++i) grid.push_back(i * 0.02);

    // f = x from 0: equality -1 = -1
    WeightedSpace steady = line_of("steady:+1");
    auto rep = geo::mean_curvature_check(steady, 0.0, grid);
    CHECK(rep.pass);
    CHECK(std::abs(rep.measured) < 1e-9);

    // flat radial n = 2: equality 1/r = 1/r
    WeightedSpace disk = WeightedSpace::radial(2, parse_profile_spec("euclid"), 8.0, 512);
    auto rep2 = geo::mean_curvature_check(disk, 0.0, grid);
    CHECK(rep2.pass);
    CHECK(std::abs(rep2.measured) < 1e-9);

    // f = x^2 from 0: -2r <= -4r/3 strictly
    WeightedSpace shrink = line_of("shrinking");
    auto rep3 = geo::mean_curvature_check(shrink, 0.0, grid);
    CHECK(rep3.pass);
    CHECK(rep3.extras.at("m_f") ==
          doctest::Approx(-2.0 * rep3.extras.at("worst_r")).epsilon(1e-9));
    CHECK(rep3.extras.at("rhs") ==
          doctest::Approx(-4.0 / 3.0 * rep3.extras.at("worst_r")).epsilon(1e-9));
}

TEST_CASE("volume doubling") {
    WeightedSpace flat = line_of("euclid");
    auto rep = geo::doubling_check(flat, 0.0, 1.0, 0.0, 3.0);
    CHECK(rep.pass);
    CHECK(rep.extras.at("ratio") == doctest::Approx(2.0).epsilon(1e-12));

    WeightedSpace steady = line_of("steady:+1", 16.0, 2048);
    auto rep2 = geo::doubling_check(steady, 0.0, 1.0, 0.0, 3.0);
    CHECK(rep2.pass);
    CHECK(rep2.extras.at("ratio") ==
          doctest::Approx(2.0 * std::cosh(1.0)).epsilon(1e-9));
    CHECK(rep2.extras.at("A") == doctest::Approx(9.0));

    for (int n : {2, 3}) {
        WeightedSpace ball =
            WeightedSpace::radial(n, parse_profile_spec("euclid"), 10.0, 1024);
        auto r = geo::doubling_check(ball, 0.0, 1.0, 0.0, 3.0);
        CHECK(r.pass);
        CHECK(r.extras.at("ratio") ==
              doctest::Approx(std::pow(2.0, n)).epsilon(1e-10));
    }
}

TEST_CASE("ball overlap bounds") {
    WeightedSpace flat = line_of("euclid", 25.0, 1024);

    auto same = geo::ball_overlap_check(flat, 0.0, 0.0, 0.5, 0.5, 0.0, 8.0);
    CHECK(same.pass);

    auto shifted = geo::ball_overlap_check(flat, 0.0, 0.5, 1.0, 1.0, 0.0, 8.0);
    CHECK(shifted.pass);
    // second conclusion at f = 0: V ratio 1 against (d/r + 1)^n = 1.5
    double m2 = shifted.extras.at("log_measured_shift");
    double b2 = shifted.extras.at("log_bound_shift");
    CHECK(std::exp(b2 - m2) == doctest::Approx(1.5).epsilon(1e-10));

    WeightedSpace steady = line_of("steady:+1", 36.0, 2048);
    auto general = geo::ball_overlap_check(steady, 0.0, 1.0, 1.0, 1.5, 0.0, 8.0);
    CHECK(general.pass);

    CHECK_THROWS_AS(geo::ball_overlap_check(flat, 0.0, 0.5, 1.0, 0.5, 0.0, 8.0),
                    precondition_error); // r > s
    CHECK_THROWS_AS(geo::ball_overlap_check(flat, 0.0, 0.5, 1.0, 3.0, 0.0, 8.0),
                    precondition_error); // s >= R/4
}

TEST_CASE("volume growth fit and divergence trend") {
    std::vector<double> R;
    for (int i = 0; i < 24; ++i) R.push_back(1.0 + i * 0.6);

    WeightedSpace flat = line_of("euclid", 16.0, 1024);
    auto rep = geo::volume_growth_check(flat, 0.0, R);
    CHECK(rep.pass);
    CHECK(std::abs(rep.extras.at("fitted_c")) < 1e-3);
    // partial integrals of R/log V grow without flattening
    double i0 = rep.extras.at("partial_integral_5");
    double i1 = rep.extras.at("partial_integral_10");
    double i2 = rep.extras.at("partial_integral_15");
    CHECK(i1 > i0);
    CHECK(i2 - i1 > i1 - i0); // superlinear growth

    WeightedSpace shrink = line_of("shrinking", 16.0, 1024);
    auto rep2 = geo::volume_growth_check(shrink, 0.0, R);
    CHECK(rep2.pass);
    CHECK(rep2.extras.at("fitted_c") < 0.01); // volume bounded by sqrt(pi)

    WeightedSpace expanding = line_of("expanding", 16.0, 2048);
    auto rep3 = geo::volume_growth_check(expanding, 0.0, R);
    CHECK(rep3.pass);
    CHECK(rep3.extras.at("fitted_c") == doctest::Approx(1.0).epsilon(0.1));

    WeightedSpace power = line_of("power:1", 16.0, 1024);
    CHECK_THROWS_AS(geo::volume_growth_check(power, 0.0, R), precondition_error);
}

TEST_CASE("randomized comparison queries all pass for convex profiles") {
    auto rng = verify::seeded_rng(20250801, "geometry-property");
    auto queries = verify::random_volume_queries(3.0, 9.5, 60, rng);
    for (const char* spec : {"euclid", "steady:+1", "shrinking", "power:1"}) {
        WeightedSpace space = line_of(spec, 9.6, 1024);
        for (const auto& q : queries) {
            auto rep = geo::volume_comparison_check(space, q);
            CAPTURE(spec);
            CAPTURE(rep.inputs);
            CHECK(rep.pass);
        }
    }
}

TEST_CASE("trapezoid rule spaces integrate correctly at second order") {
    WeightedSpace tz = WeightedSpace::line(parse_profile_spec("steady:+1"), 4.0,
                                           2048, QuadRule::trapezoid);
    CHECK(tz.total_measure() ==
          doctest::Approx(2.0 * std::sinh(4.0)).epsilon(1e-5));
    CHECK(geo::weighted_ball_volume(tz, 0.0, 1.0) ==
          doctest::Approx(2.0 * std::sinh(1.0)).epsilon(1e-5));
    // refinement obeys the order-2 error model
    WeightedSpace coarse = WeightedSpace::line(parse_profile_spec("steady:+1"),
                                               4.0, 256, QuadRule::trapezoid);
    double vc = geo::weighted_ball_volume(coarse, 0.0, 1.0);
    double vf = geo::weighted_ball_volume(tz, 0.0, 1.0);
    CHECK(std::abs(vc - vf) <= coarse.quadrature_error_bound(-1.0, 1.0));
}

TEST_CASE("grid refinement stays within the declared quadrature error") {
    for (const char* spec : {"steady:+1", "shrinking"}) {
        WeightedSpace coarse = line_of(spec, 6.0, 256);
        WeightedSpace fine = line_of(spec, 6.0, 512);
        for (double r : {0.4, 1.1, 2.3}) {
            double vc = geo::weighted_ball_volume(coarse, 0.3, r);
            double vf = geo::weighted_ball_volume(fine, 0.3, r);
            CHECK(std::abs(vc - vf) <=
                  coarse.quadrature_error_bound(0.3 - r, 0.3 + r) + 1e-14);
        }
    }
}

TEST_CASE("radial model: pole-based comparison checks") {
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(1e-4 + i * 0.02);

    for (int n : {2, 3}) {
        // radial Gaussian weight f = r^2: convex, decreasing quantity
        WeightedSpace ball =
            WeightedSpace::radial(n, parse_profile_spec("shrinking"), 10.0, 1024);
        auto mono = geo::monotone_quantity_check(ball, 0.0, grid);
        CHECK(mono.pass);
        CHECK(mono.measured < 0.0);

        auto mc = geo::mean_curvature_check(ball, 0.0, grid);
        CHECK(mc.pass);

        geo::VolumeQuery q{0.0, 0.5, 1.0, 1.0, 2.0, 0.0, 3.0};
        auto vc = geo::volume_comparison_check(ball, q);
        CHECK(vc.pass);

        // zero weight: annulus comparison is an identity in r^n
        WeightedSpace flat =
            WeightedSpace::radial(n, parse_profile_spec("euclid"), 10.0, 1024);
        auto eq = geo::volume_comparison_check(flat, q);
        CHECK(eq.pass);
        CHECK(eq.extras.at("log_measured") ==
              doctest::Approx(eq.extras.at("log_bound")).epsilon(1e-9));
    }
}

TEST_CASE("radial spaces restrict comparison checks to the pole") {
    WeightedSpace ball =
        WeightedSpace::radial(3, parse_profile_spec("euclid"), 10.0, 512);
    CHECK_THROWS_AS(geo::doubling_check(ball, 1.0, 0.5, 0.0, 3.0),
                    precondition_error);
    CHECK_NOTHROW(geo::doubling_check(ball, 0.0, 0.5, 0.0, 3.0));
}
