#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fheat/profile.hpp"

namespace fheat {

enum class QuadRule { simpson, trapezoid };

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

/// One-dimensional weighted line [-L, L] with measure e^{-f(x)} dx, or the
/// n-dimensional radial model on [0, L] with measure
/// omega_{n-1} r^{n-1} e^{-f(r)} dr. Immutable after construction; carries
/// a uniform grid and a positive quadrature rule for the weighted measure.
class WeightedSpace {
public:
    static WeightedSpace line(ProfilePtr profile, double L, int nodes,
                              QuadRule rule = QuadRule::simpson);
    static WeightedSpace radial(int dim, ProfilePtr profile, double L, int nodes,
                                QuadRule rule = QuadRule::simpson);

    int dimension() const { return dim_; }
    bool is_radial() const { return radial_; }
    double truncation() const { return L_; }
    double lo() const { return lo_; }
    double hi() const { return L_; }
    double spacing() const { return h_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& quad_weights() const { return weights_; }
    QuadRule rule() const { return rule_; }
    const WeightProfile& profile() const { return *profile_; }
    ProfilePtr profile_ptr() const { return profile_; }

    /// Density of the weighted measure with respect to dr.
    double measure_density(double x) const;
    double log_measure_density(double x) const;

    /// Area constant of the unit sphere S^{n-1} (2 for n=1).
    double sphere_area() const { return omega_; }

    /// Integral of g against the weighted measure over [a, b], composite
    /// rule on the exact subinterval (panel count tied to the grid spacing,
    /// deterministic for a fixed grid).
    double integrate_measure(const std::function<double(double)>& g, double a,
                             double b) const;

    /// Weighted volume of the radius interval [a, b].
    double measure(double a, double b) const;

    /// Weighted volume of the whole truncated domain (grid-weight sum).
    double total_measure() const;

    /// Metric ball about `center`; throws truncation_error (naming the
    /// needed half-width) when the ball leaves the domain.
    Interval ball(double center, double r) const;
    bool ball_inside(double center, double r) const;

    double distance(double x, double y) const { return std::abs(x - y); }

    /// A-priori error bound of the subinterval rule on [a, b] (order 4 for
    /// Simpson, order 2 for trapezoid), with sampled derivative estimates.
    double quadrature_error_bound(double a, double b) const;

    /// Outside-the-truncation tail estimate for eventually increasing
    /// profiles: sum of e^{-f}/f' at both ends, +inf when f' does not point
    /// outward. Diagnostic only.
    double tail_bound() const;

    std::string describe() const;

private:
    WeightedSpace(int dim, bool radial, ProfilePtr profile, double L, int nodes,
                  QuadRule rule);

    int panels_for(double a, double b) const;

    int dim_ = 1;
    bool radial_ = false;
    ProfilePtr profile_;
    double L_ = 0.0;
    double lo_ = 0.0;
    double h_ = 0.0;
    double omega_ = 2.0;
    QuadRule rule_ = QuadRule::simpson;
    std::vector<double> grid_;
    std::vector<double> weights_;
};

} // namespace fheat
