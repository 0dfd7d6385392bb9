#pragma once

#include <vector>

#include "fheat/report.hpp"
#include "fheat/space.hpp"

namespace fheat {
namespace geometry {

/// Default tolerances: analytic-sided inequality checks, quadrature-valued
/// inequality checks, and per-step monotonicity.
inline constexpr double tol_analytic = 1e-6;
inline constexpr double tol_quad = 1e-3;
inline constexpr double tol_mono = 1e-9;

/// Annulus-pair query with the radii ordering of the relative volume
/// comparison: 0 < r1 < r2, 0 < R1 < R2 < R, r1 <= R1, r2 <= R2 < R,
/// centered at `center`, measured against base point `base` at scale `R`.
struct VolumeQuery {
    double center = 0.0;
    double r1 = 0.0, r2 = 0.0;
    double R1 = 0.0, R2 = 0.0;
    double base = 0.0;
    double scale = 0.0; // R

    void validate() const; // throws precondition_error
};

/// V_f(B_center(r)) by the space's quadrature.
double weighted_ball_volume(const WeightedSpace& space, double center, double r);

/// V_f(B_center(R2)) - V_f(B_center(R1)); same quadrature path as the ball
/// volume so annulus(center, 0, r) == ball(center, r) exactly.
double annulus_volume(const WeightedSpace& space, double center, double R1,
                      double R2);

/// Maximum of |f| over the ball B_o(radius); analytic for builtin profiles.
double sup_abs_f(const WeightedSpace& space, double o, double radius);

/// A(R) = sup over B_o(3R) of |f|.
double oscillation_bound(const WeightedSpace& space, double o, double R);

/// Annulus volume ratio against e^{4A} (R2^n - R1^n)/(r2^n - r1^n).
BoundReport volume_comparison_check(const WeightedSpace& space,
                                    const VolumeQuery& q,
                                    double tol = tol_quad);

/// M(r) = r^{1-n} A_f(r) exp((2/r) int_0^r f along the ray) nonincreasing.
/// Runs for any profile; convex profiles are expected to pass, and the
/// first violating grid point is recorded otherwise.
BoundReport monotone_quantity_check(const WeightedSpace& space,
                                    double ray_origin,
                                    const std::vector<double>& r_grid,
                                    int direction = +1,
                                    double tol = tol_mono);

/// m_f(r) <= (n-1)/r + (2/r^2) int_0^r f - (2/r) f(r) along the ray.
BoundReport mean_curvature_check(const WeightedSpace& space, double x,
                                 const std::vector<double>& r_grid,
                                 int direction = +1,
                                 double tol = tol_quad);

/// V_f(B_x(2r)) <= 2^n e^{4A} V_f(B_x(r)).
BoundReport doubling_check(const WeightedSpace& space, double center, double r,
                           double base, double scale, double tol = tol_quad);

/// Both overlap conclusions:
///   V_f(B_x(s))/V_f(B_y(r)) <= 4^n e^{8A} (s/r)^kappa,
///       kappa = log2(2^n e^{4A}),
///   V_f(B_x(r)) <= e^{4A} (d(x,y)/r + 1)^n V_f(B_y(r)).
BoundReport ball_overlap_check(const WeightedSpace& space, double x, double y,
                               double r, double s, double base, double scale,
                               double tol = tol_quad);

/// Fits the smallest c with log V_f(B_o(R)) <= log C + n log R + c R^2 and
/// reports the partial integrals of int R / log V_f(B_o(R)) dR.
BoundReport volume_growth_check(const WeightedSpace& space, double base,
                                const std::vector<double>& R_grid);

} // namespace geometry
} // namespace fheat
