#pragma once

#include <functional>
#include <vector>

#include "fheat/operator.hpp"
#include "fheat/report.hpp"
#include "fheat/space.hpp"

namespace fheat {

/// Time-stepped solution of du/dt = u'' - f' u' on the space grid.
/// Crank-Nicolson steps on the flux-form operator; the weighted Neumann
/// variant conserves the weighted mass to solver precision per step.
class EvolutionState {
public:
    EvolutionState(const WeightedSpace& space, BoundaryCondition bc,
                   const std::function<double(double)>& u0, double t0 = 0.0);
    EvolutionState(DiscreteOperator op, std::vector<double> u0, double t0 = 0.0);

    const DiscreteOperator& op() const { return op_; }
    const std::vector<double>& values() const { return u_; }
    double time() const { return t_; }
    double mass() const { return op_.mass(u_); }
    double min_value() const;
    double max_value() const;
    /// Smallest value seen over the whole history (maximum-principle monitor).
    double positivity_floor() const { return floor_; }

    void step(double dt);                // one Crank-Nicolson step
    void step_backward_euler(double dt); // damping startup step

    /// March to t_target with uniform steps of at most dt_max (default
    /// policy min(h, remaining/200)); `rannacher` replaces the first step by
    /// two backward-Euler half-steps.
    void advance_to(double t_target, double dt_max = 0.0, bool rannacher = false);

    /// Solution value at x by linear interpolation.
    double value_at(double x) const;

private:
    DiscreteOperator op_;
    std::vector<double> u_;
    double t_ = 0.0;
    double floor_ = 0.0;
};

struct SolutionTrace {
    std::vector<double> nodes;
    std::vector<double> times;
    std::vector<std::vector<double>> snapshots;
};

/// Evolve and record snapshots at the requested (ascending) times.
SolutionTrace evolve_trace(EvolutionState state, const std::vector<double>& times,
                           double dt_max = 0.0);

/// Snapshot table "t,x,u", one row per node per recorded time.
std::string trace_to_csv(const SolutionTrace& trace);

enum class DeltaInit {
    mollified,  // weighted Gaussian of the given width, centered to second
                // order and launched at t = width^2/2
    grid_delta, // discrete point mass with Rannacher startup; exactly
                // self-adjoint kernel approximation
};

struct KernelSlice {
    std::vector<double> x;
    std::vector<double> values; // approximates H(x, y, t)
    double y = 0.0;
    double t = 0.0;
    double mollifier_width = 0.0;
    double reported_error = 0.0; // relative budget: mollification + stepping
    double positivity_floor = 0.0;

    double value_at(double xq) const; // linear interpolation
};

/// Evolve a weighted-normalized mollified point mass at y to t_target.
/// mollifier_width >= 4h for the mollified initializer.
KernelSlice kernel_from_delta(const WeightedSpace& space, double y,
                              double t_target, double mollifier_width,
                              DeltaInit init = DeltaInit::mollified,
                              BoundaryCondition bc = BoundaryCondition::dirichlet_zero,
                              double dt_max = 0.0);

/// Weighted mass trace along the evolution: nonincreasing for absorbing
/// boundaries, constant for weighted Neumann, within tol relative per step.
BoundReport l1_contraction_check(const WeightedSpace& space,
                                 const std::function<double(double)>& u0,
                                 double t_end, int snapshots,
                                 BoundaryCondition bc, double tol = 1e-8);

/// Fitted constant of the parabolic mean-value inequality on the cylinder
/// B_o(r) x (s - r^2, s): c = sup_{Q_delta} u * (d'-d)^{2+p} r^2 V_f(B_o(r))
/// / integral_{Q_d'} u dmu dt.
BoundReport mean_value_check(const SolutionTrace& trace,
                             const WeightedSpace& space, double center,
                             double r, double s_end, double delta,
                             double delta_prime, double p = 4.0);

struct SmoothFunction {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    std::string desc;
};

/// Deterministic family of smooth test functions on (center-r, center+r):
/// the first Neumann mode, bumps, polynomials, and seeded trig mixtures.
std::vector<SmoothFunction> default_test_family(double center, double r,
                                                int count, unsigned seed);

/// Poincare quotient sup over the family, plus the exact optimal constant
/// 1/(r^2 mu_1) from the weighted Neumann eigensolve.
BoundReport poincare_fit(const WeightedSpace& space, double center, double r,
                         const std::vector<SmoothFunction>& family);

/// Sobolev quotient sup over the family for exponent p > 2; passes when
/// finite and stable under family enlargement.
BoundReport sobolev_fit(const WeightedSpace& space, double center, double r,
                        double p, const std::vector<SmoothFunction>& family);

} // namespace fheat
