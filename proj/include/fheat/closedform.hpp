#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fheat/profile.hpp"
#include "fheat/report.hpp"
#include "fheat/space.hpp"

namespace fheat {

enum class KernelKind {
    steady_plus,  // f = +x
    steady_minus, // f = -x
    shrinking,    // f = +x^2
    expanding,    // f = -x^2
    euclidean,    // f = 0
};

/// Exact weighted heat kernels of the four explicitly solvable profiles on
/// the line. Evaluation goes through log space so the growing prefactors of
/// the expanding kernel stay finite; the formulas are symmetric in (x, y)
/// at the expression level.
class SolitonKernel {
public:
    explicit SolitonKernel(KernelKind kind);

    KernelKind kind() const { return kind_; }
    std::string name() const;
    ProfilePtr profile() const { return profile_; }
    double soliton_constant() const; // f'' (2, -2, or 0)

    double log_eval(double x, double y, double t) const;
    double eval(double x, double y, double t) const;

    /// Exact mass outside [-L, L] of the pairing integral
    /// int H(x, y, t) e^{-f(y)} dy (the y-marginal is Gaussian for every
    /// kind, so the tail is an erfc expression).
    double mass_tail_outside(double x, double t, double L) const;

    static SolitonKernel parse(const std::string& name);

private:
    KernelKind kind_;
    ProfilePtr profile_;
};

struct ResidualReport {
    double residual_h = 0.0;      // max normalized residual, stencil h
    double residual_h2 = 0.0;     // stencil h/2
    double residual_extrap = 0.0; // Richardson combination: formula defect
    double stencil_h = 0.0;
    double max_abs_kernel = 0.0;
};

/// Centered finite-difference residual of dH/dt - H_xx + f' H_x over the
/// (x, t) product grid with y fixed, normalized by the kernel maximum on the
/// grid. The h and h/2 passes are combined by Richardson extrapolation to
/// separate formula defects from stencil truncation.
ResidualReport pde_residual(const SolitonKernel& kernel, double y,
                            const std::vector<double>& x_grid,
                            const std::vector<double>& t_grid,
                            double h = 1e-3);

/// Smooth compactly supported test function: exp(1 - 1/(1 - v^2)) on
/// |v| < 1 with v = (x - center)/width, zero outside.
class BumpFunction {
public:
    BumpFunction(double center, double width);
    double operator()(double x) const;
    double deriv(double x) const;
    double center() const { return center_; }
    double width() const { return width_; }
    Interval support() const { return {center_ - width_, center_ + width_}; }

private:
    double center_;
    double width_;
};

/// Verifies int H(x, y, t) phi(x) dmu(x) -> phi(y) along a decreasing time
/// sequence: reported errors must not increase as t decreases and the error
/// at the smallest t must be below tol. The space grid must satisfy
/// h <= sqrt(t_min)/4 or a resolution_error is thrown.
BoundReport delta_limit_check(const SolitonKernel& kernel,
                              const WeightedSpace& space, double y,
                              const BumpFunction& phi,
                              std::vector<double> t_sequence,
                              double tol = 1e-4);

struct DecayFit {
    double rate = 0.0;      // lambda in -log H ~ lambda t + 0.5 log t + C
    double intercept = 0.0; // C
};

/// Least-squares fit of -log H(t) - 0.5 log t against t: extracts the
/// exponential decay rate under the 1/sqrt(t) prefactor that every
/// one-dimensional kernel here carries.
DecayFit fit_decay_rate(const std::function<double(double)>& log_kernel_of_t,
                        const std::vector<double>& t_grid);

} // namespace fheat
