#pragma once

#include <memory>
#include <vector>

#include "fheat/closedform.hpp"
#include "fheat/operator.hpp"
#include "fheat/report.hpp"
#include "fheat/space.hpp"

namespace fheat {

/// First K eigenpairs of -(u'' - f' u') on [a, b], orthonormal in the
/// discrete weighted inner product of the underlying operator. Dirichlet by
/// default; the weighted Neumann variant backs the Poincare constant.
class EigenSystem {
public:
    EigenSystem(DiscreteOperator op, int K);

    int K() const { return static_cast<int>(lambda_.size()); }
    double lambda(int k) const { return lambda_[k]; }
    const std::vector<double>& eigenvalues() const { return lambda_; }
    const std::vector<double>& psi(int k) const { return psi_[k]; }
    const DiscreteOperator& op() const { return op_; }
    double a() const { return op_.a(); }
    double b() const { return op_.b(); }

    /// Linear interpolation of psi_k, zero outside [a, b] (Dirichlet decay).
    double psi_at(int k, double x) const;

    /// Expansion coefficient <psi_k, u>.
    double coefficient(int k, std::span<const double> u) const;

    struct ExpansionValue {
        double value = 0.0;
        double tail_bound = 0.0; // e^{-lambda_K t} Cauchy-Schwarz envelope
        bool tail_dominated = false;
    };

    /// H(x, y, t) = sum_k e^{-lambda_k t} psi_k(x) psi_k(y) with the
    /// truncation tail bound reported.
    ExpansionValue kernel(double x, double y, double t) const;
    double kernel_value(double x, double y, double t) const {
        return kernel(x, y, t).value;
    }

    /// Smallest t in [t_lo, t_hi] (dyadic scan) with value > tail bound.
    double t_safe(double x, double y, double t_lo, double t_hi) const;

    /// int H(x, y, t) dmu(y) over the domain: <H(x,.), 1> in the discrete
    /// product. At most 1 for the Dirichlet kernel.
    double kernel_mass(double x, double t) const;

    /// Largest deviation |<psi_i, psi_j> - delta_ij| over i <= j.
    double orthonormality_defect() const;

    /// Largest ||L psi + lambda psi|| / lambda over the computed pairs.
    double residual_defect() const;

private:
    DiscreteOperator op_;
    std::vector<double> lambda_;
    std::vector<std::vector<double>> psi_;
};

/// Defaults of the spectral module.
inline constexpr int default_modes = 200;
inline constexpr double ortho_tol = 1e-8;
inline constexpr double eig_tol = 1e-6;

/// Solve on [a, b] inside the space. `grid_nodes` 0 means: match the space's
/// grid density (at least 64 nodes). Requires K <= grid nodes / 4.
EigenSystem eigensolve(const WeightedSpace& space, double a, double b, int K,
                       BoundaryCondition bc = BoundaryCondition::dirichlet_zero,
                       int grid_nodes = 0);

/// Increasing sequence of symmetric domains used for the exhaustion limit.
struct Exhaustion {
    std::vector<Interval> domains;

    /// [-2^i, 2^i] intersected with the truncation, i = 1, 2, ...
    static Exhaustion dyadic(const WeightedSpace& space, double first = 2.0);
    void validate() const;
};

struct SpectrumTrace {
    std::vector<double> half_width;
    std::vector<double> lambda1;
    double extrapolated = 0.0; // Richardson limit in 1/l^2
    bool monotone = true;      // lambda1 nonincreasing along the exhaustion
};

/// lambda_1(Omega_i) along the exhaustion plus the extrapolated limit.
SpectrumTrace bottom_of_spectrum(const WeightedSpace& space,
                                 const Exhaustion& exhaustion, int K = 4);

/// sum lambda^2 e^{-2 lambda t} psi(x)^2 <= C5 t^{-2} sum e^{-lambda t}
/// psi(x)^2 with C5 = max_s s^2 e^{-s}.
BoundReport laplacian_l2_bound_check(const EigenSystem& es, double x, double t,
                                     double tol = 1e-6);

/// Quadrature agreement of <Delta_f H(x,.), u> and <H(x,.), Delta_f u> for
/// compactly supported u.
BoundReport green_identity_check(const EigenSystem& es, const BumpFunction& u,
                                 double x, double t, double tol = 1e-6);

/// Numerically maximized s^2 e^{-s} over s >= 0 (golden-section search).
double spectral_decay_constant();

} // namespace fheat
