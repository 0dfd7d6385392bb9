#pragma once

#include <span>
#include <vector>

#include "fheat/profile.hpp"

namespace fheat {

enum class BoundaryCondition { dirichlet_zero, weighted_neumann };

/// Flux-form discretization of u'' - f' u' on a uniform grid over [a, b]:
///
///   (L u)_i = ( w_{i+1/2} (u_{i+1} - u_i) - w_{i-1/2} (u_i - u_{i-1}) )
///             / (h^2 w_i),        w = e^{-f},
///
/// self-adjoint in <u, v> = h sum_i w_i u_i v_i. Dirichlet places unknowns
/// on the interior vertices of [a, b]; weighted Neumann places them at cell
/// centers with zero boundary flux, which conserves <u, 1> exactly.
class DiscreteOperator {
public:
    static DiscreteOperator dirichlet(ProfilePtr profile, double a, double b,
                                      int grid_nodes);
    static DiscreteOperator neumann(ProfilePtr profile, double a, double b,
                                    int cells);

    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes() const { return nodes_; }
    double spacing() const { return h_; }
    double a() const { return a_; }
    double b() const { return b_; }
    BoundaryCondition bc() const { return bc_; }
    const WeightProfile& profile() const { return *profile_; }

    /// Node density e^{-f(x_i)}.
    const std::vector<double>& node_weight() const { return node_w_; }
    /// Quadrature weight h * w_i of each unknown.
    double quad_weight(int i) const { return h_ * node_w_[i]; }

    void apply(std::span<const double> u, std::span<double> out) const;

    double inner(std::span<const double> u, std::span<const double> v) const;
    double norm(std::span<const double> u) const;
    double mass(std::span<const double> u) const; // <u, 1>

    /// Discrete Dirichlet energy sum of w_{i+1/2} (du)^2 / h over edges,
    /// including the boundary edges for Dirichlet data.
    double dirichlet_energy(std::span<const double> u) const;

    /// Tridiagonal representation of -D L D^{-1}, D = diag(sqrt(w_i)):
    /// symmetric positive semidefinite.
    void symmetrized_tridiagonal(std::vector<double>& diag,
                                 std::vector<double>& off) const;

    /// Solves (I - c L) x = rhs by the Thomas algorithm (c >= 0).
    void solve_shifted(double c, std::span<const double> rhs,
                       std::span<double> x) const;

    /// Nearest unknown index to x.
    int nearest_node(double x) const;

private:
    DiscreteOperator(ProfilePtr profile, double a, double b, int n,
                     BoundaryCondition bc);

    ProfilePtr profile_;
    double a_ = 0.0, b_ = 0.0, h_ = 0.0;
    BoundaryCondition bc_;
    std::vector<double> nodes_;
    std::vector<double> node_w_;  // w_i at unknowns
    std::vector<double> edge_w_;  // w at edges; edge i sits between i-1 and i,
                                  // size size()+1, boundary edges included
};

} // namespace fheat
