#include "fheat/operator.hpp"

#include <cmath>

#include "fheat/errors.hpp"

namespace fheat {

DiscreteOperator::DiscreteOperator(ProfilePtr profile, double a, double b, int n,
                                   BoundaryCondition bc)
    : profile_(std::move(profile)), a_(a), b_(b), bc_(bc) {
    if (!(b > a)) throw precondition_error("operator domain must have b > a");
    if (n < 8) throw precondition_error("operator needs at least 8 unknowns");

    nodes_.resize(n);
    if (bc_ == BoundaryCondition::dirichlet_zero) {
        h_ = (b - a) / (n + 1);
        for (int i = 0; i < n; ++i) nodes_[i] = a + (i + 1) * h_;
    } else {
        h_ = (b - a) / n;
        for (int i = 0; i < n; ++i) nodes_[i] = a + (i + 0.5) * h_;
    }

    node_w_.resize(n);
    for (int i = 0; i < n; ++i) node_w_[i] = profile_->weight(nodes_[i]);

    edge_w_.assign(n + 1, 0.0);
    if (bc_ == BoundaryCondition::dirichlet_zero) {
        for (int j = 0; j <= n; ++j) edge_w_[j] = profile_->weight(a + (j + 0.5) * h_);
    } else {
        // interior edges only; zero flux through the boundary edges
        for (int j = 1; j < n; ++j) edge_w_[j] = profile_->weight(a + j * h_);
    }
}

DiscreteOperator DiscreteOperator::dirichlet(ProfilePtr profile, double a,
                                             double b, int grid_nodes) {
    if (grid_nodes < 10)
        throw precondition_error("dirichlet operator needs >= 10 grid nodes");
    return DiscreteOperator(std::move(profile), a, b, grid_nodes - 2,
                            BoundaryCondition::dirichlet_zero);
}

DiscreteOperator DiscreteOperator::neumann(ProfilePtr profile, double a,
                                           double b, int cells) {
    return DiscreteOperator(std::move(profile), a, b, cells,
                            BoundaryCondition::weighted_neumann);
}

void DiscreteOperator::apply(std::span<const double> u,
                             std::span<double> out) const {
    const int n = size();
    const double inv_h2 = 1.0 / (h_ * h_);
    for (int i = 0; i < n; ++i) {
        double up = i + 1 < n ? u[i + 1] : 0.0;
        double um = i > 0 ? u[i - 1] : 0.0;
        out[i] = (edge_w_[i + 1] * (up - u[i]) - edge_w_[i] * (u[i] - um)) *
                 inv_h2 / node_w_[i];
    }
}

double DiscreteOperator::inner(std::span<const double> u,
                               std::span<const double> v) const {
    double s = 0.0;
    for (int i = 0; i < size(); ++i) s += node_w_[i] * u[i] * v[i];
    return s * h_;
}

double DiscreteOperator::norm(std::span<const double> u) const {
    return std::sqrt(inner(u, u));
}

double DiscreteOperator::mass(std::span<const double> u) const {
    double s = 0.0;
    for (int i = 0; i < size(); ++i) s += node_w_[i] * u[i];
    return s * h_;
}

double DiscreteOperator::dirichlet_energy(std::span<const double> u) const {
    const int n = size();
    double s = 0.0;
    for (int j = 0; j <= n; ++j) {
        double hi = j < n ? u[j] : 0.0;
        double lo = j > 0 ? u[j - 1] : 0.0;
        double du = hi - lo;
        s += edge_w_[j] * du * du;
    }
    return s / h_;
}

void DiscreteOperator::symmetrized_tridiagonal(std::vector<double>& diag,
                                               std::vector<double>& off) const {
    const int n = size();
    const double inv_h2 = 1.0 / (h_ * h_);
    diag.resize(n);
    off.resize(n > 0 ? n - 1 : 0);
    for (int i = 0; i < n; ++i)
        diag[i] = (edge_w_[i] + edge_w_[i + 1]) * inv_h2 / node_w_[i];
    for (int i = 0; i + 1 < n; ++i)
        off[i] = -edge_w_[i + 1] * inv_h2 / std::sqrt(node_w_[i] * node_w_[i + 1]);
}

void DiscreteOperator::solve_shifted(double c, std::span<const double> rhs,
                                     std::span<double> x) const {
    const int n = size();
    const double inv_h2 = 1.0 / (h_ * h_);
    std::vector<double> cp(n), dp(n);
    // Thomas sweep on (I - c L); rows are strictly diagonally dominant.
    auto lower = [&](int i) { return -c * edge_w_[i] * inv_h2 / node_w_[i]; };
    auto upper = [&](int i) { return -c * edge_w_[i + 1] * inv_h2 / node_w_[i]; };
    auto diag = [&](int i) {
        return 1.0 + c * (edge_w_[i] + edge_w_[i + 1]) * inv_h2 / node_w_[i];
    };
    double den = diag(0);
    if (den == 0.0) throw numeric_error("singular tridiagonal solve");
    cp[0] = upper(0) / den;
    dp[0] = rhs[0] / den;
    for (int i = 1; i < n; ++i) {
        den = diag(i) - lower(i) * cp[i - 1];
        if (den == 0.0) throw numeric_error("singular tridiagonal solve");
        cp[i] = i + 1 < n ? upper(i) / den : 0.0;
        dp[i] = (rhs[i] - lower(i) * dp[i - 1]) / den;
    }
    x[n - 1] = dp[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
}

int DiscreteOperator::nearest_node(double x) const {
    double pos = (x - nodes_[0]) / h_;
    int i = static_cast<int>(std::lround(pos));
    if (i < 0) i = 0;
    if (i >= size()) i = size() - 1;
    return i;
}

} // namespace fheat
