#include "fheat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <lapacke.h>

#include "fheat/errors.hpp"

namespace fheat {

EigenSystem::EigenSystem(DiscreteOperator op, int K) : op_(std::move(op)) {
    const int n = op_.size();
    if (K < 1) throw precondition_error("eigensolve needs K >= 1");
    if (K > n) throw precondition_error("K exceeds the unknown count");

    std::vector<double> diag, off;
    op_.symmetrized_tridiagonal(diag, off);

    std::vector<double> w(n);
    std::vector<double> z(static_cast<size_t>(n) * K);
    std::vector<lapack_int> isuppz(2 * static_cast<size_t>(std::max(1, K)));
    lapack_int m = 0;
    lapack_int info = LAPACKE_dstevr(
        LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(), 0.0, 0.0, 1, K,
        0.0, &m, w.data(), z.data(), n, isuppz.data());
    if (info != 0) {
        std::ostringstream os;
        os << "tridiagonal eigensolver failed: info = " << info << " (n = " << n
           << ", K = " << K << ")";
        throw numeric_error(os.str());
    }
    if (m < K) {
        std::ostringstream os;
        os << "eigensolver returned " << m << " of " << K << " pairs";
        throw numeric_error(os.str());
    }

    lambda_.assign(w.begin(), w.begin() + K);
    psi_.assign(K, std::vector<double>(n));
    const auto& nw = op_.node_weight();
    const double inv_sqrt_h = 1.0 / std::sqrt(op_.spacing());
    for (int k = 0; k < K; ++k) {
        auto& p = psi_[k];
        const double* col = z.data() + static_cast<size_t>(k) * n;
        for (int i = 0; i < n; ++i) p[i] = col[i] / std::sqrt(nw[i]) * inv_sqrt_h;
        // sign convention: derivative out of the left endpoint positive,
        // i.e. first nonzero component positive
        for (int i = 0; i < n; ++i) {
            if (p[i] != 0.0) {
                if (p[i] < 0.0)
                    for (double& v : p) v = -v;
                break;
            }
        }
    }
}

double EigenSystem::psi_at(int k, double x) const {
    const auto& nodes = op_.nodes();
    const auto& p = psi_[k];
    const double h = op_.spacing();
    if (x <= op_.a() || x >= op_.b()) {
        if (op_.bc() == BoundaryCondition::dirichlet_zero) return 0.0;
        return x <= op_.a() ? p.front() : p.back();
    }
    double pos = (x - nodes[0]) / h;
    int i = static_cast<int>(std::floor(pos));
    double frac = pos - i;
    double left, right;
    if (i < 0) { // between the boundary and the first unknown
        left = op_.bc() == BoundaryCondition::dirichlet_zero ? 0.0 : p.front();
        right = p.front();
        frac = pos + 1.0;
    } else if (i + 1 >= op_.size()) {
        left = p.back();
        right = op_.bc() == BoundaryCondition::dirichlet_zero ? 0.0 : p.back();
    } else {
        left = p[i];
        right = p[i + 1];
    }
    return left + (right - left) * frac;
}

double EigenSystem::coefficient(int k, std::span<const double> u) const {
    return op_.inner(psi_[k], u);
}

EigenSystem::ExpansionValue EigenSystem::kernel(double x, double y,
                                                double t) const {
    if (!(t > 0.0)) throw precondition_error("kernel time must be positive");
    ExpansionValue out;
    double sx = 0.0, sy = 0.0;
    for (int k = 0; k < K(); ++k) {
        double px = psi_at(k, x), py = psi_at(k, y);
        out.value += std::exp(-lambda_[k] * t) * px * py;
        sx += px * px;
        sy += py * py;
    }
    out.tail_bound = std::exp(-lambda_.back() * t) * std::sqrt(sx) * std::sqrt(sy);
    out.tail_dominated = out.tail_bound >= std::abs(out.value);
    return out;
}

double EigenSystem::t_safe(double x, double y, double t_lo, double t_hi) const {
    if (!(0.0 < t_lo && t_lo <= t_hi))
        throw precondition_error("t_safe needs 0 < t_lo <= t_hi");
    double t = t_lo;
    while (t <= t_hi) {
        auto v = kernel(x, y, t);
        if (v.value > v.tail_bound) return t;
        t *= 2.0;
    }
    return t_hi;
}

double EigenSystem::kernel_mass(double x, double t) const {
    std::vector<double> ones(op_.size(), 1.0);
    double s = 0.0;
    for (int k = 0; k < K(); ++k)
        s += std::exp(-lambda_[k] * t) * psi_at(k, x) * op_.inner(psi_[k], ones);
    return s;
}

double EigenSystem::orthonormality_defect() const {
    double worst = 0.0;
    for (int i = 0; i < K(); ++i)
        for (int j = i; j < K(); ++j) {
            double g = op_.inner(psi_[i], psi_[j]) - (i == j ? 1.0 : 0.0);
            worst = std::max(worst, std::abs(g));
        }
    return worst;
}

double EigenSystem::residual_defect() const {
    std::vector<double> Lu(op_.size());
    double worst = 0.0;
    for (int k = 0; k < K(); ++k) {
        op_.apply(psi_[k], Lu);
        for (int i = 0; i < op_.size(); ++i) Lu[i] += lambda_[k] * psi_[k][i];
        worst = std::max(worst, op_.norm(Lu) / std::max(lambda_[k], 1e-300));
    }
    return worst;
}

EigenSystem eigensolve(const WeightedSpace& space, double a, double b, int K,
                       BoundaryCondition bc, int grid_nodes) {
    if (space.is_radial())
        throw precondition_error("eigensolve runs on line spaces");
    if (a < space.lo() - 1e-12 || b > space.hi() + 1e-12)
        throw precondition_error("eigensolve domain must lie inside the truncation");
    if (grid_nodes == 0) {
        grid_nodes = static_cast<int>(std::lround((b - a) / space.spacing())) + 1;
        grid_nodes = std::max(grid_nodes, 64);
    }
    if (K > grid_nodes / 4)
        throw precondition_error("mode count K must satisfy K <= nodes/4");
    DiscreteOperator op =
        bc == BoundaryCondition::dirichlet_zero
            ? DiscreteOperator::dirichlet(space.profile_ptr(), a, b, grid_nodes)
            : DiscreteOperator::neumann(space.profile_ptr(), a, b, grid_nodes);
    return EigenSystem(std::move(op), K);
}

Exhaustion Exhaustion::dyadic(const WeightedSpace& space, double first) {
    if (space.is_radial())
        throw precondition_error("exhaustion defined for line spaces");
    Exhaustion ex;
    double L = space.truncation();
    for (double l = first; l < L; l *= 2.0)
        ex.domains.push_back({-l, l});
    ex.domains.push_back({-L, L});
    ex.validate();
    return ex;
}

void Exhaustion::validate() const {
    if (domains.size() < 2)
        throw precondition_error("exhaustion needs at least two domains");
    for (size_t i = 1; i < domains.size(); ++i) {
        bool strict = domains[i].lo < domains[i - 1].lo &&
                      domains[i].hi > domains[i - 1].hi;
        if (!strict)
            throw precondition_error("exhaustion domains must strictly increase");
    }
}

SpectrumTrace bottom_of_spectrum(const WeightedSpace& space,
                                 const Exhaustion& exhaustion, int K) {
    exhaustion.validate();
    SpectrumTrace trace;
    for (const auto& dom : exhaustion.domains) {
        EigenSystem es = eigensolve(space, dom.lo, dom.hi, K);
        trace.half_width.push_back(0.5 * dom.length());
        trace.lambda1.push_back(es.lambda(0));
    }
    for (size_t i = 1; i < trace.lambda1.size(); ++i)
        if (trace.lambda1[i] > trace.lambda1[i - 1] * (1.0 + 1e-8))
            trace.monotone = false;

    // Richardson in 1/l^2 on the last two domains.
    size_t n = trace.lambda1.size();
    double l1 = trace.half_width[n - 2], l2 = trace.half_width[n - 1];
    double a1 = trace.lambda1[n - 2], a2 = trace.lambda1[n - 1];
    trace.extrapolated = (a2 * l2 * l2 - a1 * l1 * l1) / (l2 * l2 - l1 * l1);
    return trace;
}

BoundReport laplacian_l2_bound_check(const EigenSystem& es, double x, double t,
                                     double tol) {
    if (!(t > 0.0)) throw precondition_error("t must be positive");
    const double C5 = spectral_decay_constant();
    double lhs = 0.0, diag = 0.0;
    for (int k = 0; k < es.K(); ++k) {
        double p2 = es.psi_at(k, x) * es.psi_at(k, x);
        double l = es.lambda(k);
        lhs += l * l * std::exp(-2.0 * l * t) * p2;
        diag += std::exp(-l * t) * p2;
    }
    double rhs = C5 / (t * t) * diag;

    std::ostringstream in;
    in << "x=" << x << " t=" << t << " K=" << es.K() << " domain=[" << es.a()
       << "," << es.b() << "] " << es.op().profile().describe();
    auto rep = make_hard_report("laplacian_l2_bound",
                                "squared-drift-Laplacian kernel integral bound",
                                in.str(), lhs, rhs, tol);
    rep.extras["C5"] = C5;
    rep.extras["on_diagonal_kernel"] = diag;
    return rep;
}

BoundReport green_identity_check(const EigenSystem& es, const BumpFunction& u,
                                 double x, double t, double tol) {
    if (!(t > 0.0)) throw precondition_error("t must be positive");
    Interval supp = u.support();
    if (!(supp.lo > es.a() && supp.hi < es.b()))
        throw precondition_error(
            "test function support must lie strictly inside the domain");

    const auto& op = es.op();
    std::vector<double> uv(op.size()), Lu(op.size());
    for (int i = 0; i < op.size(); ++i) uv[i] = u(op.nodes()[i]);
    op.apply(uv, Lu);

    double lhs = 0.0, rhs = 0.0, scale = 0.0;
    for (int k = 0; k < es.K(); ++k) {
        double px = es.psi_at(k, x);
        double cu = op.inner(es.psi(k), uv);
        double cLu = op.inner(es.psi(k), Lu);
        double damp = std::exp(-es.lambda(k) * t);
        lhs += damp * px * (-es.lambda(k)) * cu;
        rhs += damp * px * cLu;
        scale += damp * std::abs(px) * es.lambda(k) * std::abs(cu);
    }

    double diff = std::abs(lhs - rhs);
    double budget = tol * (std::abs(lhs) + std::abs(rhs) + scale);

    std::ostringstream in;
    in << "x=" << x << " t=" << t << " bump(center=" << u.center()
       << ",width=" << u.width() << ") domain=[" << es.a() << "," << es.b()
       << "] " << es.op().profile().describe();
    auto rep = make_hard_report("green_identity",
                                "weighted Green identity for the kernel pairing",
                                in.str(), diff, budget, 0.0);
    rep.extras["lhs"] = lhs;
    rep.extras["rhs"] = rhs;
    return rep;
}

double spectral_decay_constant() {
    // golden-section maximization of s^2 e^{-s} on [0, 10]
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    auto g = [](double s) { return s * s * std::exp(-s); };
    double a = 0.0, b = 10.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    while (b - a > 1e-13) {
        if (g(c) > g(d)) b = d;
        else a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return g(0.5 * (a + b));
}

} // namespace fheat
