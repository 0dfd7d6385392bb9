#include "fheat/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fheat/errors.hpp"

namespace fheat {

namespace {
constexpr double kPi = std::numbers::pi;

// log(2 pi sinh 2t), stable for large t: sinh 2t = e^{2t}(1 - e^{-4t})/2.
double log_two_pi_sinh_2t(double t) {
    return std::log(kPi) + 2.0 * t + std::log1p(-std::exp(-4.0 * t));
}
} // namespace

SolitonKernel::SolitonKernel(KernelKind kind) : kind_(kind) {
    switch (kind_) {
    case KernelKind::steady_plus: profile_ = make_linear_profile(+1.0); break;
    case KernelKind::steady_minus: profile_ = make_linear_profile(-1.0); break;
    case KernelKind::shrinking: profile_ = make_quadratic_profile(+1); break;
    case KernelKind::expanding: profile_ = make_quadratic_profile(-1); break;
    case KernelKind::euclidean: profile_ = make_constant_profile(0.0); break;
    }
}

std::string SolitonKernel::name() const {
    switch (kind_) {
    case KernelKind::steady_plus: return "steady:+1";
    case KernelKind::steady_minus: return "steady:-1";
    case KernelKind::shrinking: return "shrinking";
    case KernelKind::expanding: return "expanding";
    case KernelKind::euclidean: return "euclid";
    }
    return "?";
}

double SolitonKernel::soliton_constant() const {
    return *profile_->soliton_constant();
}

SolitonKernel SolitonKernel::parse(const std::string& name) {
    if (name == "steady:+1" || name == "steady" || name == "steady:1")
        return SolitonKernel(KernelKind::steady_plus);
    if (name == "steady:-1") return SolitonKernel(KernelKind::steady_minus);
    if (name == "shrinking") return SolitonKernel(KernelKind::shrinking);
    if (name == "expanding") return SolitonKernel(KernelKind::expanding);
    if (name == "euclid" || name == "euclidean")
        return SolitonKernel(KernelKind::euclidean);
    throw precondition_error("unknown kernel kind '" + name + "'");
}

double SolitonKernel::log_eval(double x, double y, double t) const {
    if (!(t > 0.0)) throw precondition_error("kernel time must be positive");
    const double d2 = (x - y) * (x - y);
    switch (kind_) {
    case KernelKind::euclidean:
        return -0.5 * std::log(4.0 * kPi * t) - d2 / (4.0 * t);
    case KernelKind::steady_plus:
    case KernelKind::steady_minus: {
        double k = kind_ == KernelKind::steady_plus ? 1.0 : -1.0;
        return 0.5 * k * (x + y) - 0.25 * t - 0.5 * std::log(4.0 * kPi * t) -
               d2 / (4.0 * t);
    }
    case KernelKind::shrinking: {
        double q = -std::expm1(-4.0 * t); // 1 - e^{-4t}
        double e2 = std::exp(-2.0 * t), e4 = std::exp(-4.0 * t);
        return -0.5 * log_two_pi_sinh_2t(t) +
               (2.0 * x * y * e2 - (x * x + y * y) * e4) / q + t;
    }
    case KernelKind::expanding: {
        double q = -std::expm1(-4.0 * t);
        double e2 = std::exp(-2.0 * t);
        return -0.5 * log_two_pi_sinh_2t(t) +
               (2.0 * x * y * e2 - (x * x + y * y)) / q - t;
    }
    }
    return 0.0;
}

double SolitonKernel::eval(double x, double y, double t) const {
    return std::exp(log_eval(x, y, t));
}

double SolitonKernel::mass_tail_outside(double x, double t, double L) const {
    if (!(t > 0.0)) throw precondition_error("kernel time must be positive");
    // The y-marginal H(x,y,t) e^{-f(y)} dy is Gaussian for every kind:
    // mean m, scale s with density proportional to exp(-(y-m)^2/s^2).
    double m = 0.0, s = 1.0;
    switch (kind_) {
    case KernelKind::euclidean:
        m = x;
        s = 2.0 * std::sqrt(t);
        break;
    case KernelKind::steady_plus:
    case KernelKind::steady_minus: {
        double k = kind_ == KernelKind::steady_plus ? 1.0 : -1.0;
        m = x - k * t;
        s = 2.0 * std::sqrt(t);
        break;
    }
    case KernelKind::shrinking: {
        double q = -std::expm1(-4.0 * t);
        m = x * std::exp(-2.0 * t);
        s = std::sqrt(q);
        break;
    }
    case KernelKind::expanding: {
        double q = -std::expm1(-4.0 * t);
        m = x * std::exp(2.0 * t);
        s = std::sqrt(q) * std::exp(2.0 * t);
        break;
    }
    }
    return 0.5 * std::erfc((L - m) / s) + 0.5 * std::erfc((L + m) / s);
}

ResidualReport pde_residual(const SolitonKernel& kernel, double y,
                            const std::vector<double>& x_grid,
                            const std::vector<double>& t_grid, double h) {
    if (x_grid.empty() || t_grid.empty())
        throw precondition_error("pde_residual needs nonempty grids");
    for (double t : t_grid)
        if (t - h <= 0.0)
            throw precondition_error("t grid must stay above the stencil width");

    const auto& prof = *kernel.profile();
    auto residual_at = [&](double x, double t, double hh) {
        double Ht = (kernel.eval(x, y, t + hh) - kernel.eval(x, y, t - hh)) /
                    (2.0 * hh);
        double Hc = kernel.eval(x, y, t);
        double Hp = kernel.eval(x + hh, y, t);
        double Hm = kernel.eval(x - hh, y, t);
        double Hxx = (Hp - 2.0 * Hc + Hm) / (hh * hh);
        double Hx = (Hp - Hm) / (2.0 * hh);
        return Ht - Hxx + prof.df(x) * Hx;
    };

    double max_H = 0.0;
    for (double x : x_grid)
        for (double t : t_grid)
            max_H = std::max(max_H, std::abs(kernel.eval(x, y, t)));
    if (max_H == 0.0) max_H = 1.0;

    double worst_h = 0.0, worst_h2 = 0.0, worst_ex = 0.0;
    for (double x : x_grid) {
        for (double t : t_grid) {
            double r1 = residual_at(x, t, h);
            double r2 = residual_at(x, t, 0.5 * h);
            double rx = (4.0 * r2 - r1) / 3.0;
            worst_h = std::max(worst_h, std::abs(r1));
            worst_h2 = std::max(worst_h2, std::abs(r2));
            worst_ex = std::max(worst_ex, std::abs(rx));
        }
    }

    ResidualReport rep;
    rep.residual_h = worst_h / max_H;
    rep.residual_h2 = worst_h2 / max_H;
    rep.residual_extrap = worst_ex / max_H;
    rep.stencil_h = h;
    rep.max_abs_kernel = max_H;
    return rep;
}

BumpFunction::BumpFunction(double center, double width)
    : center_(center), width_(width) {
    if (!(width > 0.0)) throw precondition_error("bump width must be positive");
}

double BumpFunction::operator()(double x) const {
    double v = (x - center_) / width_;
    double s = 1.0 - v * v;
    if (s <= 0.0) return 0.0;
    return std::exp(1.0 - 1.0 / s);
}

double BumpFunction::deriv(double x) const {
    double v = (x - center_) / width_;
    double s = 1.0 - v * v;
    if (s <= 0.0) return 0.0;
    return operator()(x) * (-2.0 * v / (s * s)) / width_;
}

BoundReport delta_limit_check(const SolitonKernel& kernel,
                              const WeightedSpace& space, double y,
                              const BumpFunction& phi,
                              std::vector<double> t_sequence, double tol) {
    if (space.is_radial())
        throw precondition_error("delta limit check pairs against a line measure");
    if (t_sequence.empty())
        throw precondition_error("delta limit check needs a time sequence");
    std::sort(t_sequence.rbegin(), t_sequence.rend());
    double t_min = t_sequence.back();
    if (!(t_min > 0.0)) throw precondition_error("times must be positive");

    Interval supp = phi.support();
    if (supp.lo < space.lo() || supp.hi > space.hi())
        throw precondition_error("test function support must lie inside the truncation");
    if (space.spacing() > std::sqrt(t_min) / 4.0) {
        std::ostringstream os;
        os << "grid spacing " << space.spacing()
           << " too coarse for t_min = " << t_min << "; need h <= "
           << std::sqrt(t_min) / 4.0;
        throw resolution_error(os.str());
    }

    double target = phi(y);
    std::vector<double> errors;
    errors.reserve(t_sequence.size());
    for (double t : t_sequence) {
        double val = space.integrate_measure(
            [&](double x) { return kernel.eval(x, y, t) * phi(x); }, supp.lo,
            supp.hi);
        errors.push_back(std::abs(val - target));
    }

    bool monotone = true;
    for (size_t i = 1; i < errors.size(); ++i)
        if (errors[i] > errors[i - 1] * 1.05 + 1e-12) monotone = false;

    std::ostringstream in;
    in << kernel.name() << " y=" << y << " bump(center=" << phi.center()
       << ",width=" << phi.width() << ") t=[" << t_sequence.front() << ".."
       << t_min << "]x" << t_sequence.size();
    auto rep = make_hard_report("delta_limit",
                                "point-mass initial condition in the weighted pairing",
                                in.str(), errors.back(), tol, 0.0);
    rep.pass = rep.pass && monotone;
    if (!monotone) rep.notes = "error sequence not monotone in t";
    for (size_t i = 0; i < errors.size(); ++i)
        rep.extras["error_" + std::to_string(i)] = errors[i];
    return rep;
}

DecayFit fit_decay_rate(const std::function<double(double)>& log_kernel_of_t,
                        const std::vector<double>& t_grid) {
    if (t_grid.size() < 2)
        throw precondition_error("decay fit needs at least two times");
    double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
    for (double t : t_grid) {
        double yv = -log_kernel_of_t(t) - 0.5 * std::log(t);
        s0 += 1.0;
        s1 += t;
        s2 += t * t;
        t0 += yv;
        t1 += yv * t;
    }
    double det = s0 * s2 - s1 * s1;
    DecayFit fit;
    fit.rate = (s0 * t1 - s1 * t0) / det;
    fit.intercept = (s2 * t0 - s1 * t1) / det;
    return fit;
}

} // namespace fheat
