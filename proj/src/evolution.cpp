#include "fheat/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "fheat/errors.hpp"
#include "fheat/geometry.hpp"
#include "fheat/spectral.hpp"

namespace fheat {

namespace {

DiscreteOperator make_op(const WeightedSpace& space, BoundaryCondition bc) {
    if (space.is_radial())
        throw precondition_error("evolution runs on line spaces");
    int nodes = static_cast<int>(space.grid().size());
    return bc == BoundaryCondition::dirichlet_zero
               ? DiscreteOperator::dirichlet(space.profile_ptr(), space.lo(),
                                             space.hi(), nodes)
               : DiscreteOperator::neumann(space.profile_ptr(), space.lo(),
                                           space.hi(), nodes);
}

double interp_on(const std::vector<double>& nodes, const std::vector<double>& v,
                 double x) {
    if (nodes.size() < 2) return v.empty() ? 0.0 : v[0];
    double h = nodes[1] - nodes[0];
    double pos = (x - nodes[0]) / h;
    if (pos <= 0.0) return v.front();
    if (pos >= static_cast<double>(nodes.size() - 1)) return v.back();
    int i = static_cast<int>(std::floor(pos));
    double f = pos - i;
    return v[i] + (v[i + 1] - v[i]) * f;
}

} // namespace

EvolutionState::EvolutionState(const WeightedSpace& space, BoundaryCondition bc,
                               const std::function<double(double)>& u0,
                               double t0)
    : op_(make_op(space, bc)) {
    u_.resize(op_.size());
    for (int i = 0; i < op_.size(); ++i) u_[i] = u0(op_.nodes()[i]);
    t_ = t0;
    floor_ = min_value();
}

EvolutionState::EvolutionState(DiscreteOperator op, std::vector<double> u0,
                               double t0)
    : op_(std::move(op)), u_(std::move(u0)), t_(t0) {
    if (static_cast<int>(u_.size()) != op_.size())
        throw precondition_error("initial data size does not match the grid");
    floor_ = min_value();
}

double EvolutionState::min_value() const {
    return *std::min_element(u_.begin(), u_.end());
}

double EvolutionState::max_value() const {
    return *std::max_element(u_.begin(), u_.end());
}

void EvolutionState::step(double dt) {
    if (!(dt > 0.0)) throw precondition_error("dt must be positive");
    std::vector<double> rhs(op_.size()), Lu(op_.size());
    op_.apply(u_, Lu);
    for (int i = 0; i < op_.size(); ++i) rhs[i] = u_[i] + 0.5 * dt * Lu[i];
    op_.solve_shifted(0.5 * dt, rhs, u_);
    t_ += dt;
    floor_ = std::min(floor_, min_value());
}

void EvolutionState::step_backward_euler(double dt) {
    if (!(dt > 0.0)) throw precondition_error("dt must be positive");
    std::vector<double> out(op_.size());
    op_.solve_shifted(dt, u_, out);
    u_ = std::move(out);
    t_ += dt;
    floor_ = std::min(floor_, min_value());
}

void EvolutionState::advance_to(double t_target, double dt_max, bool rannacher) {
    double remaining = t_target - t_;
    if (remaining <= 0.0) {
        if (remaining < -1e-14) throw precondition_error("time must not decrease");
        return;
    }
    if (dt_max <= 0.0) dt_max = std::min(op_.spacing(), remaining / 200.0);
    int n = std::max(1, static_cast<int>(std::ceil(remaining / dt_max)));
    double dt = remaining / n;
    int start = 0;
    if (rannacher && n >= 1) {
        step_backward_euler(0.5 * dt);
        step_backward_euler(0.5 * dt);
        start = 1;
    }
    for (int i = start; i < n; ++i) step(dt);
    t_ = t_target; // remove roundoff drift of the accumulated sum
}

double EvolutionState::value_at(double x) const {
    return interp_on(op_.nodes(), u_, x);
}

SolutionTrace evolve_trace(EvolutionState state,
                           const std::vector<double>& times, double dt_max) {
    SolutionTrace trace;
    trace.nodes = state.op().nodes();
    for (double t : times) {
        state.advance_to(t, dt_max);
        trace.times.push_back(t);
        trace.snapshots.push_back(state.values());
    }
    return trace;
}

std::string trace_to_csv(const SolutionTrace& trace) {
    std::ostringstream os;
    os << "t,x,u\n";
    char buf[120];
    for (size_t j = 0; j < trace.times.size(); ++j)
        for (size_t i = 0; i < trace.nodes.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n",
                          trace.times[j], trace.nodes[i],
                          trace.snapshots[j][i]);
            os << buf;
        }
    return os.str();
}

double KernelSlice::value_at(double xq) const {
    return interp_on(x, values, xq);
}

KernelSlice kernel_from_delta(const WeightedSpace& space, double y,
                              double t_target, double mollifier_width,
                              DeltaInit init, BoundaryCondition bc,
                              double dt_max) {
    if (!(t_target > 0.0)) throw precondition_error("t_target must be positive");
    DiscreteOperator op = make_op(space, bc);
    const double h = op.spacing();

    std::vector<double> u0(op.size(), 0.0);
    double launch_time = 0.0;
    double budget = 0.0;

    if (init == DeltaInit::mollified) {
        if (mollifier_width < 4.0 * h * (1.0 - 1e-12)) {
            std::ostringstream os;
            os << "mollifier width " << mollifier_width
               << " below grid resolution; need >= " << 4.0 * h;
            throw resolution_error(os.str());
        }
        const double sigma = mollifier_width;
        const double t0 = 0.5 * sigma * sigma;
        if (t_target <= 2.0 * t0)
            throw resolution_error("mollifier too wide for the requested time");
        // The mollified mass acts like the kernel already evolved by t0 from
        // a drift-shifted center; launch accordingly and step the remainder.
        const double yc = y + space.profile().df(y) * t0;
        for (int i = 0; i < op.size(); ++i) {
            double d = op.nodes()[i] - yc;
            u0[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        }
        launch_time = t0;
        budget = 0.5 * sigma * sigma / t_target;
    } else {
        int j = op.nearest_node(y);
        u0[j] = 1.0; // normalized below against the weighted mass
        budget = h * h / (3.0 * t_target);
    }

    double m = op.mass(u0);
    for (double& v : u0) v /= m;

    EvolutionState state(std::move(op), std::move(u0), launch_time);
    double dt_policy = dt_max > 0.0
                           ? dt_max
                           : std::min(h, (t_target - launch_time) / 200.0);
    state.advance_to(t_target, dt_policy, /*rannacher=*/true);
    budget += dt_policy * dt_policy / (12.0 * t_target) +
              h * h / (12.0 * t_target);

    KernelSlice slice;
    slice.x = state.op().nodes();
    slice.values = state.values();
    slice.y = y;
    slice.t = t_target;
    slice.mollifier_width = mollifier_width;
    slice.reported_error = budget;
    slice.positivity_floor = state.positivity_floor();
    return slice;
}

BoundReport l1_contraction_check(const WeightedSpace& space,
                                 const std::function<double(double)>& u0,
                                 double t_end, int snapshots,
                                 BoundaryCondition bc, double tol) {
    if (!(t_end > 0.0) || snapshots < 2)
        throw precondition_error("contraction check needs t_end > 0 and >= 2 snapshots");
    for (size_t i = 0; i < space.grid().size(); ++i)
        if (u0(space.grid()[i]) < 0.0)
            throw precondition_error("contraction check needs nonnegative data");

    EvolutionState state(space, bc, u0);
    double m_prev = state.mass();
    const double m0 = m_prev;
    const double scale = std::max(std::abs(m0), 1e-300);
    double worst_growth = 0.0; // relative per-step mass increase
    double worst_drift = 0.0;  // relative deviation from m0 (neumann)
    for (int s = 1; s <= snapshots; ++s) {
        state.advance_to(t_end * s / snapshots);
        double m = state.mass();
        worst_growth = std::max(worst_growth, (m - m_prev) / scale);
        worst_drift = std::max(worst_drift, std::abs(m - m0) / scale);
        m_prev = m;
    }

    bool neumann = bc == BoundaryCondition::weighted_neumann;
    double measured = neumann ? worst_drift : worst_growth;

    std::ostringstream in;
    in << (neumann ? "weighted-neumann" : "dirichlet-zero") << " t_end=" << t_end
       << " snapshots=" << snapshots << " " << space.profile().describe();
    auto rep = make_hard_report("l1_contraction",
                                "weighted-mass contraction of the heat semigroup",
                                in.str(), measured, tol, 0.0);
    rep.extras["initial_mass"] = m0;
    rep.extras["final_mass"] = m_prev;
    return rep;
}

BoundReport mean_value_check(const SolutionTrace& trace,
                             const WeightedSpace& space, double center,
                             double r, double s_end, double delta,
                             double delta_prime, double p) {
    if (!(0.0 < delta && delta < delta_prime && delta_prime <= 1.0))
        throw precondition_error("mean value check needs 0 < delta < delta' <= 1");
    if (trace.times.size() < 3)
        throw precondition_error("trace too short for the cylinder integral");

    const double t_lo_outer = s_end - delta_prime * r * r;
    const double t_lo_inner = s_end - delta * r * r;
    const auto& nodes = trace.nodes;
    const double h = nodes[1] - nodes[0];

    double sup_inner = -std::numeric_limits<double>::infinity();
    double integral = 0.0;
    double prev_t = 0.0, prev_slice = 0.0;
    bool have_prev = false;
    double min_u = std::numeric_limits<double>::infinity();

    for (size_t j = 0; j < trace.times.size(); ++j) {
        double t = trace.times[j];
        if (t < t_lo_outer - 1e-12 || t > s_end + 1e-12) continue;
        const auto& u = trace.snapshots[j];
        double slice = 0.0;
        for (size_t i = 0; i < nodes.size(); ++i) {
            double d = std::abs(nodes[i] - center);
            if (d <= delta_prime * r) {
                slice += u[i] * space.measure_density(nodes[i]) * h;
                min_u = std::min(min_u, u[i]);
                if (d <= delta * r && t >= t_lo_inner - 1e-12)
                    sup_inner = std::max(sup_inner, u[i]);
            }
        }
        if (have_prev) integral += 0.5 * (slice + prev_slice) * (t - prev_t);
        prev_t = t;
        prev_slice = slice;
        have_prev = true;
    }

    if (!(min_u > 0.0))
        throw precondition_error("mean value check needs a positive solution on the cylinder");

    double V = geometry::weighted_ball_volume(space, center, r);
    double denom = integral /
                   (std::pow(delta_prime - delta, 2.0 + p) * r * r * V);
    double c = sup_inner / denom;

    std::ostringstream in;
    in << "o=" << center << " r=" << r << " s=" << s_end << " delta=(" << delta
       << "," << delta_prime << ") p=" << p << " " << space.profile().describe();
    BoundReport rep;
    rep.name = "mean_value";
    rep.claim = "parabolic mean-value constant on shrinking cylinders";
    rep.inputs = in.str();
    rep.digest = input_digest(rep.name + "|" + rep.inputs);
    rep.measured = c;
    rep.bound = std::numeric_limits<double>::infinity();
    rep.hard = false;
    rep.pass = std::isfinite(c) && c > 0.0;
    rep.margin = rep.pass ? 1.0 : -1.0;
    rep.extras["sup_inner"] = sup_inner;
    rep.extras["cylinder_integral"] = integral;
    rep.extras["ball_volume"] = V;
    return rep;
}

std::vector<SmoothFunction> default_test_family(double center, double r,
                                                int count, unsigned seed) {
    std::vector<SmoothFunction> family;
    const double pi = std::numbers::pi;

    // leading Neumann mode of the unweighted interval
    family.push_back({[=](double x) { return std::cos(pi * (x - center + r) / (2.0 * r)); },
                      [=](double x) {
                          return -pi / (2.0 * r) *
                                 std::sin(pi * (x - center + r) / (2.0 * r));
                      },
                      "neumann-mode-1"});
    // odd/even polynomials
    family.push_back({[=](double x) { return (x - center) / r; },
                      [=](double) { return 1.0 / r; },
                      "linear"});
    family.push_back({[=](double x) { double v = (x - center) / r; return v * v; },
                      [=](double x) { return 2.0 * (x - center) / (r * r); },
                      "quadratic"});

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    int modes = 5;
    while (static_cast<int>(family.size()) < count) {
        std::vector<double> a(modes), b(modes);
        for (int k = 0; k < modes; ++k) {
            a[k] = amp(rng) / (k + 1);
            b[k] = amp(rng) / (k + 1);
        }
        family.push_back(
            {[=](double x) {
                 double s = 0.0;
                 for (int k = 0; k < modes; ++k) {
                     double w = (k + 1) * pi * (x - center) / r;
                     s += a[k] * std::cos(w) + b[k] * std::sin(w);
                 }
                 return s;
             },
             [=](double x) {
                 double s = 0.0;
                 for (int k = 0; k < modes; ++k) {
                     double w = (k + 1) * pi * (x - center) / r;
                     double dw = (k + 1) * pi / r;
                     s += dw * (-a[k] * std::sin(w) + b[k] * std::cos(w));
                 }
                 return s;
             },
             "trig-mix-" + std::to_string(family.size())});
    }
    family.resize(count);
    return family;
}

BoundReport poincare_fit(const WeightedSpace& space, double center, double r,
                         const std::vector<SmoothFunction>& family) {
    if (family.empty()) throw precondition_error("empty test family");
    Interval B = space.ball(center, r);
    double V = space.measure(B.lo, B.hi);

    double worst = 0.0;
    int used = 0;
    for (const auto& phi : family) {
        double mean = space.integrate_measure(phi.value, B.lo, B.hi) / V;
        double num = space.integrate_measure(
            [&](double x) { double d = phi.value(x) - mean; return d * d; }, B.lo,
            B.hi);
        double den = space.integrate_measure(
            [&](double x) { double d = phi.deriv(x); return d * d; }, B.lo, B.hi);
        if (den <= 1e-14 * std::max(1.0, num)) continue; // constants excluded
        worst = std::max(worst, num / (r * r * den));
        ++used;
    }
    if (used == 0) throw precondition_error("test family contains only constants");

    // exact optimal constant from the first nonzero weighted Neumann eigenvalue
    EigenSystem es = eigensolve(space, B.lo, B.hi, 2,
                                BoundaryCondition::weighted_neumann, 2048);
    double mu1 = es.lambda(1);
    double optimal = 1.0 / (r * r * mu1);

    std::ostringstream in;
    in << "B=(" << B.lo << "," << B.hi << ") family=" << family.size() << " "
       << space.profile().describe();
    BoundReport rep;
    rep.name = "poincare_fit";
    rep.claim = "local weighted Neumann Poincare constant";
    rep.inputs = in.str();
    rep.digest = input_digest(rep.name + "|" + rep.inputs);
    rep.measured = worst;
    rep.bound = optimal;
    rep.hard = false;
    rep.pass = std::isfinite(worst) && worst <= optimal * (1.0 + 1e-3);
    rep.margin = (optimal - worst) / optimal;
    rep.extras["optimal_constant"] = optimal;
    rep.extras["mu1"] = mu1;
    rep.extras["family_used"] = used;
    return rep;
}

BoundReport sobolev_fit(const WeightedSpace& space, double center, double r,
                        double p, const std::vector<SmoothFunction>& family) {
    if (family.empty()) throw precondition_error("empty test family");
    if (!(p > 2.0)) throw precondition_error("sobolev exponent must satisfy p > 2");
    Interval B = space.ball(center, r);
    double V = space.measure(B.lo, B.hi);
    double q = 2.0 * p / (p - 2.0);

    auto ratio_of = [&](const SmoothFunction& phi) {
        double num = space.integrate_measure(
            [&](double x) { return std::pow(std::abs(phi.value(x)), q); }, B.lo,
            B.hi);
        double den = space.integrate_measure(
            [&](double x) {
                double d = phi.deriv(x), v = phi.value(x);
                return d * d + v * v / (r * r);
            },
            B.lo, B.hi);
        if (den <= 0.0) return 0.0;
        return std::pow(num, (p - 2.0) / p) * std::pow(V, 2.0 / p) /
               (r * r * den);
    };

    double worst_half = 0.0, worst_all = 0.0;
    size_t half = std::max<size_t>(1, family.size() / 2);
    for (size_t i = 0; i < family.size(); ++i) {
        double rt = ratio_of(family[i]);
        worst_all = std::max(worst_all, rt);
        if (i < half) worst_half = std::max(worst_half, rt);
    }

    std::ostringstream in;
    in << "B=(" << B.lo << "," << B.hi << ") p=" << p << " family="
       << family.size() << " " << space.profile().describe();
    BoundReport rep;
    rep.name = "sobolev_fit";
    rep.claim = "local weighted Sobolev constant";
    rep.inputs = in.str();
    rep.digest = input_digest(rep.name + "|" + rep.inputs);
    rep.measured = worst_all;
    rep.bound = worst_half * 1.25;
    rep.hard = false;
    rep.pass = std::isfinite(worst_all) && worst_all <= worst_half * 1.25;
    rep.margin = rep.pass ? (rep.bound - worst_all) / rep.bound : -1.0;
    rep.extras["family_half_max"] = worst_half;
    return rep;
}

} // namespace fheat
