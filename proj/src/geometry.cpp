#include "fheat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fheat/errors.hpp"

namespace fheat {
namespace geometry {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void require_pole_if_radial(const WeightedSpace& space, double center,
                            const char* op) {
    if (space.is_radial() && center != 0.0)
        throw precondition_error(std::string(op) +
                                 ": radial-model checks are pole-based (center must be 0)");
}

// f along the ray t -> origin + dir*t (line) or t -> t (radial).
struct Ray {
    const WeightedSpace& space;
    double origin;
    int dir;

    double f(double t) const { return space.profile().f(origin + dir * t); }
    double df_along(double t) const {
        return dir * space.profile().df(origin + dir * t);
    }
    double integral_f(double t) const {
        // int_0^t f(origin + dir*s) ds
        double a = origin, b = origin + dir * t;
        return dir > 0 ? space.profile().integral_f(a, b)
                       : space.profile().integral_f(b, a);
    }
    // (2/r) int_0^r f, with the r -> 0 limit 2 f(origin).
    double mean_term(double r) const {
        if (r < 1e-6) return 2.0 * f(0.0);
        return 2.0 / r * integral_f(r);
    }
};

Ray make_ray(const WeightedSpace& space, double origin, int dir, const char* op) {
    if (dir != 1 && dir != -1)
        throw precondition_error(std::string(op) + ": direction must be +1 or -1");
    if (space.is_radial()) {
        require_pole_if_radial(space, origin, op);
        dir = +1;
    }
    return Ray{space, origin, dir};
}

} // namespace

void VolumeQuery::validate() const {
    auto fail = [](const char* why) {
        throw precondition_error(std::string("degenerate volume query: ") + why);
    };
    if (!(0.0 < r1 && r1 < r2)) fail("need 0 < r1 < r2");
    if (!(0.0 < R1 && R1 < R2)) fail("need 0 < R1 < R2");
    if (!(R2 < scale)) fail("need R2 < R");
    if (!(r1 <= R1)) fail("need r1 <= R1");
    if (!(r2 <= R2)) fail("need r2 <= R2");
}

double weighted_ball_volume(const WeightedSpace& space, double center, double r) {
    Interval b = space.ball(center, r);
    return space.measure(b.lo, b.hi);
}

double annulus_volume(const WeightedSpace& space, double center, double R1,
                      double R2) {
    if (R1 < 0.0 || R2 < R1)
        throw precondition_error("annulus needs 0 <= R1 <= R2");
    return weighted_ball_volume(space, center, R2) -
           (R1 > 0.0 ? weighted_ball_volume(space, center, R1) : 0.0);
}

double sup_abs_f(const WeightedSpace& space, double o, double radius) {
    Interval b = space.ball(o, radius);
    return space.profile().sup_abs_f(b.lo, b.hi);
}

double oscillation_bound(const WeightedSpace& space, double o, double R) {
    return sup_abs_f(space, o, 3.0 * R);
}

BoundReport volume_comparison_check(const WeightedSpace& space,
                                    const VolumeQuery& q, double tol) {
    if (!space.profile().convex())
        throw precondition_error("volume comparison requires inf f'' >= 0");
    q.validate();
    require_pole_if_radial(space, q.center, "volume_comparison_check");
    if (space.distance(q.center, q.base) > q.scale)
        throw precondition_error("volume comparison requires the center inside B_o(R)");

    const int n = space.dimension();
    double A = oscillation_bound(space, q.base, q.scale);
    double big = annulus_volume(space, q.center, q.R1, q.R2);
    double small = annulus_volume(space, q.center, q.r1, q.r2);
    if (small <= 0.0)
        throw precondition_error("degenerate volume query: zero-volume inner annulus");

    double geom = (std::pow(q.R2, n) - std::pow(q.R1, n)) /
                  (std::pow(q.r2, n) - std::pow(q.r1, n));
    double log_lhs = std::log(big) - std::log(small);
    double log_rhs = 4.0 * A + std::log(geom);

    std::ostringstream in;
    in << "center=" << q.center << " r=(" << q.r1 << "," << q.r2 << ") R=("
       << q.R1 << "," << q.R2 << ") o=" << q.base << " scale=" << q.scale
       << " n=" << n << " " << space.profile().describe();
    auto rep = make_log_report("volume_comparison",
                               "relative weighted-volume comparison for annuli",
                               in.str(), log_lhs, log_rhs, tol);
    rep.extras["A"] = A;
    rep.extras["annulus_outer"] = big;
    rep.extras["annulus_inner"] = small;
    return rep;
}

BoundReport monotone_quantity_check(const WeightedSpace& space,
                                    double ray_origin,
                                    const std::vector<double>& r_grid,
                                    int direction, double tol) {
    Ray ray = make_ray(space, ray_origin, direction, "monotone_quantity_check");
    if (r_grid.size() < 2)
        throw precondition_error("monotone check needs at least two radii");

    // log M(r) = (1-n) log r + log A_f(r) + (2/r) int_0^r f. The radial area
    // element omega r^{n-1} e^{-f} cancels the r^{1-n} factor, so both cases
    // reduce to -f(r) plus the mean term.
    auto logM = [&](double r) {
        if (r < 0.0) throw precondition_error("negative radius");
        return -ray.f(r) + ray.mean_term(r);
    };

    double worst = -1.0; // worst relative increase
    double first_violation_r = std::numeric_limits<double>::quiet_NaN();
    double prev = logM(r_grid[0]);
    for (size_t i = 1; i < r_grid.size(); ++i) {
        if (!(r_grid[i] > r_grid[i - 1]))
            throw precondition_error("r_grid must be strictly increasing");
        double cur = logM(r_grid[i]);
        double increase = cur - prev; // log M ratio; must stay <= log(1+tol)
        if (increase > worst) worst = increase;
        if (increase > std::log1p(tol) && std::isnan(first_violation_r))
            first_violation_r = r_grid[i];
        prev = cur;
    }

    std::ostringstream in;
    in << "origin=" << ray_origin << " dir=" << direction << " r=["
       << r_grid.front() << "," << r_grid.back() << "]x" << r_grid.size() << " "
       << space.profile().describe();
    auto rep = make_log_report("monotone_quantity",
                               "weighted area ratio monotonicity along rays",
                               in.str(), worst, std::log1p(tol), 0.0);
    rep.measured = worst; // largest per-step log increase
    rep.bound = std::log1p(tol);
    if (!std::isnan(first_violation_r)) {
        rep.extras["first_violation_r"] = first_violation_r;
        rep.notes = "violated at r = " + fmt(first_violation_r);
    }
    if (!space.profile().convex())
        rep.notes += (rep.notes.empty() ? "" : "; ") + std::string("inf f'' < 0");
    return rep;
}

BoundReport mean_curvature_check(const WeightedSpace& space, double x,
                                 const std::vector<double>& r_grid,
                                 int direction, double tol) {
    if (!space.profile().convex())
        throw precondition_error("mean curvature comparison requires inf f'' >= 0");
    Ray ray = make_ray(space, x, direction, "mean_curvature_check");
    const int n = space.dimension();

    double worst_gap = -std::numeric_limits<double>::infinity();
    double worst_r = 0.0, worst_m = 0.0, worst_rhs = 0.0;
    for (double r : r_grid) {
        if (r <= 0.0) {
            if (n > 1) throw precondition_error("radial mean curvature needs r > 0");
            continue;
        }
        double m_f = space.is_radial() ? (n - 1) / r - space.profile().df(r)
                                       : -ray.df_along(r);
        double rhs = (n - 1) / r + (2.0 / (r * r)) * ray.integral_f(r) -
                     (2.0 / r) * ray.f(r);
        double scale = std::max({1.0, std::abs(m_f), std::abs(rhs)});
        double gap = (m_f - rhs) / scale; // sign-aware relative excess
        if (gap > worst_gap) {
            worst_gap = gap;
            worst_r = r;
            worst_m = m_f;
            worst_rhs = rhs;
        }
    }

    std::ostringstream in;
    in << "x=" << x << " dir=" << direction << " r=[" << r_grid.front() << ","
       << r_grid.back() << "]x" << r_grid.size() << " n=" << n << " "
       << space.profile().describe();
    auto rep = make_hard_report("mean_curvature",
                                "weighted mean-curvature comparison along rays",
                                in.str(), worst_gap, tol, 0.0);
    rep.extras["worst_r"] = worst_r;
    rep.extras["m_f"] = worst_m;
    rep.extras["rhs"] = worst_rhs;
    return rep;
}

BoundReport doubling_check(const WeightedSpace& space, double center, double r,
                           double base, double scale, double tol) {
    if (!space.profile().convex())
        throw precondition_error("volume doubling requires inf f'' >= 0");
    require_pole_if_radial(space, center, "doubling_check");
    if (!(r > 0.0)) throw precondition_error("doubling needs r > 0");
    if (!(2.0 * r < scale))
        throw precondition_error("doubling needs 2r < R (scale)");

    const int n = space.dimension();
    double A = oscillation_bound(space, base, scale);
    double v2 = weighted_ball_volume(space, center, 2.0 * r);
    double v1 = weighted_ball_volume(space, center, r);
    double log_ratio = std::log(v2) - std::log(v1);
    double log_bound = n * std::log(2.0) + 4.0 * A;

    std::ostringstream in;
    in << "center=" << center << " r=" << r << " o=" << base << " scale=" << scale
       << " n=" << n << " " << space.profile().describe();
    auto rep = make_log_report("volume_doubling", "weighted volume doubling",
                               in.str(), log_ratio, log_bound, tol);
    rep.extras["ratio"] = v2 / v1;
    rep.extras["A"] = A;
    return rep;
}

BoundReport ball_overlap_check(const WeightedSpace& space, double x, double y,
                               double r, double s, double base, double scale,
                               double tol) {
    if (!space.profile().convex())
        throw precondition_error("ball overlap bounds require inf f'' >= 0");
    require_pole_if_radial(space, x, "ball_overlap_check");
    require_pole_if_radial(space, y, "ball_overlap_check");
    if (!(0.0 < r && r <= s))
        throw precondition_error("degenerate overlap query: need 0 < r <= s");
    if (!(s < scale / 4.0))
        throw precondition_error("degenerate overlap query: need s < R/4");
    if (space.distance(x, base) > s || space.distance(y, x) > s)
        throw precondition_error(
            "degenerate overlap query: need x in B_o(s), y in B_x(s)");
    if (space.distance(x, base) > scale / 4.0 || space.distance(y, base) > scale / 4.0)
        throw precondition_error("degenerate overlap query: need x,y in B_o(R/4)");

    const int n = space.dimension();
    double A = oscillation_bound(space, base, scale);
    double kappa = n + 4.0 * A / std::log(2.0); // log2(2^n e^{4A})
    double d = space.distance(x, y);

    double log_m1 = std::log(weighted_ball_volume(space, x, s)) -
                    std::log(weighted_ball_volume(space, y, r));
    double log_b1 = n * std::log(4.0) + 8.0 * A + kappa * std::log(s / r);

    double log_m2 = std::log(weighted_ball_volume(space, x, r));
    double log_b2 = 4.0 * A + n * std::log1p(d / r) +
                    std::log(weighted_ball_volume(space, y, r));

    bool pass1 = log_m1 <= log_b1 + std::log1p(tol);
    bool pass2 = log_m2 <= log_b2 + std::log1p(tol);

    std::ostringstream in;
    in << "x=" << x << " y=" << y << " r=" << r << " s=" << s << " o=" << base
       << " scale=" << scale << " n=" << n << " " << space.profile().describe();
    auto rep = make_log_report("ball_overlap",
                               "ball-to-ball weighted volume overlap bounds",
                               in.str(), log_m1, log_b1, tol);
    rep.pass = pass1 && pass2;
    rep.margin = std::min(log_b1 - log_m1, log_b2 - log_m2);
    rep.extras["log_measured_growth"] = log_m1;
    rep.extras["log_bound_growth"] = log_b1;
    rep.extras["log_measured_shift"] = log_m2;
    rep.extras["log_bound_shift"] = log_b2;
    rep.extras["kappa"] = kappa;
    return rep;
}

BoundReport volume_growth_check(const WeightedSpace& space, double base,
                                const std::vector<double>& R_grid) {
    if (!space.profile().growth())
        throw precondition_error(
            "volume growth check requires declared growth constants (|f| <= a r^2 + b)");
    if (R_grid.size() < 3)
        throw precondition_error("volume growth needs at least three radii");

    const int n = space.dimension();
    // Least squares of g(R) = log V - n log R against (1, R^2).
    double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
    std::vector<double> logV(R_grid.size());
    for (size_t i = 0; i < R_grid.size(); ++i) {
        double V = weighted_ball_volume(space, base, R_grid[i]);
        logV[i] = std::log(V);
        double g = logV[i] - n * std::log(R_grid[i]);
        double u = R_grid[i] * R_grid[i];
        s0 += 1.0;
        s1 += u;
        s2 += u * u;
        t0 += g;
        t1 += g * u;
    }
    double det = s0 * s2 - s1 * s1;
    double logC = (s2 * t0 - s1 * t1) / det;
    double c = (s0 * t1 - s1 * t0) / det;
    // Lift logC so the envelope dominates every sample: smallest c keeps the
    // fitted slope, C absorbs the residual.
    double lift = 0.0;
    for (size_t i = 0; i < R_grid.size(); ++i) {
        double env = logC + n * std::log(R_grid[i]) + c * R_grid[i] * R_grid[i];
        lift = std::max(lift, logV[i] - env);
    }
    logC += lift;

    // Partial integrals of R / log V from the first radius with V > 1.
    std::vector<double> partial;
    double acc = 0.0;
    bool started = false;
    double prevR = 0.0, prevI = 0.0;
    for (size_t i = 0; i < R_grid.size(); ++i) {
        if (logV[i] <= 0.05) continue;
        double integrand = R_grid[i] / logV[i];
        if (started) acc += 0.5 * (integrand + prevI) * (R_grid[i] - prevR);
        started = true;
        prevR = R_grid[i];
        prevI = integrand;
        partial.push_back(acc);
    }

    std::ostringstream in;
    in << "o=" << base << " R=[" << R_grid.front() << "," << R_grid.back()
       << "]x" << R_grid.size() << " n=" << n << " "
       << space.profile().describe();
    BoundReport rep;
    rep.name = "volume_growth";
    rep.claim = "weighted volume growth envelope and divergence trend";
    rep.inputs = in.str();
    rep.digest = input_digest(rep.name + "|" + rep.inputs);
    rep.measured = c;
    rep.bound = std::numeric_limits<double>::infinity();
    rep.hard = false;
    rep.pass = std::isfinite(c) && std::isfinite(logC);
    rep.margin = rep.pass ? 1.0 : -1.0;
    rep.extras["fitted_c"] = c;
    rep.extras["fitted_logC"] = logC;
    if (std::isfinite(space.tail_bound())) // eventually increasing profiles only
        rep.extras["truncation_tail"] = space.tail_bound();
    for (size_t i = 0; i < partial.size(); ++i)
        rep.extras["partial_integral_" + std::to_string(i)] = partial[i];
    return rep;
}

} // namespace geometry
} // namespace fheat
