#include "fheat/space.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fheat/errors.hpp"

namespace fheat {

namespace {

// Composite Simpson weights for an arbitrary interval count >= 2;
// an odd count gets a Simpson-3/8 block on the last three intervals.
std::vector<double> simpson_weights(int n_nodes, double h) {
    std::vector<double> w(n_nodes, 0.0);
    int intervals = n_nodes - 1;
    int simpson_end = intervals;
    bool tail38 = (intervals % 2 != 0);
    if (tail38) simpson_end = intervals - 3;
    for (int i = 0; i + 2 <= simpson_end; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if (tail38) {
        int i = simpson_end;
        w[i] += 3.0 * h / 8.0;
        w[i + 1] += 9.0 * h / 8.0;
        w[i + 2] += 9.0 * h / 8.0;
        w[i + 3] += 3.0 * h / 8.0;
    }
    return w;
}

std::vector<double> trapezoid_weights(int n_nodes, double h) {
    std::vector<double> w(n_nodes, h);
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
    return w;
}

} // namespace

WeightedSpace::WeightedSpace(int dim, bool radial, ProfilePtr profile, double L,
                             int nodes, QuadRule rule)
    : dim_(dim), radial_(radial), profile_(std::move(profile)), L_(L), rule_(rule) {
    if (!profile_) throw precondition_error("space requires a profile");
    if (dim < 1) throw precondition_error("dimension must be >= 1");
    if (L <= 0.0) throw precondition_error("truncation L must be positive");
    if (nodes < 16) throw precondition_error("node count must be >= 16");

    lo_ = radial_ ? 0.0 : -L_;
    h_ = (L_ - lo_) / (nodes - 1);
    grid_.resize(nodes);
    for (int i = 0; i < nodes; ++i) grid_[i] = lo_ + i * h_;
    grid_.back() = L_;

    if (dim_ == 1) {
        omega_ = 2.0;
    } else {
        omega_ = 2.0 * std::pow(std::numbers::pi, dim_ / 2.0) /
                 std::tgamma(dim_ / 2.0);
    }

    std::vector<double> base = rule_ == QuadRule::simpson
                                   ? simpson_weights(nodes, h_)
                                   : trapezoid_weights(nodes, h_);
    weights_.resize(nodes);
    for (int i = 0; i < nodes; ++i) weights_[i] = base[i] * measure_density(grid_[i]);
}

WeightedSpace WeightedSpace::line(ProfilePtr profile, double L, int nodes,
                                  QuadRule rule) {
    return WeightedSpace(1, false, std::move(profile), L, nodes, rule);
}

WeightedSpace WeightedSpace::radial(int dim, ProfilePtr profile, double L,
                                    int nodes, QuadRule rule) {
    if (dim < 2)
        throw precondition_error("radial model requires dimension >= 2; use line() for n = 1");
    return WeightedSpace(dim, true, std::move(profile), L, nodes, rule);
}

double WeightedSpace::measure_density(double x) const {
    double w = profile_->weight(x);
    if (!radial_) return w;
    return omega_ * std::pow(x, dim_ - 1) * w;
}

double WeightedSpace::log_measure_density(double x) const {
    double lw = -profile_->f(x);
    if (!radial_) return lw;
    return std::log(omega_) + (dim_ - 1) * std::log(x) + lw;
}

int WeightedSpace::panels_for(double a, double b) const {
    double len = b - a;
    int n = static_cast<int>(std::ceil(len / h_)) * 2;
    n = std::max(n, 16);
    if (n % 2 != 0) ++n;
    return n;
}

double WeightedSpace::integrate_measure(const std::function<double(double)>& g,
                                        double a, double b) const {
    if (b <= a) return 0.0;
    const int n = panels_for(a, b);
    const double hh = (b - a) / n;
    auto density_times_g = [&](double x) { return g(x) * measure_density(x); };
    if (rule_ == QuadRule::trapezoid) {
        double s = 0.5 * (density_times_g(a) + density_times_g(b));
        for (int i = 1; i < n; ++i) s += density_times_g(a + i * hh);
        return s * hh;
    }
    double s = density_times_g(a) + density_times_g(b);
    for (int i = 1; i < n; ++i)
        s += density_times_g(a + i * hh) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * hh / 3.0;
}

double WeightedSpace::measure(double a, double b) const {
    return integrate_measure([](double) { return 1.0; }, a, b);
}

double WeightedSpace::total_measure() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
}

Interval WeightedSpace::ball(double center, double r) const {
    if (r < 0.0) throw precondition_error("ball radius must be nonnegative");
    double lo = center - r, hi = center + r;
    if (radial_) lo = std::max(lo, 0.0);
    if (hi > L_ + 1e-12 || lo < lo_ - 1e-12) {
        std::ostringstream os;
        os << "ball B_" << center << "(" << r << ") exits the truncated domain ["
           << lo_ << ", " << L_ << "]; need L >= "
           << std::max(std::abs(center) + r, std::abs(lo));
        throw truncation_error(os.str());
    }
    return Interval{lo, hi};
}

bool WeightedSpace::ball_inside(double center, double r) const {
    double lo = center - r, hi = center + r;
    if (radial_) lo = std::max(lo, 0.0);
    return hi <= L_ + 1e-12 && lo >= lo_ - 1e-12;
}

double WeightedSpace::quadrature_error_bound(double a, double b) const {
    if (b <= a) return 0.0;
    const int n = panels_for(a, b);
    const double hh = (b - a) / n;
    // Sampled magnitude of the relevant derivative of the density.
    auto density = [&](double x) { return measure_density(x); };
    const int probes = 33;
    double dmax = 0.0;
    double step = (b - a) / (probes - 1);
    double fd_h = std::min(step, 1e-3 * (b - a) + 1e-8);
    for (int i = 0; i < probes; ++i) {
        double x = a + i * step;
        double x0 = std::min(std::max(x, lo_ + 2 * fd_h), L_ - 2 * fd_h);
        double d;
        if (rule_ == QuadRule::simpson) {
            d = (density(x0 + 2 * fd_h) - 4 * density(x0 + fd_h) + 6 * density(x0) -
                 4 * density(x0 - fd_h) + density(x0 - 2 * fd_h)) /
                (fd_h * fd_h * fd_h * fd_h);
        } else {
            d = (density(x0 + fd_h) - 2 * density(x0) + density(x0 - fd_h)) /
                (fd_h * fd_h);
        }
        dmax = std::max(dmax, std::abs(d));
    }
    double safety = 4.0;
    if (rule_ == QuadRule::simpson)
        return safety * (b - a) * std::pow(hh, 4) * dmax / 180.0;
    return safety * (b - a) * hh * hh * dmax / 12.0;
}

double WeightedSpace::tail_bound() const {
    auto one_side = [&](double x, double outward_df) {
        if (outward_df <= 0.0) return std::numeric_limits<double>::infinity();
        return profile_->weight(x) / outward_df * (radial_ ? omega_ * std::pow(x, dim_ - 1) : 1.0);
    };
    double right = one_side(L_, profile_->df(L_));
    if (radial_) return right;
    double left = one_side(lo_, -profile_->df(lo_));
    return left + right;
}

std::string WeightedSpace::describe() const {
    std::ostringstream os;
    os << (radial_ ? "radial" : "line") << " n=" << dim_ << " L=" << L_
       << " nodes=" << grid_.size() << " rule="
       << (rule_ == QuadRule::simpson ? "simpson" : "trapezoid") << " profile="
       << profile_->describe();
    return os.str();
}

} // namespace fheat
