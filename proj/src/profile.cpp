#include "fheat/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fheat/errors.hpp"

namespace fheat {

double WeightProfile::weight(double x) const {
    double e = -f(x);
    if (e > 700.0) e = 700.0; // keep e^{-f} finite for wildly negative f
    return std::exp(e);
}

namespace {

class ConstantProfile final : public WeightProfile {
public:
    explicit ConstantProfile(double c) : c_(c) {}
    double f(double) const override { return c_; }
    double df(double) const override { return 0.0; }
    double ddf(double) const override { return 0.0; }
    double integral_f(double x0, double x1) const override { return c_ * (x1 - x0); }
    double inf_ddf() const override { return 0.0; }
    double sup_abs_f(double, double) const override { return std::abs(c_); }
    ProfileKind kind() const override { return ProfileKind::constant; }
    std::string describe() const override {
        std::ostringstream os;
        os << "constant:" << c_;
        return os.str();
    }
    std::optional<GrowthBound> growth() const override {
        return GrowthBound{0.0, std::abs(c_)};
    }
    std::optional<double> soliton_constant() const override { return 0.0; }

private:
    double c_;
};

class LinearProfile final : public WeightProfile {
public:
    explicit LinearProfile(double k) : k_(k) {}
    double f(double x) const override { return k_ * x; }
    double df(double) const override { return k_; }
    double ddf(double) const override { return 0.0; }
    double integral_f(double x0, double x1) const override {
        return 0.5 * k_ * (x1 * x1 - x0 * x0);
    }
    double inf_ddf() const override { return 0.0; }
    double sup_abs_f(double lo, double hi) const override {
        return std::max(std::abs(k_ * lo), std::abs(k_ * hi));
    }
    ProfileKind kind() const override { return ProfileKind::linear; }
    std::string describe() const override {
        std::ostringstream os;
        os << "linear:" << k_;
        return os.str();
    }
    std::optional<GrowthBound> growth() const override {
        // |k x| <= (x^2 + k^2)/2 by AM-GM
        return GrowthBound{0.5, 0.5 * k_ * k_};
    }
    std::optional<double> soliton_constant() const override { return 0.0; }

private:
    double k_;
};

class QuadraticProfile final : public WeightProfile {
public:
    explicit QuadraticProfile(int sign) : s_(sign) {
        if (sign != 1 && sign != -1)
            throw precondition_error("quadratic profile sign must be +1 or -1");
    }
    double f(double x) const override { return s_ * x * x; }
    double df(double x) const override { return 2.0 * s_ * x; }
    double ddf(double) const override { return 2.0 * s_; }
    double integral_f(double x0, double x1) const override {
        return s_ * (x1 * x1 * x1 - x0 * x0 * x0) / 3.0;
    }
    double inf_ddf() const override { return 2.0 * s_; }
    double sup_abs_f(double lo, double hi) const override {
        return std::max(lo * lo, hi * hi);
    }
    ProfileKind kind() const override { return ProfileKind::quadratic; }
    std::string describe() const override { return s_ > 0 ? "quadratic:+1" : "quadratic:-1"; }
    std::optional<GrowthBound> growth() const override { return GrowthBound{1.0, 0.0}; }
    std::optional<double> soliton_constant() const override { return 2.0 * s_; }

private:
    int s_;
};

class PowerProfile final : public WeightProfile {
public:
    explicit PowerProfile(int m) : m_(m) {
        if (m < 1) throw precondition_error("power profile requires m >= 1");
        delta_ = 1.0 / (2.0 * m + 1.0);
        p_ = 2.0 + 2.0 * delta_;
    }
    double f(double x) const override { return std::pow(std::abs(x), p_); }
    double df(double x) const override {
        if (x == 0.0) return 0.0;
        return p_ * std::copysign(std::pow(std::abs(x), p_ - 1.0), x);
    }
    double ddf(double x) const override {
        return p_ * (p_ - 1.0) * std::pow(std::abs(x), p_ - 2.0);
    }
    double integral_f(double x0, double x1) const override {
        auto prim = [this](double x) {
            return std::copysign(std::pow(std::abs(x), p_ + 1.0), x) / (p_ + 1.0);
        };
        return prim(x1) - prim(x0);
    }
    double inf_ddf() const override { return 0.0; }
    double sup_abs_f(double lo, double hi) const override {
        return std::pow(std::max(std::abs(lo), std::abs(hi)), p_);
    }
    ProfileKind kind() const override { return ProfileKind::power; }
    std::string describe() const override {
        std::ostringstream os;
        os << "power:" << m_;
        return os.str();
    }
    std::optional<GrowthBound> growth() const override { return std::nullopt; }
    std::optional<double> soliton_constant() const override { return std::nullopt; }

    double exponent() const { return p_; }

private:
    int m_;
    double delta_;
    double p_;
};

// Natural cubic spline with piecewise-cubic antiderivative.
class CubicSpline {
public:
    CubicSpline(std::vector<double> xs, std::vector<double> ys)
        : x_(std::move(xs)), y_(std::move(ys)) {
        const size_t n = x_.size();
        if (n < 3) throw precondition_error("tabulated profile needs >= 3 samples");
        for (size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw precondition_error("tabulated sample points must be strictly increasing");

        // Solve for second derivatives M_i, natural boundary M_0 = M_{n-1} = 0.
        std::vector<double> h(n - 1), rhs(n, 0.0), diag(n, 1.0), sub(n, 0.0), sup(n, 0.0);
        for (size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];
        for (size_t i = 1; i + 1 < n; ++i) {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
        }
        m_.assign(n, 0.0);
        std::vector<double> c(n, 0.0), d(n, 0.0);
        c[0] = 0.0;
        d[0] = 0.0;
        for (size_t i = 1; i < n; ++i) {
            double den = diag[i] - sub[i] * c[i - 1];
            c[i] = (i + 1 < n) ? sup[i] / den : 0.0;
            d[i] = (rhs[i] - sub[i] * d[i - 1]) / den;
        }
        m_[n - 1] = 0.0;
        for (size_t i = n - 1; i-- > 0;) m_[i] = d[i] - c[i] * m_[i + 1];
    }

    double eval(double x) const { return piece(x, 0); }
    double deriv(double x) const { return piece(x, 1); }
    double deriv2(double x) const { return piece(x, 2); }

    double integral(double a, double b) const {
        double sign = 1.0;
        if (a > b) {
            std::swap(a, b);
            sign = -1.0;
        }
        double total = 0.0;
        size_t ia = segment(a), ib = segment(b);
        for (size_t i = ia; i <= ib; ++i) {
            double lo = std::max(a, x_[i]);
            double hi = std::min(b, x_[i + 1]);
            if (hi > lo) total += segment_integral(i, lo, hi);
        }
        return sign * total;
    }

    double min_deriv2_at_nodes() const {
        return *std::min_element(m_.begin(), m_.end());
    }

    double lo() const { return x_.front(); }
    double hi() const { return x_.back(); }
    const std::vector<double>& nodes() const { return x_; }
    const std::vector<double>& values() const { return y_; }

private:
    size_t segment(double x) const {
        if (x <= x_.front()) return 0;
        if (x >= x_.back()) return x_.size() - 2;
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        return static_cast<size_t>(it - x_.begin()) - 1;
    }

    double piece(double x, int order) const {
        size_t i = segment(x);
        double h = x_[i + 1] - x_[i];
        double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
        switch (order) {
        case 0:
            return A * y_[i] + B * y_[i + 1] +
                   ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
        case 1:
            return (y_[i + 1] - y_[i]) / h +
                   (-(3.0 * A * A - 1.0) * m_[i] + (3.0 * B * B - 1.0) * m_[i + 1]) * h / 6.0;
        default:
            return A * m_[i] + B * m_[i + 1];
        }
    }

    double segment_integral(size_t i, double lo, double hi) const {
        double h = x_[i + 1] - x_[i];
        auto prim = [&](double x) {
            double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
            // Antiderivative of the cubic piece with respect to x.
            double t1 = -0.5 * h * A * A * y_[i] + 0.5 * h * B * B * y_[i + 1];
            double t2 = (-(A * A * A * A / 4.0 - A * A / 2.0) * m_[i] +
                         (B * B * B * B / 4.0 - B * B / 2.0) * m_[i + 1]) *
                        h * h * h / 6.0;
            return t1 + t2;
        };
        return prim(hi) - prim(lo);
    }

    std::vector<double> x_, y_;
    std::vector<double> m_; // second derivatives at nodes
};

class TabulatedProfile final : public WeightProfile {
public:
    TabulatedProfile(std::vector<double> xs, std::vector<double> fs,
                     std::vector<double> dfs, std::vector<double> ddfs)
        : spline_(xs, fs), xs_(std::move(xs)), dfs_(std::move(dfs)), ddfs_(std::move(ddfs)) {
        if (!dfs_.empty() && dfs_.size() != xs_.size())
            throw precondition_error("tabulated f' sample count mismatch");
        if (!ddfs_.empty() && ddfs_.size() != xs_.size())
            throw precondition_error("tabulated f'' sample count mismatch");
        if (!dfs_.empty()) dspline_ = std::make_unique<CubicSpline>(xs_, dfs_);
        if (!ddfs_.empty()) ddspline_ = std::make_unique<CubicSpline>(xs_, ddfs_);
    }

    double f(double x) const override { return spline_.eval(x); }
    double df(double x) const override {
        return dspline_ ? dspline_->eval(x) : spline_.deriv(x);
    }
    double ddf(double x) const override {
        return ddspline_ ? ddspline_->eval(x) : spline_.deriv2(x);
    }
    double integral_f(double x0, double x1) const override {
        return spline_.integral(x0, x1);
    }
    double inf_ddf() const override {
        if (ddspline_) {
            double m = ddfs_[0];
            for (double v : ddfs_) m = std::min(m, v);
            return m;
        }
        return spline_.min_deriv2_at_nodes();
    }
    double sup_abs_f(double lo, double hi) const override {
        // Scan the spline on a refinement of its own knots.
        double best = 0.0;
        const int refine = 8;
        const auto& nodes = spline_.nodes();
        for (size_t i = 0; i + 1 < nodes.size(); ++i) {
            double a = std::max(lo, nodes[i]), b = std::min(hi, nodes[i + 1]);
            if (b < a) continue;
            for (int j = 0; j <= refine; ++j) {
                double x = a + (b - a) * j / refine;
                best = std::max(best, std::abs(spline_.eval(x)));
            }
        }
        best = std::max(best, std::abs(spline_.eval(std::clamp(lo, spline_.lo(), spline_.hi()))));
        best = std::max(best, std::abs(spline_.eval(std::clamp(hi, spline_.lo(), spline_.hi()))));
        return best;
    }
    ProfileKind kind() const override { return ProfileKind::tabulated; }
    std::string describe() const override {
        std::ostringstream os;
        os << "tabulated[" << xs_.size() << " samples";
        if (derived_derivatives()) os << ", spline derivatives";
        os << "]";
        return os.str();
    }
    std::optional<GrowthBound> growth() const override { return std::nullopt; }
    std::optional<double> soliton_constant() const override { return std::nullopt; }

    bool derived_derivatives() const { return !dspline_; }

private:
    CubicSpline spline_;
    std::vector<double> xs_, dfs_, ddfs_;
    std::unique_ptr<CubicSpline> dspline_, ddspline_;
};

} // namespace

ProfilePtr make_constant_profile(double c) {
    return std::make_shared<ConstantProfile>(c);
}
ProfilePtr make_linear_profile(double k) {
    return std::make_shared<LinearProfile>(k);
}
ProfilePtr make_quadratic_profile(int sign) {
    return std::make_shared<QuadraticProfile>(sign);
}
ProfilePtr make_power_profile(int m) {
    return std::make_shared<PowerProfile>(m);
}
ProfilePtr make_tabulated_profile(std::vector<double> xs, std::vector<double> fs,
                                  std::vector<double> dfs, std::vector<double> ddfs) {
    return std::make_shared<TabulatedProfile>(std::move(xs), std::move(fs),
                                              std::move(dfs), std::move(ddfs));
}

ProfilePtr parse_profile_spec(const std::string& spec) {
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto needs = [&](const char* what) {
        if (arg.empty())
            throw precondition_error("profile spec '" + spec + "' needs " + what);
        return std::stod(arg);
    };
    if (head == "euclid" || head == "euclidean") return make_constant_profile(0.0);
    if (head == "steady") {
        double k = arg.empty() ? 1.0 : std::stod(arg);
        if (k != 1.0 && k != -1.0)
            throw precondition_error("steady soliton slope must be +1 or -1");
        return make_linear_profile(k);
    }
    if (head == "shrinking") return make_quadratic_profile(+1);
    if (head == "expanding") return make_quadratic_profile(-1);
    if (head == "constant") return make_constant_profile(needs("a value"));
    if (head == "linear") return make_linear_profile(needs("a slope"));
    if (head == "quadratic") {
        double s = needs("a sign");
        return make_quadratic_profile(s >= 0 ? +1 : -1);
    }
    if (head == "power") {
        double m = needs("an index m");
        return make_power_profile(static_cast<int>(m));
    }
    throw precondition_error("unknown profile spec '" + spec + "'");
}

} // namespace fheat
