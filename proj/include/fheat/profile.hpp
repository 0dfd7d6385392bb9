#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fheat {

/// Quadratic growth envelope |f|(x) <= a*r(x)^2 + b, declared only for
/// profiles that actually satisfy it.
struct GrowthBound {
    double a = 0.0;
    double b = 0.0;
};

enum class ProfileKind {
    constant,   // f = c
    linear,     // f = k x
    quadratic,  // f = s x^2, s = +1 or -1
    power,      // f = |x|^(2+2*delta), delta = 1/(2m+1)
    tabulated,  // cubic-spline interpolation of samples
};

/// Weight function f of the measure e^{-f} dv together with its first two
/// derivatives and the metadata the inequality checks rely on: the infimum
/// of f'' (the curvature lower bound of the weighted line), the quadratic
/// growth constants when they exist, and the soliton constant for the
/// Gaussian-soliton profiles.
class WeightProfile {
public:
    virtual ~WeightProfile() = default;

    virtual double f(double x) const = 0;
    virtual double df(double x) const = 0;
    virtual double ddf(double x) const = 0;

    /// Exact antiderivative difference: integral of f over [x0, x1].
    /// Builtin kinds evaluate closed forms; tabulated falls back to the
    /// spline's piecewise-cubic antiderivative.
    virtual double integral_f(double x0, double x1) const = 0;

    /// Infimum of f'' over the line (exact for builtin kinds).
    virtual double inf_ddf() const = 0;

    /// Maximum of |f| over [lo, hi], exact for builtin kinds (|f| is
    /// monotone in |x| for all of them), grid-refined for tabulated.
    virtual double sup_abs_f(double lo, double hi) const = 0;

    virtual ProfileKind kind() const = 0;
    virtual std::string describe() const = 0;

    /// Growth constants for |f| <= a r^2 + b, when the profile satisfies
    /// the quadratic growth hypothesis. Power profiles do not.
    virtual std::optional<GrowthBound> growth() const = 0;

    /// Soliton constant: Ric_f = lambda on the weighted line, i.e. f'' is
    /// constant. Set for constant/linear/quadratic kinds only.
    virtual std::optional<double> soliton_constant() const = 0;

    bool convex() const { return inf_ddf() >= 0.0; }

    double weight(double x) const; // e^{-f(x)}, clamped against overflow
    double log_weight(double x) const { return -f(x); }
};

using ProfilePtr = std::shared_ptr<const WeightProfile>;

ProfilePtr make_constant_profile(double c);
ProfilePtr make_linear_profile(double k);
ProfilePtr make_quadratic_profile(int sign); // f = sign * x^2
ProfilePtr make_power_profile(int m);        // f = |x|^(2+2/(2m+1)), m >= 1

/// Tabulated profile over strictly increasing sample points. If the
/// derivative samples are omitted they are taken from the interpolating
/// spline and the profile reports derived_derivatives() = true.
ProfilePtr make_tabulated_profile(std::vector<double> xs, std::vector<double> fs,
                                  std::vector<double> dfs = {},
                                  std::vector<double> ddfs = {});

/// Parse a compact profile spec: "euclid", "steady:+1", "steady:-1",
/// "shrinking", "expanding", "constant:<c>", "linear:<k>",
/// "quadratic:<+1|-1>", "power:<m>".
ProfilePtr parse_profile_spec(const std::string& spec);

} // namespace fheat
