#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fheat/closedform.hpp"
#include "fheat/report.hpp"
#include "fheat/space.hpp"
#include "fheat/spectral.hpp"

namespace fheat {
namespace bounds {

/// Kernel evaluator handed to the integral checks: closed form, spectral
/// expansion, or any H(x, y, t) callable.
struct KernelSource {
    std::string name;
    std::function<double(double, double, double)> eval;
};

KernelSource closed_form_source(const SolitonKernel& kernel);
KernelSource spectral_source(std::shared_ptr<const EigenSystem> es);

/// Two-set integral estimate: the double integral of H over B1 x B2 against
/// sqrt(V_f(B1) V_f(B2)) exp(-lambda1 t - d(B1,B2)^2 / 4t) on every t of the
/// grid. lambda1 = 0 is always a safe under-estimate.
BoundReport davies_check(const WeightedSpace& space, const KernelSource& source,
                         Interval B1, Interval B2,
                         const std::vector<double>& t_grid,
                         double lambda1 = 0.0, double tol = 1e-6);

/// Exponential-weight energy decay along the flow of an indicator:
/// J(t) = int u^2 e^{alpha d(x,B1) - alpha^2 t/2} dmu with u = e^{tL} 1_{B1}
/// stays below J(t0) e^{-2 lambda_1(Omega)(t - t0)} for t >= t0.
BoundReport davies_j_monotonicity(const EigenSystem& es, Interval B1,
                                  double alpha, double t0,
                                  const std::vector<double>& t_grid,
                                  double tol = 1e-6);

enum class EnvelopeForm {
    split,  // H sqrt(V_f(B_x(rt)) V_f(B_y(rt))) exp(+d^2/((4+eps)t))
    single, // H V_f(B_x(rt)) (d/rt + 1)^{-n/2} exp(+d^2/((4+eps)t))
};

struct EnvelopeParams {
    double eps = 1.0;
    double base = 0.0;  // o
    double scale = 0.0; // R: points in B_o(R/2), times below R^2/4
    std::vector<double> xs, ys, ts;
};

/// Fits the envelope constant as the grid maximum and re-fits on the
/// midpoint-refined grid; passes when the refinement grows it by < 5%.
BoundReport gaussian_envelope_fit(const WeightedSpace& space,
                                  const KernelSource& source,
                                  const EnvelopeParams& params,
                                  EnvelopeForm form,
                                  double stability_tol = 0.05);

/// int H(x, ., t) dmu = 1 up to the reported truncation tail plus tol,
/// checked at every (x, t) pair.
BoundReport stochastic_completeness_check(const WeightedSpace& space,
                                          const SolitonKernel& kernel,
                                          const std::vector<double>& x_list,
                                          const std::vector<double>& t_list,
                                          double tol = 1e-6);

/// Dirichlet kernel mass on a compact domain: deficit below 1 expected.
BoundReport dirichlet_mass_check(const EigenSystem& es, double x,
                                 const std::vector<double>& t_list);

struct LiouvilleOptions {
    double x_direct = 11.0;   // switch from direct quadrature to the
                              // integration-by-parts tail model
    int l1_doublings = 38;    // truncation schedule R_j = 2^j
    int l2_doublings = 6;
    double probe_x = 1.5;     // f-harmonicity probe
    double fd_h = 1e-3;
};

/// The sharpness example u(x) = int_0^|x| e^{t^(2+2delta)} dt with
/// f = |x|^(2+2delta):
///   m >= 1 (delta = 1/(2m+1)): u is weighted-harmonic away from 0, the
///   weighted L^1 truncations converge, the L^2 truncations diverge;
///   m absent (delta = 0): the L^1 truncations grow like log R with the
///   1/(2x) tail slope.
BoundReport liouville_example_check(std::optional<int> m,
                                    const LiouvilleOptions& opt = {});

} // namespace bounds
} // namespace fheat
