#pragma once

#include "mhill/monodromy.hpp"

#include <array>
#include <functional>

namespace mhill {

// Scalar spectral data at one lambda. rho = (mu2+1)/2 - mu1^2; the two
// Lyapunov branches are delta_{1,2} = mu1 +- sqrt(rho); D+- are the
// periodic/anti-periodic determinants (mu1 -+ 1)^2 - rho.
struct LyapunovData {
    Complex lambda{0.0, 0.0};
    Complex mu1{0.0, 0.0}, mu2{0.0, 0.0};
    Complex rho{0.0, 0.0};
    Complex sqrt_rho{0.0, 0.0}; // labeled branch value; 0 at a flagged branch point
    Complex delta1{0.0, 0.0}, delta2{0.0, 0.0};
    Complex d_plus{0.0, 0.0}, d_minus{0.0, 0.0};
    std::array<Complex, 4> multipliers{}; // tau1, 1/tau1, tau2, 1/tau2
    bool at_branch_point = false;         // |rho| below tolerance: no sheet assigned
};

/// Assemble the full record from the two trace invariants. Real lambda with a
/// real potential gives real mu's; tiny imaginary rounding is stripped there.
LyapunovData lyapunov_from_traces(Complex lambda, Complex mu1, Complex mu2,
                                  bool lambda_real = false);

LyapunovData lyapunov_at(const Propagator& prop, Complex lambda);
LyapunovData lyapunov_at(const NormalizedPotential& pot, Complex lambda,
                         const PropagateOptions& opt = {});

struct TraceValues {
    Complex mu1, mu2, rho, d_plus, d_minus;
};
/// mu1, mu2 and derived entire functions, without multiplier extraction.
TraceValues traces_at(const Propagator& prop, Complex lambda);

/// Comparison function rho_0(lambda) = c0 sin(sqrt(lambda)) / (2 sqrt(lambda)).
Complex rho0(Complex lambda, double c0);

/// Two-term high-energy model cos(sqrt(l)) + v_m0 sin(sqrt(l))/(2 sqrt(l)).
Complex asymptotic_delta(Complex lambda, double v_m0);

// ---------------------------------------------------------------------------
// Branch bookkeeping for sqrt(rho)
// ---------------------------------------------------------------------------

struct BranchContext {
    Complex anchor{0.0, 0.0}; // in the high-energy domain
    int anchor_sign = +1;     // sqrt_rho(anchor) = sign * principal sqrt
    std::vector<Complex> path; // polyline waypoints from anchor (query appended)
    double rho_floor = 1e-13;  // minimum |rho| tolerated along the path
    bool fallback_labeling = false; // c0 = 0: real-axis positive-root labeling
};

/// Pick an anchor where rho is dominated by rho_0^2 and fix the branch sign
/// by agreement with rho_0.
BranchContext make_branch_context(const Propagator& prop);

/// Value of sqrt(rho) at lambda continued from the anchor along ctx.path.
Complex branch_sqrt_rho(const Propagator& prop, Complex lambda, const BranchContext& ctx);

/// Continue a square root of f along a polyline given its value at the first
/// vertex. Steps subdivide until the argument of f turns by less than pi/2.
Complex continue_sqrt_along(const std::function<Complex(Complex)>& f,
                            const std::vector<Complex>& polyline, Complex start_value,
                            double floor = 1e-13);

} // namespace mhill
