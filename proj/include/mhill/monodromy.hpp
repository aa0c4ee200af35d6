#pragma once

#include "mhill/potential.hpp"

#include <memory>
#include <mutex>

namespace mhill {

// Fundamental 4x4 solution matrix of -y'' + V y = lambda y written as
// [[theta, phi],[theta', phi']], theta(0)=phi'(0)=I2, phi(0)=theta'(0)=0.
struct StateMatrix {
    CMat4 entries = CMat4::Identity();
    double x = 0.0;
    Complex lambda{0.0, 0.0};
    double err_estimate = 0.0; // 0 for representations propagated exactly

    CMat2 theta() const { return entries.template block<2, 2>(0, 0); }
    CMat2 phi() const { return entries.template block<2, 2>(0, 2); }
    CMat2 theta_prime() const { return entries.template block<2, 2>(2, 0); }
    CMat2 phi_prime() const { return entries.template block<2, 2>(2, 2); }
};

struct PropagateOptions {
    double tol = 1e-10;   // relative acceptance between refinement levels
    int base_steps = 1024; // substeps per unit length at the coarsest level
    int max_steps = 1 << 18;
};

// Reusable propagation plans for one potential; cheap to query at many lambda.
class Propagator {
public:
    explicit Propagator(NormalizedPotential pot, PropagateOptions opt = {});

    const NormalizedPotential& potential() const { return pot_; }
    const PropagateOptions& options() const { return opt_; }
    bool exact() const { return exact_; }

    /// M(lambda) = fundamental matrix over one period.
    StateMatrix monodromy(Complex lambda) const;

    /// Fundamental matrix at arbitrary x_end >= 0.
    StateMatrix at(Complex lambda, double x_end) const;

private:
    struct Step {
        double x0, h; // [x0, x0+h]
        Mat2 q;       // frozen V = q * diag(w1, w2) * q^T
        double w1, w2;
    };
    struct Plan {
        std::vector<Step> steps;                  // substeps covering [0,1)
        std::vector<std::pair<int, Mat2>> jumps;  // jump after steps[i-1] .. before steps[i]
        int total_steps;
    };

    Plan build_plan(int steps_per_unit) const;
    CMat4 run_plan(const Plan& plan, Complex lambda, double x_end) const;
    const Plan& plan_at_level(int level) const;

    NormalizedPotential pot_;
    PropagateOptions opt_;
    bool exact_;
    mutable std::mutex mutex_;
    mutable std::vector<std::shared_ptr<const Plan>> plans_;
};

StateMatrix propagate(const NormalizedPotential& pot, Complex lambda, double x_end,
                      const PropagateOptions& opt = {});

// ---------------------------------------------------------------------------
// Picard-iteration series (independent quadrature-based route)
// ---------------------------------------------------------------------------

struct SeriesTerm {
    int n = 0;
    CMat2 theta = CMat2::Zero();
    CMat2 phi = CMat2::Zero();
    CMat2 theta_prime = CMat2::Zero();
    CMat2 phi_prime = CMat2::Zero();
};

/// Iterates 0..n_max of the integral-equation series at (x, lambda).
/// Requires an empty delta part.
std::vector<SeriesTerm> series_terms(const NormalizedPotential& pot, Complex lambda, double x,
                                     int n_max);

SeriesTerm series_term(const NormalizedPotential& pot, Complex lambda, double x, int n);

/// Majorant for the tail beyond order N: (x kappa)^(N+1)/(N+1)! * A^x with
/// kappa = |V|_1 / sqrt(max(1,|lambda|)) and A = exp(|Im sqrt(lambda)| + kappa).
double series_bound(const NormalizedPotential& pot, Complex lambda, double x, int N);

/// Largest of the four block deviations between M and the partial series sum,
/// weighted (theta, sqrt(l)*phi, theta'/sqrt(l), phi') in the operator norm.
double series_deviation(const StateMatrix& m, const std::vector<SeriesTerm>& terms, int upto_n);

/// Truncated expansion of mu_m (m = 1, 2) at order 0, 1 or 2.
Complex trace_expansion(const NormalizedPotential& pot, Complex lambda, int m, int order);

} // namespace mhill
