#pragma once

#include "mhill/lyapunov.hpp"
#include "mhill/potential.hpp"

namespace mhill {

// ---------------------------------------------------------------------------
// Constant potential a*J: per-channel fundamental solutions
// ---------------------------------------------------------------------------

class ConstantModel {
public:
    explicit ConstantModel(double a) : a_(a) {}
    double a() const { return a_; }

    // c_pm(x,l) = cos(eta_pm x), s_pm(x,l) = sin(eta_pm x)/eta_pm,
    // eta_pm = sqrt(l -+ a); all entire in l.
    Complex c_plus(double x, Complex l) const { return cos_sqrt((l - a_) * x * x); }
    Complex c_minus(double x, Complex l) const { return cos_sqrt((l + a_) * x * x); }
    Complex s_plus(double x, Complex l) const { return x * sinc_sqrt((l - a_) * x * x); }
    Complex s_minus(double x, Complex l) const { return x * sinc_sqrt((l + a_) * x * x); }

    // lambda-derivatives at fixed x
    Complex dc_plus(double x, Complex l) const { return x * x * dcos_sqrt((l - a_) * x * x); }
    Complex dc_minus(double x, Complex l) const { return x * x * dcos_sqrt((l + a_) * x * x); }
    Complex ds_plus(double x, Complex l) const { return x * x * x * dsinc_sqrt((l - a_) * x * x); }
    Complex ds_minus(double x, Complex l) const { return x * x * x * dsinc_sqrt((l + a_) * x * x); }

private:
    double a_;
};

LyapunovData constant_lyapunov(double a, Complex lambda);

struct ConstantResonances {
    std::vector<double> z;         // z_n = (pi n)^2 + a^2/(2 pi n)^2, n = 1..n_max
    std::vector<double> lambda_m1; // a + (pi n)^2, n = 0..n_max
    std::vector<double> lambda_m2; // a - (pi n)^2, n = 0..n_max
    int n_a = 0;                   // integer part of a/(2 pi^2)
};
/// Double roots of rho and the stability-edge family for the constant model.
/// Throws if a/(2 pi^2) is an integer (n_a undefined).
ConstantResonances constant_resonances(double a, int n_max);

// ---------------------------------------------------------------------------
// Periodic delta comb a*J + gamma * delta_per * J1 (kicks at half-integers)
// ---------------------------------------------------------------------------

class DeltaModel {
public:
    DeltaModel(double a, double gamma) : cm_(a), gamma_(gamma) {}
    double a() const { return cm_.a(); }
    double gamma() const { return gamma_; }
    const ConstantModel& constant() const { return cm_; }

    Complex h(Complex l) const
    {
        return 0.25 * gamma_ * gamma_ * cm_.s_plus(1.0, l) * cm_.s_minus(1.0, l);
    }
    Complex dh(Complex l) const
    {
        return 0.25 * gamma_ * gamma_ *
               (cm_.ds_plus(1.0, l) * cm_.s_minus(1.0, l) +
                cm_.s_plus(1.0, l) * cm_.ds_minus(1.0, l));
    }
    Complex rho(Complex l) const;
    Complex drho(Complex l) const;

private:
    ConstantModel cm_;
    double gamma_;
};

LyapunovData delta_lyapunov(double a, double gamma, Complex lambda);

/// Exact kick factor [[I,0],[gamma*J1, I]] for y'(x0+) - y'(x0-) = gamma J1 y(x0).
CMat4 delta_jump(double gamma);

struct ResonancePair {
    Complex lower, upper; // real pair ordered, or conjugate pair (lower = conj(upper))
    bool real = true;
};
/// The two zeros of rho near z_n of the unperturbed model, by Newton from
/// perturbative seeds on the exact closed form.
ResonancePair delta_resonance_split(double a, double gamma, int n);

/// a*J + gamma * v_nu(x) * J1 with the documented C-infinity bump; nu in (0, 1/2).
NormalizedPotential smoothed_delta_family(double a, double gamma, double nu);

} // namespace mhill
