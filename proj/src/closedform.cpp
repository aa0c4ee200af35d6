#include "mhill/closedform.hpp"

#include <cmath>

namespace mhill {

Complex DeltaModel::rho(Complex l) const
{
    const Complex q = 0.5 * (cm_.c_plus(1.0, l) - cm_.c_minus(1.0, l));
    return q * q + h(l);
}

Complex DeltaModel::drho(Complex l) const
{
    const Complex q = 0.5 * (cm_.c_plus(1.0, l) - cm_.c_minus(1.0, l));
    const Complex dq = 0.5 * (cm_.dc_plus(1.0, l) - cm_.dc_minus(1.0, l));
    return 2.0 * q * dq + dh(l);
}

LyapunovData constant_lyapunov(double a, Complex lambda)
{
    const ConstantModel cm(a);
    const Complex mu1 = 0.5 * (cm.c_plus(1.0, lambda) + cm.c_minus(1.0, lambda));
    const Complex mu2 = 0.5 * (cm.c_plus(2.0, lambda) + cm.c_minus(2.0, lambda));
    const bool real_axis =
        std::abs(lambda.imag()) <= 1e-14 * std::max(1.0, std::abs(lambda.real()));
    return lyapunov_from_traces(lambda, mu1, mu2, real_axis);
}

ConstantResonances constant_resonances(double a, int n_max)
{
    const double ratio = a / (2.0 * kPi * kPi);
    if (std::abs(ratio - std::round(ratio)) < 1e-9)
        throw NumericError("a/(2 pi^2) is an integer: n_a undefined");
    ConstantResonances out;
    out.n_a = static_cast<int>(std::floor(ratio));
    for (int n = 1; n <= n_max; ++n) {
        const double pn = kPi * n;
        out.z.push_back(pn * pn + a * a / (4.0 * pn * pn));
    }
    // Stability edges per channel: cos(sqrt(lambda -+ a)) = +-1 at
    // lambda = (pi n)^2 +- a.
    for (int n = 0; n <= n_max; ++n) {
        const double pn2 = kPi * n * kPi * n;
        out.lambda_m1.push_back(pn2 + a);
        out.lambda_m2.push_back(pn2 - a);
    }
    for (int n = 1; n < out.n_a && n < n_max; ++n)
        if (!(out.z[n - 1] > out.z[n]))
            throw NumericError("resonance ordering violated below n_a");
    for (int n = std::max(1, out.n_a + 1); n < n_max; ++n)
        if (!(out.z[n - 1] < out.z[n]))
            throw NumericError("resonance ordering violated above n_a");
    return out;
}

LyapunovData delta_lyapunov(double a, double gamma, Complex lambda)
{
    const DeltaModel dm(a, gamma);
    const ConstantModel& cm = dm.constant();
    const Complex mu1 = 0.5 * (cm.c_plus(1.0, lambda) + cm.c_minus(1.0, lambda));
    const Complex mu2 =
        0.5 * (cm.c_plus(2.0, lambda) + cm.c_minus(2.0, lambda)) + 2.0 * dm.h(lambda);
    const bool real_axis =
        std::abs(lambda.imag()) <= 1e-14 * std::max(1.0, std::abs(lambda.real()));
    return lyapunov_from_traces(lambda, mu1, mu2, real_axis);
}

CMat4 delta_jump(double gamma)
{
    CMat4 m = CMat4::Identity();
    m.block<2, 2>(2, 0) = (gamma * mat_J1()).cast<Complex>();
    return m;
}

ResonancePair delta_resonance_split(double a, double gamma, int n)
{
    if (n < 1)
        throw NumericError("resonance index must be positive");
    const DeltaModel dm(a, gamma);
    const ConstantModel& cm = dm.constant();
    const double pn = kPi * n;
    const double z0 = pn * pn + a * a / (4.0 * pn * pn);

    // rho = q^2 + h near the double zero of q: seeds z0 +- sqrt(-h)/q'.
    const Complex h0 = dm.h(z0);
    const Complex dq = 0.5 * (cm.dc_plus(1.0, z0) - cm.dc_minus(1.0, z0));
    if (std::abs(dq) < 1e-14)
        throw NumericError("degenerate seed: q'(z_n) vanishes");
    const Complex offset = std::sqrt(-h0) / dq;

    auto polish = [&dm](Complex seed) {
        Complex x = seed;
        for (int it = 0; it < 80; ++it) {
            const Complex f = dm.rho(x);
            const Complex df = dm.drho(x);
            if (std::abs(df) == 0.0)
                break;
            const Complex step = f / df;
            x -= step;
            if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(x)))
                return x;
        }
        throw NumericError("Newton failed to converge from the perturbative seed");
    };

    Complex lo = polish(z0 - offset);
    Complex hi = polish(z0 + offset);
    ResonancePair out;
    const double im_tol = 1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
    out.real = std::abs(lo.imag()) <= im_tol && std::abs(hi.imag()) <= im_tol;
    if (out.real) {
        double a1 = lo.real(), a2 = hi.real();
        if (a1 > a2)
            std::swap(a1, a2);
        out.lower = a1;
        out.upper = a2;
    } else {
        Complex up = (hi.imag() > 0.0) ? hi : lo;
        out.upper = up;
        out.lower = std::conj(up);
    }
    return out;
}

NormalizedPotential smoothed_delta_family(double a, double gamma, double nu)
{
    if (!(nu > 0.0 && nu < 0.5))
        throw NumericError("mollifier width must lie in (0, 1/2)");
    PotentialSpec spec;
    spec.smooth = SmoothBump{a, gamma, nu};
    return normalize_potential(spec);
}

} // namespace mhill
