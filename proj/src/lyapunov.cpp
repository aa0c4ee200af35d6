#include "mhill/lyapunov.hpp"

#include <cmath>

namespace mhill {
namespace {

bool is_real_axis(Complex lambda)
{
    return std::abs(lambda.imag()) <= 1e-14 * std::max(1.0, std::abs(lambda.real()));
}

Complex quartic(Complex tau, Complex mu1, Complex mu2)
{
    const Complex b = 2.0 * (4.0 * mu1 * mu1 - mu2);
    return ((tau - 4.0 * mu1) * tau + b) * tau * tau - 4.0 * mu1 * tau + 1.0;
}

Complex quartic_deriv(Complex tau, Complex mu1, Complex mu2)
{
    const Complex b = 2.0 * (4.0 * mu1 * mu1 - mu2);
    return ((4.0 * tau - 12.0 * mu1) * tau + 2.0 * b) * tau - 4.0 * mu1;
}

// Stable root of tau^2 - 2 delta tau + 1 with |tau| >= 1, then one Newton step
// on the full quartic; the partner root is the exact reciprocal.
std::pair<Complex, Complex> multiplier_pair(Complex delta, Complex mu1, Complex mu2)
{
    const Complex disc = std::sqrt(delta * delta - 1.0);
    Complex tau = (std::real(std::conj(delta) * disc) >= 0.0) ? delta + disc : delta - disc;
    if (tau == Complex(0.0, 0.0))
        tau = delta; // delta^2 = 1 exactly
    const Complex dq = quartic_deriv(tau, mu1, mu2);
    if (std::abs(dq) > 0.0) {
        const Complex corr = quartic(tau, mu1, mu2) / dq;
        // polish rounding only; near-double multipliers make q'(tau) unreliable
        if (std::abs(corr) < 1e-6 * std::max(1.0, std::abs(tau)))
            tau -= corr;
    }
    return {tau, 1.0 / tau};
}

} // namespace

LyapunovData lyapunov_from_traces(Complex lambda, Complex mu1, Complex mu2, bool lambda_real)
{
    if (lambda_real) {
        mu1 = Complex(mu1.real(), 0.0);
        mu2 = Complex(mu2.real(), 0.0);
    }
    LyapunovData d;
    d.lambda = lambda;
    d.mu1 = mu1;
    d.mu2 = mu2;
    d.rho = 0.5 * (mu2 + 1.0) - mu1 * mu1;

    const double scale = std::max({1.0, std::norm(mu1), std::abs(mu2)});
    d.at_branch_point = std::abs(d.rho) < 1e-12 * scale;
    if (d.at_branch_point)
        d.sqrt_rho = 0.0;
    else if (lambda_real && d.rho.real() >= 0.0)
        d.sqrt_rho = std::sqrt(d.rho.real());
    else
        d.sqrt_rho = std::sqrt(d.rho);

    d.delta1 = mu1 + d.sqrt_rho;
    d.delta2 = mu1 - d.sqrt_rho;
    d.d_plus = (mu1 - 1.0) * (mu1 - 1.0) - d.rho;
    d.d_minus = (mu1 + 1.0) * (mu1 + 1.0) - d.rho;

    const auto [t1, t1i] = multiplier_pair(d.delta1, mu1, mu2);
    const auto [t2, t2i] = multiplier_pair(d.delta2, mu1, mu2);
    d.multipliers = {t1, t1i, t2, t2i};
    return d;
}

TraceValues traces_at(const Propagator& prop, Complex lambda)
{
    const StateMatrix m = prop.monodromy(lambda);
    Complex mu1 = m.entries.trace() / 4.0;
    Complex tr2 = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            tr2 += m.entries(i, j) * m.entries(j, i);
    Complex mu2 = tr2 / 4.0;
    if (is_real_axis(lambda)) {
        mu1 = Complex(mu1.real(), 0.0);
        mu2 = Complex(mu2.real(), 0.0);
    }
    TraceValues v;
    v.mu1 = mu1;
    v.mu2 = mu2;
    v.rho = 0.5 * (mu2 + 1.0) - mu1 * mu1;
    v.d_plus = (mu1 - 1.0) * (mu1 - 1.0) - v.rho;
    v.d_minus = (mu1 + 1.0) * (mu1 + 1.0) - v.rho;
    return v;
}

LyapunovData lyapunov_at(const Propagator& prop, Complex lambda)
{
    const TraceValues v = traces_at(prop, lambda);
    return lyapunov_from_traces(lambda, v.mu1, v.mu2, is_real_axis(lambda));
}

LyapunovData lyapunov_at(const NormalizedPotential& pot, Complex lambda,
                         const PropagateOptions& opt)
{
    return lyapunov_at(Propagator(pot, opt), lambda);
}

Complex rho0(Complex lambda, double c0) { return 0.5 * c0 * sinc_sqrt(lambda); }

Complex asymptotic_delta(Complex lambda, double v_m0)
{
    return cos_sqrt(lambda) + 0.5 * v_m0 * sinc_sqrt(lambda);
}

Complex continue_sqrt_along(const std::function<Complex(Complex)>& f,
                            const std::vector<Complex>& polyline, Complex start_value,
                            double floor)
{
    if (polyline.size() < 2)
        return start_value;
    Complex value = start_value;
    Complex f_cur = f(polyline.front());
    if (std::abs(f_cur) < floor)
        throw NumericError("square-root continuation starts at a zero");
    for (size_t seg = 0; seg + 1 < polyline.size(); ++seg) {
        const Complex a = polyline[seg], b = polyline[seg + 1];
        double t = 0.0, step = 0.25;
        while (t < 1.0) {
            const double t_next = std::min(1.0, t + step);
            const Complex p_mid = a + (b - a) * (0.5 * (t + t_next));
            const Complex pt = a + (b - a) * t_next;
            const Complex f_mid = f(p_mid);
            const Complex f_next = f(pt);
            if (std::abs(f_next) < floor || std::abs(f_mid) < floor)
                throw NumericError("continuation path passes near a zero",
                                   std::min(std::abs(f_next), std::abs(f_mid)));
            // Both half-steps must turn slowly and keep a comparable modulus,
            // otherwise the sampled argument could alias a full wind.
            const double turn1 = std::abs(std::arg(f_mid / f_cur));
            const double turn2 = std::abs(std::arg(f_next / f_mid));
            const double mag1 = std::abs(f_mid) / std::abs(f_cur);
            const double mag2 = std::abs(f_next) / std::abs(f_mid);
            if (turn1 > 0.4 * kPi || turn2 > 0.4 * kPi || mag1 > 8.0 || mag1 < 0.125 ||
                mag2 > 8.0 || mag2 < 0.125) {
                step *= 0.5;
                if (step < 1e-8)
                    throw NumericError("continuation step collapsed");
                continue;
            }
            Complex root = std::sqrt(f_mid);
            if (std::real(std::conj(value) * root) < 0.0)
                root = -root;
            value = root;
            root = std::sqrt(f_next);
            if (std::real(std::conj(value) * root) < 0.0)
                root = -root;
            value = root;
            f_cur = f_next;
            t = t_next;
            step = std::min(0.25, step * 1.6);
        }
    }
    return value;
}

BranchContext make_branch_context(const Propagator& prop)
{
    const NormalizedPotential& pot = prop.potential();
    BranchContext ctx;
    if (pot.c0 <= 1e-12 * std::max({1.0, std::abs(pot.v10), std::abs(pot.v20)})) {
        ctx.fallback_labeling = true;
        ctx.anchor = Complex(0.0, 0.0);
        return ctx;
    }
    const int k0 = std::max(2, static_cast<int>(std::ceil(pot.l1_norm)));
    int run = 0;
    int first_good = -1;
    for (int k = k0; k <= k0 + 60; ++k) {
        const double s = kPi * (k + 0.5);
        const Complex lam(s * s, 0.0);
        const Complex r = traces_at(prop, lam).rho;
        const Complex r0 = rho0(lam, pot.c0);
        if (std::abs(r - r0 * r0) <= 0.25 * std::norm(r0)) {
            if (run == 0)
                first_good = k;
            if (++run >= 3)
                break;
        } else {
            run = 0;
            first_good = -1;
        }
    }
    if (first_good < 0)
        throw NumericError("no high-energy anchor found for the branch of sqrt(rho)");
    const double s = kPi * (first_good + 0.5);
    ctx.anchor = Complex(s * s, 0.0);
    const Complex r = traces_at(prop, ctx.anchor).rho;
    const Complex r0 = rho0(ctx.anchor, pot.c0);
    const Complex principal = std::sqrt(r);
    ctx.anchor_sign = (std::abs(principal - r0) <= std::abs(-principal - r0)) ? +1 : -1;
    return ctx;
}

Complex branch_sqrt_rho(const Propagator& prop, Complex lambda, const BranchContext& ctx)
{
    if (ctx.fallback_labeling)
        return lyapunov_at(prop, lambda).sqrt_rho;
    auto rho_fn = [&prop](Complex t) { return traces_at(prop, t).rho; };
    std::vector<Complex> poly;
    poly.push_back(ctx.anchor);
    for (const Complex& p : ctx.path)
        poly.push_back(p);
    poly.push_back(lambda);
    const Complex start =
        static_cast<double>(ctx.anchor_sign) * std::sqrt(rho_fn(ctx.anchor));
    return continue_sqrt_along(rho_fn, poly, start, ctx.rho_floor);
}

} // namespace mhill
