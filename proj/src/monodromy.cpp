#include "mhill/monodromy.hpp"

#include <algorithm>
#include <cmath>

namespace mhill {
namespace {

struct StepFactors {
    Complex c1, c2; // cos(eta_i h)
    Complex s1, s2; // sin(eta_i h)/eta_i
    Complex e1, e2; // eta_i sin(eta_i h)
};

StepFactors step_factors(Complex lambda, double w1, double w2, double h)
{
    const Complex u1 = (lambda - w1) * h * h;
    const Complex u2 = (lambda - w2) * h * h;
    StepFactors f;
    f.c1 = cos_sqrt(u1);
    f.c2 = cos_sqrt(u2);
    const Complex g1 = sinc_sqrt(u1), g2 = sinc_sqrt(u2);
    f.s1 = h * g1;
    f.s2 = h * g2;
    f.e1 = (lambda - w1) * h * g1;
    f.e2 = (lambda - w2) * h * g2;
    return f;
}

// Eigen-frame decomposition of a frozen symmetric value.
void decompose(const Mat2& v, Mat2& q, double& w1, double& w2)
{
    const double a = v(0, 0), c = v(1, 1), b = v(0, 1);
    const double mid = 0.5 * (a + c);
    const double r = std::hypot(0.5 * (a - c), b);
    w1 = mid - r;
    w2 = mid + r;
    if (r == 0.0) {
        q = Mat2::Identity();
        return;
    }
    Eigen::Vector2d v2;
    if (b != 0.0)
        v2 << b, w2 - a;
    else
        v2 = (a > c) ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 1);
    v2.normalize();
    q.col(0) = Eigen::Vector2d(v2.y(), -v2.x());
    q.col(1) = v2;
}

double max_abs(const CMat4& m) { return m.cwiseAbs().maxCoeff(); }

// ---- cumulative Simpson prefix integral for matrix-valued samples ----------

// f sampled at m+1 equispaced points (m even); returns F with F[j] ~ int_0^{x_j} f.
std::vector<CMat2> cumulative_simpson(const std::vector<CMat2>& f, double h)
{
    const size_t m = f.size() - 1;
    std::vector<CMat2> out(f.size(), CMat2::Zero());
    for (size_t j = 2; j <= m; j += 2)
        out[j] = out[j - 2] + (h / 3.0) * (f[j - 2] + 4.0 * f[j - 1] + f[j]);
    for (size_t j = 1; j <= m; j += 2)
        out[j] = out[j - 1] + (h / 12.0) * (5.0 * f[j - 1] + 8.0 * f[j] - f[j + 1]);
    return out;
}

struct SeriesGrid {
    double x = 0.0, h = 0.0;
    std::vector<double> t;
    std::vector<Mat2> v; // V(t_j), periodic extension
};

SeriesGrid make_series_grid(const NormalizedPotential& pot, double x)
{
    SeriesGrid g;
    g.x = x;
    const int m = 8192 * std::max(1, static_cast<int>(std::ceil(x)));
    g.h = x / m;
    g.t.resize(m + 1);
    g.v.resize(m + 1);
    for (int j = 0; j <= m; ++j) {
        g.t[j] = x * j / m;
        double frac = g.t[j] - std::floor(g.t[j]);
        g.v[j] = evaluate_smooth(pot, frac);
    }
    return g;
}

// One Picard iterate: next(x) = int_0^x sin(sqrt(l)(x-t))/sqrt(l) V(t) prev(t) dt,
// evaluated on the whole grid; derivative (cos kernel) returned at the endpoint.
void iterate_series(const SeriesGrid& g, Complex lambda, const std::vector<CMat2>& prev,
                    std::vector<CMat2>& next, CMat2& deriv_at_end)
{
    const size_t m = g.t.size() - 1;
    std::vector<CMat2> integrand(m + 1);
    for (size_t j = 0; j <= m; ++j)
        integrand[j] = g.v[j] * prev[j];

    next.assign(m + 1, CMat2::Zero());
    if (std::abs(lambda) > 0.01) {
        const Complex z = std::sqrt(lambda);
        std::vector<CMat2> fc(m + 1), fs(m + 1);
        for (size_t j = 0; j <= m; ++j) {
            fc[j] = std::cos(z * g.t[j]) * integrand[j];
            fs[j] = std::sin(z * g.t[j]) * integrand[j];
        }
        const auto pc = cumulative_simpson(fc, g.h);
        const auto ps = cumulative_simpson(fs, g.h);
        for (size_t j = 1; j <= m; ++j)
            next[j] = (std::sin(z * g.t[j]) * pc[j] - std::cos(z * g.t[j]) * ps[j]) / z;
        deriv_at_end = std::cos(z * g.x) * pc[m] + std::sin(z * g.x) * ps[m];
        return;
    }

    // Small |lambda|: expand the kernels in powers of lambda; the (x-t)^p
    // weights reduce to prefix moments of t^q V(t) prev(t).
    const int kmax = 5;
    std::vector<std::vector<CMat2>> moment(2 * kmax + 2);
    {
        std::vector<CMat2> f(m + 1);
        for (int q = 0; q <= 2 * kmax + 1; ++q) {
            for (size_t j = 0; j <= m; ++j)
                f[j] = std::pow(g.t[j], q) * integrand[j];
            moment[q] = cumulative_simpson(f, g.h);
        }
    }
    auto binom = [](int n, int k) {
        double r = 1.0;
        for (int i = 1; i <= k; ++i)
            r = r * (n - k + i) / i;
        return r;
    };
    for (size_t j = 1; j <= m; ++j) {
        const double xj = g.t[j];
        CMat2 acc = CMat2::Zero();
        Complex lam_pow = 1.0;
        for (int k = 0; k <= kmax; ++k) {
            const int p = 2 * k + 1;
            double fact = 1.0;
            for (int i = 2; i <= p; ++i)
                fact *= i;
            CMat2 poly = CMat2::Zero();
            for (int q = 0; q <= p; ++q)
                poly += binom(p, q) * std::pow(xj, p - q) * ((q % 2) ? -1.0 : 1.0) *
                        moment[q][j];
            acc += (lam_pow / fact) * poly;
            lam_pow *= -lambda;
        }
        next[j] = acc;
    }
    {
        CMat2 acc = CMat2::Zero();
        Complex lam_pow = 1.0;
        for (int k = 0; k <= kmax; ++k) {
            const int p = 2 * k;
            double fact = 1.0;
            for (int i = 2; i <= p; ++i)
                fact *= i;
            CMat2 poly = CMat2::Zero();
            for (int q = 0; q <= p; ++q)
                poly += binom(p, q) * std::pow(g.x, p - q) * ((q % 2) ? -1.0 : 1.0) *
                        moment[q][m];
            acc += (lam_pow / fact) * poly;
            lam_pow *= -lambda;
        }
        deriv_at_end = acc;
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Propagator
// ---------------------------------------------------------------------------

Propagator::Propagator(NormalizedPotential pot, PropagateOptions opt)
    : pot_(std::move(pot)), opt_(opt)
{
    exact_ = std::holds_alternative<RotConst>(pot_.smooth) ||
             std::holds_alternative<RotSamples>(pot_.smooth);
}

Propagator::Plan Propagator::build_plan(int steps_per_unit) const
{
    std::vector<double> cuts{0.0, 1.0};
    for (const auto& d : pot_.deltas)
        if (d.x0 > 0.0)
            cuts.push_back(d.x0);
    if (const auto* s = std::get_if<RotSamples>(&pot_.smooth)) {
        const int n = static_cast<int>(s->value.size());
        for (int j = 1; j < n; ++j)
            cuts.push_back(static_cast<double>(j) / n);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    Plan plan;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        int nsub = exact_ ? 1 : std::max(1, static_cast<int>(std::ceil((b - a) * steps_per_unit)));
        for (int k = 0; k < nsub; ++k) {
            Step st;
            st.x0 = a + (b - a) * k / nsub;
            st.h = (b - a) / nsub;
            const Mat2 frozen = evaluate_smooth(pot_, st.x0 + 0.5 * st.h);
            decompose(frozen, st.q, st.w1, st.w2);
            plan.steps.push_back(st);
        }
    }
    plan.total_steps = static_cast<int>(plan.steps.size());
    for (const auto& d : pot_.deltas) {
        int idx = 0;
        while (idx < plan.total_steps && plan.steps[idx].x0 < d.x0 - 1e-15)
            ++idx;
        plan.jumps.emplace_back(idx, d.strength);
    }
    return plan;
}

const Propagator::Plan& Propagator::plan_at_level(int level) const
{
    std::lock_guard<std::mutex> lock(mutex_);
    while (static_cast<int>(plans_.size()) <= level) {
        const int steps = opt_.base_steps << plans_.size();
        plans_.push_back(std::make_shared<const Plan>(build_plan(steps)));
    }
    return *plans_[static_cast<size_t>(level)];
}

CMat4 Propagator::run_plan(const Plan& plan, Complex lambda, double x_end) const
{
    CMat2 th = CMat2::Identity(), ph = CMat2::Zero();
    CMat2 thp = CMat2::Zero(), php = CMat2::Identity();

    auto apply_jump = [&](const Mat2& s) {
        thp += s.cast<Complex>() * th;
        php += s.cast<Complex>() * ph;
    };
    auto apply_step = [&](const Step& st, double h) {
        const StepFactors f = step_factors(lambda, st.w1, st.w2, h);
        const Mat2 p1 = st.q.col(0) * st.q.col(0).transpose();
        const Mat2 p2 = st.q.col(1) * st.q.col(1).transpose();
        const CMat2 c = f.c1 * p1 + f.c2 * p2;
        const CMat2 s = f.s1 * p1 + f.s2 * p2;
        const CMat2 e = f.e1 * p1 + f.e2 * p2;
        const CMat2 th_new = c * th + s * thp;
        const CMat2 ph_new = c * ph + s * php;
        const CMat2 thp_new = -e * th + c * thp;
        const CMat2 php_new = -e * ph + c * php;
        th = th_new;
        ph = ph_new;
        thp = thp_new;
        php = php_new;
    };

    size_t jump_idx = 0;
    for (int i = 0; i < plan.total_steps; ++i) {
        while (jump_idx < plan.jumps.size() && plan.jumps[jump_idx].first == i) {
            if (plan.steps[i].x0 < x_end - 1e-15)
                apply_jump(plan.jumps[jump_idx].second);
            ++jump_idx;
        }
        const Step& st = plan.steps[i];
        if (st.x0 >= x_end - 1e-15)
            break;
        const double h = std::min(st.h, x_end - st.x0);
        apply_step(st, h);
    }
    while (jump_idx < plan.jumps.size() && x_end >= 1.0) {
        apply_jump(plan.jumps[jump_idx].second); // kick sitting at the period end
        ++jump_idx;
    }

    CMat4 m;
    m << th, ph, thp, php;
    return m;
}

StateMatrix Propagator::monodromy(Complex lambda) const
{
    StateMatrix out;
    out.x = 1.0;
    out.lambda = lambda;
    if (exact_) {
        out.entries = run_plan(plan_at_level(0), lambda, 1.0);
        out.err_estimate = 0.0;
        return out;
    }
    CMat4 prev = run_plan(plan_at_level(0), lambda, 1.0);
    int level = 1;
    double diff = 0.0;
    while (true) {
        if ((opt_.base_steps << level) > opt_.max_steps)
            throw NumericError("propagation step budget exhausted", diff);
        const CMat4 cur = run_plan(plan_at_level(level), lambda, 1.0);
        diff = max_abs(cur - prev) / std::max(1.0, max_abs(cur));
        if (diff < opt_.tol) {
            out.entries = cur;
            out.err_estimate = diff;
            return out;
        }
        prev = cur;
        ++level;
    }
}

StateMatrix Propagator::at(Complex lambda, double x_end) const
{
    if (x_end < 0.0)
        throw NumericError("propagation endpoint must be nonnegative");
    StateMatrix out;
    out.x = x_end;
    out.lambda = lambda;
    int whole = static_cast<int>(std::floor(x_end + 1e-12));
    double frac = x_end - whole;
    if (frac < 1e-12)
        frac = 0.0;

    auto assemble = [&](int level) {
        const Plan& plan = plan_at_level(level);
        CMat4 m = CMat4::Identity();
        if (whole > 0) {
            const CMat4 period = run_plan(plan, lambda, 1.0);
            for (int i = 0; i < whole; ++i)
                m = period * m;
        }
        if (frac > 0.0)
            m = run_plan(plan, lambda, frac) * m;
        return m;
    };

    if (exact_) {
        out.entries = assemble(0);
        out.err_estimate = 0.0;
        return out;
    }
    CMat4 prev = assemble(0);
    int level = 1;
    while (true) {
        if ((opt_.base_steps << level) > opt_.max_steps)
            throw NumericError("propagation step budget exhausted");
        const CMat4 cur = assemble(level);
        const double diff = max_abs(cur - prev) / std::max(1.0, max_abs(cur));
        if (diff < opt_.tol) {
            out.entries = cur;
            out.err_estimate = diff;
            return out;
        }
        prev = cur;
        ++level;
    }
}

StateMatrix propagate(const NormalizedPotential& pot, Complex lambda, double x_end,
                      const PropagateOptions& opt)
{
    return Propagator(pot, opt).at(lambda, x_end);
}

// ---------------------------------------------------------------------------
// Series
// ---------------------------------------------------------------------------

std::vector<SeriesTerm> series_terms(const NormalizedPotential& pot, Complex lambda, double x,
                                     int n_max)
{
    if (!pot.deltas.empty())
        throw NumericError("series iterates are defined for smooth potentials only");
    if (n_max < 0)
        throw NumericError("series order must be nonnegative");

    const SeriesGrid g = make_series_grid(pot, x);
    const size_t m = g.t.size() - 1;
    const Complex z = std::sqrt(lambda);

    std::vector<SeriesTerm> out;
    std::vector<CMat2> theta(m + 1), phi(m + 1);
    for (size_t j = 0; j <= m; ++j) {
        const double tj = g.t[j];
        theta[j] = cos_sqrt(lambda * tj * tj) * CMat2::Identity();
        phi[j] = tj * sinc_sqrt(lambda * tj * tj) * CMat2::Identity();
    }
    SeriesTerm base;
    base.n = 0;
    base.theta = theta[m];
    base.phi = phi[m];
    base.theta_prime = -lambda * x * sinc_sqrt(lambda * x * x) * CMat2::Identity();
    base.phi_prime = cos_sqrt(lambda * x * x) * CMat2::Identity();
    (void)z;
    out.push_back(base);

    for (int n = 1; n <= n_max; ++n) {
        std::vector<CMat2> theta_next, phi_next;
        CMat2 dtheta = CMat2::Zero(), dphi = CMat2::Zero();
        iterate_series(g, lambda, theta, theta_next, dtheta);
        iterate_series(g, lambda, phi, phi_next, dphi);
        SeriesTerm term;
        term.n = n;
        term.theta = theta_next[m];
        term.phi = phi_next[m];
        term.theta_prime = dtheta;
        term.phi_prime = dphi;
        out.push_back(term);
        theta.swap(theta_next);
        phi.swap(phi_next);
    }
    return out;
}

SeriesTerm series_term(const NormalizedPotential& pot, Complex lambda, double x, int n)
{
    return series_terms(pot, lambda, x, n).back();
}

double series_bound(const NormalizedPotential& pot, Complex lambda, double x, int N)
{
    if (N < -1)
        throw NumericError("series bound order must be >= -1");
    const double lam1 = std::max(1.0, std::abs(lambda));
    const double kappa = pot.l1_norm / std::sqrt(lam1);
    const double im_z = std::abs(std::sqrt(lambda).imag());
    const double a = std::exp(im_z + kappa);
    double term = 1.0;
    for (int i = 1; i <= N + 1; ++i)
        term *= x * kappa / i;
    return term * std::pow(a, x);
}

double series_deviation(const StateMatrix& m, const std::vector<SeriesTerm>& terms, int upto_n)
{
    CMat2 th = CMat2::Zero(), ph = CMat2::Zero(), thp = CMat2::Zero(), php = CMat2::Zero();
    for (const auto& t : terms) {
        if (t.n > upto_n)
            break;
        th += t.theta;
        ph += t.phi;
        thp += t.theta_prime;
        php += t.phi_prime;
    }
    double zmag = std::abs(std::sqrt(m.lambda));
    if (zmag < 1e-8)
        zmag = 1.0;
    const double d1 = (m.theta() - th).operatorNorm();
    const double d2 = zmag * (m.phi() - ph).operatorNorm();
    const double d3 = (m.theta_prime() - thp).operatorNorm() / zmag;
    const double d4 = (m.phi_prime() - php).operatorNorm();
    return std::max({d1, d2, d3, d4});
}

Complex trace_expansion(const NormalizedPotential& pot, Complex lambda, int m, int order)
{
    if (!pot.deltas.empty())
        throw NumericError("trace expansion requires a smooth representation");
    if (m != 1 && m != 2)
        throw NumericError("trace order m must be 1 or 2");

    Complex mu = cos_sqrt(static_cast<double>(m * m) * lambda);
    if (order >= 1)
        mu += 0.25 * m * m * pot.v1 * sinc_sqrt(static_cast<double>(m * m) * lambda);
    if (order < 2)
        return mu;

    auto smooth_at = [&pot](double t) { return evaluate_smooth(pot, t - std::floor(t)); };
    auto trace_prod = [](const Mat2& a, const Mat2& b) {
        return a(0, 0) * b(0, 0) + a(1, 1) * b(1, 1) + 2.0 * a(0, 1) * b(0, 1);
    };

    if (std::abs(lambda) >= 0.25) {
        // I_1 by prefix quadrature; I_2 = 4 I_1 cos(sqrt(lambda)).
        const Complex z = std::sqrt(lambda);
        const int grid = 8192;
        const double h = 1.0 / grid;
        std::vector<Mat2> v(grid + 1);
        for (int j = 0; j <= grid; ++j)
            v[j] = smooth_at(j * h);
        // scalar channels (V1, V2, V3) with Tr V(t)V(s) weights (1,1,2)
        Complex i1 = 0.0;
        for (int e = 0; e < 3; ++e) {
            const int r = e == 2 ? 0 : e, c = e == 2 ? 1 : e;
            const double weight = e == 2 ? 2.0 : 1.0;
            std::vector<CMat2> fc(grid + 1), fs(grid + 1);
            for (int j = 0; j <= grid; ++j) {
                const double val = v[j](r, c);
                fc[j] = CMat2::Identity() * (val * std::cos(2.0 * z * (j * h)));
                fs[j] = CMat2::Identity() * (val * std::sin(2.0 * z * (j * h)));
            }
            const auto pc = cumulative_simpson(fc, h);
            const auto ps = cumulative_simpson(fs, h);
            std::vector<Complex> outer(grid + 1);
            for (int j = 0; j <= grid; ++j) {
                const double t = j * h;
                outer[j] = v[j](r, c) * (std::cos(z * (1.0 - 2.0 * t)) * pc[j](0, 0) -
                                         std::sin(z * (1.0 - 2.0 * t)) * ps[j](0, 0));
            }
            Complex sum = 0.0;
            for (int j = 0; j + 2 <= grid; j += 2)
                sum += (h / 3.0) * (outer[j] + 4.0 * outer[j + 1] + outer[j + 2]);
            i1 += weight * sum;
        }
        const Complex im = (m == 1) ? i1 : 4.0 * i1 * cos_sqrt(lambda);
        return mu + (im - 0.5 * m * m * cos_sqrt(static_cast<double>(m * m) * lambda) * pot.v2) /
                        (8.0 * lambda);
    }

    // Small lambda: the subtracted kernel stays entire, quadrature over the simplex.
    const int grid = 1024;
    const double h = static_cast<double>(m) / grid;
    std::vector<Mat2> v(grid + 1);
    for (int j = 0; j <= grid; ++j)
        v[j] = smooth_at(j * h);
    std::vector<Complex> inner(grid + 1, Complex(0.0, 0.0));
    for (int i = 2; i <= grid; ++i) {
        const double t = i * h;
        std::vector<Complex> f(i + 1);
        for (int j = 0; j <= i; ++j) {
            const double s = j * h;
            const double u1 = m - t + s, u2 = s - t;
            const Complex kern = -2.0 * u1 * u2 * sinc_sqrt(lambda * u1 * u1) *
                                 sinc_sqrt(lambda * u2 * u2);
            f[j] = kern * trace_prod(v[i], v[j]);
        }
        Complex sum = 0.0;
        for (int j = 0; j + 2 <= i; j += 2)
            sum += (h / 3.0) * (f[j] + 4.0 * f[j + 1] + f[j + 2]);
        if (i % 2 == 1)
            sum += (h / 12.0) * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
        inner[i] = sum;
    }
    Complex g = 0.0;
    for (int i = 0; i + 2 <= grid; i += 2)
        g += (h / 3.0) * (inner[i] + 4.0 * inner[i + 1] + inner[i + 2]);
    return mu + g / 8.0;
}

} // namespace mhill
