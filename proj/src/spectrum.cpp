#include "mhill/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace mhill {
namespace {

using Fn = std::function<Complex(Complex)>;

Complex central_diff(const Fn& f, Complex z, double h)
{
    return (f(z + h) - f(z - h)) / (2.0 * h);
}

// ---------------------------------------------------------------------------
// Winding numbers: adaptive trapezoid of f'/f along the contour
// ---------------------------------------------------------------------------

struct Piece {
    Complex at(double t) const { return a + (b - a) * t; }
    Complex deriv() const { return b - a; }
    Complex a, b;
};

struct LogDerivSums {
    Complex winding;  // (1/2 pi i) integral of f'/f
    Complex moment;   // (1/2 pi i) integral of z f'/f
};

LogDerivSums integrate_logderiv_circle(const Fn& f, Complex center, double radius, int n,
                                       double fd_h)
{
    LogDerivSums s{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / n;
        const Complex dir = std::polar(1.0, 2.0 * kPi * t);
        const Complex z = center + radius * dir;
        const Complex fz = f(z);
        if (!std::isfinite(fz.real()) || !std::isfinite(fz.imag()) || fz == Complex(0.0, 0.0))
            throw NumericError("contour hits a zero or overflow of the target function");
        const Complex dz = Complex(0.0, 2.0 * kPi) * radius * dir;
        const Complex v = central_diff(f, z, fd_h) / fz * dz;
        s.winding += v;
        s.moment += z * v;
    }
    s.winding /= static_cast<double>(n);
    s.moment /= static_cast<double>(n);
    return s;
}

LogDerivSums integrate_logderiv_segment(const Fn& f, const Piece& p, int n, double fd_h)
{
    LogDerivSums s{0.0, 0.0};
    for (int k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) / n;
        const Complex z = p.at(t);
        const Complex fz = f(z);
        if (!std::isfinite(fz.real()) || !std::isfinite(fz.imag()) || fz == Complex(0.0, 0.0))
            throw NumericError("contour hits a zero or overflow of the target function");
        const double w = (k == 0 || k == n) ? 0.5 : 1.0;
        const Complex v = w * central_diff(f, z, fd_h) / fz;
        s.winding += v;
        s.moment += z * v;
    }
    s.winding *= p.deriv() / static_cast<double>(n);
    s.moment *= p.deriv() / static_cast<double>(n);
    return s;
}

double contour_scale(const Contour& c)
{
    if (c.shape == Contour::Shape::Circle)
        return c.radius;
    return std::max(std::abs(c.hi.real() - c.lo.real()), std::abs(c.hi.imag() - c.lo.imag()));
}

struct WindingResult {
    int count = 0;
    double residual = 0.0;
    Complex centroid{0.0, 0.0}; // mean of the enclosed zeros (count > 0)
};

// Adaptive trapezoid of the log-derivative with central differences: the
// documented route for the public zero counter.
WindingResult logderiv_winding(const Fn& f, const Contour& contour, double accept)
{
    const double fd_h = std::max(1e-7, 1e-6 * contour_scale(contour));
    const Complex two_pi_i(0.0, 2.0 * kPi);

    auto total_at = [&](int n) {
        LogDerivSums s;
        if (contour.shape == Contour::Shape::Circle) {
            s = integrate_logderiv_circle(f, contour.center, contour.radius, n, fd_h);
        } else {
            const Complex a = contour.lo;
            const Complex c = contour.hi;
            const Complex b(c.real(), a.imag());
            const Complex d(a.real(), c.imag());
            const LogDerivSums s1 = integrate_logderiv_segment(f, {a, b}, n, fd_h);
            const LogDerivSums s2 = integrate_logderiv_segment(f, {b, c}, n, fd_h);
            const LogDerivSums s3 = integrate_logderiv_segment(f, {c, d}, n, fd_h);
            const LogDerivSums s4 = integrate_logderiv_segment(f, {d, a}, n, fd_h);
            s.winding = s1.winding + s2.winding + s3.winding + s4.winding;
            s.moment = s1.moment + s2.moment + s3.moment + s4.moment;
        }
        s.winding /= two_pi_i;
        s.moment /= two_pi_i;
        return s;
    };

    int n = 64;
    LogDerivSums prev = total_at(n);
    while (n <= (1 << 15)) {
        n *= 2;
        const LogDerivSums cur = total_at(n);
        const double drift = std::abs(cur.winding - prev.winding);
        const long rounded = std::lround(cur.winding.real());
        const double res = std::abs(cur.winding - static_cast<double>(rounded));
        if (drift < 0.5 * accept && res <= accept) {
            WindingResult out;
            out.count = static_cast<int>(rounded);
            out.residual = res;
            if (out.count > 0)
                out.centroid = cur.moment / static_cast<double>(out.count);
            return out;
        }
        prev = cur;
    }
    throw NumericError("winding number did not settle to an integer", std::abs(prev.winding));
}

// Derivative-free winding for the internal search: track the continuous
// argument of f along uniform contour nodes, doubling until every increment
// is unambiguous. The zero centroid comes from integrating z dlog(f) by
// parts, which leaves a periodic smooth integrand and stays accurate where
// the function itself is barely above rounding.
WindingResult phase_winding(const Fn& f, const Contour& contour)
{
    auto point = [&contour](double t) -> Complex {
        if (contour.shape == Contour::Shape::Circle)
            return contour.center + contour.radius * std::polar(1.0, 2.0 * kPi * t);
        const Complex a = contour.lo;
        const Complex c = contour.hi;
        const Complex b(c.real(), a.imag());
        const Complex d(a.real(), c.imag());
        const double s = 4.0 * (t - std::floor(t));
        const Complex v[5] = {a, b, c, d, a};
        const int side = std::min(3, static_cast<int>(s));
        return v[side] + (v[side + 1] - v[side]) * (s - side);
    };
    auto tangent = [&contour, &point](double t) -> Complex {
        if (contour.shape == Contour::Shape::Circle)
            return Complex(0.0, 2.0 * kPi) * contour.radius * std::polar(1.0, 2.0 * kPi * t);
        const double s = 4.0 * (t - std::floor(t));
        const int side = std::min(3, static_cast<int>(s));
        return 4.0 * (point(0.25 * (side + 1)) - point(0.25 * side));
    };
    auto eval = [&f](Complex z) {
        const Complex fz = f(z);
        if (!std::isfinite(fz.real()) || !std::isfinite(fz.imag()) || fz == Complex(0.0, 0.0))
            throw NumericError("contour hits a zero or overflow of the target function");
        return fz;
    };

    int n = 64;
    std::vector<Complex> fv(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
        fv[static_cast<size_t>(k)] = eval(point(static_cast<double>(k) / n));

    while (true) {
        bool clean = true;
        for (int k = 0; k < n && clean; ++k) {
            const Complex ratio = fv[static_cast<size_t>((k + 1) % n)] / fv[static_cast<size_t>(k)];
            const double turn = std::abs(std::arg(ratio));
            const double mag = std::abs(ratio);
            clean = turn <= 0.4 * kPi && mag <= 6.0 && mag >= 1.0 / 6.0;
        }
        if (clean)
            break;
        if (2 * n > (1 << 17))
            throw NumericError("phase tracking along the contour did not resolve");
        std::vector<Complex> next(static_cast<size_t>(2 * n));
        for (int k = 0; k < n; ++k) {
            next[static_cast<size_t>(2 * k)] = fv[static_cast<size_t>(k)];
            next[static_cast<size_t>(2 * k + 1)] = eval(point((k + 0.5) / n));
        }
        fv.swap(next);
        n *= 2;
    }

    // accumulated continuous log along the loop
    std::vector<Complex> logf(static_cast<size_t>(n + 1));
    logf[0] = std::log(fv[0]);
    for (int k = 0; k < n; ++k) {
        const Complex ratio = fv[static_cast<size_t>((k + 1) % n)] / fv[static_cast<size_t>(k)];
        logf[static_cast<size_t>(k + 1)] =
            logf[static_cast<size_t>(k)] + Complex(std::log(std::abs(ratio)), std::arg(ratio));
    }
    const double w = (logf[static_cast<size_t>(n)] - logf[0]).imag() / (2.0 * kPi);

    WindingResult out;
    out.count = static_cast<int>(std::lround(w));
    out.residual = std::abs(w - out.count);
    if (out.residual > 0.05)
        throw NumericError("phase winding not an integer", w);
    if (out.count <= 0)
        return out;

    // moment = (1/2 pi i) contour-int of z dlog f
    //        = w * (uniform mean of z) - (1/2 pi i) int G z' dt,
    // where G(t) = log f - 2 pi i w t is periodic and smooth.
    Complex mean_z = 0.0, gsum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / n;
        const Complex g = logf[static_cast<size_t>(k)] - Complex(0.0, 2.0 * kPi * w * t);
        gsum += g * tangent(t);
        mean_z += point(t);
    }
    gsum /= static_cast<double>(n);
    mean_z /= static_cast<double>(n);
    const Complex moment =
        static_cast<double>(out.count) * mean_z - gsum / Complex(0.0, 2.0 * kPi);
    out.centroid = moment / static_cast<double>(out.count);
    return out;
}

} // namespace

int winding_number(const Fn& f, const Contour& contour, double accept, double* residual)
{
    const WindingResult r = logderiv_winding(f, contour, accept);
    if (residual)
        *residual = r.residual;
    return r.count;
}

// ---------------------------------------------------------------------------
// Newton polishing and rectangle subdivision
// ---------------------------------------------------------------------------

namespace {

struct PolishResult {
    Complex z;
    bool ok = false;
};

PolishResult newton_polish(const Fn& f, Complex seed, double scale)
{
    Complex x = seed;
    const double fd_h = std::max(1e-9, 1e-7 * scale);
    for (int it = 0; it < 60; ++it) {
        const Complex fx = f(x);
        const Complex dfx = central_diff(f, x, fd_h);
        if (std::abs(dfx) == 0.0)
            return {x, false};
        const Complex step = fx / dfx;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag()))
            return {x, false};
        x -= step;
        if (std::abs(x - seed) > 16.0 * scale)
            return {x, false};
        if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(x)))
            return {x, true};
    }
    // Linear (multiple-root) convergence still shrinks the step geometrically;
    // accept when the final correction is already below the cluster scale.
    const Complex fx = f(x);
    const Complex dfx = central_diff(f, x, fd_h);
    if (std::abs(dfx) > 0.0 && std::abs(fx / dfx) <= 1e-8 * std::max(1.0, std::abs(x)))
        return {x, true};
    return {x, false};
}

bool inside_rect(Complex z, Complex lo, Complex hi, double margin)
{
    return z.real() >= lo.real() - margin && z.real() <= hi.real() + margin &&
           z.imag() >= lo.imag() - margin && z.imag() <= hi.imag() + margin;
}

struct RectSearch {
    const Fn& raw_f;
    double root_tol;
    double accept;
    int max_depth = 40;
    mutable long evals = 0;
    long eval_budget = 2'000'000;
    Fn f;

    RectSearch(const Fn& fn, double tol, double acc) : raw_f(fn), root_tol(tol), accept(acc)
    {
        f = [this](Complex z) {
            if (++evals > eval_budget)
                throw NumericError("zero-search evaluation budget exhausted");
            return raw_f(z);
        };
    }

    std::vector<ZeroEntry> run(Complex lo, Complex hi, int depth, bool may_inflate) const
    {
        WindingResult wr;
        bool counted = false;
        for (int attempt = 0; attempt < 4 && !counted; ++attempt) {
            try {
                wr = phase_winding(f, Contour::rect(lo, hi));
                counted = true;
            } catch (const NumericError&) {
                if (!may_inflate)
                    throw; // the caller re-splits instead of moving sub-boundaries
                const Complex pad = 0.013 * (attempt + 1) * (hi - lo);
                lo -= pad;
                hi += pad;
            }
        }
        if (!counted)
            throw NumericError("zero-count contour could not be stabilized");
        if (wr.count == 0)
            return {};
        if (depth > max_depth)
            throw NumericError("count mismatch after max subdivision depth");

        if (wr.count <= 6) {
            auto found = attempt_extraction(lo, hi, wr);
            if (!found.empty())
                return found;
            found = cluster_fallback(lo, hi, wr);
            if (!found.empty())
                return found;
        }

        // Split along both axes at an irregular fraction; when a sub-contour
        // cannot be stabilized (a zero sits on the cut) retry other fractions.
        const double fractions[3][2] = {{0.5137, 0.4391}, {0.6271, 0.5643}, {0.3737, 0.6211}};
        for (const auto& fr : fractions) {
            const double mx = lo.real() + fr[0] * (hi.real() - lo.real());
            const double my = lo.imag() + fr[1] * (hi.imag() - lo.imag());
            const Complex corners[4][2] = {
                {lo, Complex(mx, my)},
                {Complex(mx, lo.imag()), Complex(hi.real(), my)},
                {Complex(lo.real(), my), Complex(mx, hi.imag())},
                {Complex(mx, my), hi},
            };
            try {
                std::vector<ZeroEntry> out;
                int total = 0;
                for (const auto& c : corners) {
                    auto sub = run(c[0], c[1], depth + 1, false);
                    for (const auto& e : sub)
                        total += e.multiplicity;
                    out.insert(out.end(), sub.begin(), sub.end());
                }
                if (total != wr.count)
                    continue; // a zero straddled a cut; move the cuts
                merge_entries(out);
                return out;
            } catch (const NumericError& e) {
                if (evals > eval_budget)
                    throw;
                (void)e;
                continue;
            }
        }
        throw NumericError("zero subdivision could not isolate the roots");
    }

    // Newton cannot separate zeros below its multiplicity-limited noise ball.
    // Shrink circles around the running centroid: a genuine separation above
    // the evaluation noise shows up as a count drop; a stable count down to
    // the noise floor is one cluster, located precisely by the centroid.
    std::vector<ZeroEntry> cluster_fallback(Complex lo, Complex hi, const WindingResult& wr) const
    {
        Complex center = wr.centroid;
        const double dre = std::min(center.real() - lo.real(), hi.real() - center.real());
        const double dim = std::min(center.imag() - lo.imag(), hi.imag() - center.imag());
        const double r_start = 0.8 * std::min(dre, dim);
        if (!(r_start > 0.0))
            return {};
        const double scale_z = std::max(1.0, std::abs(center));
        const double r_floor = std::max(100.0 * root_tol * scale_z, 1e-12);
        WindingResult widest; // largest clean circle: the best-conditioned locator
        double r_ok = -1.0;
        double r = r_start;
        while (r >= r_floor) {
            WindingResult c;
            try {
                c = phase_winding(f, Contour::circle(center, r));
            } catch (const NumericError&) {
                break; // noise floor of the evaluation reached
            }
            if (c.count != wr.count)
                return {}; // separated above the noise floor: subdivide
            if (r_ok < 0.0)
                widest = c;
            center = c.centroid;
            r_ok = r;
            r *= 0.35;
        }
        // demand at least two clean shrinks before trusting the cluster
        if (r_ok < 0.0 || r_ok > 0.13 * r_start)
            return {};
        ZeroEntry e;
        e.z = widest.centroid;
        e.multiplicity = wr.count;
        e.resolved = (wr.count == 1) ||
                     cluster_is_coincident(e.z, std::max(10.0 * r_floor, 1e-9 * scale_z));
        return {e};
    }

    std::vector<ZeroEntry> attempt_extraction(Complex lo, Complex hi,
                                              const WindingResult& wr) const
    {
        const double span = std::abs(hi - lo);
        std::vector<Complex> seeds;
        seeds.push_back(wr.centroid);
        for (double sx : {0.5, 0.25, 0.75})
            for (double sy : {0.5, 0.2, 0.8})
                seeds.push_back(Complex(lo.real() + sx * (hi.real() - lo.real()),
                                        lo.imag() + sy * (hi.imag() - lo.imag())));

        // Cluster radius: Newton lands within a multiplicity-limited noise
        // ball around a multiple zero, so merge generously relative to the
        // rectangle and refine by contour counts afterwards.
        const double r_merge =
            std::max(10.0 * root_tol * std::max({1.0, std::abs(lo), std::abs(hi)}),
                     1e-3 * span);
        std::vector<Complex> reps;
        std::vector<int> hits;
        for (const Complex& s : seeds) {
            const PolishResult r = newton_polish(f, s, std::max(span, 1.0));
            if (!r.ok || !inside_rect(r.z, lo, hi, 0.0))
                continue;
            bool dup = false;
            for (size_t i = 0; i < reps.size(); ++i) {
                if (std::abs(reps[i] - r.z) <= r_merge) {
                    reps[i] = (reps[i] * static_cast<double>(hits[i]) + r.z) /
                              static_cast<double>(hits[i] + 1);
                    ++hits[i];
                    dup = true;
                    break;
                }
            }
            if (!dup) {
                reps.push_back(r.z);
                hits.push_back(1);
            }
        }
        if (reps.empty())
            return {};

        std::vector<ZeroEntry> out;
        int total = 0;
        for (const Complex& z : reps) {
            double sep = span;
            for (const Complex& q : reps)
                if (q != z)
                    sep = std::min(sep, std::abs(q - z));
            const double scale_z = std::max(1.0, std::abs(z));
            double r = std::min(0.45 * sep, std::max(0.02 * span, 5.0 * r_merge));
            if (!(r > 0.0))
                r = 5.0 * r_merge;
            // shrink towards the representative: a stable plateau count is its
            // own multiplicity; zeros shed along the way belong to other reps
            // or to a further subdivision
            const double r_floor = std::max(1e-7 * scale_z, 20.0 * root_tol * scale_z);
            std::vector<WindingResult> rungs;
            for (double rk = r; rk >= r_floor; rk /= 5.0) {
                WindingResult c;
                try {
                    c = phase_winding(f, Contour::circle(z, rk));
                } catch (const NumericError&) {
                    break; // evaluation noise floor
                }
                if (c.count == 0)
                    break;
                rungs.push_back(c);
            }
            if (rungs.empty())
                return {};
            const WindingResult local = rungs.back();
            // locate from the widest circle holding the same count: best noise
            WindingResult locator = local;
            for (const auto& c : rungs)
                if (c.count == local.count) {
                    locator = c;
                    break;
                }
            ZeroEntry e;
            e.z = (local.count >= 2) ? locator.centroid : z;
            if (local.count == 1) {
                const PolishResult p = newton_polish(f, e.z, r);
                if (p.ok && std::abs(p.z - e.z) <= r)
                    e.z = p.z;
            }
            e.multiplicity = local.count;
            e.resolved = (local.count == 1) || cluster_is_coincident(e.z, r_floor * 10.0);
            out.push_back(e);
            total += local.count;
        }
        if (total != wr.count)
            return {};
        return out;
    }

    // A multiplicity >= 2 count is reported as a genuine multiple zero when
    // Newton launched from opposite sides lands on the same point.
    bool cluster_is_coincident(Complex z, double r) const
    {
        const double scale = std::max(1.0, std::abs(z));
        const PolishResult a = newton_polish(f, z + Complex(r, 0.3 * r), r);
        const PolishResult b = newton_polish(f, z - Complex(r, 0.3 * r), r);
        return a.ok && b.ok && std::abs(a.z - b.z) <= 100.0 * root_tol * scale;
    }

    void merge_entries(std::vector<ZeroEntry>& entries) const
    {
        std::sort(entries.begin(), entries.end(), [](const ZeroEntry& a, const ZeroEntry& b) {
            if (a.z.real() != b.z.real())
                return a.z.real() < b.z.real();
            return a.z.imag() < b.z.imag();
        });
        std::vector<ZeroEntry> merged;
        for (const auto& e : entries) {
            const double tol = 10.0 * root_tol * std::max(1.0, std::abs(e.z));
            if (!merged.empty() && std::abs(merged.back().z - e.z) <= tol)
                merged.back().multiplicity = std::max(merged.back().multiplicity, e.multiplicity);
            else
                merged.push_back(e);
        }
        entries.swap(merged);
    }
};

} // namespace

std::vector<ZeroEntry> find_zeros_in_rect(const Fn& f, Complex lo, Complex hi, double root_tol,
                                          double winding_accept)
{
    RectSearch search(f, root_tol, winding_accept);
    auto out = search.run(lo, hi, 0, true);
    search.merge_entries(out);
    return out;
}

// ---------------------------------------------------------------------------
// Real-axis scanning
// ---------------------------------------------------------------------------

namespace {

std::vector<double> make_real_grid(double lo, double hi, double density)
{
    std::vector<double> grid;
    if (lo < 0.0) {
        // sqrt(|lambda|) spacing mirrors the oscillation scale below zero
        const double t_hi = std::sqrt(-lo);
        const double t_lo = std::sqrt(-std::min(hi, 0.0));
        int n = std::max(8, static_cast<int>(std::ceil((t_hi - t_lo) * density)));
        for (int i = 0; i <= n; ++i) {
            const double t = t_hi + (t_lo - t_hi) * i / n;
            grid.push_back(-t * t);
        }
    }
    if (hi > 0.0) {
        const double s_lo = std::sqrt(std::max(lo, 0.0));
        const double s_hi = std::sqrt(hi);
        int n = std::max(8, static_cast<int>(std::ceil((s_hi - s_lo) * density)));
        for (int i = 0; i <= n; ++i) {
            const double s = s_lo + (s_hi - s_lo) * i / n;
            grid.push_back(s * s);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

double bisect_sign_change(const std::function<double(double)>& f, double a, double b, double fa,
                          double tol)
{
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0)
            return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

std::vector<ZeroEntry> real_zero_scan(const Fn& f, double lo, double hi, double density,
                                      double root_tol, double winding_accept)
{
    const auto grid = make_real_grid(lo, hi, density);
    std::vector<double> val(grid.size());
    for (size_t i = 0; i < grid.size(); ++i)
        val[i] = f(Complex(grid[i], 0.0)).real();
    auto freal = [&f](double x) { return f(Complex(x, 0.0)).real(); };

    std::vector<ZeroEntry> out;
    auto add_entry = [&](Complex z, int mult, bool resolved) {
        const double tol = 10.0 * root_tol * std::max(1.0, std::abs(z));
        for (auto& e : out)
            if (std::abs(e.z - z) <= tol) {
                e.multiplicity = std::max(e.multiplicity, mult);
                return;
            }
        ZeroEntry e;
        e.z = z;
        e.multiplicity = mult;
        e.resolved = resolved;
        out.push_back(e);
    };

    // axis point candidates from exact hits and sign changes
    std::vector<double> points;
    for (size_t i = 0; i + 1 < grid.size(); ++i) {
        if (val[i] == 0.0) {
            points.push_back(grid[i]);
            continue;
        }
        if (val[i + 1] == 0.0)
            continue; // handled as an exact hit of the next pair
        if ((val[i] > 0.0) != (val[i + 1] > 0.0)) {
            const double tol = root_tol * std::max(1.0, std::abs(grid[i]));
            double root = bisect_sign_change(freal, grid[i], grid[i + 1], val[i], tol);
            const PolishResult p = newton_polish(f, Complex(root, 0.0),
                                                 std::max(1.0, grid[i + 1] - grid[i]));
            if (p.ok && std::abs(p.z.imag()) <= tol && p.z.real() >= grid[i] - tol &&
                p.z.real() <= grid[i + 1] + tol)
                root = p.z.real();
            points.push_back(root);
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end(),
                             [](double a, double b) {
                                 return std::abs(a - b) <=
                                        1e-6 * std::max(1.0, std::abs(a));
                             }),
                 points.end());
    // multiplicity (and a refined centroid) from a small disjoint circle
    for (size_t i = 0; i < points.size(); ++i) {
        const double z = points[i];
        double neighbor = std::numeric_limits<double>::infinity();
        if (i > 0)
            neighbor = std::min(neighbor, z - points[i - 1]);
        if (i + 1 < points.size())
            neighbor = std::min(neighbor, points[i + 1] - z);
        const double scale = std::max(1.0, std::abs(z));
        double r = std::max(1e-5 * scale, 1e-7);
        if (std::isfinite(neighbor))
            r = std::min(r, 0.25 * neighbor);
        bool counted = false;
        try {
            const auto local = find_zeros_in_rect(f, Complex(z - r, -r), Complex(z + r, r),
                                                  root_tol, winding_accept);
            for (const auto& e : local)
                if (std::abs(e.z.imag()) <= 1e-6 * scale)
                    add_entry(Complex(e.z.real(), 0.0), e.multiplicity, e.resolved);
            counted = !local.empty();
        } catch (const NumericError&) {
        }
        if (!counted)
            add_entry(Complex(z, 0.0), 1, true);
    }

    // Local minima of |f| with no sign change: candidate multiple zeros or
    // near-real pairs; a small contour decides.
    for (size_t i = 1; i + 1 < grid.size(); ++i) {
        const double am = std::abs(val[i - 1]), a0 = std::abs(val[i]), ap = std::abs(val[i + 1]);
        if (a0 > am || a0 > ap)
            continue;
        if ((val[i - 1] > 0.0) != (val[i] > 0.0) || (val[i] > 0.0) != (val[i + 1] > 0.0))
            continue; // sign change already handled
        const bool deep = a0 * a0 <= 0.25 * am * ap;
        if (!deep)
            continue;
        const double half = std::max(grid[i + 1] - grid[i], grid[i] - grid[i - 1]);
        const Complex lo_r(grid[i] - 1.5 * half, -1.5 * half);
        const Complex hi_r(grid[i] + 1.5 * half, 1.5 * half);
        std::vector<ZeroEntry> local;
        try {
            local = find_zeros_in_rect(f, lo_r, hi_r, root_tol, winding_accept);
        } catch (const NumericError&) {
            continue;
        }
        for (const auto& e : local) {
            const double im_tol = 1e-6 * std::max(1.0, std::abs(e.z));
            if (std::abs(e.z.imag()) <= im_tol && e.z.real() >= lo && e.z.real() <= hi)
                add_entry(Complex(e.z.real(), 0.0), e.multiplicity, e.resolved);
        }
    }

    std::sort(out.begin(), out.end(),
              [](const ZeroEntry& a, const ZeroEntry& b) { return a.z.real() < b.z.real(); });
    out.erase(std::remove_if(out.begin(), out.end(),
                             [&](const ZeroEntry& e) {
                                 return e.z.real() < lo - 1e-12 || e.z.real() > hi + 1e-12;
                             }),
              out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Spectral function adapters
// ---------------------------------------------------------------------------

namespace {

Fn spectral_fn(const Propagator& prop, SpectralFunction target)
{
    switch (target) {
    case SpectralFunction::Rho:
        return [&prop](Complex l) { return traces_at(prop, l).rho; };
    case SpectralFunction::DPlus:
        return [&prop](Complex l) { return traces_at(prop, l).d_plus; };
    default:
        return [&prop](Complex l) { return traces_at(prop, l).d_minus; };
    }
}

std::vector<EigenvalueEntry> to_eigenvalues(const std::vector<ZeroEntry>& zeros)
{
    std::vector<EigenvalueEntry> out;
    for (const auto& z : zeros)
        out.push_back({z.z.real(), z.multiplicity, z.resolved});
    return out;
}

} // namespace

std::vector<EigenvalueEntry> periodic_eigenvalues(const NormalizedPotential& pot, double lo,
                                                  double hi, const ScanOptions& opt)
{
    Propagator prop(pot, opt.propagate);
    return to_eigenvalues(real_zero_scan(spectral_fn(prop, SpectralFunction::DPlus), lo, hi,
                                         opt.grid_density, opt.root_tol, opt.winding_accept));
}

std::vector<EigenvalueEntry> antiperiodic_eigenvalues(const NormalizedPotential& pot, double lo,
                                                      double hi, const ScanOptions& opt)
{
    Propagator prop(pot, opt.propagate);
    return to_eigenvalues(real_zero_scan(spectral_fn(prop, SpectralFunction::DMinus), lo, hi,
                                         opt.grid_density, opt.root_tol, opt.winding_accept));
}

std::vector<EigenvalueEntry> real_resonances(const NormalizedPotential& pot, double lo, double hi,
                                             const ScanOptions& opt)
{
    if (pot.scalar_like)
        throw NumericError("rho vanishes identically for a scalar-like potential");
    Propagator prop(pot, opt.propagate);
    return to_eigenvalues(real_zero_scan(spectral_fn(prop, SpectralFunction::Rho), lo, hi,
                                         opt.grid_density, opt.root_tol, opt.winding_accept));
}

std::vector<ResonanceEntry> complex_resonances(const NormalizedPotential& pot, Complex rect_lo,
                                               Complex rect_hi, const ScanOptions& opt)
{
    if (pot.scalar_like)
        throw NumericError("rho vanishes identically for a scalar-like potential");
    Propagator prop(pot, opt.propagate);
    auto zeros = find_zeros_in_rect(spectral_fn(prop, SpectralFunction::Rho), rect_lo, rect_hi,
                                    opt.root_tol, opt.winding_accept);

    std::vector<ResonanceEntry> out;
    std::vector<ZeroEntry> uppers;
    for (const auto& z : zeros) {
        const double im_tol = 1e-6 * std::max(1.0, std::abs(z.z));
        if (std::abs(z.z.imag()) <= im_tol) {
            out.push_back({Complex(z.z.real(), 0.0), z.multiplicity, true});
        } else if (z.z.imag() > 0.0) {
            uppers.push_back(z);
        }
    }
    // Real potential: pair every strictly complex zero with its conjugate.
    std::vector<bool> used(zeros.size(), false);
    for (const auto& up : uppers) {
        const double tol = 1e-5 * std::max(1.0, std::abs(up.z));
        bool matched = false;
        for (const auto& z : zeros) {
            if (z.z.imag() < 0.0 && std::abs(std::conj(z.z) - up.z) <= tol) {
                const Complex avg = 0.5 * (up.z + std::conj(z.z));
                out.push_back({avg, up.multiplicity, false});
                out.push_back({std::conj(avg), z.multiplicity, false});
                matched = true;
                break;
            }
        }
        if (!matched)
            throw NumericError("conjugate symmetry of the resonance set is violated");
    }
    std::sort(out.begin(), out.end(), [](const ResonanceEntry& a, const ResonanceEntry& b) {
        if (a.lambda.real() != b.lambda.real())
            return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    return out;
}

ContourCount count_zeros(const Propagator& prop, SpectralFunction target, const Contour& contour,
                         const ScanOptions& opt)
{
    if (prop.potential().scalar_like && target == SpectralFunction::Rho)
        throw NumericError("target function is identically zero (scalar-like potential)");
    ContourCount out;
    out.contour = contour;
    out.target = target;
    out.count = winding_number(spectral_fn(prop, target), contour, opt.winding_accept,
                               &out.winding_residual);
    if (out.count < 0)
        throw NumericError("negative winding: not an entire function sample");
    return out;
}

ContourCount count_zeros(const NormalizedPotential& pot, SpectralFunction target,
                         const Contour& contour, const ScanOptions& opt)
{
    Propagator prop(pot, opt.propagate);
    return count_zeros(prop, target, contour, opt);
}

// ---------------------------------------------------------------------------
// Band scan
// ---------------------------------------------------------------------------

namespace {

struct BranchValues {
    double delta1 = 0.0, delta2 = 0.0; // real-axis labels, delta1 >= delta2
    double rho = 0.0;
    bool real_branches = true; // rho >= 0 (or decoupled diagonal channels)
};

class BandEvaluator {
public:
    BandEvaluator(const NormalizedPotential& pot, const Propagator& prop)
        : decoupled_(pot.offdiag_zero), prop_(prop)
    {
    }

    BranchValues at(double lambda) const
    {
        BranchValues v;
        if (decoupled_) {
            const StateMatrix m = prop_.monodromy(Complex(lambda, 0.0));
            const double ch1 = 0.5 * (m.entries(0, 0).real() + m.entries(2, 2).real());
            const double ch2 = 0.5 * (m.entries(1, 1).real() + m.entries(3, 3).real());
            v.delta1 = ch1;
            v.delta2 = ch2;
            v.rho = 0.25 * (ch1 - ch2) * (ch1 - ch2);
            v.real_branches = true;
            return v;
        }
        const TraceValues t = traces_at(prop_, Complex(lambda, 0.0));
        v.rho = t.rho.real();
        if (v.rho >= 0.0) {
            const double root = std::sqrt(v.rho);
            v.delta1 = t.mu1.real() + root;
            v.delta2 = t.mu1.real() - root;
            v.real_branches = true;
        } else {
            v.real_branches = false;
        }
        return v;
    }

    bool in_band(double lambda, int branch) const
    {
        const BranchValues v = at(lambda);
        if (!v.real_branches)
            return false;
        const double d = (branch == 1) ? v.delta1 : v.delta2;
        return std::abs(d) <= 1.0;
    }

private:
    bool decoupled_;
    const Propagator& prop_;
};

double bisect_indicator(const std::function<bool(double)>& ind, double a, double b, bool state_a,
                        double tol)
{
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        const double m = 0.5 * (a + b);
        if (ind(m) == state_a)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

} // namespace

SpectralReport scan_bands(const NormalizedPotential& pot, double lo, double hi,
                          const ScanOptions& opt)
{
    if (!(hi > lo))
        throw NumericError("empty scan window");
    Propagator prop(pot, opt.propagate);
    BandEvaluator eval(pot, prop);

    const auto grid = make_real_grid(lo, hi, opt.grid_density);
    std::vector<BranchValues> vals(grid.size());
    for (size_t i = 0; i < grid.size(); ++i)
        vals[i] = eval.at(grid[i]);

    // Per-branch intervals with bisected edges.
    std::vector<std::pair<double, double>> intervals[2];
    for (int branch = 1; branch <= 2; ++branch) {
        auto ind = [&](double x) { return eval.in_band(x, branch); };
        auto member = [&](size_t i) {
            return vals[i].real_branches &&
                   std::abs(branch == 1 ? vals[i].delta1 : vals[i].delta2) <= 1.0;
        };
        double open_at = 0.0;
        bool open = false;
        for (size_t i = 0; i < grid.size(); ++i) {
            const bool m = member(i);
            if (m && !open) {
                open = true;
                open_at = (i == 0) ? grid[0]
                                   : bisect_indicator(ind, grid[i - 1], grid[i], false,
                                                      opt.edge_tol);
            } else if (!m && open) {
                const double edge =
                    bisect_indicator(ind, grid[i - 1], grid[i], true, opt.edge_tol);
                intervals[branch - 1].emplace_back(open_at, edge);
                open = false;
            }
        }
        if (open)
            intervals[branch - 1].emplace_back(open_at, grid.back());
    }

    // Union of the two branch spectra.
    struct Edge {
        double x;
        int delta; // +mask on open, -mask on close
    };
    std::vector<Edge> edges;
    for (int b = 0; b < 2; ++b)
        for (const auto& iv : intervals[b]) {
            edges.push_back({iv.first, +(1 << b)});
            edges.push_back({iv.second, -(1 << b)});
        }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.x < b.x; });

    SpectralReport report;
    report.window_lo = lo;
    report.window_hi = hi;
    int mask = 0;
    double start = 0.0;
    int seen_mask = 0;
    for (const auto& e : edges) {
        const int before = mask;
        if (e.delta > 0)
            mask |= e.delta;
        else
            mask &= ~(-e.delta);
        if (before == 0 && mask != 0) {
            start = e.x;
            seen_mask = mask;
        } else if (before != 0 && mask == 0) {
            Band band;
            band.lo = start;
            band.hi = e.x;
            band.branch = seen_mask;
            if (band.hi - band.lo > opt.edge_tol)
                report.bands.push_back(band);
        } else {
            seen_mask |= mask;
        }
    }

    std::sort(report.bands.begin(), report.bands.end(),
              [](const Band& a, const Band& b) { return a.lo < b.lo; });
    // Merge bands separated by less than the resolution.
    for (size_t i = 0; i + 1 < report.bands.size();) {
        if (report.bands[i + 1].lo - report.bands[i].hi <= 2.0 * opt.edge_tol) {
            report.bands[i].hi = report.bands[i + 1].hi;
            report.bands[i].branch |= report.bands[i + 1].branch;
            report.bands.erase(report.bands.begin() + static_cast<long>(i) + 1);
        } else {
            ++i;
        }
    }

    // Complement within the window.
    double cursor = lo;
    for (const auto& band : report.bands) {
        if (band.lo > cursor + opt.edge_tol) {
            Gap g;
            g.lo = cursor;
            g.hi = band.lo;
            g.lo_origin = (cursor == lo) ? "window" : "";
            report.gaps.push_back(g);
        }
        cursor = std::max(cursor, band.hi);
    }
    if (cursor < hi - opt.edge_tol) {
        Gap g;
        g.lo = cursor;
        g.hi = hi;
        g.hi_origin = "window";
        report.gaps.push_back(g);
    }

    // Gap midpoints must genuinely lie outside the spectrum.
    for (const auto& g : report.gaps) {
        for (double frac : {0.31, 0.55, 0.86}) {
            const double x = g.lo + frac * (g.hi - g.lo);
            if (eval.in_band(x, 1) || eval.in_band(x, 2))
                throw NumericError("band edge not separable at grid resolution near interval [" +
                                   std::to_string(g.lo) + ", " + std::to_string(g.hi) + "]");
        }
    }
    return report;
}

void classify_gaps(SpectralReport& report, double match_tol)
{
    auto nearest = [](const std::vector<double>& xs, double x) {
        double best = std::numeric_limits<double>::infinity();
        for (double v : xs)
            best = std::min(best, std::abs(v - x));
        return best;
    };
    std::vector<double> eigs, res;
    for (const auto& e : report.periodic_eigs)
        eigs.push_back(e.lambda);
    for (const auto& e : report.antiperiodic_eigs)
        eigs.push_back(e.lambda);
    for (const auto& r : report.resonances)
        if (r.real)
            res.push_back(r.lambda.real());

    for (auto& g : report.gaps) {
        auto origin_of = [&](double x, const std::string& preset) -> std::string {
            if (!preset.empty())
                return preset;
            const double tol = match_tol * std::max(1.0, std::abs(x));
            const double de = nearest(eigs, x);
            const double dr = nearest(res, x);
            if (de <= tol && dr <= tol)
                return "ambiguous";
            if (de <= tol)
                return "eigenvalue";
            if (dr <= tol)
                return "resonance";
            return "unmatched";
        };
        g.lo_origin = origin_of(g.lo, g.lo_origin);
        g.hi_origin = origin_of(g.hi, g.hi_origin);
        const bool window_cut = g.lo_origin == "window" || g.hi_origin == "window";
        if (g.lo_origin == "eigenvalue" && g.hi_origin == "eigenvalue") {
            g.kind = GapKind::Stable;
        } else if (g.lo_origin == "resonance" && g.hi_origin == "resonance") {
            g.kind = GapKind::Resonance;
        } else {
            g.kind = GapKind::Unresolved;
            g.flagged = !window_cut;
        }
        if (g.lo_origin == "ambiguous" || g.hi_origin == "ambiguous" ||
            g.lo_origin == "unmatched" || g.hi_origin == "unmatched")
            g.flagged = true;
    }
}

// ---------------------------------------------------------------------------
// Cluster enumeration, residuals, reconstruction
// ---------------------------------------------------------------------------

namespace {

struct ClusterZeros {
    std::vector<double> values; // expanded with multiplicity
};

// The four zeros of D+/D- in the cluster around (pi n)^2 + v1/2.
ClusterZeros cluster_eigenvalues(const Propagator& prop, int n, const ScanOptions& opt)
{
    const bool even = (n % 2 == 0);
    const Fn f = spectral_fn(prop, even ? SpectralFunction::DPlus : SpectralFunction::DMinus);
    const double shift = 0.5 * prop.potential().v1;
    const double pn = kPi * n;
    const double lo = (pn - 0.5 * kPi) * (pn - 0.5 * kPi) + shift;
    const double hi = (pn + 0.5 * kPi) * (pn + 0.5 * kPi) + shift;
    const double him = 4.0;
    auto zeros = find_zeros_in_rect(f, Complex(lo, -him), Complex(hi, him), opt.root_tol,
                                    opt.winding_accept);
    ClusterZeros out;
    int total = 0;
    for (const auto& z : zeros) {
        if (std::abs(z.z.imag()) > 1e-5 * std::max(1.0, std::abs(z.z)))
            throw NumericError("non-real eigenvalue candidate in cluster " + std::to_string(n));
        for (int k = 0; k < z.multiplicity; ++k)
            out.values.push_back(z.z.real());
        total += z.multiplicity;
    }
    if (total != 4)
        throw NumericError("eigenvalue cluster " + std::to_string(n) + " has count " +
                           std::to_string(total) + ", expected 4");
    std::sort(out.values.begin(), out.values.end());
    return out;
}

std::vector<Complex> cluster_resonances(const Propagator& prop, int n, const ScanOptions& opt)
{
    const Fn f = spectral_fn(prop, SpectralFunction::Rho);
    const double pn = kPi * n;
    const double lo = (pn - 1.0) * (pn - 1.0);
    const double hi = (pn + 1.0) * (pn + 1.0);
    const double him = 2.0 * (pn + 1.0);
    auto zeros = find_zeros_in_rect(f, Complex(lo, -him), Complex(hi, him), opt.root_tol,
                                    opt.winding_accept);
    std::vector<Complex> out;
    int total = 0;
    for (const auto& z : zeros) {
        for (int k = 0; k < z.multiplicity; ++k)
            out.push_back(z.z);
        total += z.multiplicity;
    }
    if (total != 2)
        throw NumericError("resonance cluster " + std::to_string(n) + " has count " +
                           std::to_string(total) + ", expected 2");
    std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
        if (a.real() != b.real())
            return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

} // namespace

std::vector<EigenvalueEntry> enumerate_eigenvalues_to_cluster(const NormalizedPotential& pot,
                                                              bool periodic, int n_clusters,
                                                              const ScanOptions& opt)
{
    Propagator prop(pot, opt.propagate);
    const Fn f = spectral_fn(prop, periodic ? SpectralFunction::DPlus : SpectralFunction::DMinus);
    const double shift = 0.5 * pot.v1;

    // Zone below the first cluster: D+ contributes its two lowest zeros.
    const double depth = pot.v10 - (0.5 * pot.l1_norm + 1.0) * (0.5 * pot.l1_norm + 1.0) - 10.0;
    const double first_edge =
        periodic ? (1.5 * kPi) * (1.5 * kPi) + shift : (0.5 * kPi) * (0.5 * kPi) + shift;
    std::vector<EigenvalueEntry> out;
    auto low = find_zeros_in_rect(f, Complex(std::min(depth, -10.0), -4.0),
                                  Complex(first_edge, 4.0), opt.root_tol, opt.winding_accept);
    int low_count = 0;
    for (const auto& z : low) {
        out.push_back({z.z.real(), z.multiplicity, z.resolved});
        low_count += z.multiplicity;
    }
    const int expected_low = periodic ? 2 : 0;
    if (low_count != expected_low)
        throw NumericError("zone below the first cluster has count " +
                           std::to_string(low_count) + ", expected " +
                           std::to_string(expected_low));

    for (int j = 1; j <= n_clusters; ++j) {
        const int n = periodic ? 2 * j : 2 * j - 1;
        const ClusterZeros cz = cluster_eigenvalues(prop, n, opt);
        size_t i = 0;
        while (i < cz.values.size()) {
            size_t k = i + 1;
            const double tol = 10.0 * opt.root_tol * std::max(1.0, std::abs(cz.values[i]));
            while (k < cz.values.size() && cz.values[k] - cz.values[i] <= tol)
                ++k;
            out.push_back({cz.values[i], static_cast<int>(k - i), true});
            i = k;
        }
    }
    std::sort(out.begin(), out.end(),
              [](const EigenvalueEntry& a, const EigenvalueEntry& b) { return a.lambda < b.lambda; });
    return out;
}

ResidualReport asymptotic_residuals(const NormalizedPotential& pot, int n_max,
                                    const ScanOptions& opt)
{
    Propagator prop(pot, opt.propagate);
    ResidualReport report;
    double eig_sum = 0.0, res_sum = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        ClusterResiduals cr;
        cr.n = n;
        const double pn2 = kPi * n * kPi * n;
        const ClusterZeros cz = cluster_eigenvalues(prop, n, opt);
        const double t1 = pn2 + pot.v10, t2 = pn2 + pot.v20;
        // Order-preserving 2 + 2 assignment to the two mean levels.
        for (int i = 0; i < 4; ++i) {
            const int m = (i < 2) ? 1 : 2;
            cr.paired_m[static_cast<size_t>(i)] = m;
            cr.eig_residual[static_cast<size_t>(i)] =
                cz.values[static_cast<size_t>(i)] - (m == 1 ? t1 : t2);
        }
        if (std::abs(cz.values[1] - t1) > std::abs(cz.values[1] - t2) ||
            std::abs(cz.values[2] - t2) > std::abs(cz.values[2] - t1))
            cr.pairing_ambiguous = true;

        const auto rz = cluster_resonances(prop, n, opt);
        for (int i = 0; i < 2; ++i) {
            const Complex r = rz[static_cast<size_t>(i)];
            const double d = std::abs(r - pn2);
            cr.res_residual[static_cast<size_t>(i)] = (r.real() >= pn2) ? d : -d;
        }
        for (double v : cr.eig_residual)
            eig_sum += v * v;
        for (double v : cr.res_residual)
            res_sum += v * v;
        report.clusters.push_back(cr);
        report.eig_partial_l2.push_back(eig_sum);
        report.res_partial_l2.push_back(res_sum);
    }
    const size_t knee = report.clusters.size() - report.clusters.size() / 3;
    if (knee >= 1 && knee <= report.clusters.size()) {
        const double e0 = report.eig_partial_l2[knee - 1];
        const double r0 = report.res_partial_l2[knee - 1];
        report.eig_tail_increase = e0 > 0.0 ? (eig_sum - e0) / e0 : 0.0;
        report.res_tail_increase = r0 > 0.0 ? (res_sum - r0) / r0 : 0.0;
    }
    return report;
}

DiscriminantProduct::DiscriminantProduct(bool periodic, std::vector<double> initial,
                                         std::vector<std::array<double, 4>> quads)
    : periodic_(periodic), initial_(std::move(initial)), quads_(std::move(quads))
{
    if (periodic_ && initial_.size() != 2)
        throw NumericError("periodic reconstruction needs the two lowest eigenvalues");
    if (!periodic_ && !initial_.empty())
        throw NumericError("anti-periodic reconstruction has no initial factor");
}

Complex DiscriminantProduct::operator()(Complex lambda) const
{
    Complex value;
    if (periodic_) {
        const Complex base = sinc_sqrt(0.25 * lambda); // 2 sin(sqrt(l)/2)/sqrt(l)
        value = 0.25 * (lambda - initial_[0]) * (lambda - initial_[1]) * base * base * base * base;
        for (size_t j = 0; j < quads_.size(); ++j) {
            const double fr = 2.0 * kPi * static_cast<double>(j + 1);
            const Complex den = fr * fr - lambda;
            for (double root : quads_[j])
                value *= (root - lambda) / den;
        }
    } else {
        const Complex base = cos_sqrt(0.25 * lambda); // cos(sqrt(l)/2)
        value = 4.0 * base * base * base * base;
        for (size_t j = 0; j < quads_.size(); ++j) {
            const double fr = kPi * static_cast<double>(2 * j + 1);
            const Complex den = fr * fr - lambda;
            for (double root : quads_[j])
                value *= (root - lambda) / den;
        }
    }
    return value;
}

namespace {

DiscriminantProduct build_product(const std::vector<EigenvalueEntry>& eigs, int truncation_n,
                                  bool periodic)
{
    std::vector<double> expanded;
    for (const auto& e : eigs)
        for (int k = 0; k < e.multiplicity; ++k)
            expanded.push_back(e.lambda);
    std::sort(expanded.begin(), expanded.end());
    const size_t need =
        (periodic ? 2u : 0u) + 4u * static_cast<size_t>(std::max(truncation_n, 0));
    if (expanded.size() < need)
        throw NumericError("eigenvalue list too short for the requested truncation");
    std::vector<double> initial;
    size_t at = 0;
    if (periodic) {
        initial = {expanded[0], expanded[1]};
        at = 2;
    }
    std::vector<std::array<double, 4>> quads;
    for (int j = 0; j < truncation_n; ++j) {
        quads.push_back({expanded[at], expanded[at + 1], expanded[at + 2], expanded[at + 3]});
        at += 4;
    }
    return DiscriminantProduct(periodic, std::move(initial), std::move(quads));
}

} // namespace

DiscriminantProduct reconstruct_dplus(const std::vector<EigenvalueEntry>& periodic_eigs,
                                      int truncation_n)
{
    return build_product(periodic_eigs, truncation_n, true);
}

DiscriminantProduct reconstruct_dminus(const std::vector<EigenvalueEntry>& antiperiodic_eigs,
                                       int truncation_n)
{
    return build_product(antiperiodic_eigs, truncation_n, false);
}

} // namespace mhill
