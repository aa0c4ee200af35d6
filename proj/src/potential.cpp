#include "mhill/potential.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace mhill {
namespace {

using nlohmann::json;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double bump_normalizer()
{
    // 1 / int_{-1}^{1} exp(-1/(1-t^2)) dt; the integrand is flat to all orders
    // at the endpoints, so the trapezoid rule converges superalgebraically.
    static const double c = [] {
        const int n = 4000;
        double sum = 0.0;
        for (int i = 1; i < n; ++i) {
            const double t = -1.0 + 2.0 * i / n;
            sum += std::exp(-1.0 / (1.0 - t * t));
        }
        return 1.0 / (sum * 2.0 / n);
    }();
    return c;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol)
{
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

Mat2 rotate(const Mat2& u, const Mat2& v) { return u * v * u.transpose(); }

double entry_l1(const Mat2& m)
{
    return std::abs(m(0, 0)) + std::abs(m(1, 1)) + 2.0 * std::abs(m(0, 1));
}

// ---- parsing ----------------------------------------------------------------

Mat2 parse_sym_matrix(const json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 ||
        !j[1].is_array() || j[1].size() != 2)
        throw SchemaError("expected a 2x2 matrix [[s11,s12],[s12,s22]]");
    const double s11 = j[0][0].get<double>(), s12 = j[0][1].get<double>();
    const double s21 = j[1][0].get<double>(), s22 = j[1][1].get<double>();
    if (s12 != s21)
        throw SchemaError("matrix entries are not symmetric");
    return (Mat2() << s11, s12, s12, s22).finished();
}

std::vector<FourierEntry> parse_fourier_entry(const json& j, const char* name)
{
    std::vector<FourierEntry> out;
    if (j.is_null())
        return out;
    if (!j.is_array())
        throw SchemaError(std::string("fourier entry ") + name + " must be a list of [k,ck,sk]");
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != 3)
            throw SchemaError(std::string("fourier term in ") + name + " must be [k,ck,sk]");
        FourierEntry e;
        if (!row[0].is_number_integer() || row[0].get<int>() < 0)
            throw SchemaError("fourier harmonic index must be a nonnegative integer");
        e.k = row[0].get<int>();
        e.c = row[1].get<double>();
        e.s = row[2].get<double>();
        if (e.k == 0 && e.s != 0.0)
            throw SchemaError("k = 0 has no sine term");
        out.push_back(e);
    }
    return out;
}

SmoothPart parse_smooth(const json& j)
{
    if (!j.is_object())
        throw SchemaError("\"smooth\" must be an object");
    if (j.contains("builtin")) {
        const std::string name = j.at("builtin").get<std::string>();
        if (name == "zero")
            return SmoothZero{};
        if (name == "constant_diag")
            return SmoothConstantDiag{j.at("a").get<double>()};
        if (name == "smoothed_delta") {
            SmoothBump b{j.at("a").get<double>(), j.at("gamma").get<double>(),
                         j.at("nu").get<double>()};
            if (!(b.nu > 0.0 && b.nu < 0.5))
                throw SchemaError("smoothed_delta: nu must lie in (0, 1/2)");
            return b;
        }
        throw SchemaError("unknown builtin \"" + name + "\"");
    }
    if (j.contains("fourier")) {
        const auto& f = j.at("fourier");
        FourierSeries s;
        s.v1 = parse_fourier_entry(f.value("V1", json()), "V1");
        s.v2 = parse_fourier_entry(f.value("V2", json()), "V2");
        s.v3 = parse_fourier_entry(f.value("V3", json()), "V3");
        return s;
    }
    if (j.contains("samples")) {
        const auto& g = j.at("samples");
        SampleGrid s;
        s.n = g.at("n").get<int>();
        if (!is_power_of_two(s.n))
            throw SchemaError("samples: n must be a power of two");
        s.v1 = g.at("V1").get<std::vector<double>>();
        s.v2 = g.at("V2").get<std::vector<double>>();
        s.v3 = g.at("V3").get<std::vector<double>>();
        if (static_cast<int>(s.v1.size()) != s.n || static_cast<int>(s.v2.size()) != s.n ||
            static_cast<int>(s.v3.size()) != s.n)
            throw SchemaError("samples: V1, V2, V3 must each have n values");
        return s;
    }
    throw SchemaError("\"smooth\" must name a builtin, a fourier series or a sample grid");
}

// ---- representations in the rotated basis -----------------------------------

struct MeanAndRep {
    Mat2 smooth_mean;
    RotSmooth rep; // still in the original basis until rotated
};

MeanAndRep canonical_rep(const SmoothPart& smooth)
{
    MeanAndRep out{Mat2::Zero(), RotConst{Mat2::Zero()}};
    if (std::holds_alternative<SmoothZero>(smooth)) {
        return out;
    }
    if (const auto* c = std::get_if<SmoothConstantDiag>(&smooth)) {
        const Mat2 v = c->a * mat_J();
        return {v, RotConst{v}};
    }
    if (const auto* b = std::get_if<SmoothBump>(&smooth)) {
        RotBump r{b->a * mat_J(), b->gamma * mat_J1(), b->nu};
        return {r.base + r.bump, r}; // the bump has unit integral
    }
    if (const auto* f = std::get_if<FourierSeries>(&smooth)) {
        std::map<int, std::pair<Mat2, Mat2>> terms; // k -> (cos, sin) coefficients
        auto add = [&terms](const std::vector<FourierEntry>& list, int i, int j) {
            for (const auto& e : list) {
                auto& t = terms.try_emplace(e.k, Mat2::Zero(), Mat2::Zero()).first->second;
                t.first(i, j) += e.c;
                t.first(j, i) = t.first(i, j);
                t.second(i, j) += e.s;
                t.second(j, i) = t.second(i, j);
            }
        };
        add(f->v1, 0, 0);
        add(f->v2, 1, 1);
        add(f->v3, 0, 1);
        Mat2 mean = Mat2::Zero();
        if (auto it = terms.find(0); it != terms.end())
            mean = it->second.first;
        if (terms.empty() || (terms.size() == 1 && terms.count(0)))
            return {mean, RotConst{mean}};
        RotFourier r;
        for (const auto& [k, cs] : terms)
            r.terms.push_back({k, cs.first, cs.second});
        return {mean, r};
    }
    const auto& g = std::get<SampleGrid>(smooth);
    RotSamples r;
    Mat2 mean = Mat2::Zero();
    for (int i = 0; i < g.n; ++i) {
        Mat2 v;
        v << g.v1[i], g.v3[i], g.v3[i], g.v2[i];
        mean += v / g.n;
        r.value.push_back(v);
    }
    return {mean, r};
}

RotSmooth rotate_rep(const Mat2& u, const RotSmooth& rep)
{
    if (const auto* c = std::get_if<RotConst>(&rep))
        return RotConst{rotate(u, c->value)};
    if (const auto* f = std::get_if<RotFourier>(&rep)) {
        RotFourier out;
        for (const auto& t : f->terms)
            out.terms.push_back({t.k, rotate(u, t.c), rotate(u, t.s)});
        return out;
    }
    if (const auto* s = std::get_if<RotSamples>(&rep)) {
        RotSamples out;
        for (const auto& v : s->value)
            out.value.push_back(rotate(u, v));
        return out;
    }
    const auto& b = std::get<RotBump>(rep);
    return RotBump{rotate(u, b.base), rotate(u, b.bump), b.nu};
}

// Ascending eigendecomposition of a symmetric 2x2 mean; ties keep the identity.
Mat2 sorting_rotation(const Mat2& mean)
{
    const double a = mean(0, 0), c = mean(1, 1), b = mean(0, 1);
    const double r = std::hypot(0.5 * (a - c), b);
    if (r == 0.0)
        return Mat2::Identity();
    const double w2 = 0.5 * (a + c) + r; // larger eigenvalue
    Eigen::Vector2d v2;
    if (b != 0.0)
        v2 << b, w2 - a;
    else
        v2 = (a > c) ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 1);
    v2.normalize();
    Eigen::Vector2d v1(v2.y(), -v2.x()); // det +1
    Mat2 q; // columns are eigenvectors; returned rotation is U = Q^T
    q.col(0) = v1;
    q.col(1) = v2;
    return q.transpose();
}

double rep_l1_norm(const RotSmooth& rep)
{
    if (const auto* c = std::get_if<RotConst>(&rep))
        return entry_l1(c->value);
    if (const auto* s = std::get_if<RotSamples>(&rep)) {
        double sum = 0.0;
        for (const auto& v : s->value)
            sum += entry_l1(v);
        return sum / static_cast<double>(s->value.size());
    }
    if (const auto* f = std::get_if<RotFourier>(&rep)) {
        double sum = 0.0;
        const double weight[3] = {1.0, 1.0, 2.0};
        const int idx[3][2] = {{0, 0}, {1, 1}, {0, 1}};
        for (int e = 0; e < 3; ++e) {
            std::vector<FourierEntry> scal;
            for (const auto& t : f->terms)
                scal.push_back({t.k, t.c(idx[e][0], idx[e][1]), t.s(idx[e][0], idx[e][1])});
            sum += weight[e] * trig_abs_integral(scal);
        }
        return sum;
    }
    const auto& b = std::get<RotBump>(rep);
    double sum = 0.0;
    const double weight[3] = {1.0, 1.0, 2.0};
    const int idx[3][2] = {{0, 0}, {1, 1}, {0, 1}};
    const double s0 = 0.5 - b.nu, s1 = 0.5 + b.nu;
    for (int e = 0; e < 3; ++e) {
        const double base = b.base(idx[e][0], idx[e][1]);
        const double coef = b.bump(idx[e][0], idx[e][1]);
        double part = std::abs(base) * (1.0 - (s1 - s0));
        part += integrate([&](double x) { return std::abs(base + coef * bump_value(b.nu, x)); },
                          s0, s1, 1e-13);
        sum += weight[e] * part;
    }
    return sum;
}

bool rep_offdiag_zero(const RotSmooth& rep, double tol)
{
    auto off = [tol](const Mat2& m) { return std::abs(m(0, 1)) <= tol; };
    if (const auto* c = std::get_if<RotConst>(&rep))
        return off(c->value);
    if (const auto* f = std::get_if<RotFourier>(&rep))
        return std::all_of(f->terms.begin(), f->terms.end(),
                           [&](const auto& t) { return off(t.c) && off(t.s); });
    if (const auto* s = std::get_if<RotSamples>(&rep))
        return std::all_of(s->value.begin(), s->value.end(), off);
    const auto& b = std::get<RotBump>(rep);
    return off(b.base) && off(b.bump);
}

bool rep_channels_equal(const RotSmooth& rep, double tol)
{
    auto eq = [tol](const Mat2& m) { return std::abs(m(0, 0) - m(1, 1)) <= tol; };
    if (const auto* c = std::get_if<RotConst>(&rep))
        return eq(c->value);
    if (const auto* f = std::get_if<RotFourier>(&rep))
        return std::all_of(f->terms.begin(), f->terms.end(),
                           [&](const auto& t) { return eq(t.c) && eq(t.s); });
    if (const auto* s = std::get_if<RotSamples>(&rep))
        return std::all_of(s->value.begin(), s->value.end(), eq);
    const auto& b = std::get<RotBump>(rep);
    return eq(b.base) && eq(b.bump);
}

double rep_scale(const RotSmooth& rep)
{
    double m = 0.0;
    auto upd = [&m](const Mat2& v) { m = std::max(m, v.cwiseAbs().maxCoeff()); };
    if (const auto* c = std::get_if<RotConst>(&rep))
        upd(c->value);
    else if (const auto* f = std::get_if<RotFourier>(&rep))
        for (const auto& t : f->terms) {
            upd(t.c);
            upd(t.s);
        }
    else if (const auto* s = std::get_if<RotSamples>(&rep))
        for (const auto& v : s->value)
            upd(v);
    else {
        const auto& b = std::get<RotBump>(rep);
        upd(b.base);
        upd(b.bump);
    }
    return m;
}

} // namespace

double bump_value(double nu, double x)
{
    const double t = (x - 0.5) / nu;
    if (std::abs(t) >= 1.0)
        return 0.0;
    return bump_normalizer() * std::exp(-1.0 / (1.0 - t * t)) / nu;
}

double trig_abs_integral(const std::vector<FourierEntry>& entries)
{
    std::map<int, std::pair<double, double>> coef; // k -> (c, s)
    for (const auto& e : entries) {
        auto& cs = coef[e.k];
        cs.first += e.c;
        cs.second += e.s;
    }
    int kmax = 0;
    double scale = 0.0;
    for (const auto& [k, cs] : coef) {
        if (std::abs(cs.first) + std::abs(cs.second) > 0.0)
            kmax = std::max(kmax, k);
        scale = std::max({scale, std::abs(cs.first), std::abs(cs.second)});
    }
    if (scale == 0.0)
        return 0.0;

    auto antideriv = [&coef](double x) {
        double v = 0.0;
        for (const auto& [k, cs] : coef) {
            if (k == 0)
                v += cs.first * x;
            else
                v += (cs.first * std::sin(2.0 * kPi * k * x) -
                      cs.second * std::cos(2.0 * kPi * k * x)) /
                     (2.0 * kPi * k);
        }
        return v;
    };
    auto value = [&coef](double x) {
        double v = 0.0;
        for (const auto& [k, cs] : coef)
            v += cs.first * std::cos(2.0 * kPi * k * x) + cs.second * std::sin(2.0 * kPi * k * x);
        return v;
    };

    // Zeros of the polynomial sum_k alpha_k u^(K+k) + conj(alpha_k) u^(K-k) on
    // the unit circle u = exp(2 pi i x) are the sign changes of the series.
    std::vector<double> cuts{0.0, 1.0};
    if (kmax > 0) {
        std::vector<Complex> p(2 * kmax + 1, Complex(0.0, 0.0));
        for (const auto& [k, cs] : coef) {
            if (k == 0) {
                p[kmax] += cs.first;
            } else {
                const Complex alpha = 0.5 * Complex(cs.first, -cs.second);
                p[kmax + k] += alpha;
                p[kmax - k] += std::conj(alpha);
            }
        }
        while (p.size() > 1 && std::abs(p.back()) < 1e-14 * scale)
            p.pop_back();
        const int deg = static_cast<int>(p.size()) - 1;
        if (deg >= 1) {
            Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
            for (int i = 1; i < deg; ++i)
                companion(i, i - 1) = 1.0;
            for (int i = 0; i < deg; ++i)
                companion(i, deg - 1) = -p[i] / p[deg];
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);
            for (int i = 0; i < deg; ++i) {
                const Complex u = es.eigenvalues()(i);
                if (std::abs(std::abs(u) - 1.0) < 1e-7) {
                    double x = std::arg(u) / (2.0 * kPi);
                    if (x < 0.0)
                        x += 1.0;
                    cuts.push_back(std::min(std::max(x, 0.0), 1.0));
                }
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-11; }),
               cuts.end());

    double total = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b - a < 1e-14)
            continue;
        const double sign = value(0.5 * (a + b)) >= 0.0 ? 1.0 : -1.0;
        total += sign * (antideriv(b) - antideriv(a));
    }
    return std::abs(total);
}

PotentialSpec parse_potential_spec(const std::string& json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    try {
        if (!j.is_object() || !j.contains("smooth"))
            throw SchemaError("potential document must contain \"smooth\"");
        PotentialSpec spec;
        spec.smooth = parse_smooth(j.at("smooth"));
        if (j.contains("delta")) {
            if (!j.at("delta").is_array())
                throw SchemaError("\"delta\" must be a list");
            for (const auto& d : j.at("delta")) {
                DeltaTerm t;
                t.x0 = d.at("x0").get<double>();
                if (!(t.x0 >= 0.0 && t.x0 < 1.0))
                    throw SchemaError("delta location must lie in [0,1)");
                if (d.contains("S"))
                    t.strength = parse_sym_matrix(d.at("S"));
                else
                    t.strength = d.at("gamma").get<double>() * mat_J1();
                spec.deltas.push_back(t);
            }
            std::sort(spec.deltas.begin(), spec.deltas.end(),
                      [](const DeltaTerm& a, const DeltaTerm& b) { return a.x0 < b.x0; });
            for (size_t i = 0; i + 1 < spec.deltas.size(); ++i)
                if (spec.deltas[i].x0 == spec.deltas[i + 1].x0)
                    throw SchemaError("delta locations must be distinct");
        }
        return spec;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed potential document: ") + e.what());
    }
}

PotentialSpec parse_potential_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw SchemaError("cannot open potential file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_potential_spec(buf.str());
}

NormalizedPotential normalize_potential(const PotentialSpec& spec)
{
    MeanAndRep mr = canonical_rep(spec.smooth);
    Mat2 mean = mr.smooth_mean;
    for (const auto& d : spec.deltas)
        mean += d.strength;

    const Mat2 u = sorting_rotation(mean);
    const Mat2 mean_rot = rotate(u, mean);
    if (std::abs(mean_rot(0, 1)) > 1e-12 * std::max(1.0, mean.cwiseAbs().maxCoeff()))
        throw NumericError("mean-matrix diagonalization failed");

    NormalizedPotential out;
    out.rotation = u;
    out.rotation_applied = (u - Mat2::Identity()).cwiseAbs().maxCoeff() > 1e-15;
    out.smooth = rotate_rep(u, mr.rep);
    for (const auto& d : spec.deltas)
        out.deltas.push_back({d.x0, rotate(u, d.strength)});

    out.v10 = mean_rot(0, 0);
    out.v20 = mean_rot(1, 1);
    if (out.v10 > out.v20)
        std::swap(out.v10, out.v20); // guards rounding at near-ties
    out.c0 = 0.5 * (out.v20 - out.v10);
    out.v1 = out.v10 + out.v20;
    out.v2 = out.v10 * out.v10 + out.v20 * out.v20;

    out.l1_norm = rep_l1_norm(out.smooth);
    for (const auto& d : out.deltas)
        out.l1_norm += entry_l1(d.strength);

    double tol = 1e-13 * std::max(1.0, rep_scale(out.smooth));
    bool deltas_diag = true, deltas_equal = true;
    for (const auto& d : out.deltas) {
        deltas_diag = deltas_diag && std::abs(d.strength(0, 1)) <= tol;
        deltas_equal = deltas_equal && std::abs(d.strength(0, 0) - d.strength(1, 1)) <= tol;
    }
    out.offdiag_zero = rep_offdiag_zero(out.smooth, tol) && deltas_diag;
    out.scalar_like = out.offdiag_zero && deltas_equal && rep_channels_equal(out.smooth, tol);
    return out;
}

Mat2 evaluate_smooth(const NormalizedPotential& pot, double x)
{
    if (const auto* c = std::get_if<RotConst>(&pot.smooth))
        return c->value;
    if (const auto* f = std::get_if<RotFourier>(&pot.smooth)) {
        Mat2 v = Mat2::Zero();
        for (const auto& t : f->terms)
            v += t.c * std::cos(2.0 * kPi * t.k * x) + t.s * std::sin(2.0 * kPi * t.k * x);
        return v;
    }
    if (const auto* s = std::get_if<RotSamples>(&pot.smooth)) {
        const int n = static_cast<int>(s->value.size());
        int i = static_cast<int>(std::floor(x * n));
        i = std::min(std::max(i, 0), n - 1);
        return s->value[static_cast<size_t>(i)];
    }
    const auto& b = std::get<RotBump>(pot.smooth);
    return b.base + bump_value(b.nu, x) * b.bump;
}

} // namespace mhill
