#include <doctest.h>

#include "mhill/closedform.hpp"
#include "mhill/monodromy.hpp"

#include <cmath>
#include <random>

using namespace mhill;

namespace {

NormalizedPotential free_potential() { return normalize_potential(PotentialSpec{SmoothZero{}, {}}); }

NormalizedPotential constant_potential(double a)
{
    return normalize_potential(PotentialSpec{SmoothConstantDiag{a}, {}});
}

// V3 = cos(2 pi x), V1 = V2 = 0: the coupling-only test series.
NormalizedPotential offdiag_cos_potential()
{
    FourierSeries f;
    f.v3.push_back({1, 1.0, 0.0});
    PotentialSpec s;
    s.smooth = f;
    return normalize_potential(s);
}

// Strip sampling: sqrt(lambda) = u + iv with bounded v keeps the monodromy
// entries at a testable scale.
std::vector<Complex> strip_lambdas(int count, double u_max, double v_max, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> un(0.0, u_max), vn(-v_max, v_max);
    std::vector<Complex> out;
    for (int i = 0; i < count; ++i) {
        const Complex z(un(rng), vn(rng));
        out.push_back(z * z);
    }
    return out;
}

} // namespace

TEST_CASE("free monodromy at the band edge lambda = pi^2")
{
    const StateMatrix m = propagate(free_potential(), Complex(kPi * kPi, 0.0), 1.0);
    CHECK((m.entries + CMat4::Identity()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("free monodromy at lambda = 0")
{
    const StateMatrix m = propagate(free_potential(), Complex(0.0, 0.0), 1.0);
    CMat4 expect = CMat4::Identity();
    expect(0, 2) = 1.0;
    expect(1, 3) = 1.0;
    CHECK((m.entries - expect).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("constant potential: engine equals the per-channel closed form")
{
    const double a = 3.0;
    const NormalizedPotential pot = constant_potential(a);
    const ConstantModel cm(a);
    Propagator prop(pot);
    for (const Complex l : strip_lambdas(40, 20.0, 1.5, 3)) {
        const StateMatrix m = prop.monodromy(l);
        // normalized ordering puts the -a channel first
        CHECK(rel_residual(m.theta()(0, 0), cm.c_minus(1.0, l)) < 1e-12);
        CHECK(rel_residual(m.theta()(1, 1), cm.c_plus(1.0, l)) < 1e-12);
        CHECK(rel_residual(m.phi()(0, 0), cm.s_minus(1.0, l)) < 1e-12);
        CHECK(rel_residual(m.phi()(1, 1), cm.s_plus(1.0, l)) < 1e-12);
        CHECK(rel_residual(m.phi_prime()(0, 0), cm.c_minus(1.0, l)) < 1e-12);
        CHECK(std::abs(m.theta()(0, 1)) < 1e-13);
    }
}

TEST_CASE("kick factors reproduce the comb monodromy")
{
    const double a = 10.0, gamma = 0.5;
    const PotentialSpec spec = parse_potential_spec(
        R"({"smooth":{"builtin":"constant_diag","a":10.0},"delta":[{"x0":0.5,"gamma":0.5}]})");
    Propagator prop(normalize_potential(spec));
    for (const Complex l : strip_lambdas(60, 20.0, 1.5, 13)) {
        const StateMatrix m = prop.monodromy(l);
        Complex mu1 = m.entries.trace() / 4.0;
        Complex tr2 = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                tr2 += m.entries(i, j) * m.entries(j, i);
        const LyapunovData ref = delta_lyapunov(a, gamma, l);
        CHECK(rel_residual(mu1, ref.mu1) < 1e-11);
        CHECK(rel_residual(tr2 / 4.0, ref.mu2) < 1e-11);
    }
}

TEST_CASE("determinant stays at one along the propagation")
{
    std::vector<NormalizedPotential> pots{free_potential(), constant_potential(3.0),
                                          offdiag_cos_potential()};
    for (const auto& pot : pots) {
        Propagator prop(pot);
        for (const Complex l : strip_lambdas(25, 14.0, 1.5, 31)) {
            for (double x : {0.5, 1.0}) {
                const StateMatrix m = prop.at(l, x);
                const Complex det = m.entries.determinant();
                const double scale =
                    std::max(1.0, std::pow(m.entries.cwiseAbs().maxCoeff(), 4));
                CHECK(std::abs(det - 1.0) / scale < 1e-10);
            }
        }
    }
}

TEST_CASE("periodicity: the two-period matrix is the square of the monodromy")
{
    Propagator prop(offdiag_cos_potential());
    for (const Complex l : strip_lambdas(10, 12.0, 1.0, 7)) {
        const CMat4 m1 = prop.monodromy(l).entries;
        const CMat4 m2 = prop.at(l, 2.0).entries;
        CHECK((m2 - m1 * m1).cwiseAbs().maxCoeff() /
                  std::max(1.0, m2.cwiseAbs().maxCoeff()) < 1e-9);
    }
}

TEST_CASE("real lambda, real potential: real monodromy")
{
    Propagator prop(offdiag_cos_potential());
    for (double l : {-7.0, 0.3, 29.0, 141.0}) {
        const StateMatrix m = prop.monodromy(Complex(l, 0.0));
        CHECK(m.entries.imag().cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("series base term and vanishing higher terms for the free operator")
{
    const auto terms = series_terms(free_potential(), Complex(5.0, 1.0), 1.0, 2);
    const Complex l(5.0, 1.0);
    CHECK(rel_residual(terms[0].theta(0, 0), cos_sqrt(l)) < 1e-14);
    CHECK(rel_residual(terms[0].phi(0, 0), sinc_sqrt(l)) < 1e-14);
    CHECK(std::abs(terms[0].theta(0, 1)) == 0.0);
    CHECK(terms[1].theta.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(terms[2].phi.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("first series iterate of the constant potential has the closed form")
{
    const NormalizedPotential pot = constant_potential(3.0);
    const Mat2 v = evaluate_smooth(pot, 0.1); // constant diag(-3, 3)
    for (const Complex l : {Complex(7.0, 0.0), Complex(2.0, 3.0), Complex(1e-4, 0.0)}) {
        const SeriesTerm t = series_term(pot, l, 1.0, 1);
        const Complex factor = (std::abs(l) > 1e-12)
                                   ? (sinc_sqrt(l) - cos_sqrt(l)) / (2.0 * l)
                                   : Complex(1.0 / 6.0, 0.0);
        CHECK(rel_residual(t.phi(0, 0), v(0, 0) * factor) < 1e-9);
        CHECK(rel_residual(t.phi(1, 1), v(1, 1) * factor) < 1e-9);
        CHECK(std::abs(t.phi(1, 0)) < 1e-14);
    }
}

TEST_CASE("series rejects kick terms")
{
    const PotentialSpec spec = parse_potential_spec(
        R"({"smooth":{"builtin":"zero"},"delta":[{"x0":0.5,"gamma":0.5}]})");
    CHECK_THROWS_AS(series_term(normalize_potential(spec), Complex(1.0, 0.0), 1.0, 0),
                    NumericError);
}

TEST_CASE("series bound closed-form values")
{
    CHECK(series_bound(free_potential(), Complex(4.0, 0.0), 1.0, 0) == 0.0);
    CHECK(series_bound(free_potential(), Complex(4.0, 0.0), 1.0, 3) == 0.0);
    // |V|_1 = 1 via a = 1/2; at lambda = 1 and N = -1 the bound is e.
    const NormalizedPotential half = constant_potential(0.5);
    CHECK(half.l1_norm == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(series_bound(half, Complex(1.0, 0.0), 1.0, -1) == doctest::Approx(std::exp(1.0)));
    // strictly decreasing once N + 1 > x kappa
    double prev = series_bound(half, Complex(1.0, 0.0), 1.0, 0);
    for (int n = 1; n <= 6; ++n) {
        const double cur = series_bound(half, Complex(1.0, 0.0), 1.0, n);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("truncated series stays within the majorant and converges to the monodromy")
{
    const NormalizedPotential pot = offdiag_cos_potential();
    Propagator prop(pot);
    const Complex l(4.0, 0.0);
    const StateMatrix m = prop.monodromy(l);

    // pick N with bound below 1e-12 and check the oracle agreement
    int n_oracle = 0;
    while (series_bound(pot, l, 1.0, n_oracle) >= 1e-12 && n_oracle < 40)
        ++n_oracle;
    const auto terms = series_terms(pot, l, 1.0, n_oracle);
    CHECK(series_deviation(m, terms, n_oracle) < 5e-10); // quadrature floor
    for (int n = 0; n <= 3; ++n)
        CHECK(series_deviation(m, terms, n) <= series_bound(pot, l, 1.0, n) * (1.0 + 1e-9));
}

TEST_CASE("trace expansion orders")
{
    const NormalizedPotential pot = constant_potential(3.0);
    const Complex l(17.0, 2.0);
    SUBCASE("order zero is the free trace")
    {
        CHECK(rel_residual(trace_expansion(pot, l, 1, 0), cos_sqrt(l)) < 1e-14);
        CHECK(rel_residual(trace_expansion(pot, l, 2, 0), cos_sqrt(4.0 * l)) < 1e-14);
    }
    SUBCASE("traceless mean: first order adds nothing")
    {
        CHECK(rel_residual(trace_expansion(pot, l, 1, 1), trace_expansion(pot, l, 1, 0)) <
              1e-14);
    }
    SUBCASE("second order matches the explicit double integral for a*J")
    {
        // I_1 = a^2 sin(z)/z, V_(2) = 2 a^2
        const double a = 3.0;
        const Complex expect =
            cos_sqrt(l) + (a * a * sinc_sqrt(l) - a * a * cos_sqrt(l)) / (8.0 * l);
        CHECK(rel_residual(trace_expansion(pot, l, 1, 2), expect) < 1e-9);
    }
    SUBCASE("second order obeys the third-order remainder bound")
    {
        for (const Complex lam : strip_lambdas(15, 15.0, 1.0, 41)) {
            if (std::abs(lam) < 0.5)
                continue;
            for (int m = 1; m <= 2; ++m) {
                const double mm = static_cast<double>(m * m);
                const Complex exact =
                    0.5 * (cos_sqrt((lam - 3.0) * mm) + cos_sqrt((lam + 3.0) * mm));
                const Complex approx = trace_expansion(pot, lam, m, 2);
                const double kappa = pot.l1_norm / std::sqrt(std::max(1.0, std::abs(lam)));
                const double bigA =
                    std::exp(std::abs(std::sqrt(lam).imag()) + kappa);
                const double bound = std::pow(m * kappa, 3) / 6.0 * std::pow(bigA, m);
                CHECK(std::abs(approx - exact) <= bound * (1.0 + 1e-9) + 1e-8);
            }
        }
    }
}
