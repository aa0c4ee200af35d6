#include <doctest.h>

#include "mhill/potential.hpp"

#include <cmath>
#include <random>

using namespace mhill;

TEST_CASE("parsing the documented schema")
{
    SUBCASE("zero builtin")
    {
        const PotentialSpec s = parse_potential_spec(R"({"smooth":{"builtin":"zero"}})");
        CHECK(std::holds_alternative<SmoothZero>(s.smooth));
        CHECK(s.deltas.empty());
    }
    SUBCASE("constant diagonal")
    {
        const PotentialSpec s =
            parse_potential_spec(R"({"smooth":{"builtin":"constant_diag","a":3.0}})");
        CHECK(std::get<SmoothConstantDiag>(s.smooth).a == 3.0);
    }
    SUBCASE("comb shorthand: constant plus one kick")
    {
        const PotentialSpec s = parse_potential_spec(
            R"({"smooth":{"builtin":"constant_diag","a":10.0},"delta":[{"x0":0.5,"gamma":0.5}]})");
        REQUIRE(s.deltas.size() == 1);
        CHECK(s.deltas[0].x0 == 0.5);
        CHECK(s.deltas[0].strength(0, 1) == 0.5);
        CHECK(s.deltas[0].strength(0, 0) == 0.0);
    }
    SUBCASE("general symmetric kick matrix")
    {
        const PotentialSpec s = parse_potential_spec(
            R"({"smooth":{"builtin":"zero"},"delta":[{"x0":0.25,"S":[[1.0,0.5],[0.5,-2.0]]}]})");
        CHECK(s.deltas[0].strength(1, 1) == -2.0);
    }
    SUBCASE("schema violations throw")
    {
        CHECK_THROWS_AS(parse_potential_spec("not json"), SchemaError);
        CHECK_THROWS_AS(parse_potential_spec(R"({"smooth":{"builtin":"nope"}})"), SchemaError);
        CHECK_THROWS_AS(parse_potential_spec(
                            R"({"smooth":{"builtin":"zero"},"delta":[{"x0":1.5,"gamma":1}]})"),
                        SchemaError);
        CHECK_THROWS_AS(parse_potential_spec(
                            R"({"smooth":{"builtin":"zero"},"delta":[{"x0":0.25,"S":[[0,1],[2,0]]}]})"),
                        SchemaError);
        CHECK_THROWS_AS(
            parse_potential_spec(R"({"smooth":{"samples":{"n":3,"V1":[0,0,0],"V2":[0,0,0],"V3":[0,0,0]}}})"),
            SchemaError);
        CHECK_THROWS_AS(parse_potential_spec(R"({"smooth":{"fourier":{"V1":[[0,1.0,2.0]]}}})"),
                        SchemaError);
        CHECK_THROWS_AS(
            parse_potential_spec(
                R"({"smooth":{"builtin":"zero"},"delta":[{"x0":0.5,"gamma":1},{"x0":0.5,"gamma":2}]})"),
            SchemaError);
    }
}

TEST_CASE("normalization of the constant a*J potential")
{
    const PotentialSpec s =
        parse_potential_spec(R"({"smooth":{"builtin":"constant_diag","a":3.0}})");
    const NormalizedPotential p = normalize_potential(s);
    CHECK(p.v10 == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(p.v20 == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(p.c0 == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(p.v1 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(p.v2 == doctest::Approx(18.0).epsilon(1e-14));
    CHECK(p.l1_norm == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(p.offdiag_zero);
    CHECK_FALSE(p.scalar_like);
}

TEST_CASE("normalization of the zero potential")
{
    const NormalizedPotential p = normalize_potential(PotentialSpec{SmoothZero{}, {}});
    CHECK(p.v10 == 0.0);
    CHECK(p.v20 == 0.0);
    CHECK(p.c0 == 0.0);
    CHECK(p.l1_norm == 0.0);
    CHECK(p.scalar_like);
    CHECK_FALSE(p.rotation_applied);
}

TEST_CASE("pure off-diagonal mean rotates by pi/4")
{
    PotentialSpec s;
    FourierSeries f;
    f.v3.push_back({0, 1.0, 0.0});
    s.smooth = f;
    const NormalizedPotential p = normalize_potential(s);
    CHECK(p.v10 == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(p.v20 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.c0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.rotation_applied);
}

TEST_CASE("rotation invariance of the normalized constants")
{
    FourierSeries f;
    f.v1 = {{0, -1.0, 0.0}, {1, 0.4, 0.0}};
    f.v2 = {{0, 1.0, 0.0}, {2, 0.3, 0.0}, {1, 0.0, -0.2}};
    f.v3 = {{1, 0.5, 0.0}, {2, 0.0, 0.25}};
    PotentialSpec base;
    base.smooth = f;
    base.deltas.push_back({0.3, 0.4 * mat_J1()});
    const NormalizedPotential p0 = normalize_potential(base);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int trial = 0; trial < 5; ++trial) {
        const double th = angle(rng);
        Mat2 u;
        u << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        auto rot = [&u](double c1, double c2, double c3, int which) {
            Mat2 m;
            m << c1, c3, c3, c2;
            const Mat2 r = u * m * u.transpose();
            return which == 0 ? r(0, 0) : (which == 1 ? r(1, 1) : r(0, 1));
        };
        // rotate the matrix Fourier coefficients entrywise
        FourierSeries g;
        auto coeff = [&f](const std::vector<FourierEntry>& list, int k, bool sin_part) {
            for (const auto& e : list)
                if (e.k == k)
                    return sin_part ? e.s : e.c;
            (void)f;
            return 0.0;
        };
        for (int k = 0; k <= 2; ++k) {
            for (bool sp : {false, true}) {
                if (k == 0 && sp)
                    continue;
                const double c1 = coeff(f.v1, k, sp), c2 = coeff(f.v2, k, sp),
                             c3 = coeff(f.v3, k, sp);
                if (c1 == 0.0 && c2 == 0.0 && c3 == 0.0)
                    continue;
                FourierEntry e1{k, sp ? 0.0 : rot(c1, c2, c3, 0), sp ? rot(c1, c2, c3, 0) : 0.0};
                FourierEntry e2{k, sp ? 0.0 : rot(c1, c2, c3, 1), sp ? rot(c1, c2, c3, 1) : 0.0};
                FourierEntry e3{k, sp ? 0.0 : rot(c1, c2, c3, 2), sp ? rot(c1, c2, c3, 2) : 0.0};
                g.v1.push_back(e1);
                g.v2.push_back(e2);
                g.v3.push_back(e3);
            }
        }
        PotentialSpec rotated;
        rotated.smooth = g;
        rotated.deltas.push_back({0.3, u * (0.4 * mat_J1()) * u.transpose()});
        const NormalizedPotential p1 = normalize_potential(rotated);
        CHECK(p1.v10 == doctest::Approx(p0.v10).epsilon(1e-12));
        CHECK(p1.v20 == doctest::Approx(p0.v20).epsilon(1e-12));
        CHECK(p1.c0 == doctest::Approx(p0.c0).epsilon(1e-12));
        CHECK(p1.v1 == doctest::Approx(p0.v1).epsilon(1e-12));
        CHECK(p1.v2 == doctest::Approx(p0.v2).epsilon(1e-12));
    }
}

TEST_CASE("rotated smooth part has zero off-diagonal mean")
{
    PotentialSpec s;
    s.smooth = SmoothBump{10.0, 0.5, 0.1};
    const NormalizedPotential p = normalize_potential(s);
    const int n = 40000;
    double offdiag = 0.0;
    for (int i = 0; i < n; ++i)
        offdiag += evaluate_smooth(p, (i + 0.5) / n)(0, 1) / n;
    CHECK(std::abs(offdiag) < 1e-10);
}

TEST_CASE("l1 norm adds smooth and kick contributions and vanishes only at zero")
{
    PotentialSpec s = parse_potential_spec(
        R"({"smooth":{"builtin":"constant_diag","a":10.0},"delta":[{"x0":0.5,"gamma":0.5}]})");
    const NormalizedPotential p = normalize_potential(s);
    // entrywise norm in the rotated basis: both parts pick up the tilt 2*theta
    const double th = 0.5 * std::atan2(1.0, 20.0);
    const double tilt = std::cos(2.0 * th) + std::abs(std::sin(2.0 * th));
    CHECK(p.l1_norm == doctest::Approx(21.0 * tilt).epsilon(1e-10));
    CHECK(p.l1_norm > 0.0);
}

TEST_CASE("trig series |integral| agrees with a dense Riemann sum")
{
    std::vector<std::vector<FourierEntry>> cases = {
        {{0, 0.0, 0.0}, {1, 1.0, 0.0}},               // |cos|
        {{0, 2.0, 0.0}, {1, 1.0, 0.0}},               // no sign change
        {{0, 0.5, 0.0}, {1, 1.0, 0.0}},               // two crossings
        {{0, 0.1, 0.0}, {1, 0.7, -0.4}, {3, 0.0, 0.3}},
        {},                                            // identically zero
    };
    for (const auto& entries : cases) {
        const double exact = trig_abs_integral(entries);
        const int n = 200000;
        double riemann = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = (i + 0.5) / n;
            double v = 0.0;
            for (const auto& e : entries)
                v += e.c * std::cos(2.0 * kPi * e.k * x) + e.s * std::sin(2.0 * kPi * e.k * x);
            riemann += std::abs(v) / n;
        }
        CHECK(exact == doctest::Approx(riemann).epsilon(1e-6));
    }
    CHECK(trig_abs_integral({{1, 1.0, 0.0}}) == doctest::Approx(2.0 / kPi).epsilon(1e-10));
}

TEST_CASE("evaluate_smooth on builtins")
{
    const NormalizedPotential zero = normalize_potential(PotentialSpec{SmoothZero{}, {}});
    CHECK(evaluate_smooth(zero, 0.77).cwiseAbs().maxCoeff() == 0.0);

    const NormalizedPotential cd = normalize_potential(
        parse_potential_spec(R"({"smooth":{"builtin":"constant_diag","a":3.0}})"));
    const Mat2 v = evaluate_smooth(cd, 0.25);
    CHECK(v(0, 0) == doctest::Approx(-3.0));
    CHECK(v(1, 1) == doctest::Approx(3.0));
    CHECK(v(0, 1) == doctest::Approx(0.0));

    // smoothed-delta builtin: undoing the mean rotation recovers the raw
    // value a*J + gamma * v_nu(1/2) * J1 exactly
    PotentialSpec s;
    s.smooth = SmoothBump{10.0, 0.5, 0.1};
    const NormalizedPotential p = normalize_potential(s);
    const Mat2 w = evaluate_smooth(p, 0.5);
    const Mat2 raw = p.rotation.transpose() * w * p.rotation;
    CHECK(raw(0, 0) == doctest::Approx(10.0).epsilon(1e-13));
    CHECK(raw(1, 1) == doctest::Approx(-10.0).epsilon(1e-13));
    CHECK(raw(0, 1) == doctest::Approx(0.5 * bump_value(0.1, 0.5)).epsilon(1e-13));
}

TEST_CASE("sample grids keep midpoint values")
{
    const PotentialSpec s = parse_potential_spec(
        R"({"smooth":{"samples":{"n":4,"V1":[1,2,3,4],"V2":[0,0,0,0],"V3":[0,0,0,0]}}})");
    const NormalizedPotential p = normalize_potential(s);
    // mean (2.5, 0) sorts ascending: channels swap
    CHECK(p.v10 == doctest::Approx(0.0));
    CHECK(p.v20 == doctest::Approx(2.5));
    CHECK(evaluate_smooth(p, 0.1)(1, 1) == doctest::Approx(1.0));
    CHECK(evaluate_smooth(p, 0.9)(1, 1) == doctest::Approx(4.0));
}
