#include <doctest.h>

#include "mhill/closedform.hpp"
#include "mhill/spectrum.hpp"

#include <cmath>

using namespace mhill;

namespace {

NormalizedPotential free_pot() { return normalize_potential(PotentialSpec{SmoothZero{}, {}}); }

NormalizedPotential const_pot(double a)
{
    return normalize_potential(PotentialSpec{SmoothConstantDiag{a}, {}});
}

NormalizedPotential comb_pot(double a, double gamma)
{
    PotentialSpec s;
    s.smooth = SmoothConstantDiag{a};
    s.deltas.push_back({0.5, gamma * mat_J1()});
    return normalize_potential(s);
}

bool has_value(const std::vector<EigenvalueEntry>& list, double x, double tol, int mult)
{
    for (const auto& e : list)
        if (std::abs(e.lambda - x) <= tol && e.multiplicity == mult)
            return true;
    return false;
}

} // namespace

TEST_CASE("free operator: one band, no gaps")
{
    const SpectralReport r = scan_bands(free_pot(), -1.0, 100.0);
    REQUIRE(r.bands.size() == 1);
    CHECK(r.bands[0].lo == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(r.bands[0].hi == doctest::Approx(100.0));
    REQUIRE(r.gaps.size() == 1); // the window lead-in below the spectrum
    CHECK(r.gaps[0].hi == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("constant potential covers [-a, infinity) without gaps")
{
    const SpectralReport r = scan_bands(const_pot(3.0), -4.0, 60.0);
    REQUIRE(r.bands.size() == 1);
    CHECK(r.bands[0].lo == doctest::Approx(-3.0).epsilon(1e-8));
    CHECK(r.bands[0].hi == doctest::Approx(60.0));
    CHECK(r.bands[0].branch == 3); // both branches contribute
}

TEST_CASE("comb potential opens classified gaps")
{
    const NormalizedPotential pot = comb_pot(10.0, 0.5);
    // gaps at the stability edges are O(gamma^2) narrow: scan densely; the
    // window reaches below zero to cover the one-channel region
    ScanOptions opt;
    opt.grid_density = 1200.0;
    SpectralReport r = scan_bands(pot, -1.0, 150.0, opt);
    CHECK(r.bands.size() >= 3);
    r.periodic_eigs = periodic_eigenvalues(pot, -40.0, 160.0, opt);
    r.antiperiodic_eigs = antiperiodic_eigenvalues(pot, -40.0, 160.0, opt);
    for (const auto& e : real_resonances(pot, -40.0, 160.0, opt))
        r.resonances.push_back({Complex(e.lambda, 0.0), e.multiplicity, true});
    classify_gaps(r);

    int stable = 0, resonance = 0;
    for (const auto& g : r.gaps) {
        if (g.kind == GapKind::Stable)
            ++stable;
        if (g.kind == GapKind::Resonance)
            ++resonance;
        if (g.lo_origin != "window" && g.hi_origin != "window")
            CHECK_FALSE(g.flagged);
    }
    CHECK(stable >= 1);
    CHECK(resonance >= 1);

    // every interior band edge appears among the eigenvalues or resonances
    std::vector<double> markers;
    for (const auto& e : r.periodic_eigs)
        markers.push_back(e.lambda);
    for (const auto& e : r.antiperiodic_eigs)
        markers.push_back(e.lambda);
    for (const auto& z : r.resonances)
        markers.push_back(z.lambda.real());
    for (const auto& b : r.bands) {
        for (double edge : {b.lo, b.hi}) {
            if (std::abs(edge + 1.0) < 1e-9 || std::abs(edge - 150.0) < 1e-9)
                continue;
            double best = 1e9;
            for (double m : markers)
                best = std::min(best, std::abs(m - edge));
            CHECK(best < 1e-6 * std::max(1.0, std::abs(edge)));
        }
    }
}

TEST_CASE("free periodic eigenvalues: (2 pi n)^2 with multiplicity four")
{
    const auto eigs = periodic_eigenvalues(free_pot(), -1.0, 200.0);
    CHECK(has_value(eigs, 0.0, 1e-6, 2));
    CHECK(has_value(eigs, 4.0 * kPi * kPi, 1e-6, 4));
    CHECK(has_value(eigs, 16.0 * kPi * kPi, 1e-6, 4));
    int total = 0;
    for (const auto& e : eigs)
        total += e.multiplicity;
    CHECK(total == 10);
}

TEST_CASE("free anti-periodic eigenvalues: odd clusters of four")
{
    const auto eigs = antiperiodic_eigenvalues(free_pot(), -1.0, 200.0);
    CHECK(has_value(eigs, kPi * kPi, 1e-6, 4));
    CHECK(has_value(eigs, 9.0 * kPi * kPi, 1e-6, 4));
    int total = 0;
    for (const auto& e : eigs)
        total += e.multiplicity;
    CHECK(total == 8);
}

TEST_CASE("constant potential: simple lowest pair, double cluster zeros")
{
    const auto eigs = periodic_eigenvalues(const_pot(3.0), -5.0, 60.0);
    CHECK(has_value(eigs, -3.0, 1e-7, 1));
    CHECK(has_value(eigs, 3.0, 1e-7, 1));
    CHECK(has_value(eigs, 4.0 * kPi * kPi - 3.0, 1e-6, 2));
    CHECK(has_value(eigs, 4.0 * kPi * kPi + 3.0, 1e-6, 2));
}

TEST_CASE("real resonances of the constant model are the double points")
{
    const auto res = real_resonances(const_pot(3.0), 0.0, 100.0);
    const auto table = constant_resonances(3.0, 3);
    REQUIRE(res.size() == 3);
    for (int n = 0; n < 3; ++n) {
        CHECK(res[static_cast<size_t>(n)].lambda ==
              doctest::Approx(table.z[static_cast<size_t>(n)]).epsilon(1e-7));
        CHECK(res[static_cast<size_t>(n)].multiplicity == 2);
    }
}

TEST_CASE("comb potential splits the double resonances into simple pairs")
{
    const auto res = real_resonances(comb_pot(3.0, 0.4), 0.0, 50.0);
    const auto table = constant_resonances(3.0, 2);
    REQUIRE(res.size() == 4);
    CHECK(res[0].lambda < table.z[0]);
    CHECK(res[1].lambda > table.z[0]);
    CHECK(res[2].lambda < table.z[1]);
    CHECK(res[3].lambda > table.z[1]);
    for (const auto& e : res)
        CHECK(e.multiplicity == 1);
    // agreement with the closed-form Newton route
    const ResonancePair p = delta_resonance_split(3.0, 0.4, 1);
    CHECK(res[0].lambda == doctest::Approx(p.lower.real()).epsilon(1e-8));
    CHECK(res[1].lambda == doctest::Approx(p.upper.real()).epsilon(1e-8));
}

TEST_CASE("complex resonances: one conjugate pair for a = 25")
{
    const NormalizedPotential pot = comb_pot(25.0, 0.2);
    const auto res = complex_resonances(pot, Complex(0.0, -10.0), Complex(120.0, 10.0));
    int complex_pairs = 0, reals = 0;
    for (const auto& e : res) {
        if (e.real)
            ++reals;
        else if (e.lambda.imag() > 0.0)
            ++complex_pairs;
    }
    CHECK(complex_pairs == 1);
    CHECK(reals == 4); // z_2 and z_3 pairs
    // conjugate symmetry
    for (const auto& e : res)
        if (!e.real) {
            bool found = false;
            for (const auto& other : res)
                found = found || std::abs(other.lambda - std::conj(e.lambda)) < 1e-9;
            CHECK(found);
        }
    // against the closed-form split
    const ResonancePair p = delta_resonance_split(25.0, 0.2, 1);
    bool matched = false;
    for (const auto& e : res)
        matched = matched || std::abs(e.lambda - p.upper) < 1e-7;
    CHECK(matched);
}

TEST_CASE("counting: free operator discriminant zeros at desk scale")
{
    Propagator prop(free_pot());
    const int n_disc = 2;
    const double r_plus = 4.0 * kPi * kPi * (n_disc + 0.5) * (n_disc + 0.5);
    const auto cp = count_zeros(prop, SpectralFunction::DPlus,
                                Contour::circle(Complex(0.0, 0.0), r_plus));
    CHECK(cp.count == 4 * n_disc + 2);
    CHECK(cp.winding_residual < 0.05);
    const double r_minus = 4.0 * kPi * kPi * n_disc * n_disc;
    const auto cm = count_zeros(prop, SpectralFunction::DMinus,
                                Contour::circle(Complex(0.0, 0.0), r_minus));
    CHECK(cm.count == 4 * n_disc);
    CHECK_THROWS_AS(count_zeros(prop, SpectralFunction::Rho,
                                Contour::circle(Complex(0.0, 0.0), 10.0)),
                    NumericError);
}

TEST_CASE("counting: rho of the constant model and additivity over a partition")
{
    Propagator prop(const_pot(3.0));
    const int n_disc = 3;
    const double r = kPi * kPi * (n_disc + 0.5) * (n_disc + 0.5);
    const auto c = count_zeros(prop, SpectralFunction::Rho,
                               Contour::circle(Complex(0.0, 0.0), r));
    CHECK(c.count == 2 * n_disc);

    const auto whole = count_zeros(prop, SpectralFunction::Rho,
                                   Contour::rect(Complex(5.0, -3.0), Complex(95.0, 3.0)));
    const auto left = count_zeros(prop, SpectralFunction::Rho,
                                  Contour::rect(Complex(5.0, -3.0), Complex(30.0, 3.0)));
    const auto right = count_zeros(prop, SpectralFunction::Rho,
                                   Contour::rect(Complex(30.0, -3.0), Complex(95.0, 3.0)));
    CHECK(whole.count == left.count + right.count);
    CHECK(whole.count == 6); // z_1, z_2, z_3 double each
}

TEST_CASE("cluster residuals vanish identically for the constant model")
{
    const ResidualReport rep = asymptotic_residuals(const_pot(3.0), 6);
    REQUIRE(rep.clusters.size() == 6);
    for (const auto& c : rep.clusters) {
        CHECK_FALSE(c.pairing_ambiguous);
        const double loc_tol = 1e-7 * (kPi * c.n) * (kPi * c.n) + 1e-7;
        for (double r : c.eig_residual)
            CHECK(std::abs(r) < loc_tol);
        const double pn = kPi * c.n;
        const double expect = 9.0 / (4.0 * pn * pn);
        for (double r : c.res_residual)
            CHECK(r == doctest::Approx(expect).epsilon(1e-4));
    }
}

TEST_CASE("enumeration by cluster matches the free spectrum")
{
    const auto eigs = enumerate_eigenvalues_to_cluster(free_pot(), true, 2);
    int total = 0;
    for (const auto& e : eigs)
        total += e.multiplicity;
    CHECK(total == 10);
    CHECK(has_value(eigs, 0.0, 1e-6, 2));
    CHECK(has_value(eigs, 4.0 * kPi * kPi, 1e-6, 4));
    const auto anti = enumerate_eigenvalues_to_cluster(free_pot(), false, 2);
    total = 0;
    for (const auto& e : anti)
        total += e.multiplicity;
    CHECK(total == 8);
}

TEST_CASE("reconstruction with exact free eigenvalues reproduces the discriminants")
{
    std::vector<EigenvalueEntry> periodic{{0.0, 2, true}};
    std::vector<EigenvalueEntry> anti;
    const int trunc = 30;
    for (int n = 1; n <= trunc; ++n) {
        periodic.push_back({4.0 * kPi * kPi * n * n, 4, true});
        anti.push_back({kPi * kPi * (2 * n - 1) * (2 * n - 1), 4, true});
    }
    const DiscriminantProduct dp = reconstruct_dplus(periodic, trunc);
    const DiscriminantProduct dm = reconstruct_dminus(anti, trunc);
    for (double l : {1.3, 7.0, 26.0, 49.5}) {
        const double s = std::sin(0.5 * std::sqrt(l));
        const double c = std::cos(0.5 * std::sqrt(l));
        CHECK(dp(Complex(l, 0.0)).real() ==
              doctest::Approx(4.0 * s * s * s * s).epsilon(1e-12));
        CHECK(dm(Complex(l, 0.0)).real() ==
              doctest::Approx(4.0 * c * c * c * c).epsilon(1e-12));
    }
}

TEST_CASE("reconstruction from engine eigenvalues recovers the constant model")
{
    const NormalizedPotential pot = const_pot(3.0);
    const int trunc = 14;
    const auto periodic = enumerate_eigenvalues_to_cluster(pot, true, trunc);
    const auto anti = enumerate_eigenvalues_to_cluster(pot, false, trunc);
    const DiscriminantProduct dp = reconstruct_dplus(periodic, trunc);
    const DiscriminantProduct dm = reconstruct_dminus(anti, trunc);
    const ConstantModel cm(3.0);
    for (double l : {2.0, 11.0, 23.5, 38.0}) {
        const Complex lam(l, 0.0);
        const Complex exact_p = (1.0 - cm.c_plus(1.0, lam)) * (1.0 - cm.c_minus(1.0, lam));
        const Complex exact_m = (1.0 + cm.c_plus(1.0, lam)) * (1.0 + cm.c_minus(1.0, lam));
        CHECK(std::abs(dp(lam) - exact_p) < 2e-3 * std::max(1.0, std::abs(exact_p)));
        CHECK(std::abs(dm(lam) - exact_m) < 2e-3 * std::max(1.0, std::abs(exact_m)));
        // mu1 and rho through the determinant identities
        const Complex mu1 = 0.25 * (dm(lam) - dp(lam));
        const LyapunovData ref = constant_lyapunov(3.0, lam);
        CHECK(std::abs(mu1 - ref.mu1) < 2e-3);
        const Complex rho_rec = (mu1 - 1.0) * (mu1 - 1.0) - dp(lam);
        CHECK(std::abs(rho_rec - ref.rho) < 5e-3);
    }
}

TEST_CASE("windowed scans reject empty windows")
{
    CHECK_THROWS_AS(scan_bands(free_pot(), 5.0, 5.0), NumericError);
}
