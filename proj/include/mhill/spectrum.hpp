#pragma once

#include "mhill/lyapunov.hpp"

#include <functional>
#include <optional>
#include <string>

namespace mhill {

// ---------------------------------------------------------------------------
// Report types
// ---------------------------------------------------------------------------

struct Band {
    double lo = 0.0, hi = 0.0;
    int branch = 0; // bitmask: 1 = first branch, 2 = second, 3 = both
};

enum class GapKind { Stable, Resonance, Unresolved };

struct Gap {
    double lo = 0.0, hi = 0.0;
    GapKind kind = GapKind::Unresolved;
    std::string lo_origin, hi_origin; // "periodic", "antiperiodic", "resonance", ...
    bool flagged = false;             // ambiguous or unmatched endpoint
};

struct EigenvalueEntry {
    double lambda = 0.0;
    int multiplicity = 1;
    bool resolved = true; // false: unresolved cluster reported as a group
};

struct ResonanceEntry {
    Complex lambda{0.0, 0.0};
    int multiplicity = 1;
    bool real = true;
};

struct SpectralReport {
    double window_lo = 0.0, window_hi = 0.0;
    std::vector<Band> bands;
    std::vector<Gap> gaps;
    std::vector<EigenvalueEntry> periodic_eigs;
    std::vector<EigenvalueEntry> antiperiodic_eigs;
    std::vector<ResonanceEntry> resonances;
};

enum class SpectralFunction { Rho, DPlus, DMinus };

struct Contour {
    enum class Shape { Circle, Rect };
    Shape shape = Shape::Circle;
    Complex center{0.0, 0.0};
    double radius = 1.0;
    Complex lo{0.0, 0.0}, hi{0.0, 0.0}; // rect corners, lo componentwise below hi

    static Contour circle(Complex c, double r)
    {
        Contour k;
        k.shape = Shape::Circle;
        k.center = c;
        k.radius = r;
        return k;
    }
    static Contour rect(Complex lo, Complex hi)
    {
        Contour k;
        k.shape = Shape::Rect;
        k.lo = lo;
        k.hi = hi;
        return k;
    }
};

struct ContourCount {
    Contour contour;
    SpectralFunction target = SpectralFunction::Rho;
    int count = 0;
    double winding_residual = 0.0; // |unrounded - count|, accepted below 0.05
};

struct ScanOptions {
    double grid_density = 40.0; // grid points per unit of sqrt(lambda)
    double edge_tol = 1e-10;    // band-edge bisection tolerance (abscissa)
    double root_tol = 1e-9;     // relative root abscissa tolerance
    double match_tol = 1e-6;    // gap-endpoint matching tolerance
    double winding_accept = 0.05;
    PropagateOptions propagate;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Bands and (unclassified) gaps over [lo, hi] by sign analysis of the two
/// Lyapunov branches on a real grid, edges refined by bisection.
SpectralReport scan_bands(const NormalizedPotential& pot, double lo, double hi,
                          const ScanOptions& opt = {});

std::vector<EigenvalueEntry> periodic_eigenvalues(const NormalizedPotential& pot, double lo,
                                                  double hi, const ScanOptions& opt = {});
std::vector<EigenvalueEntry> antiperiodic_eigenvalues(const NormalizedPotential& pot, double lo,
                                                      double hi, const ScanOptions& opt = {});
std::vector<EigenvalueEntry> real_resonances(const NormalizedPotential& pot, double lo, double hi,
                                             const ScanOptions& opt = {});

/// Zeros of rho inside the rectangle: argument-principle subdivision with
/// Newton polishing; conjugate symmetry enforced (the potential is real).
std::vector<ResonanceEntry> complex_resonances(const NormalizedPotential& pot, Complex rect_lo,
                                               Complex rect_hi, const ScanOptions& opt = {});

/// Winding number of the chosen entire function along the contour.
ContourCount count_zeros(const NormalizedPotential& pot, SpectralFunction target,
                         const Contour& contour, const ScanOptions& opt = {});
ContourCount count_zeros(const Propagator& prop, SpectralFunction target, const Contour& contour,
                         const ScanOptions& opt = {});

/// Match gap endpoints against eigenvalue and resonance lists and assign kinds.
void classify_gaps(SpectralReport& report, double match_tol = 1e-6);

// ---------------------------------------------------------------------------
// High-energy residuals and reconstruction
// ---------------------------------------------------------------------------

struct ClusterResiduals {
    int n = 0;                            // cluster index: eigenvalues near (pi n)^2
    std::array<double, 4> eig_residual{}; // lambda - (pi n)^2 - v_m0 after pairing
    std::array<int, 4> paired_m{};        // 1 or 2
    std::array<double, 2> res_residual{}; // resonance pair - (pi n)^2 (real part)
    bool pairing_ambiguous = false;
};

struct ResidualReport {
    std::vector<ClusterResiduals> clusters;
    std::vector<double> eig_partial_l2; // running sum of squared eig residuals
    std::vector<double> res_partial_l2;
    double eig_tail_increase = 0.0; // relative growth over the last third
    double res_tail_increase = 0.0;
};

/// Eigenvalue/resonance residual sequences up to cluster n_max; enumeration is
/// cluster-localized and checked by per-cluster contour counts.
ResidualReport asymptotic_residuals(const NormalizedPotential& pot, int n_max,
                                    const ScanOptions& opt = {});

/// Truncated spectral-determinant product. Roots up to cluster N are taken
/// from the supplied list; the tail is the explicit free-operator product.
class DiscriminantProduct {
public:
    /// periodic: build from zeros of D+ (two initial + quadruples); otherwise
    /// from zeros of D- (quadruples only).
    DiscriminantProduct(bool periodic, std::vector<double> initial,
                        std::vector<std::array<double, 4>> quads);

    Complex operator()(Complex lambda) const;
    int truncation() const { return static_cast<int>(quads_.size()); }

private:
    bool periodic_;
    std::vector<double> initial_;
    std::vector<std::array<double, 4>> quads_;
};

/// Assemble the product from a sorted eigenvalue list (multiplicities expanded).
DiscriminantProduct reconstruct_dplus(const std::vector<EigenvalueEntry>& periodic_eigs,
                                      int truncation_n);
DiscriminantProduct reconstruct_dminus(const std::vector<EigenvalueEntry>& antiperiodic_eigs,
                                       int truncation_n);

/// Periodic (even clusters) or anti-periodic (odd) eigenvalues enumerated by
/// cluster up to n, count-checked; includes everything below the first cluster.
std::vector<EigenvalueEntry> enumerate_eigenvalues_to_cluster(const NormalizedPotential& pot,
                                                              bool periodic, int n_clusters,
                                                              const ScanOptions& opt = {});

// ---------------------------------------------------------------------------
// Generic zero finding on entire functions (exposed for reuse in tests/tools)
// ---------------------------------------------------------------------------

struct ZeroEntry {
    Complex z;
    int multiplicity = 1;
    bool resolved = true;
};

int winding_number(const std::function<Complex(Complex)>& f, const Contour& contour,
                   double accept, double* residual = nullptr);

std::vector<ZeroEntry> find_zeros_in_rect(const std::function<Complex(Complex)>& f, Complex lo,
                                          Complex hi, double root_tol, double winding_accept);

std::vector<ZeroEntry> real_zero_scan(const std::function<Complex(Complex)>& f, double lo,
                                      double hi, double density, double root_tol,
                                      double winding_accept);

} // namespace mhill
