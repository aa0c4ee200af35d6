#pragma once

#include "mhill/types.hpp"

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mhill {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure (tolerance budget exhausted, unresolved feature, ...).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg, double achieved_ = 0.0)
        : std::runtime_error(msg), achieved(achieved_)
    {
    }
    double achieved;
};

// ---------------------------------------------------------------------------
// Parsed potential (as written by the user, original basis)
// ---------------------------------------------------------------------------

struct SmoothZero {
};
struct SmoothConstantDiag {
    double a; // a*J = diag(a, -a)
};
struct SmoothBump {
    double a, gamma, nu; // a*J + gamma * v_nu(x) * J1
};
struct FourierEntry {
    int k;
    double c, s; // c*cos(2 pi k x) + s*sin(2 pi k x)
};
struct FourierSeries {
    std::vector<FourierEntry> v1, v2, v3;
};
struct SampleGrid {
    int n; // power of two
    std::vector<double> v1, v2, v3; // midpoint samples on the uniform grid
};

using SmoothPart = std::variant<SmoothZero, SmoothConstantDiag, SmoothBump, FourierSeries, SampleGrid>;

// Point interaction: y'(x0+) - y'(x0-) = strength * y(x0).
struct DeltaTerm {
    double x0;
    Mat2 strength; // symmetric
};

struct PotentialSpec {
    SmoothPart smooth;
    std::vector<DeltaTerm> deltas; // distinct x0 in [0,1), sorted
};

PotentialSpec parse_potential_spec(const std::string& json_text);
PotentialSpec parse_potential_file(const std::string& path);

// ---------------------------------------------------------------------------
// Normalized potential (constant orthogonal basis diagonalizing the mean)
// ---------------------------------------------------------------------------

struct RotConst {
    Mat2 value;
};
struct RotFourier {
    struct Term {
        int k;
        Mat2 c, s; // matrix coefficients; k = 0 uses c only
    };
    std::vector<Term> terms;
};
struct RotSamples {
    std::vector<Mat2> value; // midpoint samples, uniform grid
};
struct RotBump {
    Mat2 base, bump; // base + v_nu(x) * bump
    double nu;
};

using RotSmooth = std::variant<RotConst, RotFourier, RotSamples, RotBump>;

struct NormalizedPotential {
    RotSmooth smooth;
    std::vector<DeltaTerm> deltas; // strengths in the rotated basis
    Mat2 rotation;                 // U: rotated V(x) = U V_orig(x) U^T
    double v10 = 0.0, v20 = 0.0;   // mean matrix diag(v10, v20), v10 <= v20
    double c0 = 0.0;               // (v20 - v10)/2
    double v1 = 0.0;               // Tr of the mean
    double v2 = 0.0;               // Tr of the squared mean
    double l1_norm = 0.0;          // int |V1|+|V2|+2|V3| plus delta couplings
    bool rotation_applied = false;
    bool offdiag_zero = false; // rotated off-diagonal identically zero
    bool scalar_like = false;  // offdiag_zero and identical diagonal channels

    Mat2 mean() const { return (Mat2() << v10, 0.0, 0.0, v20).finished(); }
};

NormalizedPotential normalize_potential(const PotentialSpec& spec);

/// Smooth part at x in the rotated basis (delta terms excluded).
Mat2 evaluate_smooth(const NormalizedPotential& pot, double x);

/// The normalized mollifier v_nu(x) = w((x-1/2)/nu)/nu, w a C-infinity bump
/// supported on (-1,1) with unit integral.
double bump_value(double nu, double x);

/// Integral over one period of |c0 + sum_k c_k cos(2 pi k x) + s_k sin(2 pi k x)|,
/// evaluated from the sign pattern of the trigonometric polynomial.
double trig_abs_integral(const std::vector<FourierEntry>& entries);

} // namespace mhill
