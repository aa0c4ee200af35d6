#pragma once

#include <Eigen/Dense>
#include <complex>

namespace mhill {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2d;
using CMat2 = Eigen::Matrix2cd;
using CMat4 = Eigen::Matrix4cd;

inline constexpr double kPi = 3.14159265358979323846;

// J = diag(1,-1), J1 = offdiag(1,1): the two traceless symmetric generators.
inline Mat2 mat_J() { return (Mat2() << 1.0, 0.0, 0.0, -1.0).finished(); }
inline Mat2 mat_J1() { return (Mat2() << 0.0, 1.0, 1.0, 0.0).finished(); }

// Entire functions of w = lambda (or eta^2): even in sqrt(w), so the
// principal branch of sqrt never introduces a cut.

/// cos(sqrt(w))
inline Complex cos_sqrt(Complex w) { return std::cos(std::sqrt(w)); }

/// sin(sqrt(w))/sqrt(w), value 1 at w = 0.
inline Complex sinc_sqrt(Complex w)
{
    if (std::abs(w) < 1e-4) {
        // 1 - w/6 + w^2/120 - w^3/5040 + w^4/362880
        return 1.0 + w * (-1.0 / 6.0 + w * (1.0 / 120.0 + w * (-1.0 / 5040.0 + w / 362880.0)));
    }
    const Complex z = std::sqrt(w);
    return std::sin(z) / z;
}

/// d/dw cos(sqrt(w)) = -sinc_sqrt(w)/2
inline Complex dcos_sqrt(Complex w) { return -0.5 * sinc_sqrt(w); }

/// d/dw [sin(sqrt(w))/sqrt(w)] = (cos(sqrt(w)) - sinc_sqrt(w))/(2w)
inline Complex dsinc_sqrt(Complex w)
{
    if (std::abs(w) < 1e-2) {
        // -1/6 + w/60 - w^2/1680 + w^3/90720 - w^4/7983360
        return -1.0 / 6.0 +
               w * (1.0 / 60.0 + w * (-1.0 / 1680.0 + w * (1.0 / 90720.0 - w / 7983360.0)));
    }
    return (cos_sqrt(w) - sinc_sqrt(w)) / (2.0 * w);
}

/// |a - b| / max(1, |a|, |b|): residual relative to the natural scale.
inline double rel_residual(Complex a, Complex b)
{
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace mhill
