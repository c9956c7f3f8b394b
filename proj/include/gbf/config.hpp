#pragma once

#include <complex>
#include <cstdint>

namespace gbf {

using cplx = std::complex<double>;

// Global numeric policy. Residual checks compare against `tol` unless an
// operation documents a tighter bound; rank decisions use `rank_rtol`
// relative to the largest singular value.
struct Tolerances {
    double tol = 1e-9;
    double rank_rtol = 1e-8;
    double drop = 1e-14;   // sparse coefficients below this are discarded
};

Tolerances& tolerances();

// Statistics constant kappa: -1 fermionic, +1 bosonic.
enum class Stat : int { Fermionic = -1, Bosonic = +1 };

inline int kappa_of(Stat s) { return static_cast<int>(s); }

inline double kappa_pow(int kappa, long long n) {
    if (kappa == 1) return 1.0;
    return (n % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace gbf
