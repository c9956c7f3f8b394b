#pragma once

#include <Eigen/Dense>
#include <array>

#include "gbf/spacetime.hpp"

namespace gbf::dirac {

using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

enum class GammaRep { Standard, Chiral };

// Gamma matrices with metric signature (+,-,-,-); Clifford relations and
// self-adjointness of gamma^0 gamma^mu are verified at construction.
struct GammaBasis {
    GammaRep rep;
    std::array<Mat4, 4> gamma;
    double clifford_residual = 0.0;
    double selfadjoint_residual = 0.0;

    Mat4 slash(const Eigen::Vector4d& k_upper) const;  // gamma^mu k_mu (index lowered)
};

GammaBasis gamma_basis(GammaRep rep);

struct HypersurfaceForm {
    Mat4 P;
    int positive = 0;
    int negative = 0;
    int zero = 0;
};

// P = gamma^0 gamma^mu n_mu for a real normal vector n (contravariant).
HypersurfaceForm hypersurface_form(const GammaBasis& g, const Eigen::Vector4d& n);

struct MomentumSpinors {
    std::array<Vec4, 2> u;
    std::array<Vec4, 2> v;
    double residual = 0.0;  // worst deviation across the defining identities
};

// Plane-wave spinors at spatial momentum k: (slash(k) - m) u = 0,
// (slash(k) + m) v = 0, normalized to u^r+ g0 g^mu u^s = 2 k^mu delta^rs.
// Construction failures beyond 1e-10 throw.
MomentumSpinors momentum_spinors(const GammaBasis& g, const Eigen::Vector3d& k, double mass);

struct TildeSpinors {
    std::array<Vec4, 2> u;
    std::array<Vec4, 2> v;
    double k3 = 0.0;
    double residual = 0.0;
};

// Propagating-mode spinors on a constant-z hypersurface, labelled by
// (E, k1, k2) with |E| > sqrt(k~^2 + m^2); evanescent labels are a domain
// error.
TildeSpinors tilde_spinors(const GammaBasis& g, double E, const Eigen::Vector2d& kt, double mass);

struct EqualTimeModes {
    double mass = 1.0;
    std::vector<Eigen::Vector3d> momenta;

    double energy(int i) const;
};

struct ConstantZModes {
    double mass = 1.0;
    std::vector<std::pair<double, Eigen::Vector2d>> modes;  // (E, k~)

    double k3(int i) const;  // positive root; throws on evanescent labels
};

// Fermionic theory over constant-time slices: per-slice space of mode
// coefficients (a,b) x (s=1,2), positive definite; interval regions carry
// the diagonal subspace. Includes slice regions, consecutive-interval
// unions with their gluings, and a two-slice self-gluing on the first
// slice.
TheorySpec build_equal_time_theory(const EqualTimeModes& modes, const std::vector<double>& times);

// Same combinatorics over constant-z slices; the slice space is a genuine
// Krein space with positive part the E > 0 modes.
TheorySpec build_constant_z_theory(const ConstantZModes& modes, const std::vector<double>& zs);

// Frobenius gap between the canonical positive-part projector of the
// boundary space and the projector onto the initial-slice component.
double split_projector_gap(const TheorySpec& theory, const std::string& region_label);

// Symplectic Gram matrices of the constant-z form against the constant-t
// form over a shared mode set, expressed through the reparametrization of
// the global solution space; returns the max entrywise deviation.
double omega_gram_gap(const EqualTimeModes& modes);

}  // namespace gbf::dirac
