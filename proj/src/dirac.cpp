#include "gbf/dirac.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace gbf::dirac {

namespace {

Eigen::Matrix2cd pauli(int i) {
    Eigen::Matrix2cd s;
    const cplx I(0.0, 1.0);
    switch (i) {
        case 1: s << 0, 1, 1, 0; break;
        case 2: s << 0, -I, I, 0; break;
        default: s << 1, 0, 0, -1; break;
    }
    return s;
}

}  // namespace

Mat4 GammaBasis::slash(const Eigen::Vector4d& k_upper) const {
    // Lower the index with (+,-,-,-).
    return gamma[0] * k_upper(0) - gamma[1] * k_upper(1) - gamma[2] * k_upper(2) -
           gamma[3] * k_upper(3);
}

GammaBasis gamma_basis(GammaRep rep) {
    GammaBasis g;
    g.rep = rep;
    Mat4 g0 = Mat4::Zero();
    if (rep == GammaRep::Standard) {
        g0.topLeftCorner(2, 2) = Eigen::Matrix2cd::Identity();
        g0.bottomRightCorner(2, 2) = -Eigen::Matrix2cd::Identity();
    } else {
        g0.topRightCorner(2, 2) = Eigen::Matrix2cd::Identity();
        g0.bottomLeftCorner(2, 2) = Eigen::Matrix2cd::Identity();
    }
    g.gamma[0] = g0;
    for (int i = 1; i <= 3; ++i) {
        Mat4 gi = Mat4::Zero();
        gi.topRightCorner(2, 2) = pauli(i);
        gi.bottomLeftCorner(2, 2) = -pauli(i);
        g.gamma[i] = gi;
    }
    const double eta[4] = {1.0, -1.0, -1.0, -1.0};
    for (int mu = 0; mu < 4; ++mu) {
        for (int nu = 0; nu < 4; ++nu) {
            Mat4 anti = g.gamma[mu] * g.gamma[nu] + g.gamma[nu] * g.gamma[mu];
            Mat4 want = (mu == nu ? 2.0 * eta[mu] : 0.0) * Mat4::Identity();
            g.clifford_residual = std::max(g.clifford_residual, (anti - want).norm());
        }
        Mat4 sa = g.gamma[0] * g.gamma[mu];
        g.selfadjoint_residual = std::max(g.selfadjoint_residual, (sa - sa.adjoint()).norm());
    }
    if (g.clifford_residual > 1e-12 || g.selfadjoint_residual > 1e-12)
        throw std::runtime_error("gamma_basis: algebra residuals out of bounds");
    return g;
}

HypersurfaceForm hypersurface_form(const GammaBasis& g, const Eigen::Vector4d& n) {
    HypersurfaceForm out;
    out.P = g.gamma[0] * g.slash(n);
    Eigen::SelfAdjointEigenSolver<Mat4> es(out.P);
    for (int i = 0; i < 4; ++i) {
        const double ev = es.eigenvalues()(i);
        if (ev > 1e-10)
            ++out.positive;
        else if (ev < -1e-10)
            ++out.negative;
        else
            ++out.zero;
    }
    return out;
}

namespace {

// Rest eigenvectors of gamma^0 with the given eigenvalue, orthonormal.
std::array<Vec4, 2> rest_pair(const GammaBasis& g, double eigenvalue) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(g.gamma[0]);
    std::array<Vec4, 2> out;
    int found = 0;
    for (int i = 0; i < 4 && found < 2; ++i) {
        if (std::abs(es.eigenvalues()(i) - eigenvalue) < 1e-9) out[found++] = es.eigenvectors().col(i);
    }
    if (found != 2) throw std::runtime_error("rest_pair: unexpected gamma^0 spectrum");
    return out;
}

double spinor_identities_residual(const GammaBasis& g, const Eigen::Vector3d& k, double mass,
                                  const MomentumSpinors& sp) {
    const double E = std::sqrt(k.squaredNorm() + mass * mass);
    const Eigen::Vector4d kup(E, k(0), k(1), k(2));
    double res = 0.0;
    Mat4 ks = g.slash(kup);
    for (int s = 0; s < 2; ++s) {
        res = std::max(res, ((ks - mass * Mat4::Identity()) * sp.u[s]).norm());
        res = std::max(res, ((ks + mass * Mat4::Identity()) * sp.v[s]).norm());
    }
    // u^r+ g0 g^mu u^s = 2 k^mu delta^rs (k^mu contravariant), same for v.
    const double kcontra[4] = {E, k(0), k(1), k(2)};
    for (int mu = 0; mu < 4; ++mu) {
        Mat4 form = g.gamma[0] * g.gamma[mu];
        for (int r = 0; r < 2; ++r) {
            for (int s = 0; s < 2; ++s) {
                cplx uu = sp.u[r].adjoint() * form * sp.u[s];
                cplx vv = sp.v[r].adjoint() * form * sp.v[s];
                cplx want = (r == s) ? cplx(2.0 * kcontra[mu]) : cplx(0.0);
                res = std::max(res, std::abs(uu - want));
                res = std::max(res, std::abs(vv - want));
            }
        }
    }
    // Cross conditions at opposite momentum.
    MomentumSpinors flip;
    {
        const Eigen::Vector3d mk = -k;
        Mat4 B = (g.slash(Eigen::Vector4d(E, mk(0), mk(1), mk(2))) + mass * Mat4::Identity()) /
                 std::sqrt(2.0 * mass * (E + mass));
        auto wp = rest_pair(g, 1.0);
        auto wm = rest_pair(g, -1.0);
        Mat4 Bm = (g.slash(Eigen::Vector4d(E, mk(0), mk(1), mk(2))) - mass * Mat4::Identity()) /
                  std::sqrt(2.0 * mass * (E + mass));
        for (int s = 0; s < 2; ++s) {
            flip.u[s] = std::sqrt(2.0 * mass) * (B * wp[s]);
            flip.v[s] = std::sqrt(2.0 * mass) * (Bm * wm[s]);
        }
    }
    for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) {
            res = std::max(res, std::abs(cplx(sp.u[r].adjoint() * flip.v[s])));
            res = std::max(res, std::abs(cplx(sp.v[r].adjoint() * flip.u[s])));
        }
    return res;
}

}  // namespace

MomentumSpinors momentum_spinors(const GammaBasis& g, const Eigen::Vector3d& k, double mass) {
    if (mass <= 0.0) throw std::invalid_argument("momentum_spinors: positive mass required");
    const double E = std::sqrt(k.squaredNorm() + mass * mass);
    const Eigen::Vector4d kup(E, k(0), k(1), k(2));
    MomentumSpinors sp;
    auto wp = rest_pair(g, 1.0);
    auto wm = rest_pair(g, -1.0);
    // Boost of the rest spinors; normalization fixed by the rest form.
    Mat4 Bu = (g.slash(kup) + mass * Mat4::Identity()) / std::sqrt(2.0 * mass * (E + mass));
    Mat4 Bv = (g.slash(kup) - mass * Mat4::Identity()) / std::sqrt(2.0 * mass * (E + mass));
    for (int s = 0; s < 2; ++s) {
        sp.u[s] = std::sqrt(2.0 * mass) * (Bu * wp[s]);
        sp.v[s] = std::sqrt(2.0 * mass) * (Bv * wm[s]);
    }
    sp.residual = spinor_identities_residual(g, k, mass, sp);
    if (sp.residual > 1e-10)
        throw std::runtime_error("momentum_spinors: identity verification failed");
    return sp;
}

double EqualTimeModes::energy(int i) const {
    return std::sqrt(momenta[i].squaredNorm() + mass * mass);
}

double ConstantZModes::k3(int i) const {
    const auto& [E, kt] = modes[i];
    const double disc = E * E - kt.squaredNorm() - mass * mass;
    if (disc <= 0.0)
        throw std::invalid_argument("ConstantZModes: evanescent label (|E| too small)");
    return std::sqrt(disc);
}

TildeSpinors tilde_spinors(const GammaBasis& g, double E, const Eigen::Vector2d& kt, double mass) {
    const double disc = E * E - kt.squaredNorm() - mass * mass;
    if (disc <= 0.0 || std::abs(E) < mass)
        throw std::invalid_argument("tilde_spinors: evanescent label");
    TildeSpinors out;
    out.k3 = std::sqrt(disc);
    if (E > 0) {
        MomentumSpinors sp = momentum_spinors(g, Eigen::Vector3d(kt(0), kt(1), out.k3), mass);
        out.u = sp.u;
        out.v = sp.v;
    } else {
        MomentumSpinors sp = momentum_spinors(g, Eigen::Vector3d(-kt(0), -kt(1), -out.k3), mass);
        out.u = sp.v;
        out.v = sp.u;
    }
    // Constant-z pairing identities. With the spinor normalization
    // u+ g0 g^mu u = 2 k^mu (contravariant), the diagonal pairings carry
    // the sign of E; the value corresponds to the slice orientation whose
    // normal has n_3 = +1 after lowering.
    Mat4 form = g.gamma[0] * g.gamma[3];
    const double want = 2.0 * (E > 0 ? 1.0 : -1.0) * out.k3;
    for (int r = 0; r < 2; ++r) {
        for (int s = 0; s < 2; ++s) {
            cplx uu = out.u[r].adjoint() * form * out.u[s];
            cplx vv = out.v[r].adjoint() * form * out.v[s];
            cplx w = (r == s) ? cplx(want) : cplx(0.0);
            out.residual = std::max(out.residual, std::abs(uu - w));
            out.residual = std::max(out.residual, std::abs(vv - w));
        }
    }
    TildeSpinors flip;
    {
        const double fe = -E;
        const Eigen::Vector2d fk = -kt;
        if (fe > 0) {
            MomentumSpinors sp = momentum_spinors(g, Eigen::Vector3d(fk(0), fk(1), out.k3), mass);
            flip.u = sp.u;
            flip.v = sp.v;
        } else {
            MomentumSpinors sp = momentum_spinors(g, Eigen::Vector3d(-fk(0), -fk(1), -out.k3), mass);
            flip.u = sp.v;
            flip.v = sp.u;
        }
    }
    for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) {
            out.residual = std::max(out.residual,
                                    std::abs(cplx(out.u[r].adjoint() * form * flip.v[s])));
            out.residual = std::max(out.residual,
                                    std::abs(cplx(out.v[r].adjoint() * form * flip.u[s])));
        }
    if (out.residual > 1e-10)
        throw std::runtime_error("tilde_spinors: identity verification failed");
    return out;
}

namespace {

// Shared combinatorial scaffold: slice labels, interval regions with the
// diagonal subspace, slice regions, consecutive unions with gluings, and
// a two-slice self-gluing on the first label.
TheorySpec build_slab_theory(const KreinSpace& slice_space, const std::vector<std::string>& labels) {
    TheorySpec th;
    th.stat = Stat::Fermionic;
    for (const auto& l : labels) {
        KreinSpace s = slice_space;
        s.label = l;
        th.spaces[l] = s;
    }
    auto rev = orientation_reverse(slice_space, th.stat);

    auto diagonal_region = [&](const std::string& name, const std::string& a, const std::string& b) {
        Region r;
        r.label = name;
        r.boundary.comps = {{a, false}, {b, true}};
        DirectSum ds = direct_sum({slice_space, rev.to});
        for (int x = 0; x < slice_space.dim(); ++x) {
            for (int j = 0; j < 2; ++j) {
                KVec phi = KVec::basis(slice_space, x);
                if (j) phi = phi.timesJ();
                r.lmtilde.push_back((ds.embed(0, phi) + ds.embed(1, rev.apply(phi))).c);
            }
        }
        return r;
    };
    auto interval_name = [&](size_t i, size_t j) {
        return "[" + labels[i] + "," + labels[j] + "]";
    };

    for (size_t i = 0; i + 1 < labels.size(); ++i)
        th.regions.push_back(diagonal_region(interval_name(i, i + 1), labels[i], labels[i + 1]));
    for (const auto& l : labels) th.regions.push_back(make_slice_region(th, l, "slice:" + l));

    for (size_t i = 0; i + 2 < labels.size(); ++i) {
        const std::string m1 = interval_name(i, i + 1);
        const std::string m2 = interval_name(i + 1, i + 2);
        Region u = make_union_region(th, m1 + "u" + m2, {m1, m2});
        th.regions.push_back(u);
        th.regions.push_back(diagonal_region(interval_name(i, i + 2), labels[i], labels[i + 2]));
        GluingDesc g;
        g.name = "glue:" + labels[i + 1];
        g.region = u.label;
        g.pos_std = 2;  // standard copy inside the second interval
        g.pos_rev = 1;  // reversed copy terminating the first interval
        g.result = interval_name(i, i + 2);
        th.gluings.push_back(g);
    }

    // Two copies of the first slice glued back to a single slice region.
    {
        const std::string sl = "slice:" + labels[0];
        Region u = make_union_region(th, sl + "u" + sl, {sl, sl});
        th.regions.push_back(u);
        GluingDesc g;
        g.name = "glue:2slice:" + labels[0];
        g.region = u.label;
        g.pos_std = 1;
        g.pos_rev = 2;
        g.result = sl;
        th.gluings.push_back(g);
    }
    return th;
}

}  // namespace

TheorySpec build_equal_time_theory(const EqualTimeModes& modes, const std::vector<double>& times) {
    if (times.size() < 2) throw std::invalid_argument("build_equal_time_theory: need at least two times");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i - 1] < times[i]))
            throw std::invalid_argument("build_equal_time_theory: times must increase");
    for (size_t i = 0; i < modes.momenta.size(); ++i) (void)modes.energy(static_cast<int>(i));
    const int n = static_cast<int>(modes.momenta.size());
    // Coefficients (a^1, a^2, b^1, b^2) per mode; the constant-t inner
    // product is positive definite.
    KreinSpace slice{4 * n, 0, ""};
    std::vector<std::string> labels;
    for (size_t i = 0; i < times.size(); ++i) labels.push_back("t" + std::to_string(i));
    return build_slab_theory(slice, labels);
}

TheorySpec build_constant_z_theory(const ConstantZModes& modes, const std::vector<double>& zs) {
    if (zs.size() < 2) throw std::invalid_argument("build_constant_z_theory: need at least two z values");
    for (size_t i = 1; i < zs.size(); ++i)
        if (!(zs[i - 1] < zs[i])) throw std::invalid_argument("build_constant_z_theory: z must increase");
    int npos = 0, nneg = 0;
    for (size_t i = 0; i < modes.modes.size(); ++i) {
        (void)modes.k3(static_cast<int>(i));  // rejects evanescent labels
        if (modes.modes[i].first > 0)
            ++npos;
        else
            ++nneg;
    }
    // Canonical layout: E > 0 modes first (positive part), then E < 0.
    KreinSpace slice{4 * npos, 4 * nneg, ""};
    std::vector<std::string> labels;
    for (size_t i = 0; i < zs.size(); ++i) labels.push_back("z" + std::to_string(i));
    return build_slab_theory(slice, labels);
}

double split_projector_gap(const TheorySpec& theory, const std::string& region_label) {
    const Region& r = theory.region(region_label);
    DirectSum ds = theory.boundary_sum(r);
    const int d = ds.total.dim();
    Eigen::MatrixXcd pcanon = Eigen::MatrixXcd::Zero(d, d);
    for (int a = 0; a < ds.total.p; ++a) pcanon(a, a) = 1.0;
    Eigen::MatrixXcd pgeom = Eigen::MatrixXcd::Zero(d, d);
    for (int a = 0; a < ds.parts[0].dim(); ++a) {
        const int t = ds.slot[0][a];
        pgeom(t, t) = 1.0;
    }
    return (pcanon - pgeom).norm();
}

double omega_gram_gap(const EqualTimeModes& modes) {
    const int n = static_cast<int>(modes.momenta.size());
    for (int i = 0; i < n; ++i)
        if (std::abs(modes.momenta[i](2)) <= 0.0)
            throw std::invalid_argument("omega_gram_gap: modes must have nonzero k3");
    // t-side: coordinates (a^1,a^2,b^1,b^2) per mode, all-positive form.
    KreinSpace lt{4 * n, 0, "t"};
    // z-side: one propagating label per t-mode; E > 0 ones first.
    std::vector<int> zslot(n);
    std::vector<bool> zneg(n);
    int pos = 0;
    for (int i = 0; i < n; ++i)
        if (modes.momenta[i](2) > 0) zslot[i] = pos++;
    int neg = 0;
    for (int i = 0; i < n; ++i)
        if (modes.momenta[i](2) < 0) {
            zslot[i] = pos + neg++;
            zneg[i] = true;
        }
    KreinSpace lz{4 * pos, 4 * neg, "z"};

    // Real-linear reparametrization: k3 > 0 keeps coefficients; k3 < 0
    // maps to the opposite-energy label with conjugated a/b swap.
    auto remap = [&](const Eigen::VectorXcd& x) {
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(4 * n);
        for (int i = 0; i < n; ++i) {
            const int src = 4 * i;
            const int dst = 4 * zslot[i];
            if (!zneg[i]) {
                for (int c = 0; c < 4; ++c) out(dst + c) = x(src + c);
            } else {
                // X~_a^s(-E,-k~) = conj(X_b^s(k)), X~_b^s(-E,-k~) = conj(X_a^s(k)).
                out(dst + 0) = std::conj(x(src + 2));
                out(dst + 1) = std::conj(x(src + 3));
                out(dst + 2) = std::conj(x(src + 0));
                out(dst + 3) = std::conj(x(src + 1));
            }
        }
        return out;
    };

    double gap = 0.0;
    const int rd = 2 * 4 * n;
    for (int a = 0; a < rd; ++a) {
        KVec va = (a < 4 * n) ? KVec::basis(lt, a) : KVec::basis(lt, a - 4 * n).timesJ();
        for (int b = 0; b < rd; ++b) {
            KVec vb = (b < 4 * n) ? KVec::basis(lt, b) : KVec::basis(lt, b - 4 * n).timesJ();
            const double wt = symplectic(va, vb);
            KVec za(lz, remap(va.c));
            KVec zb(lz, remap(vb.c));
            const double wz = symplectic(za, zb);
            gap = std::max(gap, std::abs(wt - wz));
        }
    }
    return gap;
}

}  // namespace gbf::dirac
