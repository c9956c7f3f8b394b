#include "gbf/krein.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <stdexcept>

namespace gbf {

namespace {
Tolerances g_tols;
}

Tolerances& tolerances() { return g_tols; }

KVec::KVec(KreinSpace s, Eigen::VectorXcd v) : space(std::move(s)), c(std::move(v)) {
    if (c.size() != space.dim())
        throw std::invalid_argument("KVec: coefficient length does not match space dimension");
}

KVec KVec::zero(const KreinSpace& s) { return KVec(s, Eigen::VectorXcd::Zero(s.dim())); }

KVec KVec::basis(const KreinSpace& s, int a) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(s.dim());
    v(a) = 1.0;
    return KVec(s, std::move(v));
}

KVec KVec::timesJ() const { return KVec(space, cplx(0.0, 1.0) * c); }

KVec operator+(const KVec& a, const KVec& b) { return KVec(a.space, a.c + b.c); }
KVec operator-(const KVec& a, const KVec& b) { return KVec(a.space, a.c - b.c); }
KVec operator*(cplx s, const KVec& v) { return KVec(v.space, s * v.c); }

cplx inner(const KVec& v, const KVec& w) {
    if (v.c.size() != w.c.size() || !v.space.same_signature(w.space))
        throw std::invalid_argument("inner: vectors live in different spaces");
    cplx acc = 0.0;
    for (int a = 0; a < v.space.dim(); ++a)
        acc += v.space.sign(a) * std::conj(v.c(a)) * w.c(a);
    return acc;
}

double metric_g(const KVec& v, const KVec& w) { return inner(v, w).real(); }
double symplectic(const KVec& v, const KVec& w) { return 0.5 * inner(v, w).imag(); }

Eigen::VectorXd to_real(const Eigen::VectorXcd& z) {
    Eigen::VectorXd x(2 * z.size());
    x.head(z.size()) = z.real();
    x.tail(z.size()) = z.imag();
    return x;
}

Eigen::VectorXcd from_real(const Eigen::VectorXd& x) {
    const int d = static_cast<int>(x.size() / 2);
    Eigen::VectorXcd z(d);
    z.real() = x.head(d);
    z.imag() = x.tail(d);
    return z;
}

int OrientationReversal::map_index(int a) const {
    if (kappa == 1) return a;
    return a < from.p ? from.q + a : a - from.p;
}

int OrientationReversal::map_index_inverse(int a) const {
    if (kappa == 1) return a;
    return a < to.p ? to.q + a : a - to.p;
}

KVec OrientationReversal::apply(const KVec& v) const {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(to.dim());
    for (int a = 0; a < from.dim(); ++a) out(map_index(a)) = std::conj(v.c(a));
    return KVec(to, std::move(out));
}

KVec OrientationReversal::apply_inverse(const KVec& v) const {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(from.dim());
    for (int a = 0; a < to.dim(); ++a) out(map_index_inverse(a)) = std::conj(v.c(a));
    return KVec(from, std::move(out));
}

OrientationReversal orientation_reverse(const KreinSpace& s, Stat stat) {
    OrientationReversal r;
    r.from = s;
    r.kappa = kappa_of(stat);
    r.to = (r.kappa == -1) ? KreinSpace{s.q, s.p, s.label + "~"} : KreinSpace{s.p, s.q, s.label + "~"};
    return r;
}

KVec DirectSum::embed(int part, const KVec& v) const {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(total.dim());
    for (int a = 0; a < parts[part].dim(); ++a) out(slot[part][a]) = v.c(a);
    return KVec(total, std::move(out));
}

KVec DirectSum::project(int part, const KVec& full) const {
    Eigen::VectorXcd out(parts[part].dim());
    for (int a = 0; a < parts[part].dim(); ++a) out(a) = full.c(slot[part][a]);
    return KVec(parts[part], std::move(out));
}

Eigen::VectorXcd DirectSum::project_keep(int part, const Eigen::VectorXcd& full) const {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(total.dim());
    for (int a = 0; a < parts[part].dim(); ++a) out(slot[part][a]) = full(slot[part][a]);
    return out;
}

DirectSum direct_sum(const std::vector<KreinSpace>& parts, std::string label) {
    if (parts.empty()) throw std::invalid_argument("direct_sum: empty component list");
    DirectSum ds;
    ds.parts = parts;
    int P = 0, Q = 0;
    for (const auto& s : parts) {
        P += s.p;
        Q += s.q;
    }
    ds.total = KreinSpace{P, Q, std::move(label)};
    int pos_off = 0, neg_off = P;
    for (const auto& s : parts) {
        std::vector<int> m(s.dim());
        for (int a = 0; a < s.p; ++a) m[a] = pos_off + a;
        for (int b = 0; b < s.q; ++b) m[s.p + b] = neg_off + b;
        pos_off += s.p;
        neg_off += s.q;
        ds.slot.push_back(std::move(m));
    }
    return ds;
}

Eigen::MatrixXd RealSubspace::basis_real() const {
    Eigen::MatrixXd M(ambient.rdim(), real_dim);
    for (int j = 0; j < real_dim; ++j) M.col(j) = to_real(spanning[j].c);
    return M;
}

RealSubspace make_real_subspace(const KreinSpace& ambient, std::vector<KVec> spanning) {
    RealSubspace W;
    W.ambient = ambient;
    W.spanning = std::move(spanning);
    W.real_dim = static_cast<int>(W.spanning.size());
    if (W.real_dim > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(W.basis_real());
        const auto& sv = svd.singularValues();
        const double thr = tolerances().rank_rtol * sv(0);
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > thr) ++rank;
        if (rank != W.real_dim)
            throw std::invalid_argument("make_real_subspace: spanning set is not real-linearly independent");
    }
    return W;
}

double subspace_residual(const RealSubspace& W, const KVec& v) {
    if (W.real_dim == 0) return v.c.norm();
    Eigen::MatrixXd M = W.basis_real();
    Eigen::VectorXd rhs = to_real(v.c);
    Eigen::VectorXd x = M.colPivHouseholderQr().solve(rhs);
    return (M * x - rhs).norm();
}

bool same_real_span(const RealSubspace& A, const RealSubspace& B) {
    if (A.real_dim != B.real_dim) return false;
    for (const auto& v : B.spanning)
        if (subspace_residual(A, v) > tolerances().tol * std::max(1.0, v.norm())) return false;
    for (const auto& v : A.spanning)
        if (subspace_residual(B, v) > tolerances().tol * std::max(1.0, v.norm())) return false;
    return true;
}

KVec Conjugation::apply(const KVec& v) const {
    return KVec(ambient, from_real(real_matrix * to_real(v.c)));
}

double ConjugationResiduals::worst() const {
    return std::max(std::max(involutive, conjugate_linear), std::max(inner_law, adapted));
}

namespace {

// Real matrix of multiplication by i.
Eigen::MatrixXd j_matrix(int d) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    J.block(0, d, d, d) = -Eigen::MatrixXd::Identity(d, d);
    J.block(d, 0, d, d) = Eigen::MatrixXd::Identity(d, d);
    return J;
}

}  // namespace

ConjugationResiduals verify_conjugation(const Conjugation& u) {
    ConjugationResiduals r;
    const int d = u.ambient.dim();
    const auto& M = u.real_matrix;
    const Eigen::MatrixXd J = j_matrix(d);
    r.involutive = (M * M - Eigen::MatrixXd::Identity(2 * d, 2 * d)).norm();
    r.conjugate_linear = (M * J + J * M).norm();

    // Inner-product law over basis pairs; sesquilinearity makes this exhaustive.
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            for (int ja = 0; ja < 2; ++ja) {
                KVec va = KVec::basis(u.ambient, a);
                if (ja) va = va.timesJ();
                KVec vb = KVec::basis(u.ambient, b);
                cplx lhs = inner(u.apply(va), u.apply(vb));
                cplx rhs = static_cast<double>(u.kappa) * std::conj(inner(va, vb));
                r.inner_law = std::max(r.inner_law, std::abs(lhs - rhs));
            }
        }
    }

    // Adaptedness: kappa=-1 exchanges the definite parts, kappa=+1 keeps them.
    for (int a = 0; a < d; ++a) {
        KVec img = u.apply(KVec::basis(u.ambient, a));
        double wrong = 0.0;
        for (int b = 0; b < d; ++b) {
            const bool same_block = (a < u.ambient.p) == (b < u.ambient.p);
            const bool allowed = (u.kappa == 1) ? same_block : !same_block;
            if (!allowed) wrong += std::norm(img.c(b));
        }
        r.adapted = std::max(r.adapted, std::sqrt(wrong));
    }
    return r;
}

SubspaceReport check_subspace_c5(const KreinSpace& space, const RealSubspace& W, Stat stat) {
    SubspaceReport rep;
    const int d = space.dim();
    const int kappa = kappa_of(stat);

    if (kappa == -1 && space.p != space.q) {
        rep.half_dimension = 1.0;
        rep.failure = "no hypermaximal neutral subspace exists (positive and negative parts differ)";
        return rep;
    }
    rep.half_dimension = (W.real_dim == d) ? 0.0 : 1.0;
    if (rep.half_dimension > 0.0) {
        rep.failure = "real dimension is not half the real dimension of the space";
        return rep;
    }

    for (int i = 0; i < W.real_dim; ++i) {
        for (int j = 0; j < W.real_dim; ++j) {
            const double v = (kappa == -1) ? metric_g(W.spanning[i], W.spanning[j])
                                           : symplectic(W.spanning[i], W.spanning[j]);
            rep.neutrality = std::max(rep.neutrality, std::abs(v));
        }
    }
    if (rep.neutrality > tolerances().tol) {
        rep.failure = (kappa == -1) ? "not neutral (g does not vanish on the subspace)"
                                    : "not isotropic (omega does not vanish on the subspace)";
        return rep;
    }

    // W = W-perp with respect to the relevant real form. Given neutrality
    // and dim_R W = d, it suffices that the pairing of W with the whole
    // space has full rank d.
    {
        Eigen::MatrixXd P(W.real_dim, 2 * d);
        for (int i = 0; i < W.real_dim; ++i) {
            for (int b = 0; b < d; ++b) {
                KVec eb = KVec::basis(space, b);
                KVec jeb = eb.timesJ();
                if (kappa == -1) {
                    P(i, b) = metric_g(W.spanning[i], eb);
                    P(i, d + b) = metric_g(W.spanning[i], jeb);
                } else {
                    P(i, b) = symplectic(W.spanning[i], eb);
                    P(i, d + b) = symplectic(W.spanning[i], jeb);
                }
            }
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(P);
        const auto& sv = svd.singularValues();
        rep.hypermaximal = (sv.size() > 0 && sv(0) > 0.0) ? sv(sv.size() - 1) / sv(0) : 0.0;
        if (rep.hypermaximal < tolerances().rank_rtol) {
            rep.failure = (kappa == -1) ? "neutral but not hypermaximal (degenerate pairing)"
                                        : "isotropic but not Lagrangian (degenerate pairing)";
            rep.hypermaximal = 1.0;
            return rep;
        }
        rep.hypermaximal = 0.0;
    }

    // Splitting V = W + JW, needed for the induced conjugation.
    {
        Eigen::MatrixXd M(2 * d, 2 * d);
        Eigen::MatrixXd B = W.basis_real();
        M.leftCols(d) = B;
        for (int j = 0; j < d; ++j) M.col(d + j) = to_real(W.spanning[j].timesJ().c);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
        const auto& sv = svd.singularValues();
        const double cond = sv(sv.size() - 1) / sv(0);
        if (cond < tolerances().rank_rtol) {
            rep.splitting = 1.0;
            rep.failure = "subspace and its J-image do not split the space";
            return rep;
        }
    }

    Conjugation u;
    u.ambient = space;
    u.kappa = kappa;
    {
        Eigen::MatrixXd M(2 * d, 2 * d);
        Eigen::MatrixXd B = W.basis_real();
        M.leftCols(d) = B;
        for (int j = 0; j < d; ++j) M.col(d + j) = to_real(W.spanning[j].timesJ().c);
        Eigen::MatrixXd D = Eigen::MatrixXd::Identity(2 * d, 2 * d);
        D.bottomRightCorner(d, d) *= -1.0;
        u.real_matrix = M * D * M.inverse();
    }
    rep.conj = verify_conjugation(u);
    if (!rep.conj.ok(tolerances().tol)) {
        if (rep.conj.adapted > tolerances().tol)
            rep.failure = "induced involution is not adapted";
        else if (rep.conj.conjugate_linear > tolerances().tol)
            rep.failure = "subspace is not compatible with the complex structure";
        else
            rep.failure = "induced involution violates the conjugation inner-product law";
        return rep;
    }

    rep.pass = true;
    return rep;
}

Conjugation conjugation_from_subspace(const KreinSpace& space, const RealSubspace& W, Stat stat) {
    SubspaceReport rep = check_subspace_c5(space, W, stat);
    if (!rep.pass) throw std::invalid_argument("conjugation_from_subspace: " + rep.failure);
    const int d = space.dim();
    Eigen::MatrixXd M(2 * d, 2 * d);
    M.leftCols(d) = W.basis_real();
    for (int j = 0; j < d; ++j) M.col(d + j) = to_real(W.spanning[j].timesJ().c);
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(2 * d, 2 * d);
    D.bottomRightCorner(d, d) *= -1.0;
    Conjugation u;
    u.ambient = space;
    u.kappa = kappa_of(stat);
    u.real_matrix = M * D * M.inverse();
    return u;
}

RealSubspace fixed_point_subspace(const Conjugation& u) {
    const int d = u.ambient.dim();
    // Fixed points are the image of (1 + u)/2.
    Eigen::MatrixXd F = 0.5 * (Eigen::MatrixXd::Identity(2 * d, 2 * d) + u.real_matrix);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(F, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double thr = tolerances().rank_rtol * sv(0);
    std::vector<KVec> span;
    for (int j = 0; j < sv.size(); ++j) {
        if (sv(j) > thr) span.push_back(KVec(u.ambient, from_real(svd.matrixU().col(j))));
    }
    return make_real_subspace(u.ambient, std::move(span));
}

RealDecomposition decompose_real(const RealSubspace& W, const KVec& v) {
    const int d = W.ambient.dim();
    if (W.real_dim != d)
        throw std::invalid_argument("decompose_real: subspace does not have half real dimension");
    Eigen::MatrixXd M(2 * d, 2 * d);
    M.leftCols(d) = W.basis_real();
    for (int j = 0; j < d; ++j) M.col(d + j) = to_real(W.spanning[j].timesJ().c);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < tolerances().rank_rtol * sv(0))
        throw std::invalid_argument("decompose_real: singular splitting, subspace invalid");
    Eigen::VectorXd x = qr.solve(to_real(v.c));
    KVec vR = KVec::zero(W.ambient);
    KVec vI = KVec::zero(W.ambient);
    for (int j = 0; j < d; ++j) {
        vR.c += x(j) * W.spanning[j].c;
        vI.c += x(d + j) * W.spanning[j].c;
    }
    RealDecomposition out{vR, vI, (vR.c + cplx(0, 1) * vI.c - v.c).norm()};
    return out;
}

GramIngestion ingest_gram(const Eigen::MatrixXcd& gram, std::string label) {
    const int n = static_cast<int>(gram.rows());
    if (gram.cols() != n) throw std::invalid_argument("ingest_gram: square matrix required");
    if ((gram - gram.adjoint()).norm() > tolerances().tol * std::max(1.0, gram.norm()))
        throw std::invalid_argument("ingest_gram: matrix is not Hermitian");

    auto form = [&](const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) -> cplx {
        return x.adjoint() * gram * y;
    };

    // Pivoted indefinite Gram-Schmidt: take the largest remaining
    // |self-norm| first; pair null directions if they ever dominate.
    std::vector<Eigen::VectorXcd> pending;
    for (int a = 0; a < n; ++a) pending.push_back(Eigen::VectorXcd::Unit(n, a));
    std::vector<Eigen::VectorXcd> basis;
    std::vector<double> signs;
    const double thr = tolerances().rank_rtol * std::max(1.0, gram.norm());
    int guard = 0;
    while (static_cast<int>(basis.size()) < n) {
        if (++guard > 8 * n + 16) throw std::invalid_argument("ingest_gram: degenerate Gram matrix");
        int best = -1;
        double best_norm = 0.0;
        std::vector<Eigen::VectorXcd> residuals;
        for (size_t i = 0; i < pending.size(); ++i) {
            Eigen::VectorXcd r = pending[i];
            for (size_t b = 0; b < basis.size(); ++b) r -= signs[b] * form(basis[b], r) * basis[b];
            residuals.push_back(r);
            const double sn = std::abs(form(r, r).real());
            if (sn > best_norm) {
                best_norm = sn;
                best = static_cast<int>(i);
            }
        }
        // Drop exhausted directions.
        for (size_t i = 0; i < pending.size();) {
            if (residuals[i].norm() < tolerances().rank_rtol) {
                pending.erase(pending.begin() + i);
                residuals.erase(residuals.begin() + i);
            } else {
                ++i;
            }
        }
        if (pending.empty()) break;
        if (best >= 0 && best_norm > thr) {
            Eigen::VectorXcd r = pending[best];
            for (size_t b = 0; b < basis.size(); ++b) r -= signs[b] * form(basis[b], r) * basis[b];
            const double sn = form(r, r).real();
            signs.push_back(sn > 0 ? 1.0 : -1.0);
            basis.push_back(r / std::sqrt(std::abs(sn)));
            pending.erase(pending.begin() + best);
            continue;
        }
        // Remaining residuals are null; combine a pairing with nonzero
        // cross term into a definite direction.
        bool fixed = false;
        for (size_t i = 0; !fixed && i < residuals.size(); ++i) {
            for (size_t j = 0; !fixed && j < residuals.size(); ++j) {
                if (i == j) continue;
                cplx c = form(residuals[i], residuals[j]);
                if (std::abs(c) > thr) {
                    pending.push_back(residuals[i] + (std::conj(c) / std::abs(c)) * residuals[j]);
                    fixed = true;
                }
            }
        }
        if (!fixed) throw std::invalid_argument("ingest_gram: degenerate Gram matrix");
    }

    // Canonical order: positive directions first.
    std::vector<int> order;
    for (size_t i = 0; i < basis.size(); ++i)
        if (signs[i] > 0) order.push_back(static_cast<int>(i));
    const int p = static_cast<int>(order.size());
    for (size_t i = 0; i < basis.size(); ++i)
        if (signs[i] < 0) order.push_back(static_cast<int>(i));

    GramIngestion out;
    out.space = KreinSpace{p, n - p, std::move(label)};
    out.from_canonical.resize(n, n);
    for (int j = 0; j < n; ++j) out.from_canonical.col(j) = basis[order[j]];
    out.to_canonical = out.from_canonical.inverse();
    return out;
}

Eigen::MatrixXcd random_unitary(int n, Rng& rng) {
    Eigen::MatrixXcd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = rng.cnormal();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
    Eigen::MatrixXcd Q = qr.householderQ();
    Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        cplx r = R(j, j);
        Q.col(j) *= (r == 0.0) ? 1.0 : r / std::abs(r);
    }
    return Q;
}

Eigen::MatrixXcd random_symmetric_unitary(int n, Rng& rng) {
    Eigen::MatrixXcd R = random_unitary(n, rng);
    return (R.transpose() * R).eval();
}

Conjugation random_conjugation(const KreinSpace& space, Stat stat, Rng& rng) {
    const int kappa = kappa_of(stat);
    const int d = space.dim();
    Conjugation u;
    u.ambient = space;
    u.kappa = kappa;
    // Complex-coordinate action z -> T conj(z); assemble the real matrix.
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(d, d);
    if (kappa == -1) {
        if (space.p != space.q)
            throw std::invalid_argument("random_conjugation: fermionic case needs p == q");
        Eigen::MatrixXcd B = random_unitary(space.p, rng);
        T.topRightCorner(space.p, space.q) = B;
        T.bottomLeftCorner(space.q, space.p) = B.transpose();
    } else {
        if (space.p > 0) T.topLeftCorner(space.p, space.p) = random_symmetric_unitary(space.p, rng);
        if (space.q > 0) T.bottomRightCorner(space.q, space.q) = random_symmetric_unitary(space.q, rng);
    }
    Eigen::MatrixXd M(2 * d, 2 * d);
    M.block(0, 0, d, d) = T.real();
    M.block(0, d, d, d) = T.imag();
    M.block(d, 0, d, d) = T.imag();
    M.block(d, d, d, d) = -T.real();
    u.real_matrix = M;
    return u;
}

KVec random_vector(const KreinSpace& space, Rng& rng) {
    Eigen::VectorXcd v(space.dim());
    for (int a = 0; a < space.dim(); ++a) v(a) = rng.cnormal();
    return KVec(space, std::move(v));
}

}  // namespace gbf
