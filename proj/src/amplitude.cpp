#include "gbf/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gbf/kernels.hpp"

namespace gbf {

namespace {

Eigen::MatrixXd split_matrix(const RealSubspace& W) {
    const int d = W.ambient.dim();
    Eigen::MatrixXd M(2 * d, 2 * d);
    M.leftCols(d) = W.basis_real();
    for (int j = 0; j < d; ++j) M.col(d + j) = to_real(W.spanning[j].timesJ().c);
    return M;
}

}  // namespace

AmplitudeContext::AmplitudeContext(const TheorySpec& theory, const Region& region, int nmax)
    : ds_(theory.boundary_sum(region)),
      W_(theory.region_subspace(region)),
      uM_(conjugation_from_subspace(ds_.total, W_, theory.stat)),
      stat_(theory.stat),
      nmax_(nmax),
      split_(split_matrix(W_)) {}

HatVec AmplitudeContext::hat(const KVec& xi) const {
    const int d = ds_.total.dim();
    Eigen::VectorXd x = split_.solve(to_real(xi.c));
    Eigen::VectorXcd re = Eigen::VectorXcd::Zero(d);
    Eigen::VectorXcd im = Eigen::VectorXcd::Zero(d);
    for (int j = 0; j < d; ++j) {
        re += x(j) * W_.spanning[j].c;
        im += x(d + j) * W_.spanning[j].c;
    }
    const double res = (re + cplx(0, 1) * im - xi.c).norm();
    if (res > tolerances().tol * std::max(1.0, xi.norm()))
        throw std::runtime_error("hat: real decomposition failed, subspace invalid");
    return {std::move(re), std::move(im)};
}

cplx AmplitudeContext::hat_pair(const HatVec& a, const HatVec& b) const {
    auto ip = [&](const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
        cplx acc = 0.0;
        for (int t = 0; t < ds_.total.dim(); ++t)
            acc += ds_.total.sign(t) * std::conj(x(t)) * y(t);
        return acc;
    };
    const cplx i(0.0, 1.0);
    return ip(a.re, b.re) - i * ip(a.re, b.im) - i * ip(a.im, b.re) - ip(a.im, b.im);
}

const Eigen::MatrixXcd& AmplitudeContext::basis_pairs() const {
    if (!basis_pairs_) {
        const int d = ds_.total.dim();
        std::vector<HatVec> hats;
        hats.reserve(d);
        for (int a = 0; a < d; ++a) hats.push_back(hat(KVec::basis(ds_.total, a)));
        Eigen::MatrixXcd P(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) P(a, b) = hat_pair(hats[a], hats[b]);
        basis_pairs_ = std::move(P);
    }
    return *basis_pairs_;
}

cplx AmplitudeContext::amplitude_from_pairs(const Eigen::MatrixXcd& pairs,
                                            const std::vector<int>& pick) const {
    const int k = static_cast<int>(pick.size());
    if (k % 2 != 0) return 0.0;
    if (k == 0) return 1.0;
    Eigen::MatrixXcd A(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) A(i, j) = pairs(pick[i], pick[j]);
    if (kernels::fast_paths_enabled()) return kernels::pairing_fast(A, kappa());
    return kernels::pairing_sum(A, kappa());
}

cplx AmplitudeContext::amplitude_gen(const std::vector<KVec>& xis) const {
    const int k = static_cast<int>(xis.size());
    if (k % 2 != 0) return 0.0;
    if (k == 0) return 1.0;
    std::vector<HatVec> hats;
    hats.reserve(k);
    for (const auto& v : xis) hats.push_back(hat(v));
    Eigen::MatrixXcd A(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) A(i, j) = hat_pair(hats[i], hats[j]);
    if (kernels::fast_paths_enabled()) return kernels::pairing_fast(A, kappa());
    return kernels::pairing_sum(A, kappa());
}

cplx AmplitudeContext::amplitude_gen_oracle(const std::vector<KVec>& xis) const {
    const int k = static_cast<int>(xis.size());
    if (k % 2 != 0) return 0.0;
    if (k == 0) return 1.0;
    std::vector<HatVec> hats;
    hats.reserve(k);
    for (const auto& v : xis) hats.push_back(hat(v));
    Eigen::MatrixXcd A(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) A(i, j) = hat_pair(hats[i], hats[j]);
    return kernels::pairing_sum(A, kappa());
}

cplx AmplitudeContext::amplitude(const FockState& psi) const {
    if (!psi.one_particle.same_signature(ds_.total))
        throw std::invalid_argument("amplitude: state does not live on the boundary space");
    const Eigen::MatrixXcd& P = basis_pairs();
    cplx acc = 0.0;
    for (const auto& [idx, c] : psi.coeffs) {
        if (idx.size() % 2 != 0) continue;  // f-graded: odd part maps to exactly 0
        acc += c * index_norm(idx) * amplitude_from_pairs(P, idx);
    }
    return acc;
}

AmplitudeContext slice_context(const TheorySpec& theory, const std::string& label, int nmax) {
    TheorySpec probe = theory;
    Region slice = make_slice_region(theory, label, "slice:" + label);
    probe.regions.push_back(slice);
    return AmplitudeContext(probe, slice, nmax);
}

Report check_t3x(const TheorySpec& theory, const std::string& label, int pairs, int max_degree,
                 Rng& rng) {
    Report rep;
    const KreinSpace& s = theory.base_space(label);
    auto rev = orientation_reverse(s, theory.stat);
    AmplitudeContext ctx = slice_context(theory, label, std::max(6, 2 * max_degree));
    const int kappa = ctx.kappa();

    // Auxiliary vanishing identities over basis pairs.
    double aux = 0.0;
    for (int a = 0; a < s.dim(); ++a) {
        for (int b = 0; b < s.dim(); ++b) {
            for (int ja = 0; ja < 2; ++ja) {
                KVec eta = KVec::basis(s, a);
                if (ja) eta = eta.timesJ();
                KVec xi = KVec::basis(s, b);
                HatVec ha = ctx.hat(ctx.boundary().embed(0, rev.apply(eta)));
                HatVec hb = ctx.hat(ctx.boundary().embed(1, xi));
                aux = std::max(aux, std::abs(ctx.hat_pair(ha, ha)));
                aux = std::max(aux, std::abs(ctx.hat_pair(hb, hb)));
                cplx cross = ctx.hat_pair(ha, hb);
                cplx want = static_cast<double>(kappa) * inner(xi, eta);
                aux = std::max(aux, std::abs(cross - want));
            }
        }
    }
    rep.add("slice pairing identities " + label, "T3x", aux, tolerances().tol);

    double worst = 0.0;
    for (int t = 0; t < pairs; ++t) {
        Rng sub = rng.child(t);
        const int m = static_cast<int>(sub.below(max_degree + 1));
        const int n = static_cast<int>(sub.below(max_degree + 1));
        std::vector<KVec> etas, xis;
        for (int i = 0; i < m; ++i) etas.push_back(random_vector(s, sub));
        for (int i = 0; i < n; ++i) xis.push_back(random_vector(s, sub));

        // tau(iota(psi') (x) psi) on generating states: kappa^m times the
        // merged state with reversed, conjugated eta-entries first.
        std::vector<KVec> merged;
        for (int i = m - 1; i >= 0; --i) merged.push_back(ctx.boundary().embed(0, rev.apply(etas[i])));
        for (int i = 0; i < n; ++i) merged.push_back(ctx.boundary().embed(1, xis[i]));
        cplx lhs = kappa_pow(kappa, m) * ctx.amplitude_gen(merged);
        cplx rhs = gen_inner(theory.stat, etas, xis);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    rep.add("inner product as slice amplitude " + label, "T3x", worst, tolerances().tol);
    return rep;
}

Report check_conjugation_law(const AmplitudeContext& ctx, int trials, int max_degree, Rng& rng) {
    Report rep;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng sub = rng.child(t);
        const int k = static_cast<int>(sub.below(max_degree + 1));
        std::vector<KVec> xis;
        for (int i = 0; i < k; ++i) xis.push_back(random_vector(ctx.space(), sub));
        std::vector<KVec> conj_rev;
        for (int i = k - 1; i >= 0; --i) conj_rev.push_back(ctx.conjugation().apply(xis[i]));
        cplx lhs = kappa_pow(ctx.kappa(), k) * ctx.amplitude_gen(conj_rev);
        cplx rhs = std::conj(ctx.amplitude_gen(xis));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    rep.add("conjugation law", "T4", worst, tolerances().tol);
    return rep;
}

namespace {

DirectSum reorder_two(const DirectSum& ds, int first, int second) {
    DirectSum out;
    out.total = ds.total;
    out.parts = {ds.parts[first], ds.parts[second]};
    out.slot = {ds.slot[first], ds.slot[second]};
    return out;
}

}  // namespace

FockState QuantumEvolution::apply(const FockState& psi) const {
    return map_one_particle(psi, classical.final_.total, classical.map);
}

QuantumEvolution quantum_evolution(const TheorySpec& theory, const Region& region,
                                   const std::vector<int>& group2, const std::vector<int>& group1,
                                   int trials, Rng& rng, int nmax) {
    if (group1.size() != 1 || group2.size() != 1)
        throw std::invalid_argument("quantum_evolution: single-component split expected");
    QuantumEvolution ev;
    ev.classical = classical_evolution(theory, region, group2, group1);
    AmplitudeContext ctx(theory, region, nmax);

    const int i1 = group1[0], i2 = group2[0];
    const KreinSpace l1 = theory.space_of(region.boundary.comps[i1]);       // standard
    const KreinSpace l2rev = theory.space_of(region.boundary.comps[i2]);    // reversed copy
    const KreinSpace& l2 = theory.base_space(region.boundary.comps[i2].label);
    auto rev2 = orientation_reverse(l2, theory.stat);
    DirectSum merge21 = reorder_two(ctx.boundary(), i2, i1);

    double lemma = 0.0, prop = 0.0, iso = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng sub = rng.child(t);
        const int deg1 = static_cast<int>(sub.below(3));
        const int deg2 = static_cast<int>(sub.below(3));
        FockState psi = random_fock_state(l1, theory.stat, deg1, sub, nmax);
        FockState psi2 = random_fock_state(l2rev, theory.stat, deg2, sub, nmax);

        // rho_M(tau(psi' (x) psi)) = kappa^{deg(psi)} <U_M psi, psi'>_2.
        // Conjugate-linear U_M restricted to F(L1): kappa^n psi[u e_{a_n}..u e_{a_1}],
        // read in the reversed final space.
        FockState um;
        um.one_particle = l2rev;
        um.stat = theory.stat;
        um.nmax = nmax;
        for (const auto& [idx, c] : psi.coeffs) {
            const int m = static_cast<int>(idx.size());
            std::vector<KVec> imgs;
            for (int i = m - 1; i >= 0; --i) {
                KVec e = ctx.boundary().embed(i1, KVec::basis(l1, idx[i]));
                KVec img = ctx.conjugation().apply(e);
                imgs.push_back(ctx.boundary().project(i2, img));
            }
            FockState term = generating_state(l2rev, theory.stat, imgs, nmax);
            const cplx scale = kappa_pow(ctx.kappa(), m) * index_norm(idx) * std::conj(c);
            for (const auto& [jdx, tc] : term.coeffs) um.add(jdx, scale * tc);
        }
        um.prune();

        FockState merged = tau_merge(psi2, psi, merge21);
        cplx lhs = ctx.amplitude(merged);
        int dpsi = 0;
        psi.homogeneous(&dpsi);
        cplx rhs = kappa_pow(ctx.kappa(), dpsi) * fock_inner(um, psi2);
        lemma = std::max(lemma, std::abs(lhs - rhs));

        // Geometric form with iota and the evolution map.
        FockState psi2_std = random_fock_state(l2, theory.stat, deg2, sub, nmax);
        FockState merged2 = tau_merge(iota(psi2_std), psi, merge21);
        cplx lhs2 = ctx.amplitude(merged2);
        FockState evolved = map_one_particle(psi, ev.classical.final_.total, ev.classical.map);
        cplx rhs2 = fock_inner(psi2_std, evolved);
        prop = std::max(prop, std::abs(lhs2 - rhs2));

        FockState psi_b = random_fock_state(l1, theory.stat, deg1, sub, nmax);
        FockState ea = map_one_particle(psi, ev.classical.final_.total, ev.classical.map);
        FockState eb = map_one_particle(psi_b, ev.classical.final_.total, ev.classical.map);
        iso = std::max(iso, std::abs(fock_inner(ea, eb) - fock_inner(psi, psi_b)));
    }
    ev.report.add("amplitude as inner product with U_M", "T4", lemma, tolerances().tol);
    ev.report.add("evolution form of the amplitude", "T4", prop, tolerances().tol);
    ev.report.add("evolution isometry", "T4", iso, tolerances().tol);
    ev.report.add("classical split residual", "C5", ev.classical.split_residual, tolerances().tol);
    return ev;
}

namespace {

// Dense view of Fock states over a shared index list.
struct DenseStates {
    std::vector<FockIndex> indices;
    std::vector<double> signs;
    Eigen::MatrixXcd cols;  // one column per state
};

DenseStates densify(const KreinSpace& space, const std::vector<FockState>& states) {
    std::map<FockIndex, int> pos;
    for (const auto& s : states)
        for (const auto& [idx, c] : s.coeffs)
            if (!pos.count(idx)) pos.emplace(idx, 0);
    int k = 0;
    DenseStates out;
    for (auto& [idx, p] : pos) {
        p = k++;
        out.indices.push_back(idx);
        out.signs.push_back(index_sign(space, idx));
    }
    out.cols = Eigen::MatrixXcd::Zero(k, states.size());
    for (size_t j = 0; j < states.size(); ++j)
        for (const auto& [idx, c] : states[j].coeffs) out.cols(pos.at(idx), j) = c;
    return out;
}

int rank_of(const Eigen::MatrixXcd& m) {
    if (m.cols() == 0 || m.rows() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv(0) == 0.0) return 0;
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tolerances().rank_rtol * sv(0)) ++r;
    return r;
}

}  // namespace

double probability(const AmplitudeContext& ctx, const std::vector<FockState>& S,
                   const std::vector<FockState>& A) {
    if (S.empty()) throw std::invalid_argument("probability: empty preparation span");
    for (const auto& lst : {&S, &A})
        for (const auto& psi : *lst)
            for (const auto& [idx, c] : psi.coeffs)
                if (ctx.kappa() == -1 && idx.size() % 2 != 0 && std::abs(c) > tolerances().drop)
                    throw std::invalid_argument("probability: spans must have f-degree zero");

    std::vector<FockState> all = A;
    all.insert(all.end(), S.begin(), S.end());
    DenseStates d = densify(ctx.space(), all);
    const int na = static_cast<int>(A.size());
    Eigen::MatrixXcd MA = d.cols.leftCols(na);
    Eigen::MatrixXcd MS = d.cols.rightCols(static_cast<int>(S.size()));

    // A inside S as spans.
    {
        Eigen::MatrixXcd joined(d.cols.rows(), d.cols.cols());
        joined << MA, MS;
        if (rank_of(joined) != rank_of(MS))
            throw std::invalid_argument("probability: question span is not contained in the preparation span");
    }

    // Adaptedness: the positive-sign part of every member stays inside the span.
    auto part = [&](const Eigen::MatrixXcd& M, double sign) {
        Eigen::MatrixXcd out = M;
        for (int r = 0; r < out.rows(); ++r)
            if (d.signs[r] != sign) out.row(r).setZero();
        return out;
    };
    for (const Eigen::MatrixXcd* M : {&MA, &MS}) {
        Eigen::MatrixXcd plus = part(*M, 1.0);
        Eigen::MatrixXcd joined(M->rows(), M->cols() * 2);
        joined << *M, plus;
        if (rank_of(joined) != rank_of(*M))
            throw std::invalid_argument("probability: span is not adapted to the Krein decomposition");
    }

    // Krein Gram-Schmidt inside each definite part, question vectors first.
    auto orthonormalize = [&](double sign) {
        std::vector<Eigen::VectorXcd> basis;
        int from_a = 0;
        for (int j = 0; j < d.cols.cols(); ++j) {
            Eigen::VectorXcd v = part(d.cols.col(j), sign);
            for (const auto& b : basis) {
                cplx ip = 0.0;
                for (int r = 0; r < v.size(); ++r) ip += d.signs[r] * std::conj(b(r)) * v(r);
                v -= sign * ip * b;
            }
            double n2 = 0.0;
            for (int r = 0; r < v.size(); ++r) n2 += d.signs[r] * std::norm(v(r));
            n2 *= sign;
            if (n2 > 1e-16 && std::sqrt(n2) > tolerances().rank_rtol) {
                basis.push_back(v / std::sqrt(n2));
                if (j < na) ++from_a;
            }
        }
        return std::make_pair(basis, from_a);
    };
    auto [bp, ap] = orthonormalize(1.0);
    auto [bm, am] = orthonormalize(-1.0);

    auto rho_of = [&](const Eigen::VectorXcd& v) {
        FockState psi;
        psi.one_particle = ctx.space();
        psi.stat = ctx.stat();
        psi.nmax = ctx.nmax();
        for (int r = 0; r < v.size(); ++r)
            if (std::abs(v(r)) > tolerances().drop) psi.coeffs[d.indices[r]] = v(r);
        return ctx.amplitude(psi);
    };

    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < bp.size(); ++i) {
        double a2 = std::norm(rho_of(bp[i]));
        den += a2;
        if (static_cast<int>(i) < ap) num += a2;
    }
    for (size_t i = 0; i < bm.size(); ++i) {
        double a2 = std::norm(rho_of(bm[i]));
        den += a2;
        if (static_cast<int>(i) < am) num += a2;
    }
    if (den < 1e-12) throw std::runtime_error("probability: undefined, all amplitudes vanish");
    return num / den;
}

CoherentCheck coherent_amplitude_check(const AmplitudeContext& ctx, const KVec& xi, int nterms) {
    if (ctx.stat() != Stat::Bosonic)
        throw std::invalid_argument("coherent_amplitude_check: bosonic contexts only");
    CoherentCheck out{};
    cplx acc = 0.0;
    double factorial = 1.0;
    for (int n = 0; n <= nterms; ++n) {
        if (n > 0) factorial *= n;
        std::vector<KVec> copies(n, xi);
        acc += ctx.amplitude_gen(copies) / (factorial * std::pow(2.0, n));
    }
    out.partial_sum = acc;
    HatVec h = ctx.hat(xi);
    cplx z = 0.25 * ctx.hat_pair(h, h);
    out.target = std::exp(z);
    // Exact term structure: the degree-2k term equals (z)^k / k!, so the
    // tail is the exponential remainder beyond k = floor(nterms/2).
    const int kmax = nterms / 2;
    const double az = std::abs(z);
    double term = std::pow(az, kmax + 1);
    for (int i = 2; i <= kmax + 1; ++i) term /= i;
    double ratio = az / (kmax + 2);
    out.tail_bound = (ratio < 1.0) ? term / (1.0 - ratio) : std::exp(az);
    return out;
}

}  // namespace gbf
