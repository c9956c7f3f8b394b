#include "gbf/gluing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace gbf {

KVec CutoffSubspace::project(const KVec& v) const {
    KVec out = KVec::zero(ambient);
    for (size_t a = 0; a < basis.size(); ++a) out = out + (signs[a] * inner(basis[a], v)) * basis[a];
    return out;
}

double CutoffSubspace::containment_residual(const KVec& v) const {
    return (project(v).c - v.c).norm();
}

CutoffSubspace krein_span(const KreinSpace& ambient, std::vector<KVec> vectors) {
    CutoffSubspace out;
    out.ambient = ambient;
    const double thr = 1e-7;
    std::vector<KVec> pending = std::move(vectors);

    auto residual = [&](const KVec& v) {
        KVec r = v;
        for (size_t a = 0; a < out.basis.size(); ++a)
            r = r - (out.signs[a] * inner(out.basis[a], v)) * out.basis[a];
        return r;
    };

    int guard = 0;
    while (!pending.empty()) {
        if (++guard > 4 * ambient.dim() + 64)
            throw std::runtime_error("krein_span: no nondegenerate completion found");
        // Greedy pivot: largest |self-norm| of the projected residual.
        int best = -1;
        double best_norm = 0.0;
        std::vector<KVec> residuals;
        residuals.reserve(pending.size());
        for (size_t i = 0; i < pending.size(); ++i) {
            KVec r = residual(pending[i]);
            residuals.push_back(r);
            const double n = std::abs(inner(r, r).real());
            if (n > best_norm) {
                best_norm = n;
                best = static_cast<int>(i);
            }
        }
        // Drop vectors already inside the span.
        bool dropped = false;
        for (size_t i = 0; i < pending.size();) {
            if (residuals[i].norm() < thr * std::max(1.0, pending[i].norm())) {
                pending.erase(pending.begin() + i);
                residuals.erase(residuals.begin() + i);
                dropped = true;
            } else {
                ++i;
            }
        }
        if (pending.empty()) break;
        if (dropped) continue;

        if (best >= 0 && best_norm > thr) {
            KVec r = residual(pending[best]);
            const double n = inner(r, r).real();
            out.signs.push_back(n > 0 ? 1.0 : -1.0);
            out.basis.push_back((1.0 / std::sqrt(std::abs(n))) * r);
            pending.erase(pending.begin() + best);
            continue;
        }
        // All residuals are null directions: pair two of them to produce a
        // vector of nonzero norm, or pull in a canonical direction.
        bool fixed = false;
        for (size_t i = 0; !fixed && i < residuals.size(); ++i) {
            for (size_t j = 0; !fixed && j < residuals.size(); ++j) {
                if (i == j) continue;
                cplx c = inner(residuals[i], residuals[j]);
                if (std::abs(c) > thr) {
                    pending.push_back(residuals[i] + (std::conj(c) / std::abs(c)) * residuals[j]);
                    fixed = true;
                }
            }
        }
        if (!fixed) {
            if (out.dim() + static_cast<int>(pending.size()) >= ambient.dim())
                throw std::runtime_error("krein_span: degenerate span cannot be completed");
            for (int a = 0; a < ambient.dim(); ++a) pending.push_back(KVec::basis(ambient, a));
        }
    }
    return out;
}

CutoffSubspace full_cutoff(const KreinSpace& ambient) {
    CutoffSubspace out;
    out.ambient = ambient;
    for (int a = 0; a < ambient.dim(); ++a) {
        out.basis.push_back(KVec::basis(ambient, a));
        out.signs.push_back(ambient.sign(a));
    }
    return out;
}

GluingContext::GluingContext(const TheorySpec& theory, const GluingDesc& g, int nmax)
    : theory_(&theory),
      g_(&g),
      ctx_m_(theory, theory.region(g.region), nmax),
      ctx_m1_(theory, theory.region(g.result), nmax),
      sigma_(theory.base_space(theory.region(g.region).boundary.comps[g.pos_std].label)),
      rev_(orientation_reverse(sigma_, theory.stat)) {
    const Region& m = theory.region(g.region);
    for (int i = 0; i < static_cast<int>(m.boundary.comps.size()); ++i)
        if (i != g.pos_std && i != g.pos_rev) rest_pos_.push_back(i);
}

KVec GluingContext::embed_rest(const KVec& phi) const {
    const DirectSum& ds1 = ctx_m1_.boundary();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(ctx_m_.space().dim());
    for (size_t t = 0; t < rest_pos_.size(); ++t) {
        KVec comp = ds1.project(static_cast<int>(t), phi);
        out += ctx_m_.boundary().embed(rest_pos_[t], comp).c;
    }
    return KVec(ctx_m_.space(), out);
}

KVec GluingContext::embed_sigma(const KVec& xi) const {
    return ctx_m_.boundary().embed(g_->pos_std, xi);
}

KVec GluingContext::embed_sigma_bar(const KVec& xi) const {
    return ctx_m_.boundary().embed(g_->pos_rev, rev_.apply(xi));
}

cplx GluingContext::rho_m1(const std::vector<KVec>& phis) const {
    return ctx_m1_.amplitude_gen(phis);
}

CutoffSubspace GluingContext::lift_span(const std::vector<KVec>& phis) const {
    std::vector<KVec> lifts;
    for (const auto& phi : phis) {
        RealDecomposition dec = decompose_real(ctx_m1_.subspace(), phi);
        for (const KVec* part : {&dec.vR, &dec.vI}) {
            if (part->norm() < tolerances().drop) continue;
            TildeLift lift = tilde_lift(*theory_, *g_, *part);
            if (lift.phi_tilde.norm() > tolerances().drop) lifts.push_back(lift.phi_tilde);
        }
    }
    return krein_span(sigma_, std::move(lifts));
}

namespace {

int env_threads() {
    const char* s = std::getenv("GBF_THREADS");
    if (!s) return 1;
    int n = std::atoi(s);
    return n > 0 ? n : 1;
}

// Ordered tuples over {0..d-1}^m; fermionic tuples with repeats contribute
// exactly zero and are skipped.
void enumerate_tuples(int d, int m, bool skip_repeats, bool sorted_only,
                      std::vector<std::vector<int>>& out) {
    std::vector<int> t(m, 0);
    if (m == 0) {
        out.push_back(t);
        return;
    }
    while (true) {
        bool use = true;
        if (skip_repeats) {
            for (int i = 0; use && i < m; ++i)
                for (int j = i + 1; j < m; ++j)
                    if (t[i] == t[j]) {
                        use = false;
                        break;
                    }
        }
        if (use && sorted_only) {
            for (int i = 1; i < m; ++i)
                if (t[i] < t[i - 1]) {
                    use = false;
                    break;
                }
        }
        if (use) out.push_back(t);
        int pos = m - 1;
        while (pos >= 0 && t[pos] == d - 1) t[pos--] = 0;
        if (pos < 0) break;
        ++t[pos];
    }
}

}  // namespace

GluingContext::SumResult GluingContext::glue_sum(const std::vector<KVec>& phis,
                                                 const CutoffSubspace& alpha, int mmax,
                                                 bool sorted_tuples) const {
    SumResult res;
    const int kappa = ctx_m_.kappa();
    const int d = alpha.dim();
    const int n = static_cast<int>(phis.size());
    const bool fermionic = (kappa == -1);
    const int cap = fermionic ? std::min(mmax, d) : mmax;

    // Pair matrix over all one-particle vectors that can appear:
    // embedded phis, embedded alpha vectors, embedded reversed alpha vectors.
    std::vector<HatVec> hats;
    hats.reserve(n + 2 * d);
    for (const auto& phi : phis) hats.push_back(ctx_m_.hat(embed_rest(phi)));
    for (const auto& xi : alpha.basis) hats.push_back(ctx_m_.hat(embed_sigma(xi)));
    for (const auto& xi : alpha.basis) hats.push_back(ctx_m_.hat(embed_sigma_bar(xi)));
    const int nv = static_cast<int>(hats.size());
    Eigen::MatrixXcd pairs(nv, nv);
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j) pairs(i, j) = ctx_m_.hat_pair(hats[i], hats[j]);

    const int threads = env_threads();
    for (int m = 0; m <= cap; ++m) {
        std::vector<std::vector<int>> tuples;
        enumerate_tuples(d, m, fermionic, sorted_tuples, tuples);
        const double mfact = std::tgamma(static_cast<double>(m) + 1.0);
        const double base_weight = 1.0 / (std::pow(2.0, m) * mfact);

        auto eval_tuple = [&](const std::vector<int>& t) -> cplx {
            double sign = 1.0;
            for (int a : t)
                if (alpha.signs[a] < 0) sign = -sign;
            double weight = base_weight;
            if (sorted_tuples) {
                // Multiplicity of the sorted tuple among ordered ones.
                FockIndex idx(t.begin(), t.end());
                weight *= mfact / index_multiplicity(idx);
            }
            std::vector<int> pick;
            pick.reserve(n + 2 * m);
            for (int i = 0; i < n; ++i) pick.push_back(i);
            for (int i = 0; i < m; ++i) pick.push_back(n + t[i]);
            for (int i = m - 1; i >= 0; --i) pick.push_back(n + d + t[i]);
            cplx a = ctx_m_.amplitude_from_pairs(pairs, pick);
            return weight * sign * kappa_pow(kappa, m) * a;
        };

        cplx mterm = 0.0;
        if (threads <= 1 || tuples.size() < 64) {
            for (const auto& t : tuples) mterm += eval_tuple(t);
        } else {
            const int nt = std::min<int>(threads, 16);
            std::vector<cplx> slot(nt, 0.0);
            std::vector<std::thread> pool;
            const size_t chunk = (tuples.size() + nt - 1) / nt;
            for (int w = 0; w < nt; ++w) {
                pool.emplace_back([&, w] {
                    const size_t lo = w * chunk;
                    const size_t hi = std::min(tuples.size(), lo + chunk);
                    cplx acc = 0.0;
                    for (size_t i = lo; i < hi; ++i) acc += eval_tuple(tuples[i]);
                    slot[w] = acc;
                });
            }
            for (auto& th : pool) th.join();
            for (const auto& s : slot) mterm += s;
        }
        res.value += mterm;
        res.m_abs.push_back(std::abs(mterm));
    }

    if (!fermionic) {
        // Absolute-convergence surrogate: three consecutive per-degree
        // contributions below 1e-10 and decreasing. Contributions at the
        // rounding floor count as decreasing.
        res.truncated = true;
        int streak = 0;
        for (size_t i = 1; i < res.m_abs.size(); ++i) {
            const bool small = res.m_abs[i] < 1e-10;
            const bool down = res.m_abs[i] <= res.m_abs[i - 1] || res.m_abs[i] < 1e-13;
            if (small && down)
                ++streak;
            else
                streak = 0;
            if (streak >= 3) {
                res.truncated = false;
                break;
            }
        }
        res.well_defined = !res.truncated;
    }
    return res;
}

GluingContext::SumResult anomaly(const GluingContext& gc, const CutoffSubspace& alpha, int mmax) {
    return gc.glue_sum({}, alpha, mmax);
}

AnomalySeries anomaly_limit(const GluingContext& gc, const std::vector<CutoffSubspace>& chain,
                            int mmax) {
    AnomalySeries s;
    for (const auto& alpha : chain) {
        auto r = anomaly(gc, alpha, mmax);
        s.values.push_back(r.value);
        s.well_defined.push_back(r.well_defined);
        if (s.values.size() > 1) s.steps.push_back(std::abs(s.values.back() - s.values[s.values.size() - 2]));
    }
    if (!s.values.empty()) {
        s.final_value = s.values.back();
        // Small successive differences signal stabilization; a chain that
        // reaches the whole space has attained its limit outright.
        const bool exhausted = chain.back().dim() == chain.back().ambient.dim();
        s.stabilized = s.well_defined.back() &&
                       (exhausted || (!s.steps.empty() && s.steps.back() <= tolerances().tol));
    }
    return s;
}

Report check_t5a(const TheorySpec& theory, const std::string& m1, const std::string& m2,
                 const FockState& psi1, const FockState& psi2, int nmax) {
    Report rep;
    TheorySpec probe = theory;
    Region u = make_union_region(theory, "__union", {m1, m2});
    probe.regions.push_back(u);
    AmplitudeContext ctx_union(probe, u, nmax);
    AmplitudeContext a1(theory, theory.region(m1), nmax);
    AmplitudeContext a2(theory, theory.region(m2), nmax);

    // The union boundary concatenates the two boundaries; map the factors'
    // canonical coordinates onto the union's total slots.
    DirectSum layout;
    layout.total = ctx_union.space();
    layout.parts = {a1.space(), a2.space()};
    std::vector<int> s1(a1.space().dim()), s2(a2.space().dim());
    const DirectSum& uds = ctx_union.boundary();
    const size_t n1 = theory.region(m1).boundary.comps.size();
    for (size_t i = 0; i < u.boundary.comps.size(); ++i) {
        for (int a = 0; a < uds.parts[i].dim(); ++a) {
            if (i < n1)
                s1[a1.boundary().slot[i][a]] = uds.slot[i][a];
            else
                s2[a2.boundary().slot[i - n1][a]] = uds.slot[i][a];
        }
    }
    layout.slot = {s1, s2};

    FockState merged = tau_merge(psi1, psi2, layout);
    cplx lhs = ctx_union.amplitude(merged);
    cplx rhs = a1.amplitude(psi1) * a2.amplitude(psi2);
    rep.add("disjoint factorization " + m1 + "+" + m2, "T5a", std::abs(lhs - rhs),
            tolerances().tol, "");
    return rep;
}

double T5bResult::relative_error() const {
    return std::abs(lhs - rhs) / std::max(1.0, std::max(std::abs(lhs), std::abs(rhs)));
}

T5bResult check_t5b(const GluingContext& gc, const std::vector<KVec>& phis,
                    const CutoffSubspace& alpha, int mmax) {
    T5bResult out;
    CutoffSubspace lifts = gc.lift_span(phis);
    for (const auto& v : lifts.basis)
        out.lift_containment = std::max(out.lift_containment, alpha.containment_residual(v));
    if (out.lift_containment > 1e-6)
        throw std::invalid_argument(
            "check_t5b: cutoff subspace does not contain the lift span of the boundary state");

    auto ca = anomaly(gc, alpha, mmax);
    auto rhs = gc.glue_sum(phis, alpha, mmax);
    out.well_defined = ca.well_defined && rhs.well_defined;
    out.lhs = gc.rho_m1(phis) * ca.value;
    out.rhs = rhs.value;
    return out;
}

std::vector<T5bStarStep> check_t5b_renormalized(const GluingContext& gc,
                                                const std::vector<KVec>& phis,
                                                const std::vector<CutoffSubspace>& chain,
                                                int mmax) {
    if (gc.ctx_m().stat() != Stat::Fermionic)
        throw std::invalid_argument("check_t5b_renormalized: stated for fermionic theories only");
    std::vector<T5bStarStep> out;
    CutoffSubspace lifts = gc.lift_span(phis);
    const cplx rho1 = gc.rho_m1(phis);
    for (const auto& gamma : chain) {
        T5bStarStep step;
        double worst = 0.0;
        for (const auto& v : lifts.basis)
            worst = std::max(worst, gamma.containment_residual(v));
        step.contains_lifts = worst <= 1e-6;
        auto cg = anomaly(gc, gamma, mmax);
        auto rhs = gc.glue_sum(phis, gamma, mmax);
        step.difference = rho1 * cg.value - rhs.value;
        out.push_back(step);
    }
    return out;
}

Report appendix_identities(const GluingContext& gc, int samples, Rng& rng) {
    Report rep;
    const AmplitudeContext& cm = gc.ctx_m();
    const AmplitudeContext& c1 = gc.ctx_m1();
    const int kappa = cm.kappa();
    double sub1 = 0.0, sub2 = 0.0, phid = 0.0;
    for (int t = 0; t < samples; ++t) {
        Rng s = rng.child(t);
        // phi must lie in the solution subspace of the glued region.
        auto draw_phi = [&]() {
            KVec raw = random_vector(c1.space(), s);
            RealDecomposition dec = decompose_real(c1.subspace(), raw);
            return dec.vR;
        };
        KVec phi = draw_phi();
        KVec phi2 = draw_phi();
        KVec xi = random_vector(gc.sigma(), s);
        TildeLift lift = tilde_lift(gc.theory(), gc.desc(), phi);
        TildeLift lift2 = tilde_lift(gc.theory(), gc.desc(), phi2);

        HatVec h_xi_s = cm.hat(gc.embed_sigma(xi));
        HatVec h_xi_b = cm.hat(gc.embed_sigma_bar(xi));
        HatVec h_phi = cm.hat(gc.embed_rest(phi));
        KVec diag = gc.embed_sigma(lift.phi_tilde) + gc.embed_sigma_bar(lift.phi_tilde);
        HatVec h_diag = cm.hat(diag);

        // {(0,xi,0)^, (phi,0,0)^} = {xi, phi~}_Sigma - {(0,xi,0)^, (0,phi~,phi~)^}
        cplx lhs1 = cm.hat_pair(h_xi_s, h_phi);
        cplx rhs1 = inner(xi, lift.phi_tilde) - cm.hat_pair(h_xi_s, h_diag);
        sub1 = std::max(sub1, std::abs(lhs1 - rhs1));

        // Reversed-copy analogue; the inner product on the reversed side is
        // the kappa-conjugate of the standard one.
        cplx lhs2 = cm.hat_pair(h_xi_b, h_phi);
        cplx ip_bar = static_cast<double>(kappa) * std::conj(inner(xi, lift.phi_tilde));
        cplx rhs2 = ip_bar - cm.hat_pair(h_xi_b, h_diag);
        sub2 = std::max(sub2, std::abs(lhs2 - rhs2));

        // Four-term expansion of the inner product on the glued boundary.
        KVec diag2 = gc.embed_sigma(lift2.phi_tilde) + gc.embed_sigma_bar(lift2.phi_tilde);
        HatVec h_phi2 = cm.hat(gc.embed_rest(phi2));
        HatVec h_diag2 = cm.hat(diag2);
        cplx lhs3 = inner(phi, phi2);
        cplx rhs3 = cm.hat_pair(h_phi, h_phi2) - cm.hat_pair(h_diag, h_diag2) +
                    inner(lift.phi_tilde, lift2.phi_tilde) +
                    static_cast<double>(kappa) * std::conj(inner(lift.phi_tilde, lift2.phi_tilde));
        phid = std::max(phid, std::abs(lhs3 - rhs3));
    }
    rep.add("substitution identity (gluing copy)", "T5b", sub1, tolerances().tol);
    rep.add("substitution identity (reversed copy)", "T5b", sub2, tolerances().tol);
    rep.add("glued inner-product expansion", "T5b", phid, tolerances().tol);
    return rep;
}

std::vector<CutoffSubspace> default_chain(const GluingContext& gc, const std::vector<KVec>& phis,
                                          Rng& rng) {
    std::vector<CutoffSubspace> chain;
    CutoffSubspace lifts = gc.lift_span(phis);
    chain.push_back(lifts);
    if (lifts.dim() < gc.sigma().dim()) {
        std::vector<KVec> extended;
        for (const auto& b : lifts.basis) extended.push_back(b);
        extended.push_back(random_vector(gc.sigma(), rng));
        chain.push_back(krein_span(gc.sigma(), std::move(extended)));
    }
    chain.push_back(full_cutoff(gc.sigma()));
    return chain;
}

}  // namespace gbf
