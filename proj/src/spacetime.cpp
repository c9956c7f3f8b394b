#include "gbf/spacetime.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <stdexcept>

namespace gbf {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::IllDefined: return "ill-defined";
        case Verdict::Skipped: return "skipped";
    }
    return "?";
}

void Report::add(std::string name, std::string ref, double residual, double tol,
                 std::string note) {
    items.push_back({std::move(name), std::move(ref), residual,
                     residual <= tol ? Verdict::Pass : Verdict::Fail, std::move(note)});
}

void Report::add_verdict(std::string name, std::string ref, Verdict v, double residual,
                         std::string note) {
    items.push_back({std::move(name), std::move(ref), residual, v, std::move(note)});
}

void Report::merge(const Report& other, const std::string& prefix) {
    for (auto item : other.items) {
        if (!prefix.empty()) item.name = prefix + item.name;
        items.push_back(std::move(item));
    }
}

bool Report::all_pass() const {
    for (const auto& i : items)
        if (i.verdict == Verdict::Fail || i.verdict == Verdict::IllDefined) return false;
    return true;
}

bool Report::any_ill_defined() const {
    for (const auto& i : items)
        if (i.verdict == Verdict::IllDefined) return true;
    return false;
}

double Report::max_residual() const {
    double m = 0.0;
    for (const auto& i : items) m = std::max(m, i.residual);
    return m;
}

const KreinSpace& TheorySpec::base_space(const std::string& label) const {
    auto it = spaces.find(label);
    if (it == spaces.end())
        throw std::invalid_argument("unknown hypersurface label: " + label);
    return it->second;
}

KreinSpace TheorySpec::space_of(const HComponent& c) const {
    const KreinSpace& s = base_space(c.label);
    if (!c.reversed) return s;
    return orientation_reverse(s, stat).to;
}

DirectSum TheorySpec::boundary_sum(const Region& r) const {
    std::vector<KreinSpace> parts;
    parts.reserve(r.boundary.comps.size());
    for (const auto& c : r.boundary.comps) parts.push_back(space_of(c));
    return direct_sum(parts, "bdy:" + r.label);
}

const Region& TheorySpec::region(const std::string& label) const {
    for (const auto& r : regions)
        if (r.label == label) return r;
    throw std::invalid_argument("unknown region label: " + label);
}

const GluingDesc& TheorySpec::gluing(const std::string& name) const {
    for (const auto& g : gluings)
        if (g.name == name) return g;
    throw std::invalid_argument("unknown gluing: " + name);
}

RealSubspace TheorySpec::region_subspace(const Region& r) const {
    DirectSum ds = boundary_sum(r);
    std::vector<KVec> span;
    span.reserve(r.lmtilde.size());
    for (const auto& v : r.lmtilde) span.push_back(KVec(ds.total, v));
    return make_real_subspace(ds.total, std::move(span));
}

Hypersurface glued_boundary(const Region& m, const GluingDesc& g) {
    Hypersurface out;
    for (int i = 0; i < static_cast<int>(m.boundary.comps.size()); ++i)
        if (i != g.pos_std && i != g.pos_rev) out.comps.push_back(m.boundary.comps[i]);
    return out;
}

namespace {

// Real matrix of the equalizer constraint pi_Sigma(w) - rev^{-1}(pi_SigmaBar(w)).
Eigen::MatrixXd gluing_constraint(const TheorySpec& theory, const Region& m,
                                  const GluingDesc& g, const DirectSum& ds) {
    const KreinSpace& sigma = theory.base_space(m.boundary.comps[g.pos_std].label);
    auto rev = orientation_reverse(sigma, theory.stat);
    const int d = sigma.dim();
    const int n = static_cast<int>(m.lmtilde.size());
    Eigen::MatrixXd C(2 * d, n);
    for (int j = 0; j < n; ++j) {
        KVec w(ds.total, m.lmtilde[j]);
        KVec a = ds.project(g.pos_std, w);
        KVec b = rev.apply_inverse(ds.project(g.pos_rev, w));
        C.col(j) = to_real(a.c - b.c);
    }
    return C;
}

// Orthonormal basis of the kernel of C (real coefficients over the
// spanning set of L_M-tilde).
Eigen::MatrixXd constraint_kernel(const Eigen::MatrixXd& C) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double thr = (sv.size() > 0 && sv(0) > 0.0) ? tolerances().rank_rtol * sv(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thr) ++rank;
    return svd.matrixV().rightCols(C.cols() - rank);
}

}  // namespace

RealSubspace glued_subspace(const TheorySpec& theory, const GluingDesc& g) {
    const Region& m = theory.region(g.region);
    DirectSum ds = theory.boundary_sum(m);
    Eigen::MatrixXd C = gluing_constraint(theory, m, g, ds);
    Eigen::MatrixXd K = constraint_kernel(C);

    const Region& m1 = theory.region(g.result);
    DirectSum ds1 = theory.boundary_sum(m1);
    Hypersurface rest = glued_boundary(m, g);
    if (rest.comps.size() != m1.boundary.comps.size())
        throw std::invalid_argument("glued_subspace: result boundary does not match remaining components");

    std::vector<KVec> span;
    for (int j = 0; j < K.cols(); ++j) {
        Eigen::VectorXcd full = Eigen::VectorXcd::Zero(ds.total.dim());
        for (int i = 0; i < K.rows(); ++i) full += K(i, j) * m.lmtilde[i];
        // Project to the remaining components, reading them in result order.
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(ds1.total.dim());
        int t = 0;
        for (int i = 0; i < static_cast<int>(m.boundary.comps.size()); ++i) {
            if (i == g.pos_std || i == g.pos_rev) continue;
            KVec comp = ds.project(i, KVec(ds.total, full));
            out += ds1.embed(t, comp).c;
            ++t;
        }
        span.push_back(KVec(ds1.total, out));
    }
    return make_real_subspace(ds1.total, std::move(span));
}

TildeLift tilde_lift(const TheorySpec& theory, const GluingDesc& g, const KVec& phi) {
    const Region& m = theory.region(g.region);
    const Region& m1 = theory.region(g.result);
    DirectSum ds = theory.boundary_sum(m);
    DirectSum ds1 = theory.boundary_sum(m1);
    const KreinSpace& sigma = theory.base_space(m.boundary.comps[g.pos_std].label);
    auto rev = orientation_reverse(sigma, theory.stat);

    // Unknown real coefficients c over the spanning set of L_M-tilde with
    //   pi_rest(S c) = phi   and   pi_Sigma(S c) = rev^{-1}(pi_SigmaBar(S c)).
    const int n = static_cast<int>(m.lmtilde.size());
    const int rows_rest = ds1.total.rdim();
    const int rows_glue = 2 * sigma.dim();
    Eigen::MatrixXd A(rows_rest + rows_glue, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows_rest + rows_glue);
    rhs.head(rows_rest) = to_real(phi.c);
    Eigen::MatrixXd C = gluing_constraint(theory, m, g, ds);
    for (int j = 0; j < n; ++j) {
        KVec w(ds.total, m.lmtilde[j]);
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(ds1.total.dim());
        int t = 0;
        for (int i = 0; i < static_cast<int>(m.boundary.comps.size()); ++i) {
            if (i == g.pos_std || i == g.pos_rev) continue;
            out += ds1.embed(t, ds.project(i, w)).c;
            ++t;
        }
        A.col(j).head(rows_rest) = to_real(out);
        A.col(j).tail(rows_glue) = C.col(j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd c = svd.solve(rhs);
    TildeLift out;
    out.residual = (A * c - rhs).norm();
    out.kernel_gap = svd.singularValues()(svd.singularValues().size() - 1);
    if (out.residual > tolerances().tol * std::max(1.0, phi.norm()))
        throw std::runtime_error("tilde_lift: exactness violation, no lift within tolerance");
    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(ds.total.dim());
    for (int j = 0; j < n; ++j) full += c(j) * m.lmtilde[j];
    out.phi_tilde = ds.project(g.pos_std, KVec(ds.total, full));
    return out;
}

Report check_classical_axioms(const TheorySpec& theory) {
    Report rep;
    const int kappa = theory.kappa();

    // C1: every hypersurface carries a nondegenerate canonical-form space.
    for (const auto& [label, s] : theory.spaces) {
        const bool ok = s.p >= 0 && s.q >= 0 && s.dim() > 0;
        rep.add_verdict("C1 space " + label, "C1", ok ? Verdict::Pass : Verdict::Fail,
                        ok ? 0.0 : 1.0);
    }

    // C2: orientation reversal is involutive and transforms the inner
    // product with the kappa-conjugation law; exhaustive over basis pairs.
    for (const auto& [label, s] : theory.spaces) {
        auto rev = orientation_reverse(s, theory.stat);
        double invol = 0.0, law = 0.0;
        for (int a = 0; a < s.dim(); ++a) {
            for (int ja = 0; ja < 2; ++ja) {
                KVec v = KVec::basis(s, a);
                if (ja) v = v.timesJ();
                invol = std::max(invol, (rev.apply_inverse(rev.apply(v)).c - v.c).norm());
            }
        }
        for (int a = 0; a < s.dim(); ++a) {
            for (int b = 0; b < s.dim(); ++b) {
                for (int ja = 0; ja < 2; ++ja) {
                    KVec v = KVec::basis(s, a);
                    if (ja) v = v.timesJ();
                    KVec w = KVec::basis(s, b);
                    cplx lhs = inner(rev.apply(v), rev.apply(w));
                    cplx rhs = static_cast<double>(kappa) * std::conj(inner(v, w));
                    law = std::max(law, std::abs(lhs - rhs));
                }
            }
        }
        rep.add("C2 involution " + label, "C2", invol, tolerances().tol);
        rep.add("C2 inner-product law " + label, "C2", law, tolerances().tol);
    }

    // C3: component embeddings are isometric with orthogonal images.
    for (const auto& r : theory.regions) {
        if (r.boundary.comps.size() < 2) continue;
        DirectSum ds = theory.boundary_sum(r);
        double res = 0.0;
        for (size_t i = 0; i < ds.parts.size(); ++i) {
            for (int a = 0; a < ds.parts[i].dim(); ++a) {
                KVec ea = KVec::basis(ds.parts[i], a);
                for (size_t j = 0; j < ds.parts.size(); ++j) {
                    for (int b = 0; b < ds.parts[j].dim(); ++b) {
                        KVec eb = KVec::basis(ds.parts[j], b);
                        cplx got = inner(ds.embed(static_cast<int>(i), ea),
                                         ds.embed(static_cast<int>(j), eb));
                        cplx want = (i == j) ? inner(ea, eb) : cplx(0.0);
                        res = std::max(res, std::abs(got - want));
                    }
                }
            }
        }
        rep.add("C3 isometric sum " + r.label, "C3", res, tolerances().tol);
    }

    // C5 per region, including slice-region structure.
    for (const auto& r : theory.regions) {
        DirectSum ds = theory.boundary_sum(r);
        RealSubspace W;
        try {
            W = theory.region_subspace(r);
        } catch (const std::exception& e) {
            rep.add_verdict("C5 subspace " + r.label, "C5", Verdict::Fail, 1.0, e.what());
            continue;
        }
        SubspaceReport sub = check_subspace_c5(ds.total, W, theory.stat);
        rep.add_verdict("C5 subspace " + r.label, "C5",
                        sub.pass ? Verdict::Pass : Verdict::Fail,
                        sub.pass ? std::max({sub.neutrality, sub.conj.worst()}) : 1.0,
                        sub.failure);
        if (r.kind == RegionKind::Slice) {
            double diag = 0.0;
            if (r.boundary.comps.size() != 2 || r.boundary.comps[0].label != r.boundary.comps[1].label ||
                r.boundary.comps[0].reversed == r.boundary.comps[1].reversed) {
                rep.add_verdict("slice boundary " + r.label, "C5", Verdict::Fail, 1.0,
                                "slice boundary must be two oppositely oriented copies");
            } else {
                const KreinSpace& s = theory.base_space(r.slice_of);
                auto rev = orientation_reverse(s, theory.stat);
                const int rev_pos = r.boundary.comps[0].reversed ? 0 : 1;
                for (int a = 0; a < s.dim(); ++a) {
                    for (int ja = 0; ja < 2; ++ja) {
                        KVec phi = KVec::basis(s, a);
                        if (ja) phi = phi.timesJ();
                        KVec pair = ds.embed(rev_pos, rev.apply(phi)) + ds.embed(1 - rev_pos, phi);
                        diag = std::max(diag, subspace_residual(W, pair));
                    }
                }
                rep.add("slice diagonal subspace " + r.label, "C5/C7", diag, tolerances().tol);
            }
        }
    }

    // C6: union regions carry the direct sums of their members' data.
    for (const auto& r : theory.regions) {
        if (r.union_of.empty()) continue;
        DirectSum ds = theory.boundary_sum(r);
        double res = 0.0;
        std::string note;
        size_t comp_off = 0;
        std::vector<KVec> expected;
        bool layout_ok = true;
        for (const auto& mlabel : r.union_of) {
            const Region& member = theory.region(mlabel);
            DirectSum mds = theory.boundary_sum(member);
            for (size_t i = 0; i < member.boundary.comps.size(); ++i) {
                if (comp_off + i >= r.boundary.comps.size() ||
                    !(r.boundary.comps[comp_off + i] == member.boundary.comps[i])) {
                    layout_ok = false;
                }
            }
            if (!layout_ok) break;
            for (const auto& v : member.lmtilde) {
                Eigen::VectorXcd out = Eigen::VectorXcd::Zero(ds.total.dim());
                for (size_t i = 0; i < member.boundary.comps.size(); ++i) {
                    KVec comp = mds.project(static_cast<int>(i), KVec(mds.total, v));
                    out += ds.embed(static_cast<int>(comp_off + i), comp).c;
                }
                expected.push_back(KVec(ds.total, out));
            }
            comp_off += member.boundary.comps.size();
        }
        if (!layout_ok || comp_off != r.boundary.comps.size()) {
            rep.add_verdict("C6 union layout " + r.label, "C6", Verdict::Fail, 1.0,
                            "boundary is not the concatenation of the members' boundaries");
            continue;
        }
        RealSubspace W = theory.region_subspace(r);
        RealSubspace E = make_real_subspace(ds.total, expected);
        res = same_real_span(W, E) ? 0.0 : 1.0;
        rep.add("C6 additivity " + r.label, "C6", res, 0.5);
    }

    // C7 per gluing: exactness, injectivity and the commuting square.
    for (const auto& g : theory.gluings) {
        const Region& m = theory.region(g.region);
        const Region& m1 = theory.region(g.result);
        DirectSum ds = theory.boundary_sum(m);

        // Boundary bookkeeping.
        {
            Hypersurface rest = glued_boundary(m, g);
            bool ok = rest.comps.size() == m1.boundary.comps.size();
            for (size_t i = 0; ok && i < rest.comps.size(); ++i)
                ok = rest.comps[i] == m1.boundary.comps[i];
            const auto& cs = m.boundary.comps[g.pos_std];
            const auto& cr = m.boundary.comps[g.pos_rev];
            ok = ok && cs.label == cr.label && !cs.reversed && cr.reversed;
            rep.add_verdict("C7 bookkeeping " + g.name, "C7",
                            ok ? Verdict::Pass : Verdict::Fail, ok ? 0.0 : 1.0);
            if (!ok) continue;
        }

        RealSubspace W1 = theory.region_subspace(m1);
        RealSubspace derived;
        try {
            derived = glued_subspace(theory, g);
        } catch (const std::exception& e) {
            rep.add_verdict("C7 exact sequence " + g.name, "C7", Verdict::Fail, 1.0, e.what());
            continue;
        }
        const bool exact = same_real_span(W1, derived);
        rep.add_verdict("C7 exact sequence " + g.name, "C7", exact ? Verdict::Pass : Verdict::Fail,
                        exact ? 0.0 : 1.0,
                        exact ? "" : "image of the lift differs from the declared subspace");

        // Injectivity of the lift: no kernel vector of the constraint maps
        // to zero on the remaining boundary.
        {
            Eigen::MatrixXd C = gluing_constraint(theory, m, g, ds);
            Eigen::MatrixXd K = constraint_kernel(C);
            double inj = 1.0;
            if (K.cols() == static_cast<int>(derived.spanning.size())) {
                Eigen::MatrixXd B(derived.ambient.rdim(), K.cols());
                for (int j = 0; j < K.cols(); ++j) B.col(j) = to_real(derived.spanning[j].c);
                Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
                const auto& sv = svd.singularValues();
                inj = (sv.size() > 0 && sv(0) > 0 &&
                       sv(sv.size() - 1) > tolerances().rank_rtol * sv(0))
                          ? 0.0
                          : 1.0;
            }
            rep.add("C7 injective lift " + g.name, "C7", inj, 0.5);
        }

        // Commuting square: each lifted solution restricted to the
        // remaining boundary lies in the declared subspace of the result.
        {
            double res = 0.0;
            for (const auto& v : derived.spanning)
                res = std::max(res, subspace_residual(W1, v));
            rep.add("C7 commuting square " + g.name, "C7", res, tolerances().tol);
        }
    }

    return rep;
}

ClassicalEvolution classical_evolution(const TheorySpec& theory, const Region& r,
                                       const std::vector<int>& group2,
                                       const std::vector<int>& group1) {
    DirectSum ds = theory.boundary_sum(r);
    RealSubspace W = theory.region_subspace(r);
    Conjugation u = conjugation_from_subspace(ds.total, W, theory.stat);

    if (group1.size() + group2.size() != r.boundary.comps.size())
        throw std::invalid_argument("classical_evolution: split must cover the boundary");
    for (int i : group1)
        if (r.boundary.comps[i].reversed)
            throw std::invalid_argument("classical_evolution: initial components must carry standard orientation");
    for (int i : group2)
        if (!r.boundary.comps[i].reversed)
            throw std::invalid_argument("classical_evolution: final components must carry reversed orientation");

    ClassicalEvolution ev;
    std::vector<KreinSpace> parts1, parts2;
    for (int i : group1) parts1.push_back(theory.base_space(r.boundary.comps[i].label));
    for (int i : group2) parts2.push_back(theory.base_space(r.boundary.comps[i].label));
    ev.initial = direct_sum(parts1, "L1");
    ev.final_ = direct_sum(parts2, "L2");

    // u_M must exchange the two groups.
    auto embed_group = [&](const std::vector<int>& grp, const DirectSum& sub, const KVec& v) {
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(ds.total.dim());
        for (size_t t = 0; t < grp.size(); ++t)
            out += ds.embed(grp[t], sub.project(static_cast<int>(t), v)).c;
        return KVec(ds.total, out);
    };
    auto group_mass = [&](const std::vector<int>& grp, const KVec& v) {
        double m = 0.0;
        for (int i : grp) m += ds.project(i, v).c.squaredNorm();
        return std::sqrt(m);
    };

    const int d1 = ev.initial.total.dim();
    ev.map = Eigen::MatrixXcd::Zero(ev.final_.total.dim(), d1);
    double split = 0.0, lin = 0.0;
    for (int a = 0; a < d1; ++a) {
        KVec e = KVec::basis(ev.initial.total, a);
        KVec img = u.apply(embed_group(group1, ev.initial, e));
        split = std::max(split, group_mass(group1, img));
        // Collapse amendments to final coordinates, un-reversing each component.
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(ev.final_.total.dim());
        for (size_t t = 0; t < group2.size(); ++t) {
            const auto& comp = r.boundary.comps[group2[t]];
            const KreinSpace& base = theory.base_space(comp.label);
            auto rev = orientation_reverse(base, theory.stat);
            KVec c2 = ds.project(group2[t], img);
            KVec unrev = comp.reversed ? rev.apply_inverse(c2) : c2;
            out += ev.final_.embed(static_cast<int>(t), unrev).c;
        }
        ev.map.col(a) = out;

        KVec imgJ = u.apply(embed_group(group1, ev.initial, e.timesJ()));
        Eigen::VectorXcd outJ = Eigen::VectorXcd::Zero(ev.final_.total.dim());
        for (size_t t = 0; t < group2.size(); ++t) {
            const auto& comp = r.boundary.comps[group2[t]];
            auto rev = orientation_reverse(theory.base_space(comp.label), theory.stat);
            KVec c2 = ds.project(group2[t], imgJ);
            outJ += ev.final_.embed(static_cast<int>(t), comp.reversed ? rev.apply_inverse(c2) : c2).c;
        }
        lin = std::max(lin, (outJ - cplx(0, 1) * out).norm());
    }
    // And the reverse direction u_M(L_2) = L_1.
    for (int a = 0; a < ev.final_.total.dim(); ++a) {
        KVec e = KVec::basis(ev.final_.total, a);
        Eigen::VectorXcd emb = Eigen::VectorXcd::Zero(ds.total.dim());
        for (size_t t = 0; t < group2.size(); ++t) {
            const auto& comp = r.boundary.comps[group2[t]];
            auto rev = orientation_reverse(theory.base_space(comp.label), theory.stat);
            KVec c2 = ev.final_.project(static_cast<int>(t), e);
            emb += ds.embed(group2[t], comp.reversed ? rev.apply(c2) : c2).c;
        }
        KVec img = u.apply(KVec(ds.total, emb));
        split = std::max(split, group_mass(group2, img));
    }
    ev.split_residual = split;
    ev.linearity = lin;
    if (split > tolerances().tol)
        throw std::invalid_argument("classical_evolution: split is not u-compatible");

    double iso = 0.0;
    for (int a = 0; a < d1; ++a) {
        for (int b = 0; b < d1; ++b) {
            KVec ea = KVec::basis(ev.initial.total, a), eb = KVec::basis(ev.initial.total, b);
            cplx lhs = inner(KVec(ev.final_.total, ev.map * ea.c), KVec(ev.final_.total, ev.map * eb.c));
            cplx rhs = inner(ea, eb);
            iso = std::max(iso, std::abs(lhs - rhs));
        }
    }
    ev.isometry = iso;

    // Graph form of the subspace: spanning set {(u_M(phi), phi) : phi in L_1}.
    {
        std::vector<KVec> graph;
        for (int a = 0; a < d1; ++a) {
            for (int ja = 0; ja < 2; ++ja) {
                KVec e = KVec::basis(ev.initial.total, a);
                if (ja) e = e.timesJ();
                KVec emb = embed_group(group1, ev.initial, e);
                graph.push_back(KVec(ds.total, emb.c + u.apply(emb).c));
            }
        }
        double res = 0.0;
        for (const auto& v : graph) res = std::max(res, subspace_residual(W, v));
        ev.graph_residual = res;
    }
    return ev;
}

Region make_slice_region(const TheorySpec& theory, const std::string& label,
                         const std::string& region_label) {
    const KreinSpace& s = theory.base_space(label);
    auto rev = orientation_reverse(s, theory.stat);
    Region r;
    r.label = region_label;
    r.kind = RegionKind::Slice;
    r.slice_of = label;
    r.boundary.comps = {{label, true}, {label, false}};
    DirectSum ds = direct_sum({rev.to, s});
    for (int a = 0; a < s.dim(); ++a) {
        for (int ja = 0; ja < 2; ++ja) {
            KVec phi = KVec::basis(s, a);
            if (ja) phi = phi.timesJ();
            r.lmtilde.push_back((ds.embed(0, rev.apply(phi)) + ds.embed(1, phi)).c);
        }
    }
    return r;
}

Region make_random_region(const TheorySpec& theory, const std::string& region_label,
                          const Hypersurface& boundary, Rng& rng) {
    Region r;
    r.label = region_label;
    r.boundary = boundary;
    TheorySpec probe = theory;  // boundary_sum needs only spaces
    probe.regions.clear();
    Region tmp = r;
    probe.regions.push_back(tmp);
    DirectSum ds = probe.boundary_sum(tmp);
    Conjugation u = random_conjugation(ds.total, theory.stat, rng);
    RealSubspace W = fixed_point_subspace(u);
    for (const auto& v : W.spanning) r.lmtilde.push_back(v.c);
    return r;
}

Region make_union_region(const TheorySpec& theory, const std::string& region_label,
                         const std::vector<std::string>& members) {
    Region r;
    r.label = region_label;
    r.union_of = members;
    for (const auto& mlabel : members) {
        const Region& m = theory.region(mlabel);
        for (const auto& c : m.boundary.comps) r.boundary.comps.push_back(c);
    }
    TheorySpec probe = theory;
    probe.regions.push_back(r);
    DirectSum ds = probe.boundary_sum(r);
    size_t comp_off = 0;
    for (const auto& mlabel : members) {
        const Region& m = theory.region(mlabel);
        DirectSum mds = theory.boundary_sum(m);
        for (const auto& v : m.lmtilde) {
            Eigen::VectorXcd out = Eigen::VectorXcd::Zero(ds.total.dim());
            for (size_t i = 0; i < m.boundary.comps.size(); ++i) {
                KVec comp = mds.project(static_cast<int>(i), KVec(mds.total, v));
                out += ds.embed(static_cast<int>(comp_off + i), comp).c;
            }
            r.lmtilde.push_back(out);
        }
        comp_off += m.boundary.comps.size();
    }
    return r;
}

RandomGluedTheory random_glued_theory(int dim_sigma1_half, int p_sigma, int q_sigma, Rng& rng,
                                      Stat stat) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        Rng sub = rng.child(attempt);
        TheorySpec th;
        th.stat = stat;
        th.spaces["S1"] = KreinSpace{dim_sigma1_half, dim_sigma1_half, "S1"};
        th.spaces["S"] = KreinSpace{p_sigma, q_sigma, "S"};

        Region m;
        m.label = "M";
        m.boundary.comps = {{"S1", false}, {"S", false}, {"S", true}};
        th.regions.push_back(m);
        th.regions[0] = make_random_region(th, "M", m.boundary, sub);

        GluingDesc g;
        g.name = "G";
        g.region = "M";
        g.pos_std = 1;
        g.pos_rev = 2;
        g.result = "M1";

        Region m1;
        m1.label = "M1";
        m1.boundary.comps = {{"S1", false}};
        th.regions.push_back(m1);
        th.gluings.push_back(g);
        try {
            RealSubspace derived = glued_subspace(th, g);
            if (derived.real_dim != 2 * dim_sigma1_half) continue;
            for (auto& r : th.regions)
                if (r.label == "M1")
                    for (const auto& v : derived.spanning) r.lmtilde.push_back(v.c);
            DirectSum ds1 = th.boundary_sum(th.region("M1"));
            SubspaceReport sr = check_subspace_c5(ds1.total, th.region_subspace(th.region("M1")), stat);
            if (!sr.pass) continue;
            return {std::move(th), "G"};
        } catch (const std::exception&) {
            continue;
        }
    }
    throw std::runtime_error("random_glued_theory: no valid draw found");
}

RandomGluedTheory random_cobordism_gluing(int dim_sigma2, int dim_sigma3_half, Rng& rng, Stat stat) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        Rng sub = rng.child(attempt);
        try {
        TheorySpec th;
        th.stat = stat;
        // Sigma1 and Sigma2 carry the same signature so that a complex
        // isometry between them exists; mixed signature keeps it generic.
        // The fermionic draw for Q needs p == q on its boundary.
        const int p2 = (stat == Stat::Fermionic) ? dim_sigma2 / 2 : std::max(1, dim_sigma2 / 2);
        const int q2 = dim_sigma2 - p2;
        if (stat == Stat::Fermionic && p2 != q2)
            throw std::invalid_argument("random_cobordism_gluing: fermionic draw needs even dim_sigma2");
        th.spaces["S1"] = KreinSpace{p2, q2, "S1"};
        th.spaces["S2"] = KreinSpace{p2, q2, "S2"};
        th.spaces["S3"] = KreinSpace{dim_sigma3_half, dim_sigma3_half, "S3"};

        // Cobordism P with boundary (S1, S2-bar): subspace is the graph of
        // w = rev o utilde over L_S1.
        const KreinSpace& s1 = th.spaces["S1"];
        const KreinSpace& s2 = th.spaces["S2"];
        auto rev2 = orientation_reverse(s2, stat);
        Eigen::MatrixXcd isom = Eigen::MatrixXcd::Zero(dim_sigma2, dim_sigma2);
        {
            // Adapted complex isometry L_S1 -> L_S2 (block unitary).
            Eigen::MatrixXcd up = random_unitary(p2, sub);
            Eigen::MatrixXcd uq = q2 > 0 ? random_unitary(q2, sub) : Eigen::MatrixXcd();
            isom.topLeftCorner(p2, p2) = up;
            if (q2 > 0) isom.bottomRightCorner(q2, q2) = uq;
        }
        Region p;
        p.label = "P";
        p.boundary.comps = {{"S1", false}, {"S2", true}};
        DirectSum dsp = direct_sum({s1, rev2.to});
        for (int a = 0; a < s1.dim(); ++a) {
            for (int ja = 0; ja < 2; ++ja) {
                KVec phi = KVec::basis(s1, a);
                if (ja) phi = phi.timesJ();
                KVec img = rev2.apply(KVec(s2, isom * phi.c));
                p.lmtilde.push_back((dsp.embed(0, phi) + dsp.embed(1, img)).c);
            }
        }
        th.regions.push_back(p);

        Region q;
        q.boundary.comps = {{"S2", false}, {"S3", false}};
        th.regions.push_back(q);
        Rng qrng = sub.child(1);
        th.regions[1] = make_random_region(th, "Q", q.boundary, qrng);

        Region m = make_union_region(th, "M", {"P", "Q"});
        th.regions.push_back(m);

        GluingDesc g;
        g.name = "G";
        g.region = "M";
        g.pos_std = 2;  // S2 inside Q
        g.pos_rev = 1;  // S2-bar inside P
        g.result = "M1";

        Region m1;
        m1.label = "M1";
        m1.boundary.comps = {{"S1", false}, {"S3", false}};
        th.regions.push_back(m1);
        th.gluings.push_back(g);
        RealSubspace derived = glued_subspace(th, g);
        if (derived.real_dim != dim_sigma2 + 2 * dim_sigma3_half) continue;
        for (auto& r : th.regions)
            if (r.label == "M1")
                for (const auto& v : derived.spanning) r.lmtilde.push_back(v.c);
        DirectSum ds1 = th.boundary_sum(th.region("M1"));
        SubspaceReport sr = check_subspace_c5(ds1.total, th.region_subspace(th.region("M1")), stat);
        if (!sr.pass) continue;
        return {std::move(th), "G"};
        } catch (const std::exception&) {
            continue;
        }
    }
    throw std::runtime_error("random_cobordism_gluing: no valid draw found");
}

}  // namespace gbf
