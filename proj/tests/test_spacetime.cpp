#include <doctest.h>

#include "gbf/spacetime.hpp"

using namespace gbf;

namespace {

TheorySpec slice_theory(Stat stat, int p, int q) {
    TheorySpec th;
    th.stat = stat;
    th.spaces["S"] = KreinSpace{p, q, "S"};
    th.regions.push_back(make_slice_region(th, "S", "slice:S"));
    // Two copies of the slice glued back to one: the exactness test case.
    Region u = make_union_region(th, "2slice", {"slice:S", "slice:S"});
    th.regions.push_back(u);
    GluingDesc g{"G", "2slice", 1, 2, "slice:S"};
    th.gluings.push_back(g);
    return th;
}

}  // namespace

TEST_CASE("slice-region theory passes the classical axioms") {
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        TheorySpec th = slice_theory(stat, 1, 1);
        Report rep = check_classical_axioms(th);
        for (const auto& item : rep.items) {
            INFO(item.name, ": ", item.note);
            CHECK(item.verdict == Verdict::Pass);
        }
    }
}

TEST_CASE("random glued theories pass the classical axioms") {
    Rng rng(2024);
    for (int t = 0; t < 4; ++t) {
        Rng sub = rng.child(t);
        auto rt = random_glued_theory(1, 1 + static_cast<int>(sub.below(2)),
                                      static_cast<int>(sub.below(2)), sub);
        Report rep = check_classical_axioms(rt.theory);
        for (const auto& item : rep.items) {
            INFO(item.name, ": ", item.note);
            CHECK(item.verdict == Verdict::Pass);
        }
    }
}

TEST_CASE("theory with a non-neutral subspace fails C5 by name") {
    TheorySpec th;
    th.stat = Stat::Fermionic;
    th.spaces["S"] = KreinSpace{1, 1, "S"};
    Region r;
    r.label = "bad";
    r.boundary.comps = {{"S", false}};
    // span{e1, i e1} is not neutral: g(e1,e1) = 1.
    KreinSpace s = th.spaces["S"];
    r.lmtilde.push_back(KVec::basis(s, 0).c);
    r.lmtilde.push_back(KVec::basis(s, 0).timesJ().c);
    th.regions.push_back(r);
    Report rep = check_classical_axioms(th);
    bool found = false;
    for (const auto& item : rep.items) {
        if (item.name.find("C5") != std::string::npos && item.verdict == Verdict::Fail) {
            found = true;
            CHECK(item.note.find("neutral") != std::string::npos);
        }
    }
    CHECK(found);
}

TEST_CASE("tilde lift on the slice self-gluing is the identity") {
    TheorySpec th = slice_theory(Stat::Fermionic, 1, 1);
    const GluingDesc& g = th.gluings[0];
    const Region& m1 = th.region("slice:S");
    DirectSum ds1 = th.boundary_sum(m1);
    Rng rng(5);
    // phi must lie in the diagonal subspace of the result slice region.
    RealSubspace W1 = th.region_subspace(m1);
    KVec raw = random_vector(ds1.total, rng);
    RealDecomposition dec = decompose_real(W1, raw);
    KVec phi = dec.vR;
    TildeLift lift = tilde_lift(th, g, phi);
    CHECK(lift.residual < 1e-9);
    CHECK(lift.kernel_gap > 1e-8);
    // The lift equals the standard-orientation component of phi.
    const KVec expected = ds1.project(1, phi);
    CHECK((lift.phi_tilde.c - expected.c).norm() < 1e-9);
}

TEST_CASE("tilde lift uniqueness on random theories") {
    Rng rng(7);
    auto rt = random_glued_theory(1, 1, 1, rng);
    const GluingDesc& g = rt.theory.gluing("G");
    const Region& m1 = rt.theory.region("M1");
    RealSubspace W1 = rt.theory.region_subspace(m1);
    for (int t = 0; t < 4; ++t) {
        KVec raw = random_vector(rt.theory.boundary_sum(m1).total, rng);
        KVec phi = decompose_real(W1, raw).vR;
        TildeLift lift = tilde_lift(rt.theory, g, phi);
        CHECK(lift.residual < 1e-9);
        CHECK(lift.kernel_gap > 1e-8);
        // Membership: (phi, phi~, phi~) reconstructs inside the union subspace.
        const Region& m = rt.theory.region("M");
        DirectSum ds = rt.theory.boundary_sum(m);
        auto rev = orientation_reverse(rt.theory.base_space("S"), rt.theory.stat);
        KVec triple = ds.embed(0, phi) + ds.embed(1, lift.phi_tilde) +
                      ds.embed(2, rev.apply(lift.phi_tilde));
        CHECK(subspace_residual(rt.theory.region_subspace(m), triple) < 1e-8);
    }
}

TEST_CASE("classical evolution on a slice region is the identity") {
    TheorySpec th = slice_theory(Stat::Fermionic, 1, 1);
    // Slice boundary: (reversed, standard) -> initial = position 1.
    ClassicalEvolution ev = classical_evolution(th, th.region("slice:S"), {0}, {1});
    CHECK(ev.split_residual < 1e-10);
    CHECK(ev.linearity < 1e-10);
    CHECK(ev.isometry < 1e-10);
    CHECK(ev.graph_residual < 1e-9);
    CHECK((ev.map - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-10);
}

TEST_CASE("cobordism generator provides a u-compatible split") {
    Rng rng(11);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        auto rt = random_cobordism_gluing(2, 1, rng, stat);
        Report rep = check_classical_axioms(rt.theory);
        for (const auto& item : rep.items) {
            INFO(item.name, ": ", item.note);
            CHECK(item.verdict == Verdict::Pass);
        }
        ClassicalEvolution ev = classical_evolution(rt.theory, rt.theory.region("P"), {1}, {0});
        CHECK(ev.split_residual < 1e-9);
        CHECK(ev.isometry < 1e-9);
        CHECK(ev.graph_residual < 1e-8);
    }
}

TEST_CASE("boundary bookkeeping of disjoint unions") {
    TheorySpec th = slice_theory(Stat::Fermionic, 1, 1);
    const Region& u = th.region("2slice");
    CHECK(u.boundary.comps.size() == 4);
    Hypersurface rest = glued_boundary(u, th.gluings[0]);
    REQUIRE(rest.comps.size() == 2);
    CHECK(rest.comps[0].label == "S");
    CHECK(rest.comps[0].reversed);
    CHECK_FALSE(rest.comps[1].reversed);
}
