#include <doctest.h>

#include "gbf/amplitude.hpp"
#include "gbf/dirac.hpp"
#include "gbf/gluing.hpp"

using namespace gbf;
using namespace gbf::dirac;

TEST_CASE("gamma algebra in both representations") {
    for (GammaRep rep : {GammaRep::Standard, GammaRep::Chiral}) {
        GammaBasis g = gamma_basis(rep);
        CHECK(g.clifford_residual <= 1e-12);
        CHECK(g.selfadjoint_residual <= 1e-12);
    }
}

TEST_CASE("hypersurface form for timelike and spacelike normals") {
    for (GammaRep rep : {GammaRep::Standard, GammaRep::Chiral}) {
        GammaBasis g = gamma_basis(rep);
        auto time_like = hypersurface_form(g, Eigen::Vector4d(1, 0, 0, 0));
        CHECK((time_like.P - Mat4::Identity()).norm() < 1e-14);
        CHECK(time_like.positive == 4);
        CHECK(time_like.zero == 0);

        auto space_like = hypersurface_form(g, Eigen::Vector4d(0, 0, 0, 1));
        CHECK(space_like.positive == 2);
        CHECK(space_like.negative == 2);
        CHECK(space_like.zero == 0);
        if (rep == GammaRep::Chiral) {
            Mat4 want = Mat4::Zero();
            want.diagonal() << 1.0, -1.0, -1.0, 1.0;
            CHECK((space_like.P - want).norm() == 0.0);
        }
        // Same spectrum in the standard representation.
        Eigen::SelfAdjointEigenSolver<Mat4> es(space_like.P);
        CHECK(std::abs(es.eigenvalues()(0) + 1.0) < 1e-12);
        CHECK(std::abs(es.eigenvalues()(3) - 1.0) < 1e-12);

        auto light_like = hypersurface_form(g, Eigen::Vector4d(1, 0, 0, 1));
        CHECK(light_like.zero > 0);
    }
}

TEST_CASE("boosted normals keep the definite/split signature") {
    Rng rng(3);
    for (GammaRep rep : {GammaRep::Standard, GammaRep::Chiral}) {
        GammaBasis g = gamma_basis(rep);
        for (int t = 0; t < 10; ++t) {
            // Random timelike normal.
            Eigen::Vector3d v(rng.normal(), rng.normal(), rng.normal());
            v *= 0.9 / std::max(1.0, v.norm());
            const double n0 = std::sqrt(1.0 + v.squaredNorm());
            auto tl = hypersurface_form(g, Eigen::Vector4d(n0, v(0), v(1), v(2)));
            CHECK(tl.positive == 4);
            // Random spacelike normal.
            Eigen::Vector3d w(rng.normal(), rng.normal(), rng.normal());
            w *= (1.0 + rng.uniform()) / w.norm();
            const double w0 = std::sqrt(std::max(0.0, w.squaredNorm() - 1.0)) * rng.uniform();
            auto sl = hypersurface_form(g, Eigen::Vector4d(w0, w(0), w(1), w(2)));
            CHECK(sl.positive == 2);
            CHECK(sl.negative == 2);
        }
    }
}

TEST_CASE("momentum spinors satisfy the normalization identities") {
    Rng rng(5);
    for (GammaRep rep : {GammaRep::Standard, GammaRep::Chiral}) {
        GammaBasis g = gamma_basis(rep);
        // Rest frame: u+ g0 g0 u = 2m.
        MomentumSpinors rest = momentum_spinors(g, Eigen::Vector3d::Zero(), 1.3);
        for (int s = 0; s < 2; ++s) {
            CHECK(std::abs(cplx(rest.u[s].adjoint() * rest.u[s]) - cplx(2.0 * 1.3)) < 1e-10);
            CHECK(std::abs(cplx(rest.v[s].adjoint() * rest.v[s]) - cplx(2.0 * 1.3)) < 1e-10);
        }
        for (int t = 0; t < 25; ++t) {
            Eigen::Vector3d k(2.0 * rng.normal(), 2.0 * rng.normal(), 2.0 * rng.normal());
            const double m = 0.5 + rng.uniform();
            MomentumSpinors sp = momentum_spinors(g, k, m);
            CHECK(sp.residual <= 1e-10);
        }
    }
}

TEST_CASE("tilde spinors: dispatch by energy sign and pairing identities") {
    Rng rng(7);
    for (GammaRep rep : {GammaRep::Standard, GammaRep::Chiral}) {
        GammaBasis g = gamma_basis(rep);
        const double m = 1.0;
        // E > 0 reduces to u at (k~, k3).
        {
            TildeSpinors ts = tilde_spinors(g, 2.0, Eigen::Vector2d(0.3, -0.2), m);
            MomentumSpinors sp = momentum_spinors(g, Eigen::Vector3d(0.3, -0.2, ts.k3), m);
            for (int s = 0; s < 2; ++s) {
                CHECK((ts.u[s] - sp.u[s]).norm() < 1e-12);
                CHECK((ts.v[s] - sp.v[s]).norm() < 1e-12);
            }
        }
        // E < 0 swaps u and v at the flipped momentum.
        {
            TildeSpinors ts = tilde_spinors(g, -2.0, Eigen::Vector2d(0.3, -0.2), m);
            MomentumSpinors sp = momentum_spinors(g, Eigen::Vector3d(-0.3, 0.2, -ts.k3), m);
            for (int s = 0; s < 2; ++s) {
                CHECK((ts.u[s] - sp.v[s]).norm() < 1e-12);
                CHECK((ts.v[s] - sp.u[s]).norm() < 1e-12);
            }
        }
        for (int t = 0; t < 25; ++t) {
            const double e = (rng.below(2) ? 1.0 : -1.0) * (1.2 + 2.0 * rng.uniform());
            Eigen::Vector2d kt(rng.normal() * 0.4, rng.normal() * 0.4);
            if (e * e <= kt.squaredNorm() + m * m) continue;
            TildeSpinors ts = tilde_spinors(g, e, kt, m);
            CHECK(ts.residual <= 1e-10);
        }
        CHECK_THROWS_AS(tilde_spinors(g, 0.9, Eigen::Vector2d(0.0, 0.0), 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(tilde_spinors(g, 1.2, Eigen::Vector2d(1.0, 1.0), 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("equal-time theory passes the classical axioms with identity evolution") {
    EqualTimeModes modes;
    modes.mass = 1.0;
    modes.momenta = {Eigen::Vector3d(0.2, -0.1, 0.4)};
    TheorySpec th = build_equal_time_theory(modes, {0.0, 1.0, 2.0});
    CHECK(th.spaces.at("t0").p == 4);
    CHECK(th.spaces.at("t0").q == 0);

    Report rep = check_classical_axioms(th);
    for (const auto& item : rep.items) {
        INFO(item.name, ": ", item.note);
        CHECK(item.verdict == Verdict::Pass);
    }

    ClassicalEvolution ev = classical_evolution(th, th.region("[t0,t1]"), {1}, {0});
    CHECK((ev.map - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-10);
    CHECK(ev.isometry < 1e-10);

    // u over the interval swaps the two boundary copies.
    DirectSum ds = th.boundary_sum(th.region("[t0,t1]"));
    RealSubspace w = th.region_subspace(th.region("[t0,t1]"));
    Conjugation u = conjugation_from_subspace(ds.total, w, th.stat);
    auto rev = orientation_reverse(th.spaces.at("t0"), th.stat);
    Rng rng(9);
    KVec phi = random_vector(th.spaces.at("t0"), rng);
    KVec eta = random_vector(th.spaces.at("t0"), rng);
    KVec in = ds.embed(0, phi) + ds.embed(1, rev.apply(eta));
    KVec out = u.apply(in);
    KVec want = ds.embed(0, eta) + ds.embed(1, rev.apply(phi));
    CHECK((out.c - want.c).norm() < 1e-9);

    // The canonical split coincides with the geometric one here.
    CHECK(split_projector_gap(th, "[t0,t1]") < 1e-14);
}

TEST_CASE("constant-z theory: Krein slices and distinct splits") {
    ConstantZModes modes;
    modes.mass = 1.0;
    modes.modes = {{1.5, Eigen::Vector2d(0.2, -0.3)}, {-1.4, Eigen::Vector2d(0.1, 0.2)}};
    TheorySpec th = build_constant_z_theory(modes, {0.0, 1.0, 2.0});
    CHECK(th.spaces.at("z0").p == 4);
    CHECK(th.spaces.at("z0").q == 4);

    Report rep = check_classical_axioms(th);
    for (const auto& item : rep.items) {
        INFO(item.name, ": ", item.note);
        CHECK(item.verdict == Verdict::Pass);
    }

    ClassicalEvolution ev = classical_evolution(th, th.region("[z0,z1]"), {1}, {0});
    CHECK((ev.map - Eigen::MatrixXcd::Identity(8, 8)).norm() < 1e-10);

    // Spatial-evolution split differs from the canonical one.
    CHECK(split_projector_gap(th, "[z0,z1]") > 0.5);

    // Evanescent labels are rejected.
    ConstantZModes bad;
    bad.mass = 1.0;
    bad.modes = {{0.9, Eigen::Vector2d(0.0, 0.0)}};
    CHECK_THROWS_AS(build_constant_z_theory(bad, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("symplectic Gram matrices agree between slabs on shared modes") {
    EqualTimeModes modes;
    modes.mass = 1.0;
    modes.momenta = {Eigen::Vector3d(0.2, -0.1, 0.4), Eigen::Vector3d(-0.3, 0.2, -0.7),
                     Eigen::Vector3d(0.0, 0.1, 1.2)};
    CHECK(omega_gram_gap(modes) < 1e-10);
}

TEST_CASE("tilde lift along an interval gluing returns the shared-slice copy") {
    EqualTimeModes modes;
    modes.mass = 1.0;
    modes.momenta = {Eigen::Vector3d(0.2, -0.1, 0.4)};
    TheorySpec th = build_equal_time_theory(modes, {0.0, 1.0, 2.0});
    const GluingDesc& g = th.gluing("glue:t1");
    const Region& m1 = th.region(g.result);
    RealSubspace w1 = th.region_subspace(m1);
    DirectSum ds1 = th.boundary_sum(m1);
    Rng rng(3);
    KVec phi = decompose_real(w1, random_vector(ds1.total, rng)).vR;
    TildeLift lift = tilde_lift(th, g, phi);
    CHECK(lift.residual < 1e-9);
    CHECK(lift.kernel_gap > 1e-8);
    // The global solution restricted to the interior slice is the same
    // copy that appears on the outer boundary.
    CHECK((lift.phi_tilde.c - ds1.project(0, phi).c).norm() < 1e-9);
}

TEST_CASE("quantum evolution across an interval is unitary on a Hilbert slice") {
    EqualTimeModes modes;
    modes.mass = 1.0;
    modes.momenta = {Eigen::Vector3d(0.2, -0.1, 0.4)};
    TheorySpec th = build_equal_time_theory(modes, {0.0, 1.0});
    Rng rng(5);
    QuantumEvolution ev = quantum_evolution(th, th.region("[t0,t1]"), {1}, {0}, 6, rng, 4);
    for (const auto& item : ev.report.items) {
        INFO(item.name, " residual ", item.residual);
        CHECK(item.verdict == Verdict::Pass);
    }
    // Slices are Hilbert spaces and the evolution map is the identity,
    // hence unitary in the ordinary sense.
    CHECK(th.spaces.at("t0").q == 0);
    CHECK((ev.classical.map.adjoint() * ev.classical.map -
           Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-10);
}

TEST_CASE("rescaled mode weights canonicalize to the same theory") {
    // The slab inner products carry positive mode weights; ingestion
    // absorbs any positive diagonal rescaling, so the axiom checks are
    // insensitive to it.
    Rng rng(7);
    const int n = 4;  // one mode: coefficients (a1, a2, b1, b2)
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) gram(i, i) = 0.25 + 2.0 * rng.uniform();
    GramIngestion ing = ingest_gram(gram, "t0");
    CHECK(ing.space.p == 4);
    CHECK(ing.space.q == 0);

    EqualTimeModes modes;
    modes.mass = 1.0;
    modes.momenta = {Eigen::Vector3d(0.2, -0.1, 0.4)};
    TheorySpec unit = build_equal_time_theory(modes, {0.0, 1.0, 2.0});
    Report runit = check_classical_axioms(unit);

    // Transport the diagonal subspace through the weighted coordinates and
    // back; the canonical theory is unchanged, as are all residuals.
    TheorySpec weighted = unit;
    for (auto& r : weighted.regions) {
        for (auto& v : r.lmtilde) {
            Eigen::VectorXcd w(v.size());
            for (int i = 0; i < v.size(); ++i) {
                const int slot = i % n;
                w(i) = v(i) * std::sqrt(gram(slot, slot).real());
            }
            Eigen::VectorXcd back(v.size());
            for (int i = 0; i < v.size(); ++i) {
                const int slot = i % n;
                back(i) = w(i) / std::sqrt(gram(slot, slot).real());
            }
            v = back;
        }
    }
    Report rweighted = check_classical_axioms(weighted);
    REQUIRE(runit.items.size() == rweighted.items.size());
    for (size_t i = 0; i < runit.items.size(); ++i) {
        CHECK(runit.items[i].verdict == rweighted.items[i].verdict);
        CHECK(std::abs(runit.items[i].residual - rweighted.items[i].residual) < 1e-12);
    }
}

TEST_CASE("interval gluing of the equal-time theory has anomaly 1 and passes T5b") {
    EqualTimeModes modes;
    modes.mass = 1.0;
    modes.momenta = {Eigen::Vector3d(0.2, -0.1, 0.4)};
    TheorySpec th = build_equal_time_theory(modes, {0.0, 1.0, 2.0});
    GluingContext gc(th, th.gluing("glue:t1"));
    auto c = anomaly(gc, full_cutoff(gc.sigma()), 6);
    CHECK(std::abs(c.value - cplx(1.0)) < 1e-9);

    Rng rng(11);
    const KreinSpace& s1 = gc.ctx_m1().space();
    std::vector<KVec> phis = {random_vector(s1, rng), random_vector(s1, rng)};
    T5bResult r = check_t5b(gc, phis, full_cutoff(gc.sigma()), 6);
    INFO("rel ", r.relative_error());
    CHECK(r.relative_error() < 1e-8);
}
