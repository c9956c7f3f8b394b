#include <doctest.h>

#include "gbf/fock.hpp"

using namespace gbf;

TEST_CASE("fermionic Fock dimension is 2^d") {
    for (int d = 1; d <= 6; ++d) {
        KreinSpace s{(d + 1) / 2, d / 2, "s"};
        auto basis = fock_basis(s, Stat::Fermionic, d);
        CHECK(static_cast<int>(basis.size()) == (1 << d));
    }
}

TEST_CASE("bosonic basis for d=1, nmax=2") {
    KreinSpace s{1, 0, "s"};
    auto basis = fock_basis(s, Stat::Bosonic, 2);
    REQUIRE(basis.size() == 3);
    CHECK(basis[0].index.empty());
    CHECK(basis[1].index == FockIndex{0});
    CHECK(basis[2].index == (FockIndex{0, 0}));
    CHECK(index_multiplicity(basis[2].index) == doctest::Approx(2.0));
    CHECK(index_multiplicity(basis[1].index) == doctest::Approx(1.0));
}

TEST_CASE("generating-state inner product via the permutation oracle") {
    Rng rng(101);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        KreinSpace s{2, 2, "s"};
        for (int t = 0; t < 10; ++t) {
            const int n = 1 + static_cast<int>(rng.below(3));
            std::vector<KVec> etas, xis;
            for (int i = 0; i < n; ++i) {
                etas.push_back(random_vector(s, rng));
                xis.push_back(random_vector(s, rng));
            }
            cplx ref = gen_inner_oracle(stat, etas, xis);
            cplx fast = gen_inner(stat, etas, xis);
            CHECK(std::abs(ref - fast) < 1e-10 * std::max(1.0, std::abs(ref)));
            // Hermiticity.
            cplx swapped = gen_inner(stat, xis, etas);
            CHECK(std::abs(ref - std::conj(swapped)) < 1e-9);
        }
        // Unequal degrees vanish by grading.
        std::vector<KVec> one = {random_vector(s, rng)};
        std::vector<KVec> two = {random_vector(s, rng), random_vector(s, rng)};
        CHECK(gen_inner(stat, one, two) == cplx(0.0));
    }
}

TEST_CASE("vacuum and single-permutation cases") {
    KreinSpace s{1, 0, "s"};
    CHECK(gen_inner(Stat::Fermionic, {}, {}) == cplx(1.0));
    Rng rng(5);
    KVec xi = random_vector(s, rng), eta = random_vector(s, rng);
    // <psi[eta], psi[xi]> = 2 {xi, eta}.
    CHECK(std::abs(gen_inner(Stat::Fermionic, {eta}, {xi}) - 2.0 * inner(xi, eta)) < 1e-12);
}

TEST_CASE("generating state expansion: normalization example") {
    KreinSpace s{1, 0, "s"};
    FockState psi = generating_state(s, Stat::Fermionic, {KVec::basis(s, 0)});
    REQUIRE(psi.coeffs.size() == 1);
    CHECK(std::abs(psi.coeffs.at(FockIndex{0}) - cplx(std::sqrt(2.0))) < 1e-12);
}

TEST_CASE("fermionic generating state with a repeated argument vanishes") {
    KreinSpace s{1, 1, "s"};
    Rng rng(7);
    KVec xi = random_vector(s, rng);
    FockState psi = generating_state(s, Stat::Fermionic, {xi, xi});
    CHECK(psi.norm_coeffs() < 1e-12);
}

TEST_CASE("empty generating state is the vacuum") {
    KreinSpace s{1, 1, "s"};
    FockState psi = generating_state(s, Stat::Bosonic, {});
    REQUIRE(psi.coeffs.count(FockIndex{}) == 1);
    CHECK(std::abs(psi.coeffs.at(FockIndex{}) - cplx(1.0)) < 1e-14);
}

TEST_CASE("fock basis is orthonormal up to Krein signs and matches fock_inner") {
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        KreinSpace s{1, 1, "s"};
        const int nmax = (stat == Stat::Fermionic) ? 2 : 3;
        auto basis = fock_basis(s, stat, nmax);
        for (const auto& ea : basis) {
            std::vector<KVec> va;
            for (int x : ea.index) va.push_back(KVec::basis(s, x));
            for (const auto& eb : basis) {
                std::vector<KVec> vb;
                for (int x : eb.index) vb.push_back(KVec::basis(s, x));
                cplx ip = ea.norm * eb.norm * gen_inner(stat, va, vb);
                cplx want = (ea.index == eb.index) ? cplx(index_sign(s, ea.index)) : cplx(0.0);
                CHECK(std::abs(ip - want) < 1e-10);
            }
        }
    }
}

TEST_CASE("fock_inner agrees with gen_inner on generating states") {
    Rng rng(11);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        KreinSpace s{2, 1, "s"};
        for (int t = 0; t < 8; ++t) {
            const int n = static_cast<int>(rng.below(3));
            std::vector<KVec> etas, xis;
            for (int i = 0; i < n; ++i) {
                etas.push_back(random_vector(s, rng));
                xis.push_back(random_vector(s, rng));
            }
            FockState a = generating_state(s, stat, etas);
            FockState b = generating_state(s, stat, xis);
            CHECK(std::abs(fock_inner(a, b) - gen_inner(stat, etas, xis)) < 1e-9);
        }
    }
}

TEST_CASE("generating state is conjugate linear in each slot") {
    KreinSpace s{1, 1, "s"};
    Rng rng(13);
    KVec a = random_vector(s, rng), b = random_vector(s, rng);
    const cplx lambda(0.7, -1.3);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        FockState lhs = generating_state(s, stat, {lambda * a, b});
        FockState rhs = std::conj(lambda) * generating_state(s, stat, {a, b});
        FockState diff = lhs + cplx(-1.0) * rhs;
        CHECK(diff.norm_coeffs() < 1e-10);
    }
}

TEST_CASE("iota: involution, vacuum, and the graded isometry law") {
    Rng rng(17);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        KreinSpace s{1, 1, "s"};
        FockState vac = FockState::vacuum(s, stat);
        FockState ivac = iota(vac);
        CHECK(std::abs(ivac.coeffs.at(FockIndex{}) - cplx(1.0)) < 1e-14);

        for (int deg : {1, 2}) {
            FockState psi = random_fock_state(s, stat, deg, rng);
            FockState psi2 = random_fock_state(s, stat, deg, rng);
            FockState back = iota(iota(psi));
            FockState diff = back + cplx(-1.0) * psi;
            CHECK(diff.norm_coeffs() < 1e-12);
            cplx lhs = fock_inner(iota(psi2), iota(psi));
            cplx rhs = kappa_pow(kappa_of(stat), deg) * std::conj(fock_inner(psi2, psi));
            CHECK(std::abs(lhs - rhs) < 1e-10);
        }
    }
}

TEST_CASE("iota on generating states matches the reversed-argument form") {
    Rng rng(19);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        KreinSpace s{1, 1, "s"};
        auto rev = orientation_reverse(s, stat);
        const int n = 2;
        std::vector<KVec> xis;
        for (int i = 0; i < n; ++i) xis.push_back(random_vector(s, rng));
        FockState lhs = iota(generating_state(s, stat, xis));
        std::vector<KVec> rvecs;
        for (int i = n - 1; i >= 0; --i) rvecs.push_back(rev.apply(xis[i]));
        FockState rhs = kappa_pow(kappa_of(stat), n) * generating_state(rev.to, stat, rvecs);
        FockState diff = lhs + cplx(-1.0) * rhs;
        CHECK(diff.norm_coeffs() < 1e-10);
    }
}

TEST_CASE("tau merge: vacuum, isometry, degree additivity, graded swap") {
    Rng rng(23);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        KreinSpace s1{1, 1, "a"};
        KreinSpace s2{1, 0, "b"};
        DirectSum ds = direct_sum({s1, s2});

        FockState v1 = FockState::vacuum(s1, stat);
        FockState v2 = FockState::vacuum(s2, stat);
        FockState merged = tau_merge(v1, v2, ds);
        CHECK(std::abs(merged.coeffs.at(FockIndex{}) - cplx(1.0)) < 1e-14);

        for (int t = 0; t < 6; ++t) {
            const int da = static_cast<int>(rng.below(3));
            const int db = static_cast<int>(rng.below(2));
            FockState a = random_fock_state(s1, stat, da, rng);
            FockState b = random_fock_state(s2, stat, db, rng);
            FockState c = random_fock_state(s1, stat, da, rng);
            FockState d = random_fock_state(s2, stat, db, rng);
            cplx lhs = fock_inner(tau_merge(a, b, ds), tau_merge(c, d, ds));
            cplx rhs = fock_inner(a, c) * fock_inner(b, d);
            CHECK(std::abs(lhs - rhs) < 1e-9);

            int dm = 0;
            CHECK(tau_merge(a, b, ds).homogeneous(&dm));
            CHECK(dm <= da + db);
        }

        // Graded transposition: tau_{12}(a (x) b) = kappa^{da db}
        // tau_{21}(b (x) a) with both merges landing in the same total
        // space, the second through the swapped-parts layout.
        DirectSum swapped;
        swapped.total = ds.total;
        swapped.parts = {ds.parts[1], ds.parts[0]};
        swapped.slot = {ds.slot[1], ds.slot[0]};
        FockState a = random_fock_state(s1, stat, 1, rng);
        FockState b = random_fock_state(s2, stat, 1, rng);
        FockState lhs = tau_merge(a, b, ds);
        FockState rhs = kappa_pow(kappa_of(stat), 1) * tau_merge(b, a, swapped);
        FockState diff = lhs + cplx(-1.0) * rhs;
        CHECK(diff.norm_coeffs() < 1e-10);
    }
}

TEST_CASE("tau associativity across bracketings") {
    Rng rng(29);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        KreinSpace s1{1, 0, "a"}, s2{0, 1, "b"}, s3{1, 0, "c"};
        DirectSum d12 = direct_sum({s1, s2});
        DirectSum d123 = direct_sum({d12.total, s3});
        DirectSum d23 = direct_sum({s2, s3});
        DirectSum d123b = direct_sum({s1, d23.total});
        FockState a = random_fock_state(s1, stat, 1, rng);
        FockState b = random_fock_state(s2, stat, 1, rng);
        FockState c = random_fock_state(s3, stat, 1, rng);
        FockState left = tau_merge(tau_merge(a, b, d12), c, d123);
        FockState right = tau_merge(a, tau_merge(b, c, d23), d123b);
        // Identical canonical coordinates: (s1+, s3+, s2-) in both cases.
        FockState diff = left + cplx(-1.0) * right;
        CHECK(diff.norm_coeffs() < 1e-10);
    }
}

TEST_CASE("fock-level conjugation is involutive and f-graded isometric") {
    Rng rng(31);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        KreinSpace s = (stat == Stat::Fermionic) ? KreinSpace{1, 1, "s"} : KreinSpace{1, 1, "s"};
        Conjugation u = random_conjugation(s, stat, rng);
        FockState vac = FockState::vacuum(s, stat);
        FockState uvac = conjugation_u(u, vac);
        CHECK(std::abs(uvac.coeffs.at(FockIndex{}) - cplx(1.0)) < 1e-12);
        for (int deg : {1, 2}) {
            FockState psi = random_fock_state(s, stat, deg, rng);
            FockState psi2 = random_fock_state(s, stat, deg, rng);
            FockState back = conjugation_u(u, conjugation_u(u, psi));
            FockState diff = back + cplx(-1.0) * psi;
            CHECK(diff.norm_coeffs() < 1e-9);
            cplx lhs = fock_inner(conjugation_u(u, psi2), conjugation_u(u, psi));
            cplx rhs = kappa_pow(kappa_of(stat), deg) * std::conj(fock_inner(psi2, psi));
            CHECK(std::abs(lhs - rhs) < 1e-9);
        }
    }
}

TEST_CASE("grading orthogonality is exact") {
    KreinSpace s{1, 1, "s"};
    Rng rng(37);
    FockState a = random_fock_state(s, Stat::Bosonic, 1, rng);
    FockState b = random_fock_state(s, Stat::Bosonic, 2, rng);
    CHECK(fock_inner(a, b) == cplx(0.0));
}

TEST_CASE("truncation is an error for generating states") {
    KreinSpace s{1, 0, "s"};
    Rng rng(41);
    std::vector<KVec> many(4, random_vector(s, rng));
    CHECK_THROWS_AS(generating_state(s, Stat::Bosonic, many, 3), std::invalid_argument);
}
