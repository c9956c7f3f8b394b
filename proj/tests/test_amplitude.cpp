#include <doctest.h>

#include "gbf/amplitude.hpp"

using namespace gbf;

namespace {

TheorySpec slice_theory(Stat stat, int p, int q) {
    TheorySpec th;
    th.stat = stat;
    th.spaces["S"] = KreinSpace{p, q, "S"};
    th.regions.push_back(make_slice_region(th, "S", "slice:S"));
    return th;
}

TheorySpec random_region_theory(Stat stat, int p, int q, Rng& rng) {
    TheorySpec th;
    th.stat = stat;
    th.spaces["S"] = KreinSpace{p, q, "S"};
    Region r;
    r.boundary.comps = {{"S", false}};
    th.regions.push_back(make_random_region(th, "R", {{{"S", false}}}, rng));
    return th;
}

}  // namespace

TEST_CASE("hat map: subspace members, J-images, and the conjugation identity") {
    Rng rng(2);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        TheorySpec th = random_region_theory(stat, 1, 1, rng);
        AmplitudeContext ctx(th, th.region("R"));

        const KVec& w = ctx.subspace().spanning[0];
        HatVec hw = ctx.hat(w);
        CHECK((hw.re - w.c).norm() < 1e-10);
        CHECK(hw.im.norm() < 1e-10);
        HatVec hj = ctx.hat(w.timesJ());
        CHECK(hj.re.norm() < 1e-10);
        CHECK((hj.im - w.c).norm() < 1e-10);

        double worst = 0.0;
        for (int t = 0; t < 12; ++t) {
            KVec xi = random_vector(ctx.space(), rng);
            KVec eta = random_vector(ctx.space(), rng);
            cplx lhs = ctx.hat_pair(ctx.hat(xi), ctx.hat(eta));
            cplx rhs = inner(xi, ctx.conjugation().apply(eta));
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("amplitude: vacuum, odd vanishing, two-argument form") {
    Rng rng(3);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        TheorySpec th = random_region_theory(stat, 1, 1, rng);
        AmplitudeContext ctx(th, th.region("R"));
        CHECK(ctx.amplitude_gen({}) == cplx(1.0));
        std::vector<KVec> three;
        for (int i = 0; i < 3; ++i) three.push_back(random_vector(ctx.space(), rng));
        CHECK(ctx.amplitude_gen(three) == cplx(0.0));

        KVec x1 = random_vector(ctx.space(), rng), x2 = random_vector(ctx.space(), rng);
        HatVec h1 = ctx.hat(x1), h2 = ctx.hat(x2);
        cplx expect = ctx.hat_pair(h1, h2) + static_cast<double>(ctx.kappa()) * ctx.hat_pair(h2, h1);
        CHECK(std::abs(ctx.amplitude_gen({x1, x2}) - expect) < 1e-10);
    }
}

TEST_CASE("amplitude fast path matches the permutation oracle") {
    Rng rng(5);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        TheorySpec th = random_region_theory(stat, 2, 2, rng);
        AmplitudeContext ctx(th, th.region("R"));
        for (int k : {2, 4}) {
            std::vector<KVec> xs;
            for (int i = 0; i < k; ++i) xs.push_back(random_vector(ctx.space(), rng));
            cplx fast = ctx.amplitude_gen(xs);
            cplx ref = ctx.amplitude_gen_oracle(xs);
            CHECK(std::abs(fast - ref) < 1e-9 * std::max(1.0, std::abs(ref)));
        }
    }
}

TEST_CASE("amplitude is kappa-symmetric under argument transposition") {
    Rng rng(7);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        TheorySpec th = random_region_theory(stat, 1, 1, rng);
        AmplitudeContext ctx(th, th.region("R"));
        std::vector<KVec> xs;
        for (int i = 0; i < 4; ++i) xs.push_back(random_vector(ctx.space(), rng));
        cplx base = ctx.amplitude_gen(xs);
        std::swap(xs[1], xs[3]);
        cplx swapped = ctx.amplitude_gen(xs);
        CHECK(std::abs(base - static_cast<double>(ctx.kappa()) * swapped) < 1e-9);
    }
}

TEST_CASE("replacing the inner product by its surviving part leaves the amplitude unchanged") {
    // Fermionic: {.,.} -> 2i omega on hatted pairs; bosonic: -> g.
    Rng rng(11);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        TheorySpec th = random_region_theory(stat, 1, 1, rng);
        AmplitudeContext ctx(th, th.region("R"));
        std::vector<KVec> xs;
        for (int i = 0; i < 4; ++i) xs.push_back(random_vector(ctx.space(), rng));
        std::vector<HatVec> hats;
        for (const auto& x : xs) hats.push_back(ctx.hat(x));
        double worst = 0.0;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                cplx full = ctx.hat_pair(hats[i], hats[j]);
                cplx flipped = ctx.hat_pair(hats[j], hats[i]);
                // Fermionic: the pairs are pure 2i*omega (antisymmetric);
                // bosonic: pure g (symmetric).
                if (stat == Stat::Fermionic)
                    worst = std::max(worst, std::abs(full + flipped));
                else
                    worst = std::max(worst, std::abs(full - flipped));
            }
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("amplitude is conjugate linear in each slot over the real decomposition") {
    Rng rng(12);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        TheorySpec th = random_region_theory(stat, 1, 1, rng);
        AmplitudeContext ctx(th, th.region("R"));
        std::vector<KVec> xs = {random_vector(ctx.space(), rng), random_vector(ctx.space(), rng)};
        // Split the first slot as x = x0 + J x1 with x0, x1 in the subspace.
        auto dec = decompose_real(ctx.subspace(), xs[0]);
        cplx whole = ctx.amplitude_gen(xs);
        cplx part0 = ctx.amplitude_gen({dec.vR, xs[1]});
        cplx part1 = ctx.amplitude_gen({dec.vI, xs[1]});
        CHECK(std::abs(whole - (part0 - cplx(0, 1) * part1)) < 1e-9);
    }
}

TEST_CASE("amplitude of sparse states matches the generating-state route") {
    Rng rng(13);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        TheorySpec th = random_region_theory(stat, 1, 1, rng);
        AmplitudeContext ctx(th, th.region("R"));
        FockState vac = FockState::vacuum(ctx.space(), stat);
        CHECK(std::abs(ctx.amplitude(vac) - cplx(1.0)) < 1e-12);

        std::vector<KVec> xs = {random_vector(ctx.space(), rng), random_vector(ctx.space(), rng)};
        FockState gen = generating_state(ctx.space(), stat, xs);
        CHECK(std::abs(ctx.amplitude(gen) - ctx.amplitude_gen(xs)) < 1e-9);

        FockState odd = random_fock_state(ctx.space(), stat, 1, rng);
        CHECK(ctx.amplitude(odd) == cplx(0.0));
    }
}

TEST_CASE("T3x sweep on slice regions") {
    Rng rng(17);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        for (auto [p, q] : {std::pair{1, 1}, std::pair{2, 1}}) {
            TheorySpec th = slice_theory(stat, p, q);
            Rng sub = rng.child(p * 4 + q);
            Report rep = check_t3x(th, "S", 30, 3, sub);
            for (const auto& item : rep.items) {
                INFO(item.name, " residual ", item.residual);
                CHECK(item.verdict == Verdict::Pass);
            }
        }
    }
}

TEST_CASE("conjugation law on random regions") {
    Rng rng(19);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        TheorySpec th = random_region_theory(stat, 1, 1, rng);
        AmplitudeContext ctx(th, th.region("R"));
        Rng sub = rng.child(1);
        Report rep = check_conjugation_law(ctx, 20, 4, sub);
        CHECK(rep.all_pass());

        // State-level form through the Fock conjugation.
        FockState psi = random_fock_state(ctx.space(), stat, 2, sub);
        cplx lhs = ctx.amplitude(conjugation_u(ctx.conjugation(), psi));
        cplx rhs = std::conj(ctx.amplitude(psi));
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("quantum evolution on a slice region is the identity") {
    TheorySpec th = slice_theory(Stat::Fermionic, 1, 1);
    Rng rng(23);
    QuantumEvolution ev = quantum_evolution(th, th.region("slice:S"), {0}, {1}, 10, rng);
    for (const auto& item : ev.report.items) {
        INFO(item.name, " residual ", item.residual);
        CHECK(item.verdict == Verdict::Pass);
    }
    CHECK((ev.classical.map - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-10);
    FockState psi = random_fock_state(th.spaces.at("S"), Stat::Fermionic, 2, rng);
    FockState out = ev.apply(psi);
    FockState diff = out + cplx(-1.0) * psi;
    CHECK(diff.norm_coeffs() < 1e-9);
}

TEST_CASE("quantum evolution identities on a random cobordism") {
    Rng rng(24);
    for (Stat stat : {Stat::Fermionic, Stat::Bosonic}) {
        auto rt = random_cobordism_gluing(2, 1, rng, stat);
        Rng sub = rng.child(stat == Stat::Fermionic ? 0 : 1);
        QuantumEvolution ev = quantum_evolution(rt.theory, rt.theory.region("P"), {1}, {0}, 8, sub);
        for (const auto& item : ev.report.items) {
            INFO(item.name, " residual ", item.residual);
            CHECK(item.verdict == Verdict::Pass);
        }
    }
}

TEST_CASE("probability with vanishing amplitudes on the span is undefined") {
    TheorySpec th;
    th.stat = Stat::Fermionic;
    th.spaces["S"] = KreinSpace{1, 1, "S"};
    th.regions.push_back(make_slice_region(th, "S", "slice:S"));
    AmplitudeContext ctx(th, th.region("slice:S"));
    const KreinSpace& s = ctx.space();

    // Two negative-sign degree-2 basis elements with nonzero amplitudes;
    // the combination rho(b2) b1 - rho(b1) b2 has amplitude exactly zero.
    FockState b1, b2;
    b1.one_particle = b2.one_particle = s;
    b1.stat = b2.stat = Stat::Fermionic;
    b1.coeffs[FockIndex{0, 3}] = 1.0;
    b2.coeffs[FockIndex{1, 2}] = 1.0;
    cplx r1 = ctx.amplitude(b1), r2 = ctx.amplitude(b2);
    REQUIRE(std::abs(r1) > 1e-12);
    FockState null_state = r2 * b1 + (-r1) * b2;
    CHECK(std::abs(ctx.amplitude(null_state)) < 1e-12);
    CHECK_THROWS_AS(probability(ctx, {null_state}, {}), std::runtime_error);
}

TEST_CASE("probability: trivial cases and a hand-computed ratio") {
    TheorySpec th = slice_theory(Stat::Fermionic, 1, 1);
    AmplitudeContext ctx = slice_context(th, "S");
    const KreinSpace& s = ctx.space();

    // Adapted degree-0 spans: the vacuum plus sign-homogeneous
    // two-particle basis states.
    FockState vac = FockState::vacuum(s, Stat::Fermionic);
    Rng rng(29);
    FockState two_pos;  // positive-sign two-particle combination
    two_pos.one_particle = s;
    two_pos.stat = Stat::Fermionic;
    two_pos.coeffs[FockIndex{0, 1}] = rng.cnormal();
    two_pos.coeffs[FockIndex{2, 3}] = rng.cnormal();
    FockState two_neg;
    two_neg.one_particle = s;
    two_neg.stat = Stat::Fermionic;
    two_neg.coeffs[FockIndex{0, 2}] = rng.cnormal();

    // A = S gives certainty; A = {} gives zero.
    std::vector<FockState> S = {vac, two_pos, two_neg};
    CHECK(probability(ctx, S, S) == doctest::Approx(1.0));
    CHECK(probability(ctx, S, {}) == doctest::Approx(0.0));

    // Hand-computed ratio on an orthonormal pair with known amplitudes.
    double pv = probability(ctx, S, {vac});
    double expected;
    {
        // Orthonormalize {vac, two_pos} in the positive part, two_neg in
        // the negative part, and take |rho|^2 ratios directly.
        FockState b0 = vac;
        cplx ip = fock_inner(b0, two_pos);
        FockState r = two_pos + (-ip) * b0;
        double n2 = fock_inner(r, r).real();
        FockState b1 = (1.0 / std::sqrt(n2)) * r;
        double nneg = -fock_inner(two_neg, two_neg).real();
        FockState b2 = (1.0 / std::sqrt(nneg)) * two_neg;
        double num = std::norm(ctx.amplitude(b0));
        double den = num + std::norm(ctx.amplitude(b1)) + std::norm(ctx.amplitude(b2));
        expected = num / den;
    }
    CHECK(pv == doctest::Approx(expected).epsilon(1e-9));
    CHECK(pv >= 0.0);
    CHECK(pv <= 1.0);

    // Non-adapted spans are rejected.
    FockState mixed = random_fock_state(s, Stat::Fermionic, 2, rng);
    bool mixed_rejected = false;
    try {
        probability(ctx, {mixed}, {});
    } catch (const std::invalid_argument&) {
        mixed_rejected = true;
    }
    CHECK(mixed_rejected);

    // Odd-degree spans are rejected.
    FockState odd = random_fock_state(s, Stat::Fermionic, 1, rng);
    CHECK_THROWS_AS(probability(ctx, {odd}, {}), std::invalid_argument);
}

TEST_CASE("bosonic coherent-state amplitude against the exponential") {
    Rng rng(31);
    TheorySpec th = random_region_theory(Stat::Bosonic, 1, 1, rng);
    AmplitudeContext ctx(th, th.region("R"), 10);

    CoherentCheck zero = coherent_amplitude_check(ctx, KVec::zero(ctx.space()), 8);
    CHECK(std::abs(zero.partial_sum - cplx(1.0)) < 1e-12);
    CHECK(std::abs(zero.target - cplx(1.0)) < 1e-12);

    KVec xi = random_vector(ctx.space(), rng);
    xi = (0.4 / xi.norm()) * xi;
    CoherentCheck c = coherent_amplitude_check(ctx, xi, 8);
    CHECK(c.within_bound());

    // lambda-scaling consistency: the exponent scales by lambda^2.
    CoherentCheck c2 = coherent_amplitude_check(ctx, cplx(2.0) * xi, 8);
    HatVec h = ctx.hat(xi);
    cplx z = 0.25 * ctx.hat_pair(h, h);
    CHECK(std::abs(c2.target - std::exp(4.0 * z)) < 1e-9);

    TheorySpec thf = random_region_theory(Stat::Fermionic, 1, 1, rng);
    AmplitudeContext fctx(thf, thf.region("R"));
    CHECK_THROWS_AS(coherent_amplitude_check(fctx, KVec::zero(fctx.space()), 4),
                    std::invalid_argument);
}
