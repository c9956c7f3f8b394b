// gbf: batch front end for checking the axioms of concrete linear field
// theories and computing amplitudes, gluing anomalies, and probabilities.
//
// Exit codes: 0 pass, 1 axiom failure, 2 ill-defined (bosonic divergence),
// 3 input error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "gbf/amplitude.hpp"
#include "gbf/dirac.hpp"
#include "gbf/gluing.hpp"
#include "gbf/serialize.hpp"

namespace {

using namespace gbf;

void emit(const json& j, const std::string& out_path) {
    const std::string body = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << body;
    } else {
        std::ofstream out(out_path);
        out << body;
    }
}

int verdict_exit(const Report& rep) {
    if (rep.any_ill_defined()) return 2;
    return rep.all_pass() ? 0 : 1;
}

Report quantum_suite(const TheorySpec& theory, const std::string& suite, const RunConfig& cfg) {
    Report rep;
    Rng rng(cfg.seed);
    const bool all = suite == "all";

    if (all || suite == "t3x") {
        int k = 0;
        for (const auto& [label, s] : theory.spaces) {
            Rng sub = rng.child(101 + k++);
            rep.merge(check_t3x(theory, label, 24, 3, sub));
        }
    }

    if (all) {
        // Orientation-reversal and merge isometries plus vacuum behavior,
        // exercised on random states of each hypersurface.
        int k = 0;
        for (const auto& [label, s] : theory.spaces) {
            Rng sub = rng.child(301 + k++);
            double iota_res = 0.0, vac = 0.0;
            for (int t = 0; t < 8; ++t) {
                const int deg = static_cast<int>(sub.below(3));
                FockState psi = random_fock_state(s, theory.stat, deg, sub, cfg.nmax);
                FockState psi2 = random_fock_state(s, theory.stat, deg, sub, cfg.nmax);
                FockState back = iota(iota(psi));
                FockState diff = back + cplx(-1.0) * psi;
                iota_res = std::max(iota_res, diff.norm_coeffs());
                cplx lhs = fock_inner(iota(psi2), iota(psi));
                cplx rhs = kappa_pow(theory.kappa(), deg) * std::conj(fock_inner(psi2, psi));
                iota_res = std::max(iota_res, std::abs(lhs - rhs));
            }
            FockState vac1 = FockState::vacuum(s, theory.stat, cfg.nmax);
            FockState ivac = iota(vac1);
            vac = std::abs(ivac.coeffs.count(FockIndex{}) ? ivac.coeffs.at(FockIndex{}) - 1.0 : -1.0);
            rep.add("involution isometry " + label, "T1b", iota_res, cfg.tol);
            rep.add("vacuum under involution " + label, "V2", vac, cfg.tol);
        }
        for (const auto& r : theory.regions) {
            try {
                AmplitudeContext ctx(theory, r, cfg.nmax);
                rep.add("vacuum amplitude " + r.label, "V5",
                        std::abs(ctx.amplitude(FockState::vacuum(ctx.space(), theory.stat, cfg.nmax)) - 1.0),
                        cfg.tol);
                Rng sub = rng.child(401);
                rep.merge(check_conjugation_law(ctx, 8, 3, sub), r.label + " ");
            } catch (const std::exception& e) {
                rep.add_verdict("amplitude context " + r.label, "C5", Verdict::Fail, 1.0, e.what());
            }
        }
    }

    if (all || suite == "t5a") {
        // Disjoint factorization over declared union regions.
        Rng sub = rng.child(501);
        for (const auto& r : theory.regions) {
            if (r.union_of.size() != 2) continue;
            const Region& m1 = theory.region(r.union_of[0]);
            const Region& m2 = theory.region(r.union_of[1]);
            AmplitudeContext a1(theory, m1, cfg.nmax);
            AmplitudeContext a2(theory, m2, cfg.nmax);
            for (int t = 0; t < 4; ++t) {
                FockState p1 = random_fock_state(a1.space(), theory.stat, 2 * static_cast<int>(sub.below(2)),
                                                 sub, cfg.nmax);
                FockState p2 = random_fock_state(a2.space(), theory.stat, 2 * static_cast<int>(sub.below(2)),
                                                 sub, cfg.nmax);
                rep.merge(check_t5a(theory, r.union_of[0], r.union_of[1], p1, p2, cfg.nmax));
            }
        }
    }

    if (all || suite == "t5b" || suite == "t5b-star") {
        Rng sub = rng.child(601);
        for (const auto& g : theory.gluings) {
            std::optional<GluingContext> gc_holder;
            try {
                gc_holder.emplace(theory, g, cfg.nmax);
            } catch (const std::exception& e) {
                rep.add_verdict("gluing context " + g.name, "T5b", Verdict::Fail, 1.0, e.what());
                continue;
            }
            GluingContext& gc = *gc_holder;
            const KreinSpace& s1 = gc.ctx_m1().space();
            std::vector<KVec> phis;
            const int npick = std::min(2, s1.dim());
            for (int i = 0; i < npick; ++i) phis.push_back(random_vector(s1, sub));
            auto chain = default_chain(gc, phis, sub);
            // The full-space cutoff sum grows factorially with the gluing
            // dimension; the identity only needs cutoffs above the lift span.
            while (gc.sigma().dim() > 6 && chain.size() > 1 &&
                   chain.back().dim() > chain.front().dim() + 1)
                chain.pop_back();

            if (all || suite == "t5b") {
                try {
                    T5bResult r = check_t5b(gc, phis, chain.back(), cfg.mmax);
                    if (!r.well_defined)
                        rep.add_verdict("composition identity " + g.name, "T5b", Verdict::IllDefined,
                                        0.0, "anomaly ill-defined (bosonic divergence)");
                    else
                        rep.add("composition identity " + g.name, "T5b", r.relative_error(), 1e-8);
                    auto series = anomaly_limit(gc, chain, cfg.mmax);
                    rep.add_verdict("anomaly stabilization " + g.name, "T5b",
                                    series.well_defined.back() ? Verdict::Pass : Verdict::IllDefined,
                                    series.steps.empty() ? 0.0 : series.steps.back());
                } catch (const std::exception& e) {
                    rep.add_verdict("composition identity " + g.name, "T5b", Verdict::Fail, 1.0,
                                    e.what());
                }
            }
            if ((all || suite == "t5b-star") && theory.stat == Stat::Fermionic) {
                auto steps = check_t5b_renormalized(gc, phis, chain, cfg.mmax);
                double worst = 0.0;
                for (const auto& st : steps)
                    if (st.contains_lifts) worst = std::max(worst, std::abs(st.difference));
                rep.add("renormalized composition " + g.name, "T5b*", worst, cfg.tol);
            } else if (suite == "t5b-star" && theory.stat != Stat::Fermionic) {
                rep.add_verdict("renormalized composition " + g.name, "T5b*", Verdict::Skipped, 0.0,
                                "stated for fermionic theories");
            }
        }
    }

    return rep;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"axiom checker and amplitude engine for linear field theories"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    app.add_option("--seed", cfg.seed, "random seed for all randomized checks");
    app.add_option("--tol", cfg.tol, "residual tolerance");
    app.add_option("--nmax", cfg.nmax, "Fock truncation degree");
    app.add_option("--mmax", cfg.mmax, "gluing-sum degree cap (bosonic)");
    app.add_option("--out", cfg.out, "write the JSON report to this path");

    std::string spec_path, region_label, state_path, gluing_name, chain_mode = "auto";
    std::string suite = "all", slab = "t";
    int demo_modes = 1;

    auto* cc = app.add_subcommand("check-classical", "run the classical axiom suite");
    cc->add_option("spec", spec_path)->required();

    auto* cq = app.add_subcommand("check-quantum", "run the quantum axiom suites");
    cq->add_option("spec", spec_path)->required();
    cq->add_option("--suite", suite)->check(CLI::IsMember({"t3x", "t5a", "t5b", "t5b-star", "all"}));

    auto* ca = app.add_subcommand("amplitude", "amplitude of a state on a region");
    ca->add_option("spec", spec_path)->required();
    ca->add_option("--region", region_label)->required();
    ca->add_option("--state", state_path)->required();

    auto* cn = app.add_subcommand("anomaly", "gluing anomaly along a cutoff chain");
    cn->add_option("spec", spec_path)->required();
    cn->add_option("--gluing", gluing_name)->required();
    cn->add_option("--chain", chain_mode)->check(CLI::IsMember({"auto", "full"}));

    auto* cd = app.add_subcommand("dirac-demo", "run the axiom suites on a bundled slab theory");
    cd->add_option("--slab", slab)->check(CLI::IsMember({"t", "z"}));
    cd->add_option("--modes", demo_modes)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 3;
    }

    gbf::tolerances().tol = cfg.tol;

    try {
        if (cc->parsed()) {
            TheorySpec theory = load_theory(spec_path);
            Report rep = check_classical_axioms(theory);
            emit(report_to_json(rep), cfg.out);
            return verdict_exit(rep);
        }
        if (cq->parsed()) {
            TheorySpec theory = load_theory(spec_path);
            Report rep = quantum_suite(theory, suite, cfg);
            emit(report_to_json(rep), cfg.out);
            return verdict_exit(rep);
        }
        if (ca->parsed()) {
            TheorySpec theory = load_theory(spec_path);
            const Region& region = theory.region(region_label);
            AmplitudeContext ctx(theory, region, cfg.nmax);
            StateDescription st = load_state(state_path, ctx.space().dim());
            cplx value = 0.0;
            for (const auto& term : st.terms) {
                std::vector<KVec> vecs;
                for (const auto& v : term.vectors) vecs.emplace_back(ctx.space(), v);
                value += term.coeff * ctx.amplitude_gen(vecs);
            }
            char buf[96];
            if (std::abs(value.imag()) < 5e-13)
                std::snprintf(buf, sizeof(buf), "%.12f", value.real());
            else
                std::snprintf(buf, sizeof(buf), "%.12f%s%.12fi", value.real(),
                              value.imag() < 0 ? "" : "+", value.imag());
            std::cout << buf << "\n";
            if (!cfg.out.empty()) {
                json j;
                j["amplitude"] = json::array({value.real(), value.imag()});
                emit(j, cfg.out);
            }
            return 0;
        }
        if (cn->parsed()) {
            TheorySpec theory = load_theory(spec_path);
            GluingContext gc(theory, theory.gluing(gluing_name), cfg.nmax);
            Rng rng(cfg.seed);
            std::vector<CutoffSubspace> chain;
            if (chain_mode == "full")
                chain.push_back(full_cutoff(gc.sigma()));
            else
                chain = default_chain(gc, {}, rng);
            AnomalySeries series = anomaly_limit(gc, chain, cfg.mmax);
            json j;
            json vals = json::array();
            for (size_t i = 0; i < series.values.size(); ++i)
                vals.push_back(json{{"re", series.values[i].real()},
                                    {"im", series.values[i].imag()},
                                    {"well_defined", static_cast<bool>(series.well_defined[i])}});
            j["cutoffs"] = vals;
            json steps = json::array();
            for (double s : series.steps) steps.push_back(s);
            j["steps"] = steps;
            j["stabilized"] = series.stabilized;
            emit(j, cfg.out);
            bool ill = false;
            for (auto wd : series.well_defined) ill = ill || !wd;
            return ill ? 2 : 0;
        }
        if (cd->parsed()) {
            TheorySpec theory;
            if (slab == "t") {
                dirac::EqualTimeModes modes;
                modes.mass = 1.0;
                for (int i = 0; i < demo_modes; ++i)
                    modes.momenta.emplace_back(0.2 + 0.3 * i, -0.1 * i, 0.4 + 0.1 * i);
                theory = dirac::build_equal_time_theory(modes, {0.0, 1.0, 2.0});
            } else {
                dirac::ConstantZModes modes;
                modes.mass = 1.0;
                for (int i = 0; i < demo_modes; ++i) {
                    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
                    modes.modes.emplace_back(sign * (1.5 + 0.25 * i),
                                             Eigen::Vector2d(0.2, -0.3 + 0.1 * i));
                }
                theory = dirac::build_constant_z_theory(modes, {0.0, 1.0, 2.0});
            }
            Report rep = check_classical_axioms(theory);
            rep.merge(quantum_suite(theory, "all", cfg));
            emit(report_to_json(rep), cfg.out);
            return verdict_exit(rep);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 3;
}
