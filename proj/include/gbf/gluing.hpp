#pragma once

#include "gbf/amplitude.hpp"

namespace gbf {

// Complex cutoff subspace of the gluing hypersurface space, carried by an
// orthonormal basis with Krein signs <xi_a, xi_a> = s_a.
struct CutoffSubspace {
    KreinSpace ambient;
    std::vector<KVec> basis;
    std::vector<double> signs;

    int dim() const { return static_cast<int>(basis.size()); }
    KVec project(const KVec& v) const;
    double containment_residual(const KVec& v) const;
};

// Indefinite Gram-Schmidt with sign bookkeeping and pair completion for
// null directions. Vectors inside the accumulated span are dropped.
CutoffSubspace krein_span(const KreinSpace& ambient, std::vector<KVec> vectors);

CutoffSubspace full_cutoff(const KreinSpace& ambient);

// Evaluation bundle for one self-gluing.
class GluingContext {
  public:
    GluingContext(const TheorySpec& theory, const GluingDesc& g, int nmax = 8);

    const TheorySpec& theory() const { return *theory_; }
    const GluingDesc& desc() const { return *g_; }
    const AmplitudeContext& ctx_m() const { return ctx_m_; }
    const AmplitudeContext& ctx_m1() const { return ctx_m1_; }
    const KreinSpace& sigma() const { return sigma_; }

    // Embeddings into the boundary of M.
    KVec embed_rest(const KVec& phi) const;      // from the boundary of M1
    KVec embed_sigma(const KVec& xi) const;      // from L_Sigma
    KVec embed_sigma_bar(const KVec& xi) const;  // from L_Sigma via the reversal

    // Regularized gluing sum
    //   sum_m 1/(2^m m!) sum_{tuples in alpha} (-1)^{sum sig} kappa^m
    //     rho_M(psi[emb(phi).., emb(xi_a).., emb_bar(rev xi_a) reversed..]).
    // With an empty phi list this is the anomaly c_alpha.
    struct SumResult {
        cplx value = 0.0;
        bool well_defined = true;
        bool truncated = false;
        std::vector<double> m_abs;  // per-degree absolute contributions
    };
    SumResult glue_sum(const std::vector<KVec>& phis, const CutoffSubspace& alpha, int mmax,
                       bool sorted_tuples = false) const;

    cplx rho_m1(const std::vector<KVec>& phis) const;

    // Complex span of the tilde lifts of the real components of the phis.
    CutoffSubspace lift_span(const std::vector<KVec>& phis) const;

  private:
    const TheorySpec* theory_;
    const GluingDesc* g_;
    AmplitudeContext ctx_m_;
    AmplitudeContext ctx_m1_;
    KreinSpace sigma_;
    OrientationReversal rev_;
    std::vector<int> rest_pos_;  // positions of the M1 components inside bdy(M)
};

// Anomaly along a chain of cutoffs, with stabilization diagnostics.
struct AnomalySeries {
    std::vector<cplx> values;
    std::vector<bool> well_defined;
    std::vector<double> steps;  // |c_{k} - c_{k-1}|
    bool stabilized = false;
    cplx final_value = 0.0;
};

GluingContext::SumResult anomaly(const GluingContext& gc, const CutoffSubspace& alpha, int mmax);
AnomalySeries anomaly_limit(const GluingContext& gc, const std::vector<CutoffSubspace>& chain,
                            int mmax);

// rho_M(tau(psi1 (x) psi2)) = rho_M1(psi1) rho_M2(psi2) for a disjoint union.
Report check_t5a(const TheorySpec& theory, const std::string& m1, const std::string& m2,
                 const FockState& psi1, const FockState& psi2, int nmax = 8);

struct T5bResult {
    cplx lhs = 0.0;  // rho_M1(psi) * c_alpha
    cplx rhs = 0.0;  // regularized gluing sum
    double lift_containment = 0.0;
    bool well_defined = true;
    double relative_error() const;
};

T5bResult check_t5b(const GluingContext& gc, const std::vector<KVec>& phis,
                    const CutoffSubspace& alpha, int mmax);

struct T5bStarStep {
    bool contains_lifts = false;
    cplx difference = 0.0;
};

// Renormalized composition identity along a cutoff chain (fermionic).
std::vector<T5bStarStep> check_t5b_renormalized(const GluingContext& gc,
                                                const std::vector<KVec>& phis,
                                                const std::vector<CutoffSubspace>& chain, int mmax);

// Substitution identities used by the composition proof, verified on
// random vectors.
Report appendix_identities(const GluingContext& gc, int samples, Rng& rng);

// Default chain: lift span, one extra direction, full space.
std::vector<CutoffSubspace> default_chain(const GluingContext& gc, const std::vector<KVec>& phis,
                                          Rng& rng);

}  // namespace gbf
