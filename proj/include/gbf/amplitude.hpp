#pragma once

#include <optional>

#include "gbf/fock.hpp"
#include "gbf/spacetime.hpp"

namespace gbf {

// Complexified decomposition xi-hat = xiR - i xiI with xiR, xiI in the
// region subspace; the new imaginary unit is independent of J, so the
// pair of honest boundary vectors is kept explicit.
struct HatVec {
    Eigen::VectorXcd re;
    Eigen::VectorXcd im;
};

// Per-region evaluation bundle for the amplitude map.
class AmplitudeContext {
  public:
    AmplitudeContext(const TheorySpec& theory, const Region& region, int nmax = 6);

    const DirectSum& boundary() const { return ds_; }
    const KreinSpace& space() const { return ds_.total; }
    const RealSubspace& subspace() const { return W_; }
    const Conjugation& conjugation() const { return uM_; }
    Stat stat() const { return stat_; }
    int kappa() const { return kappa_of(stat_); }
    int nmax() const { return nmax_; }

    HatVec hat(const KVec& xi) const;
    // Complex-bilinear extension of the boundary inner product on hats.
    cplx hat_pair(const HatVec& a, const HatVec& b) const;
    // {e_a-hat, e_b-hat} over canonical basis directions (cached).
    const Eigen::MatrixXcd& basis_pairs() const;

    // rho_M on a generating state psi[xi_1..xi_k]; odd k gives exactly 0.
    cplx amplitude_gen(const std::vector<KVec>& xis) const;
    // Brute-force pairing-sum route (k <= 10), for cross-checks.
    cplx amplitude_gen_oracle(const std::vector<KVec>& xis) const;

    // Linear extension over the canonical Fock basis.
    cplx amplitude(const FockState& psi) const;

    // Pairing-matrix route shared with the gluing sums: amplitude of
    // psi[v_{i_1}..v_{i_k}] given the precomputed matrix P(a,b) = {v_a^, v_b^}.
    cplx amplitude_from_pairs(const Eigen::MatrixXcd& pairs, const std::vector<int>& pick) const;

  private:
    DirectSum ds_;
    RealSubspace W_;
    Conjugation uM_;
    Stat stat_;
    int nmax_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> split_;  // [S | JS] solver
    mutable std::optional<Eigen::MatrixXcd> basis_pairs_;
};

// Slice-region context over a hypersurface label (boundary: reversed copy
// then standard copy, diagonal subspace).
AmplitudeContext slice_context(const TheorySpec& theory, const std::string& label, int nmax = 6);

// rho of a slice region applied to tau(iota(psi') (x) psi) reproduces the
// state-space inner product; sweeps random generating states and the
// auxiliary vanishing identities.
Report check_t3x(const TheorySpec& theory, const std::string& label, int pairs, int max_degree,
                 Rng& rng);

// rho_M(U_M psi) = conj(rho_M(psi)).
Report check_conjugation_law(const AmplitudeContext& ctx, int trials, int max_degree, Rng& rng);

// Quantum evolution along a geometric boundary split.
struct QuantumEvolution {
    ClassicalEvolution classical;
    Report report;
    // Fock lift of the classical evolution map (complex linear).
    FockState apply(const FockState& psi) const;
    const AmplitudeContext* ctx = nullptr;
};

QuantumEvolution quantum_evolution(const TheorySpec& theory, const Region& region,
                                   const std::vector<int>& group2, const std::vector<int>& group1,
                                   int trials, Rng& rng, int nmax = 6);

// Measurement probability from amplitudes of a Krein-orthonormalized
// basis of S restricting to one of A; both spans must be adapted and of
// f-degree zero.
double probability(const AmplitudeContext& ctx, const std::vector<FockState>& S,
                   const std::vector<FockState>& A);

struct CoherentCheck {
    cplx partial_sum;
    cplx target;
    double tail_bound;
    bool within_bound() const { return std::abs(partial_sum - target) <= tail_bound + 1e-12; }
};

// Bosonic cross-check: truncated coherent-state series against
// exp((1/4){xi^, xi^}).
CoherentCheck coherent_amplitude_check(const AmplitudeContext& ctx, const KVec& xi, int nterms);

}  // namespace gbf
