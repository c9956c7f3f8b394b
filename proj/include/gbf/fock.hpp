#pragma once

#include <map>
#include <vector>

#include "gbf/config.hpp"
#include "gbf/krein.hpp"

namespace gbf {

// Occupation index: sorted tuple of one-particle basis labels, strictly
// increasing fermionic / non-decreasing bosonic.
using FockIndex = std::vector<int>;

// Permutations leaving the tuple value unchanged (product of factorials
// of label multiplicities).
double index_multiplicity(const FockIndex& idx);

// Krein sign of the basis element: (-1)^{number of negative-norm labels}.
double index_sign(const KreinSpace& space, const FockIndex& idx);

// Normalization of the basis element psi[e_{a_1}..e_{a_m}] / sqrt(2^m K).
double index_norm(const FockIndex& idx);

// Sorts labels in place, returns kappa^{transpositions}; 0 for a fermionic
// repeat (the state vanishes).
double sort_with_parity(std::vector<int>& labels, int kappa);

struct FockBasisElement {
    FockIndex index;
    double norm;  // 1/sqrt(2^m K)
};

// Graded, truncated sparse state over the canonical Fock basis.
struct FockState {
    KreinSpace one_particle;
    Stat stat = Stat::Fermionic;
    int nmax = 6;
    std::map<FockIndex, cplx> coeffs;

    int kappa() const { return kappa_of(stat); }
    bool truncation_hit = false;

    static FockState vacuum(const KreinSpace& s, Stat stat, int nmax = 6);
    FockState& add(const FockIndex& idx, cplx c);
    void prune();
    bool homogeneous(int* degree = nullptr) const;
    double norm_coeffs() const;
};

FockState operator+(const FockState& a, const FockState& b);
FockState operator*(cplx s, const FockState& a);

std::vector<FockBasisElement> fock_basis(const KreinSpace& space, Stat stat, int nmax);

// <psi[eta_1..eta_n], psi[xi_1..xi_n]> = 2^n sum_sigma kappa^|sigma|
// prod_i {xi_i, eta_sigma(i)}. Unequal lengths give exactly 0.
cplx gen_inner(Stat stat, const std::vector<KVec>& etas, const std::vector<KVec>& xis);
// Brute-force route, kept independent of the det/permanent path.
cplx gen_inner_oracle(Stat stat, const std::vector<KVec>& etas, const std::vector<KVec>& xis);

// Expansion of the generating state psi[xi_1..xi_n] in the canonical basis.
FockState generating_state(const KreinSpace& space, Stat stat,
                           const std::vector<KVec>& xis, int nmax = 6);

cplx fock_inner(const FockState& a, const FockState& b);

// Conjugate-linear f-graded isometry onto the orientation-reversed space:
// psi[xi_1..xi_n] -> kappa^n psi[rev(xi_n)..rev(xi_1)].
FockState iota(const FockState& psi);

// Isometric merge along the orthogonal direct sum:
// psi[eta..] (x) psi[xi..] -> psi[emb_1(eta).., emb_2(xi)..].
FockState tau_merge(const FockState& a, const FockState& b, const DirectSum& ds);

// Fock lift of a one-particle conjugation:
// U psi[xi_1..xi_n] = kappa^n psi[u(xi_n)..u(xi_1)].
FockState conjugation_u(const Conjugation& u, const FockState& psi);

// Fock lift of a complex-linear map between one-particle spaces:
// psi[xi_1..xi_n] -> psi[T xi_1..T xi_n].
FockState map_one_particle(const FockState& psi, const KreinSpace& target,
                           const Eigen::MatrixXcd& T);

FockState random_fock_state(const KreinSpace& space, Stat stat, int degree, Rng& rng, int nmax = 6);

}  // namespace gbf
