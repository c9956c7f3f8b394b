#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gbf/config.hpp"
#include "gbf/krein.hpp"
#include "gbf/report.hpp"

namespace gbf {

// One oriented boundary component; `label` names a hypersurface stored in
// standard orientation, `reversed` selects the opposite one.
struct HComponent {
    std::string label;
    bool reversed = false;

    bool operator==(const HComponent& o) const = default;
};

struct Hypersurface {
    std::vector<HComponent> comps;
};

enum class RegionKind { Regular, Slice };

struct Region {
    std::string label;
    RegionKind kind = RegionKind::Regular;
    Hypersurface boundary;
    // Real spanning set of the solution subspace inside the boundary
    // direct sum (the image of the boundary-restriction map).
    std::vector<Eigen::VectorXcd> lmtilde;
    // For formal disjoint unions, labels of the member regions.
    std::vector<std::string> union_of;
    // For slice regions, the underlying hypersurface label.
    std::string slice_of;
};

// Self-gluing descriptor: region `region` glued along the boundary
// components at positions pos_std (standard orientation) and pos_rev
// (reversed copy, same label), producing region `result`.
struct GluingDesc {
    std::string name;
    std::string region;
    int pos_std = -1;
    int pos_rev = -1;
    std::string result;
};

struct TheorySpec {
    Stat stat = Stat::Fermionic;
    std::map<std::string, KreinSpace> spaces;  // standard orientation
    std::vector<Region> regions;
    std::vector<GluingDesc> gluings;

    int kappa() const { return kappa_of(stat); }
    const KreinSpace& base_space(const std::string& label) const;
    KreinSpace space_of(const HComponent& c) const;
    DirectSum boundary_sum(const Region& r) const;
    const Region& region(const std::string& label) const;
    const GluingDesc& gluing(const std::string& name) const;
    RealSubspace region_subspace(const Region& r) const;
};

Report check_classical_axioms(const TheorySpec& theory);

// The unique phi-tilde in L_Sigma with (phi, phi~, phi~) in the glued
// region's solution subspace; phi lives in the boundary space of the
// result region.
struct TildeLift {
    KVec phi_tilde;
    double residual = 0.0;
    double kernel_gap = 0.0;  // smallest singular value of the constrained solve
};

TildeLift tilde_lift(const TheorySpec& theory, const GluingDesc& g, const KVec& phi);

// Solution subspace of the glued region derived from the exact sequence,
// as a subspace of the result region's boundary space.
RealSubspace glued_subspace(const TheorySpec& theory, const GluingDesc& g);

// Hypersurface obtained by removing the glued pair from the boundary of M.
Hypersurface glued_boundary(const Region& m, const GluingDesc& g);

// Classical evolution along a split of the boundary components into a
// final group (positions `group2`, the reversed side) and an initial
// group (`group1`) with u_M(L_1) = L_2.
struct ClassicalEvolution {
    DirectSum initial;   // direct sum over group1 components, standard orientation
    DirectSum final_;    // direct sum over group2 components, un-reversed
    Eigen::MatrixXcd map;  // complex matrix of u~ : L_1 -> L_2
    double split_residual = 0.0;  // u_M(L_1) vs L_2 mismatch
    double linearity = 0.0;
    double isometry = 0.0;
    double graph_residual = 0.0;  // Lemma-form of the subspace as a graph of u_M
};

ClassicalEvolution classical_evolution(const TheorySpec& theory, const Region& r,
                                       const std::vector<int>& group2,
                                       const std::vector<int>& group1);

// Builders for test theories.

// Slice region over `label` with boundary (reversed copy, standard copy)
// and the diagonal subspace.
Region make_slice_region(const TheorySpec& theory, const std::string& label,
                         const std::string& region_label);

// Random region with the given boundary, drawn conjugation-first so the
// C5 predicate holds by construction.
Region make_random_region(const TheorySpec& theory, const std::string& region_label,
                          const Hypersurface& boundary, Rng& rng);

// Formal disjoint union of regions already present in the theory.
Region make_union_region(const TheorySpec& theory, const std::string& region_label,
                         const std::vector<std::string>& members);

// Random fermionic self-gluing theory: partial boundary Sigma1, gluing
// hypersurface Sigma; the glued region's subspace is derived through the
// exact sequence. Retries draws until the derived subspace is valid.
struct RandomGluedTheory {
    TheorySpec theory;
    std::string gluing_name;
};

RandomGluedTheory random_glued_theory(int dim_sigma1_half, int p_sigma, int q_sigma, Rng& rng,
                                      Stat stat = Stat::Fermionic);

// Cobordism P (u_P maps the initial space onto the reversed final space)
// disjointly united with a random region Q, glued along the shared
// hypersurface.
RandomGluedTheory random_cobordism_gluing(int dim_sigma2, int dim_sigma3_half, Rng& rng,
                                          Stat stat = Stat::Fermionic);

}  // namespace gbf
