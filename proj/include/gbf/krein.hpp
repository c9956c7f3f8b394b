#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "gbf/config.hpp"
#include "gbf/rng.hpp"

namespace gbf {

// Finite-dimensional complex indefinite inner-product space in canonical
// form: basis e_1..e_{p+q} with <e_a,e_b> = s_a delta_ab, s_a = +1 for
// a < p and -1 otherwise. The inner product is conjugate linear in the
// first slot throughout.
struct KreinSpace {
    int p = 0;
    int q = 0;
    std::string label;

    int dim() const { return p + q; }
    int rdim() const { return 2 * (p + q); }
    double sign(int a) const { return a < p ? 1.0 : -1.0; }
    bool same_signature(const KreinSpace& o) const { return p == o.p && q == o.q; }
};

struct KVec {
    KreinSpace space;
    Eigen::VectorXcd c;

    KVec() = default;
    KVec(KreinSpace s, Eigen::VectorXcd v);

    static KVec zero(const KreinSpace& s);
    static KVec basis(const KreinSpace& s, int a);

    KVec timesJ() const;  // multiplication by i
    double norm() const { return c.norm(); }
};

KVec operator+(const KVec& a, const KVec& b);
KVec operator-(const KVec& a, const KVec& b);
KVec operator*(cplx s, const KVec& v);

cplx inner(const KVec& v, const KVec& w);
double metric_g(const KVec& v, const KVec& w);   // Re{v,w}
double symplectic(const KVec& v, const KVec& w);  // (1/2) Im{v,w}

// Realification helpers: a complex vector (z_1..z_D) maps to the real
// vector (Re z; Im z) of length 2D.
Eigen::VectorXd to_real(const Eigen::VectorXcd& z);
Eigen::VectorXcd from_real(const Eigen::VectorXd& x);

// Conjugate-linear identification L -> L-bar realizing
// {phi', phi}_bar = kappa conj({phi', phi}). Fermionic reversal swaps the
// positive and negative blocks; bosonic keeps them.
struct OrientationReversal {
    KreinSpace from;
    KreinSpace to;
    int kappa = -1;

    KVec apply(const KVec& v) const;
    KVec apply_inverse(const KVec& v) const;
    int map_index(int a) const;          // basis slot in `to` of e_a
    int map_index_inverse(int a) const;  // basis slot in `from` of f_a
};

OrientationReversal orientation_reverse(const KreinSpace& s, Stat stat);

// Orthogonal direct sum with canonical reordering (positive blocks first).
struct DirectSum {
    KreinSpace total;
    std::vector<KreinSpace> parts;
    std::vector<std::vector<int>> slot;  // slot[i][a]: total index of part i basis a

    int embed_index(int part, int a) const { return slot[part][a]; }
    KVec embed(int part, const KVec& v) const;
    KVec project(int part, const KVec& full) const;
    // Real-linear projector onto the embedded copy of part i (complex coords).
    Eigen::VectorXcd project_keep(int part, const Eigen::VectorXcd& full) const;
};

DirectSum direct_sum(const std::vector<KreinSpace>& parts, std::string label = {});

// Real-linear subspace given by a spanning set; spanning vectors must be
// real-linearly independent.
struct RealSubspace {
    KreinSpace ambient;
    std::vector<KVec> spanning;
    int real_dim = 0;

    Eigen::MatrixXd basis_real() const;  // 2D x real_dim
};

RealSubspace make_real_subspace(const KreinSpace& ambient, std::vector<KVec> spanning);

// Least-squares membership residual of v in span_R(W).
double subspace_residual(const RealSubspace& W, const KVec& v);

// Real-linear span equality to tolerance.
bool same_real_span(const RealSubspace& A, const RealSubspace& B);

// Conjugate-linear involution u with <u v, u v'> = kappa conj(<v,v'>),
// stored as its real-linear action.
struct Conjugation {
    KreinSpace ambient;
    Eigen::MatrixXd real_matrix;  // 2D x 2D
    int kappa = -1;

    KVec apply(const KVec& v) const;
};

struct ConjugationResiduals {
    double involutive = 0.0;
    double conjugate_linear = 0.0;
    double inner_law = 0.0;
    double adapted = 0.0;

    double worst() const;
    bool ok(double tol) const { return worst() <= tol; }
};

ConjugationResiduals verify_conjugation(const Conjugation& u);

// Per-property report for the region-subspace requirements: neutrality
// (isotropy of omega in the bosonic case), half real dimension,
// W = W-perp, and validity of the induced conjugation.
struct SubspaceReport {
    bool pass = false;
    double neutrality = 0.0;       // max |g(w,w')| fermionic, |omega(w,w')| bosonic
    double half_dimension = 0.0;   // 0 if real_dim == dim_C, 1 otherwise
    double hypermaximal = 0.0;     // span distance between W and its companion
    double splitting = 0.0;        // condition failure of W + JW = whole space
    ConjugationResiduals conj;
    std::string failure;  // first violated property, empty if pass
};

SubspaceReport check_subspace_c5(const KreinSpace& space, const RealSubspace& W, Stat stat);

// Builds the conjugation with fixed-point set W and eigenvalue -1 on JW.
// Throws std::invalid_argument naming the violated property when W does
// not qualify.
Conjugation conjugation_from_subspace(const KreinSpace& space, const RealSubspace& W, Stat stat);

// Fixed-point set of a conjugation, returned as a spanning set of
// real dimension dim_C(ambient).
RealSubspace fixed_point_subspace(const Conjugation& u);

// Unique decomposition v = vR + J vI with vR, vI in W.
struct RealDecomposition {
    KVec vR;
    KVec vI;
    double residual = 0.0;
};

RealDecomposition decompose_real(const RealSubspace& W, const KVec& v);

// Canonicalization of an arbitrary Hermitian nondegenerate Gram matrix:
// indefinite modified Gram-Schmidt with sign bookkeeping. `to_canonical`
// maps ingested coordinates to coordinates in the canonical space.
struct GramIngestion {
    KreinSpace space;
    Eigen::MatrixXcd to_canonical;
    Eigen::MatrixXcd from_canonical;
};

GramIngestion ingest_gram(const Eigen::MatrixXcd& gram, std::string label = {});

// Random draws used by the generators and tests.
Eigen::MatrixXcd random_unitary(int n, Rng& rng);
Eigen::MatrixXcd random_symmetric_unitary(int n, Rng& rng);

// Random valid conjugation on `space` (fermionic draws require p == q).
Conjugation random_conjugation(const KreinSpace& space, Stat stat, Rng& rng);

KVec random_vector(const KreinSpace& space, Rng& rng);

}  // namespace gbf
