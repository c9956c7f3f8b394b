#include "gbf/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gbf/kernels.hpp"

namespace gbf {

double index_multiplicity(const FockIndex& idx) {
    double k = 1.0;
    size_t i = 0;
    while (i < idx.size()) {
        size_t j = i;
        while (j < idx.size() && idx[j] == idx[i]) ++j;
        double f = 1.0;
        for (size_t r = 2; r <= j - i; ++r) f *= static_cast<double>(r);
        k *= f;
        i = j;
    }
    return k;
}

double index_sign(const KreinSpace& space, const FockIndex& idx) {
    int neg = 0;
    for (int a : idx)
        if (a >= space.p) ++neg;
    return (neg % 2 == 0) ? 1.0 : -1.0;
}

double index_norm(const FockIndex& idx) {
    return 1.0 / std::sqrt(std::pow(2.0, static_cast<double>(idx.size())) * index_multiplicity(idx));
}

double sort_with_parity(std::vector<int>& labels, int kappa) {
    // Insertion sort, counting transpositions.
    long long swaps = 0;
    for (size_t i = 1; i < labels.size(); ++i) {
        int v = labels[i];
        size_t j = i;
        while (j > 0 && labels[j - 1] > v) {
            labels[j] = labels[j - 1];
            --j;
            ++swaps;
        }
        labels[j] = v;
    }
    if (kappa == -1) {
        for (size_t i = 1; i < labels.size(); ++i)
            if (labels[i] == labels[i - 1]) return 0.0;
        return (swaps % 2 == 0) ? 1.0 : -1.0;
    }
    return 1.0;
}

FockState FockState::vacuum(const KreinSpace& s, Stat stat, int nmax) {
    FockState psi;
    psi.one_particle = s;
    psi.stat = stat;
    psi.nmax = nmax;
    psi.coeffs[FockIndex{}] = 1.0;
    return psi;
}

FockState& FockState::add(const FockIndex& idx, cplx c) {
    auto it = coeffs.find(idx);
    if (it == coeffs.end())
        coeffs.emplace(idx, c);
    else
        it->second += c;
    return *this;
}

void FockState::prune() {
    for (auto it = coeffs.begin(); it != coeffs.end();) {
        if (std::abs(it->second) < tolerances().drop)
            it = coeffs.erase(it);
        else
            ++it;
    }
}

bool FockState::homogeneous(int* degree) const {
    int d = -1;
    for (const auto& [idx, c] : coeffs) {
        if (std::abs(c) < tolerances().drop) continue;
        if (d < 0)
            d = static_cast<int>(idx.size());
        else if (d != static_cast<int>(idx.size()))
            return false;
    }
    if (degree) *degree = std::max(d, 0);
    return true;
}

double FockState::norm_coeffs() const {
    double s = 0.0;
    for (const auto& [idx, c] : coeffs) s += std::norm(c);
    return std::sqrt(s);
}

FockState operator+(const FockState& a, const FockState& b) {
    FockState out = a;
    for (const auto& [idx, c] : b.coeffs) out.add(idx, c);
    out.prune();
    return out;
}

FockState operator*(cplx s, const FockState& a) {
    FockState out = a;
    for (auto& [idx, c] : out.coeffs) c *= s;
    out.prune();
    return out;
}

namespace {

void enumerate_indices(int dim, int degree, bool strict, FockIndex& cur, int start,
                       std::vector<FockIndex>& out) {
    if (static_cast<int>(cur.size()) == degree) {
        out.push_back(cur);
        return;
    }
    for (int a = start; a < dim; ++a) {
        cur.push_back(a);
        enumerate_indices(dim, degree, strict, cur, strict ? a + 1 : a, out);
        cur.pop_back();
    }
}

std::vector<FockIndex> indices_of_degree(const KreinSpace& s, Stat stat, int degree) {
    std::vector<FockIndex> out;
    FockIndex cur;
    enumerate_indices(s.dim(), degree, stat == Stat::Fermionic, cur, 0, out);
    return out;
}

}  // namespace

std::vector<FockBasisElement> fock_basis(const KreinSpace& space, Stat stat, int nmax) {
    std::vector<FockBasisElement> out;
    const int dmax = (stat == Stat::Fermionic) ? std::min(nmax, space.dim()) : nmax;
    for (int m = 0; m <= dmax; ++m) {
        for (auto& idx : indices_of_degree(space, stat, m))
            out.push_back({idx, index_norm(idx)});
    }
    return out;
}

cplx gen_inner_oracle(Stat stat, const std::vector<KVec>& etas, const std::vector<KVec>& xis) {
    if (etas.size() != xis.size()) return 0.0;
    const int n = static_cast<int>(etas.size());
    if (n == 0) return 1.0;
    Eigen::MatrixXcd G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = inner(xis[i], etas[j]);
    return std::pow(2.0, n) * kernels::perm_sum(G, kappa_of(stat));
}

cplx gen_inner(Stat stat, const std::vector<KVec>& etas, const std::vector<KVec>& xis) {
    if (etas.size() != xis.size()) return 0.0;
    const int n = static_cast<int>(etas.size());
    if (n == 0) return 1.0;
    Eigen::MatrixXcd G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = inner(xis[i], etas[j]);
    if (!kernels::fast_paths_enabled() || n > 12)
        return std::pow(2.0, n) * kernels::perm_sum(G, kappa_of(stat));
    cplx fast = (stat == Stat::Fermionic) ? kernels::determinant(G) : kernels::permanent(G);
    return std::pow(2.0, n) * fast;
}

FockState generating_state(const KreinSpace& space, Stat stat, const std::vector<KVec>& xis,
                           int nmax) {
    const int n = static_cast<int>(xis.size());
    if (n > nmax)
        throw std::invalid_argument("generating_state: degree exceeds the Fock truncation");
    FockState psi;
    psi.one_particle = space;
    psi.stat = stat;
    psi.nmax = nmax;
    for (const auto& idx : indices_of_degree(space, stat, n)) {
        std::vector<KVec> basis;
        basis.reserve(n);
        for (int a : idx) basis.push_back(KVec::basis(space, a));
        const double nrm = index_norm(idx);
        const cplx ip = gen_inner(stat, basis, xis);  // <psi[e..], psi[xi..]>
        const cplx coeff = index_sign(space, idx) * nrm * ip;
        if (std::abs(coeff) >= tolerances().drop) psi.coeffs[idx] = coeff;
    }
    return psi;
}

cplx fock_inner(const FockState& a, const FockState& b) {
    if (!a.one_particle.same_signature(b.one_particle) || a.stat != b.stat)
        throw std::invalid_argument("fock_inner: states live on different spaces");
    cplx acc = 0.0;
    for (const auto& [idx, ca] : a.coeffs) {
        auto it = b.coeffs.find(idx);
        if (it == b.coeffs.end()) continue;
        acc += index_sign(a.one_particle, idx) * std::conj(ca) * it->second;
    }
    return acc;
}

FockState iota(const FockState& psi) {
    const int kappa = psi.kappa();
    auto rev = orientation_reverse(psi.one_particle, psi.stat);
    FockState out;
    out.one_particle = rev.to;
    out.stat = psi.stat;
    out.nmax = psi.nmax;
    for (const auto& [idx, c] : psi.coeffs) {
        const int m = static_cast<int>(idx.size());
        std::vector<int> mapped(m);
        for (int i = 0; i < m; ++i) mapped[i] = rev.map_index(idx[m - 1 - i]);
        const double s = sort_with_parity(mapped, kappa);
        if (s == 0.0) continue;
        out.add(mapped, kappa_pow(kappa, m) * s * std::conj(c));
    }
    out.prune();
    return out;
}

FockState tau_merge(const FockState& a, const FockState& b, const DirectSum& ds) {
    if (a.stat != b.stat) throw std::invalid_argument("tau_merge: mixed statistics");
    if (!ds.parts[0].same_signature(a.one_particle) || !ds.parts[1].same_signature(b.one_particle))
        throw std::invalid_argument("tau_merge: direct sum does not match the factors");
    const int kappa = a.kappa();
    FockState out;
    out.one_particle = ds.total;
    out.stat = a.stat;
    out.nmax = std::max(a.nmax, b.nmax);
    for (const auto& [ia, ca] : a.coeffs) {
        for (const auto& [ib, cb] : b.coeffs) {
            if (static_cast<int>(ia.size() + ib.size()) > out.nmax) {
                out.truncation_hit = true;
                continue;
            }
            std::vector<int> merged;
            merged.reserve(ia.size() + ib.size());
            for (int x : ia) merged.push_back(ds.embed_index(0, x));
            for (int x : ib) merged.push_back(ds.embed_index(1, x));
            const double s = sort_with_parity(merged, kappa);
            if (s == 0.0) continue;
            out.add(merged, s * ca * cb);
        }
    }
    out.prune();
    return out;
}

FockState conjugation_u(const Conjugation& u, const FockState& psi) {
    if (!u.ambient.same_signature(psi.one_particle))
        throw std::invalid_argument("conjugation_u: conjugation lives on a different space");
    const int kappa = psi.kappa();
    FockState out;
    out.one_particle = psi.one_particle;
    out.stat = psi.stat;
    out.nmax = psi.nmax;
    for (const auto& [idx, c] : psi.coeffs) {
        const int m = static_cast<int>(idx.size());
        std::vector<KVec> imgs;
        imgs.reserve(m);
        for (int i = 0; i < m; ++i) imgs.push_back(u.apply(KVec::basis(psi.one_particle, idx[m - 1 - i])));
        FockState term = generating_state(psi.one_particle, psi.stat, imgs, psi.nmax);
        const cplx scale = kappa_pow(kappa, m) * index_norm(idx) * std::conj(c);
        for (const auto& [jdx, tc] : term.coeffs) out.add(jdx, scale * tc);
    }
    out.prune();
    return out;
}

FockState map_one_particle(const FockState& psi, const KreinSpace& target,
                           const Eigen::MatrixXcd& T) {
    FockState out;
    out.one_particle = target;
    out.stat = psi.stat;
    out.nmax = psi.nmax;
    for (const auto& [idx, c] : psi.coeffs) {
        std::vector<KVec> imgs;
        imgs.reserve(idx.size());
        for (int a : idx) imgs.push_back(KVec(target, T.col(a)));
        FockState term = generating_state(target, psi.stat, imgs, psi.nmax);
        const cplx scale = index_norm(idx) * c;
        for (const auto& [jdx, tc] : term.coeffs) out.add(jdx, scale * tc);
    }
    out.prune();
    return out;
}

FockState random_fock_state(const KreinSpace& space, Stat stat, int degree, Rng& rng, int nmax) {
    FockState psi;
    psi.one_particle = space;
    psi.stat = stat;
    psi.nmax = nmax;
    for (const auto& idx : indices_of_degree(space, stat, degree)) psi.coeffs[idx] = rng.cnormal();
    psi.prune();
    return psi;
}

}  // namespace gbf
