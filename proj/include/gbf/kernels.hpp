#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gbf/config.hpp"

namespace gbf::kernels {

using Mat = Eigen::MatrixXcd;

// Signed permutation sum  sum_{sigma} kappa^|sigma| prod_i G(i, sigma(i)).
// Brute-force reference route; n <= 10.
cplx perm_sum(const Mat& G, int kappa);

cplx determinant(const Mat& G);

// Permanent, Ryser gray-code formula. n <= 30 (practically n <= 14).
cplx permanent(const Mat& G);

// Pfaffian of a skew-symmetric matrix; recursive expansion for dim <= 12,
// Parlett-Reid tridiagonalization above that. Odd dimension gives 0.
cplx pfaffian(const Mat& A);

// Hafnian of a symmetric matrix by recursive pairing; dim <= 26 or so.
cplx hafnian(const Mat& B);

// Pairing sum  (1/n!) sum_{sigma in S^2n} kappa^|sigma|
//              prod_{j=1..n} A(sigma(j), sigma(2n+1-j)).
// This is the reference route for amplitude evaluation; 2n <= 10.
cplx pairing_sum(const Mat& A, int kappa);

// Closed forms of the pairing sum: sign(rho0) 2^n Pf(A) fermionic and
// 2^n haf(A) bosonic. Only used after validate_fast_paths() has compared
// them against the brute-force routes.
cplx pairing_fast(const Mat& A, int kappa);

// Sign of the fixed permutation relating the pairing sum to the Pfaffian
// ordering, (2j-1, 2j) -> (j, 2n+1-j).
int pairing_sign(int n);

// Compares det/permanent against perm_sum and pairing_fast against
// pairing_sum on `trials` random instances with n <= 5. A mismatch
// beyond 1e-9 disables the fast paths process-wide.
bool validate_fast_paths(std::uint64_t seed = 20240901ull, int trials = 200);

bool fast_paths_enabled();

}  // namespace gbf::kernels
