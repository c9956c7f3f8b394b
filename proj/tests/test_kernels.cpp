#include <doctest.h>

#include "gbf/kernels.hpp"
#include "gbf/rng.hpp"

using namespace gbf;
using kernels::Mat;

TEST_CASE("determinant and permanent match the signed permutation sum") {
    Rng rng(42);
    for (int t = 0; t < 50; ++t) {
        const int n = 1 + static_cast<int>(rng.below(5));
        Mat G(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) G(i, j) = rng.cnormal();
        CHECK(std::abs(kernels::perm_sum(G, -1) - kernels::determinant(G)) < 1e-10);
        CHECK(std::abs(kernels::perm_sum(G, +1) - kernels::permanent(G)) < 1e-10);
    }
}

TEST_CASE("permanent of small known matrices") {
    Mat G(2, 2);
    G << 1.0, 2.0, 3.0, 4.0;
    CHECK(std::abs(kernels::permanent(G) - cplx(10.0)) < 1e-14);  // 1*4 + 2*3
    Mat H = Mat::Identity(4, 4);
    CHECK(std::abs(kernels::permanent(H) - cplx(1.0)) < 1e-14);
}

TEST_CASE("pfaffian squares to the determinant") {
    Rng rng(7);
    for (int n : {2, 4, 6, 8}) {
        Mat A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = rng.cnormal();
        A = (0.5 * (A - A.transpose())).eval();
        cplx pf = kernels::pfaffian(A);
        CHECK(std::abs(pf * pf - A.determinant()) < 1e-8 * std::max(1.0, std::abs(A.determinant())));
    }
}

TEST_CASE("pfaffian routes agree across the size split") {
    Rng rng(11);
    for (int n : {12, 14, 16}) {
        Mat A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = 0.3 * rng.cnormal();
        A = (0.5 * (A - A.transpose())).eval();
        cplx pf = kernels::pfaffian(A);
        cplx det = A.determinant();
        CHECK(std::abs(pf * pf - det) < 1e-8 * std::max(1.0, std::abs(det)));
    }
}

TEST_CASE("hafnian of a rank-one symmetric matrix counts pairings") {
    // B = x x^T has hafnian (2n-1)!! * prod x_i^2 ... for all-ones: (2n-1)!!.
    for (int n : {1, 2, 3}) {
        Mat B = Mat::Ones(2 * n, 2 * n);
        double dfact = 1.0;
        for (int k = 2 * n - 1; k > 0; k -= 2) dfact *= k;
        CHECK(std::abs(kernels::hafnian(B) - cplx(dfact)) < 1e-10);
    }
}

TEST_CASE("pairing sum matches its closed form") {
    Rng rng(5);
    for (int t = 0; t < 40; ++t) {
        const int n = 1 + static_cast<int>(rng.below(4));
        Mat A(2 * n, 2 * n);
        for (int i = 0; i < 2 * n; ++i)
            for (int j = 0; j < 2 * n; ++j) A(i, j) = rng.cnormal();
        Mat F = (0.5 * (A - A.transpose())).eval();
        Mat B = (0.5 * (A + A.transpose())).eval();
        CHECK(std::abs(kernels::pairing_sum(F, -1) - kernels::pairing_fast(F, -1)) < 1e-9);
        CHECK(std::abs(kernels::pairing_sum(B, +1) - kernels::pairing_fast(B, +1)) < 1e-9);
    }
}

TEST_CASE("fast-path gate accepts the validated kernels") {
    CHECK(kernels::validate_fast_paths());
    CHECK(kernels::fast_paths_enabled());
}

TEST_CASE("odd sizes give zero") {
    Mat A = Mat::Zero(3, 3);
    CHECK(kernels::pfaffian(A) == cplx(0.0));
    CHECK(kernels::hafnian(A) == cplx(0.0));
    CHECK(kernels::pairing_sum(A, -1) == cplx(0.0));
}
