#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "cisjac/errors.hpp"
#include "cisjac/linalg.hpp"
#include "cisjac/rng.hpp"

using namespace cisjac;

namespace {

Mat random_mat(Rng& rng, std::size_t r, std::size_t c, double scale = 2.0) {
  Mat A(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) A(i, j) = rng.uniform(-scale, scale);
  return A;
}

double max_abs(const Mat& A) {
  double worst = 0.0;
  for (double v : A.a) worst = std::max(worst, std::abs(v));
  return worst;
}

Mat sub(const Mat& A, const Mat& B) {
  Mat C = A;
  for (std::size_t i = 0; i < C.a.size(); ++i) C.a[i] -= B.a[i];
  return C;
}

}  // namespace

TEST_CASE("matrix product against hand results") {
  Mat A(2, 3);
  A(0, 0) = 1; A(0, 1) = 2; A(0, 2) = 3;
  A(1, 0) = 4; A(1, 1) = 5; A(1, 2) = 6;
  Mat B(3, 2);
  B(0, 0) = 7;  B(0, 1) = 8;
  B(1, 0) = 9;  B(1, 1) = 10;
  B(2, 0) = 11; B(2, 1) = 12;
  const Mat C = matmul(A, B);
  CHECK(C(0, 0) == 58.0);
  CHECK(C(0, 1) == 64.0);
  CHECK(C(1, 0) == 139.0);
  CHECK(C(1, 1) == 154.0);

  const std::vector<double> x{1.0, -1.0, 2.0};
  const std::vector<double> y = matvec(A, x);
  CHECK(y[0] == 5.0);
  CHECK(y[1] == 11.0);
}

TEST_CASE("transpose reverses products") {
  Rng rng(0x11a1u);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat A = random_mat(rng, 3, 4);
    const Mat B = random_mat(rng, 4, 2);
    const Mat lhs = transpose(matmul(A, B));
    const Mat rhs = matmul(transpose(B), transpose(A));
    CHECK(max_abs(sub(lhs, rhs)) < 1e-14);
  }
}

TEST_CASE("householder qr factors tall matrices") {
  Rng rng(0x11a2u);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.bits() % 5;             // rows
    const std::size_t k = 1 + rng.bits() % n;             // cols <= rows
    const Mat A = random_mat(rng, n, k);
    const ThinQR qr = householder_qr(A);
    REQUIRE(qr.Q.rows == n);
    REQUIRE(qr.Q.cols == k);
    REQUIRE(qr.R.rows == k);
    REQUIRE(qr.R.cols == k);

    // Orthonormal columns.
    const Mat eye = sub(matmul(transpose(qr.Q), qr.Q), Mat::identity(k));
    CHECK(max_abs(eye) < 1e-13);
    // Reconstruction.
    CHECK(max_abs(sub(matmul(qr.Q, qr.R), A)) < 1e-13);
    // Triangularity.
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < i; ++j) CHECK(qr.R(i, j) == 0.0);
  }
}

TEST_CASE("minimum-norm solve on hand cases") {
  Mat A(1, 2);
  A(0, 0) = 1;
  A(0, 1) = 1;
  const std::vector<double> b{2.0};
  const std::vector<double> x = min_norm_solve(A, b);
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-14));

  Mat P(2, 3);
  P(0, 0) = 1;
  P(1, 1) = 1;
  const std::vector<double> c{3.0, 4.0};
  const std::vector<double> y = min_norm_solve(P, c);
  CHECK(y[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(y[1] == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(std::abs(y[2]) < 1e-14);
}

TEST_CASE("minimum-norm solutions solve the system and lie in the row space") {
  Rng rng(0x11a3u);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t rows = 1 + rng.bits() % 3;
    const std::size_t cols = rows + 1 + rng.bits() % 3;  // strictly wide
    const Mat A = random_mat(rng, rows, cols);
    std::vector<double> b(rows);
    for (double& v : b) v = rng.uniform(-2.0, 2.0);

    const std::vector<double> x = min_norm_solve(A, b);
    const std::vector<double> Ax = matvec(A, x);
    for (std::size_t i = 0; i < rows; ++i)
      CHECK(Ax[i] == doctest::Approx(b[i]).epsilon(1e-11));

    // Minimality: x must be orthogonal to the null space, i.e. equal to its
    // own projection onto range(A^T).
    const ThinQR qr = householder_qr(transpose(A));
    const std::vector<double> qtx = matvec(transpose(qr.Q), x);
    const std::vector<double> proj = matvec(qr.Q, qtx);
    for (std::size_t j = 0; j < cols; ++j)
      CHECK(std::abs(x[j] - proj[j]) < 1e-11);
  }
}

TEST_CASE("rank-deficient minimum-norm systems break down loudly") {
  Mat A(2, 3);  // second row repeats the first
  A(0, 0) = 1; A(0, 1) = 2; A(0, 2) = 3;
  A(1, 0) = 1; A(1, 1) = 2; A(1, 2) = 3;
  const std::vector<double> b{1.0, 2.0};
  CHECK_THROWS_AS(min_norm_solve(A, b), NumericError);
}

TEST_CASE("square solve and determinant") {
  Mat A(2, 2);
  A(0, 0) = 2; A(0, 1) = 1;
  A(1, 0) = 1; A(1, 1) = 3;
  const std::vector<double> x = solve_square(A, std::vector<double>{5.0, 10.0});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(determinant(A) == doctest::Approx(5.0).epsilon(1e-14));

  CHECK(determinant(Mat::identity(4)) == 1.0);

  Mat P(2, 2);  // row swap has determinant -1
  P(0, 1) = 1;
  P(1, 0) = 1;
  CHECK(determinant(P) == doctest::Approx(-1.0).epsilon(1e-14));

  Mat S(2, 2);
  S(0, 0) = 1; S(0, 1) = 2;
  S(1, 0) = 2; S(1, 1) = 4;
  CHECK(determinant(S) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(solve_square(S, std::vector<double>{1.0, 1.0}), NumericError);
}

TEST_CASE("square solve round-trips random systems") {
  Rng rng(0x11a4u);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.bits() % 5;
    Mat A = random_mat(rng, n, n);
    for (std::size_t i = 0; i < n; ++i) A(i, i) += 3.0;  // keep well conditioned
    std::vector<double> b(n);
    for (double& v : b) v = rng.uniform(-2.0, 2.0);
    const std::vector<double> x = solve_square(A, b);
    const std::vector<double> Ax = matvec(A, x);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(Ax[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("symmetric eigenvalues against closed forms") {
  Mat A(2, 2);
  A(0, 0) = 2; A(0, 1) = 1;
  A(1, 0) = 1; A(1, 1) = 2;
  const std::vector<double> ev = sym_eigenvalues(A);
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-13));

  Mat T(3, 3);  // tridiagonal (2,-1) stencil
  T(0, 0) = 2; T(0, 1) = -1;
  T(1, 0) = -1; T(1, 1) = 2; T(1, 2) = -1;
  T(2, 1) = -1; T(2, 2) = 2;
  const std::vector<double> tv = sym_eigenvalues(T);
  const double r2 = std::sqrt(2.0);
  CHECK(tv[0] == doctest::Approx(2.0 - r2).epsilon(1e-13));
  CHECK(tv[1] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(tv[2] == doctest::Approx(2.0 + r2).epsilon(1e-13));
}

TEST_CASE("eigenvalues preserve trace and determinant") {
  Rng rng(0x11a5u);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.bits() % 4;
    Mat A(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = rng.uniform(-2.0, 2.0);
        A(i, j) = v;
        A(j, i) = v;
      }
    const std::vector<double> ev = sym_eigenvalues(A);
    REQUIRE(ev.size() == n);
    for (std::size_t i = 1; i < n; ++i) CHECK(ev[i - 1] <= ev[i]);

    double trace = 0.0, esum = 0.0, eprod = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      trace += A(i, i);
      esum += ev[i];
      eprod *= ev[i];
    }
    CHECK(esum == doctest::Approx(trace).epsilon(1e-11));
    CHECK(eprod == doctest::Approx(determinant(A)).epsilon(1e-9));
  }
}

TEST_CASE("singular ratio grades conditioning") {
  CHECK(singular_ratio(Mat::identity(3)) == doctest::Approx(1.0).epsilon(1e-13));

  Mat D(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 0.5;
  CHECK(singular_ratio(D) == doctest::Approx(0.5).epsilon(1e-12));

  Mat R(2, 2);  // rank one
  R(0, 0) = 1; R(0, 1) = 1;
  R(1, 0) = 1; R(1, 1) = 1;
  CHECK(singular_ratio(R) < 1e-7);

  Mat Z(2, 3);  // all zero
  CHECK(singular_ratio(Z) == 0.0);

  Mat W(1, 2);  // a single row has a single singular value
  W(0, 0) = 3;
  W(0, 1) = 4;
  CHECK(singular_ratio(W) == doctest::Approx(1.0).epsilon(1e-13));

  // Scale invariance.
  Rng rng(0x11a6u);
  for (int trial = 0; trial < 10; ++trial) {
    Mat A = random_mat(rng, 2, 4);
    const double base = singular_ratio(A);
    Mat B = A;
    for (double& v : B.a) v *= 1000.0;
    CHECK(singular_ratio(B) == doctest::Approx(base).epsilon(1e-10));
  }
}
