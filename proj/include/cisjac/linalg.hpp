#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cisjac {

// Dense row-major matrix.  All problems in this library are tiny (a handful
// of integrals by twice that many phase-space slots), so everything below is
// written for clarity over asymptotics.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static Mat identity(std::size_t n);
};

Mat transpose(const Mat& A);
Mat matmul(const Mat& A, const Mat& B);
std::vector<double> matvec(const Mat& A, std::span<const double> x);

// Thin QR of an n-by-k matrix with n >= k: A = Q R with Q n-by-k having
// orthonormal columns and R k-by-k upper triangular.
struct ThinQR {
  Mat Q;
  Mat R;
};

ThinQR householder_qr(const Mat& A);

// Minimum-norm solution of the underdetermined system A x = b (A is m-by-n
// with m <= n and full row rank), via Householder QR of A^T.  Graded rank
// checks are the caller's job, but an effectively zero R diagonal (dependent
// rows up to rounding) raises NumericError instead of amplifying noise.
std::vector<double> min_norm_solve(const Mat& A, std::span<const double> b);

// Solve a square system by LU with partial pivoting; NumericError if singular.
std::vector<double> solve_square(const Mat& A, std::span<const double> b);

double determinant(const Mat& A);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> sym_eigenvalues(const Mat& A);

// sigma_min / sigma_max of A (singular values via the Gram matrix of the
// smaller side); returns 0 for a zero matrix.
double singular_ratio(const Mat& A);

}  // namespace cisjac
