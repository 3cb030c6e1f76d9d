#include "cisjac/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cisjac/errors.hpp"

namespace cisjac {

Mat Mat::identity(std::size_t n) {
  Mat I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

Mat transpose(const Mat& A) {
  Mat T(A.cols, A.rows);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) T(j, i) = A(i, j);
  return T;
}

Mat matmul(const Mat& A, const Mat& B) {
  if (A.cols != B.rows) throw std::logic_error("matmul: dimension mismatch");
  Mat C(A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t k = 0; k < A.cols; ++k) {
      const double aik = A(i, k);
      for (std::size_t j = 0; j < B.cols; ++j) C(i, j) += aik * B(k, j);
    }
  return C;
}

std::vector<double> matvec(const Mat& A, std::span<const double> x) {
  if (A.cols != x.size()) throw std::logic_error("matvec: dimension mismatch");
  std::vector<double> y(A.rows, 0.0);
  for (std::size_t i = 0; i < A.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < A.cols; ++j) s += A(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

ThinQR householder_qr(const Mat& A) {
  const std::size_t n = A.rows, k = A.cols;
  if (n < k) throw std::logic_error("householder_qr: need rows >= cols");
  Mat W = A;  // working copy, reduced in place
  // Reflector j maps column j onto e_j; H = I - (2 / |v|^2) v v^T with v
  // supported on rows j..n-1.
  std::vector<std::vector<double>> vs(k);
  std::vector<double> vnorm2(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double norm2 = 0.0;
    for (std::size_t i = j; i < n; ++i) norm2 += W(i, j) * W(i, j);
    const double norm = std::sqrt(norm2);
    std::vector<double> v(n, 0.0);
    if (norm > 0.0) {
      const double alpha = W(j, j) >= 0.0 ? -norm : norm;
      v[j] = W(j, j) - alpha;
      for (std::size_t i = j + 1; i < n; ++i) v[i] = W(i, j);
      double vn2 = 0.0;
      for (std::size_t i = j; i < n; ++i) vn2 += v[i] * v[i];
      if (vn2 > 0.0) {
        for (std::size_t c = j; c < k; ++c) {
          double s = 0.0;
          for (std::size_t i = j; i < n; ++i) s += v[i] * W(i, c);
          s *= 2.0 / vn2;
          for (std::size_t i = j; i < n; ++i) W(i, c) -= s * v[i];
        }
      }
      vnorm2[j] = vn2;
    }
    vs[j] = std::move(v);
  }
  ThinQR out;
  out.R = Mat(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) out.R(i, j) = W(i, j);
  // Q = H_0 ... H_{k-1} [I_k; 0].
  out.Q = Mat(n, k);
  for (std::size_t j = 0; j < k; ++j) out.Q(j, j) = 1.0;
  for (std::size_t j = k; j-- > 0;) {
    if (vnorm2[j] <= 0.0) continue;
    const std::vector<double>& v = vs[j];
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0.0;
      for (std::size_t i = j; i < n; ++i) s += v[i] * out.Q(i, c);
      s *= 2.0 / vnorm2[j];
      for (std::size_t i = j; i < n; ++i) out.Q(i, c) -= s * v[i];
    }
  }
  return out;
}

std::vector<double> min_norm_solve(const Mat& A, std::span<const double> b) {
  if (A.rows > A.cols)
    throw std::logic_error("min_norm_solve: need rows <= cols");
  if (b.size() != A.rows) throw std::logic_error("min_norm_solve: rhs size mismatch");
  const ThinQR qr = householder_qr(transpose(A));  // A^T = Q R, so A = R^T Q^T
  const std::size_t m = A.rows;
  // A diagonal entry that collapsed to rounding noise means the rows were
  // linearly dependent; dividing by it would manufacture a huge "solution".
  double diag_scale = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    diag_scale = std::max(diag_scale, std::abs(qr.R(i, i)));
  // Forward-substitute R^T y = b.
  std::vector<double> y(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < i; ++j) s -= qr.R(j, i) * y[j];
    const double rii = qr.R(i, i);
    if (std::abs(rii) <= 1e-13 * diag_scale)
      throw NumericError("minimum-norm solve broke down: dependent rows (diagonal " +
                         std::to_string(rii) + " at row " + std::to_string(i + 1) + ")");
    y[i] = s / rii;
  }
  return matvec(qr.Q, y);
}

namespace {

// LU with partial pivoting, in place; returns permutation sign, throws on a
// zero pivot unless `allow_singular` (then sign 0 signals det == 0).
int lu_decompose(Mat& A, std::vector<std::size_t>& perm, bool allow_singular) {
  const std::size_t n = A.rows;
  perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  int sign = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(A(col, col));
    for (std::size_t i = col + 1; i < n; ++i) {
      const double v = std::abs(A(i, col));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) {
      if (allow_singular) return 0;
      throw NumericError("singular matrix in linear solve");
    }
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A(col, j), A(piv, j));
      std::swap(perm[col], perm[piv]);
      sign = -sign;
    }
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = A(i, col) / A(col, col);
      A(i, col) = f;
      for (std::size_t j = col + 1; j < n; ++j) A(i, j) -= f * A(col, j);
    }
  }
  return sign;
}

}  // namespace

std::vector<double> solve_square(const Mat& A, std::span<const double> b) {
  if (A.rows != A.cols) throw std::logic_error("solve_square: matrix not square");
  if (b.size() != A.rows) throw std::logic_error("solve_square: rhs size mismatch");
  const std::size_t n = A.rows;
  Mat LU = A;
  std::vector<std::size_t> perm;
  lu_decompose(LU, perm, /*allow_singular=*/false);
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= LU(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= LU(i, j) * x[j];
    x[i] = s / LU(i, i);
  }
  return x;
}

double determinant(const Mat& A) {
  if (A.rows != A.cols) throw std::logic_error("determinant: matrix not square");
  Mat LU = A;
  std::vector<std::size_t> perm;
  const int sign = lu_decompose(LU, perm, /*allow_singular=*/true);
  if (sign == 0) return 0.0;
  double det = sign;
  for (std::size_t i = 0; i < A.rows; ++i) det *= LU(i, i);
  return det;
}

std::vector<double> sym_eigenvalues(const Mat& A) {
  if (A.rows != A.cols) throw std::logic_error("sym_eigenvalues: matrix not square");
  const std::size_t n = A.rows;
  Mat M = A;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      scale = std::max(scale, std::abs(M(i, i)));
      for (std::size_t j = i + 1; j < n; ++j) off = std::max(off, std::abs(M(i, j)));
    }
    if (off <= 1e-15 * (1.0 + scale)) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (M(p, q) == 0.0) continue;
        const double theta = (M(q, q) - M(p, p)) / (2.0 * M(p, q));
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double mip = M(i, p), miq = M(i, q);
          M(i, p) = c * mip - s * miq;
          M(i, q) = s * mip + c * miq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const double mpj = M(p, j), mqj = M(q, j);
          M(p, j) = c * mpj - s * mqj;
          M(q, j) = s * mpj + c * mqj;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = M(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double singular_ratio(const Mat& A) {
  // Use the Gram matrix of the smaller side; sigma_i = sqrt(lambda_i).
  const Mat G = A.rows <= A.cols ? matmul(A, transpose(A)) : matmul(transpose(A), A);
  const std::vector<double> ev = sym_eigenvalues(G);
  const double lo = std::max(ev.front(), 0.0);
  const double hi = std::max(ev.back(), 0.0);
  if (hi == 0.0) return 0.0;
  return std::sqrt(lo / hi);
}

}  // namespace cisjac
