#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "relent/linalg.hpp"

namespace relent {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm2(const Matrix& a) {
  double s = 0.0;
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j) s += std::norm(a(i, j));
  return s;
}

// One unitary rotation in the (p, q) plane annihilating a(p, q).
void rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q) {
  const Complex apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const Complex phase = apq / mag;  // e^{i phi}
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();

  const double theta = (aqq - app) / (2.0 * mag);
  // Smaller root of t^2 - 2 theta t - 1 = 0.
  const double t = (theta >= 0.0 ? -1.0 : 1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  // U restricted to (p, q): [[c, -s e^{i phi}], [s e^{-i phi}, c]].
  const Complex ups = -s * phase;
  const Complex uqp = s * std::conj(phase);
  const Eigen::Index n = a.rows();

  // A <- A U (columns)
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * c + akq * uqp;
    a(k, q) = akp * ups + akq * c;
  }
  // A <- U^dagger A (rows)
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = c * apk + std::conj(uqp) * aqk;
    a(q, k) = std::conj(ups) * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = vkp * c + vkq * uqp;
    v(k, q) = vkp * ups + vkq * c;
  }
}

}  // namespace

EigenSystem herm_eigensystem(const Matrix& h) {
  if (h.rows() != h.cols()) throw DimensionError("herm_eigensystem: matrix is not square");
  if (!is_hermitian(h, tolerance::kEigenInput))
    throw ValidationError("herm_eigensystem: matrix is not Hermitian (defect " +
                          std::to_string(hermiticity_defect(h)) + ")");

  const Eigen::Index n = h.rows();
  Matrix a = 0.5 * (h + h.adjoint());
  Matrix v = Matrix::Identity(n, n);

  const double scale = std::max(a.squaredNorm(), 1e-300);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double off = off_diagonal_norm2(a);
    if (off <= 1e-34 * scale) break;
    // Early sweeps skip tiny elements; later sweeps clean up everything.
    const double threshold = sweep < 3 ? 0.2 * std::sqrt(off) / static_cast<double>(n * n) : 0.0;
    for (Eigen::Index p = 0; p < n - 1; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q)
        if (std::abs(a(p, q)) > threshold) rotate(a, v, p, q);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });

  EigenSystem out{RealVector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src).real();
    out.vectors.col(k) = v.col(src);
  }
  return out;
}

RealVector herm_eigenvalues(const Matrix& h) { return herm_eigensystem(h).values; }

}  // namespace relent
