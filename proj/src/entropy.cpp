#include "relent/entropy.hpp"

#include <cmath>
#include <stdexcept>

namespace relent {

namespace {

// x log2 x with the 0 log 0 = 0 convention.
double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

void require_f2(double f2, const char* what) {
  if (!(f2 >= 0.0 && f2 <= 0.5)) throw ArgumentError(std::string(what) + ": f2 must lie in [0, 1/2]");
}

}  // namespace

double Divergence::bits() const {
  if (infinite_) throw std::logic_error("Divergence::bits: relative entropy is infinite");
  return bits_;
}

double von_neumann_eigenvalues(const RealVector& values) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k)
    if (values(k) > tolerance::kSupportCutoff) s -= xlog2x(values(k));
  return s;
}

double von_neumann(const DensityMatrix& rho) {
  return std::max(0.0, von_neumann_eigenvalues(herm_eigenvalues(rho.matrix())));
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("binary_entropy: p must lie in [0, 1]");
  return -xlog2x(p) - xlog2x(1.0 - p);
}

Divergence relative_entropy(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw DimensionError("relative_entropy: operands have different sizes");
  const SupportLog sl = log2_on_support(sigma);
  const Matrix outside = Matrix::Identity(sigma.rows(), sigma.cols()) - sl.projector;
  const double leakage = (outside * rho).trace().real();
  if (leakage > kSupportLeakage) return Divergence::infinite();

  const double neg_entropy = -von_neumann_eigenvalues(herm_eigenvalues(rho));
  const double cross = -(rho * sl.log2).trace().real();
  double value = neg_entropy + cross;
  // Roundoff around S(rho||rho) = 0.
  if (value < 0.0 && value > -1e-10) value = 0.0;
  return Divergence::finite(value);
}

Divergence relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dims() != sigma.dims()) throw DimensionError("relative_entropy: subsystem dimensions differ");
  return relative_entropy(rho.matrix(), sigma.matrix());
}

double es_bc_closed_form(double f2) {
  require_f2(f2, "es_bc_closed_form");
  // 2(f2-1)log2(1-f2) + (1-2f2)log2(1-2f2)
  return -2.0 * xlog2x(1.0 - f2) + xlog2x(1.0 - 2.0 * f2);
}

double s_bc_closed_form(double f2) {
  require_f2(f2, "s_bc_closed_form");
  return -xlog2x(1.0 - 2.0 * f2) - xlog2x(2.0 * f2);
}

double s_ab_closed_form(double f2) {
  require_f2(f2, "s_ab_closed_form");
  return binary_entropy(f2);
}

double necnew_rhs(double f2) {
  if (!(f2 > 0.0 && f2 <= 0.5)) throw ArgumentError("necnew_rhs: f2 must lie in (0, 1/2]");
  // (f2-1)log2(1-f2) - 2f2 log2(2f2) + f2 log2(f2)
  return -xlog2x(1.0 - f2) - xlog2x(2.0 * f2) + xlog2x(f2);
}

}  // namespace relent
