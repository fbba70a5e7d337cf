// Von Neumann entropy, quantum relative entropy, and closed-form entropies of
// the W-family reductions. All quantities are in bits.

#pragma once

#include "relent/linalg.hpp"

namespace relent {

/// Relative entropy value with an explicit infinite state. Infinity arises
/// when the support of rho is not contained in the support of sigma.
class Divergence {
 public:
  static Divergence finite(double bits) { return Divergence(bits, false); }
  static Divergence infinite() { return Divergence(0.0, true); }

  bool is_finite() const noexcept { return !infinite_; }
  bool is_infinite() const noexcept { return infinite_; }
  /// Throws std::logic_error when infinite.
  double bits() const;

 private:
  Divergence(double bits, bool infinite) : bits_(bits), infinite_(infinite) {}
  double bits_;
  bool infinite_;
};

// tr(P_sigma^perp rho) above this makes the relative entropy infinite.
inline constexpr double kSupportLeakage = 1e-10;

double von_neumann(const DensityMatrix& rho);
double von_neumann_eigenvalues(const RealVector& values);

/// -sum p log2 p over {p, 1-p}
double binary_entropy(double p);

Divergence relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);
/// Unvalidated variant for optimiser inner loops; matrices must be
/// Hermitian and PSD within tolerance.
Divergence relative_entropy(const Matrix& rho, const Matrix& sigma);

/// E_S of the BC reduction of the W family (Vedral-Plenio closed form).
double es_bc_closed_form(double f2);
/// S(rho_BC) of the W family.
double s_bc_closed_form(double f2);
/// S(rho_AB) of the W family, the binary entropy of f2.
double s_ab_closed_form(double f2);
/// Value E_S(rho_AB) would need to take for the W state to be reversibly
/// obtainable from GHZ and EPR pairs under asymptotic additivity.
double necnew_rhs(double f2);

}  // namespace relent
