// Finite symmetry groups acting on bipartite operators, group twirling, and
// the three-parameter family of invariant PPT-boundary states.

#pragma once

#include <vector>

#include "relent/linalg.hpp"

namespace relent {

/// A map on operators of the form X -> U X U^dagger, or X -> U X^T U^dagger
/// for the transposition kind (transpose in the computational product basis).
class SymmetryElement {
 public:
  enum class Kind { LocalUnitaryPair, GlobalUnitary, GlobalTransposition };

  static SymmetryElement identity(std::size_t dim);
  static SymmetryElement local_pair(const Matrix& u, const Matrix& v);
  static SymmetryElement global(const Matrix& u);
  /// X -> U X^T U^dagger; plain transposition when U is omitted.
  static SymmetryElement transposition(std::size_t dim);
  static SymmetryElement transposition(const Matrix& u);

  Kind kind() const noexcept { return kind_; }
  bool transposes() const noexcept { return kind_ == Kind::GlobalTransposition; }
  /// The full-space unitary (U (x) V for local pairs).
  const Matrix& unitary() const noexcept { return unitary_; }
  /// Local factors; only meaningful for LocalUnitaryPair.
  const Matrix& local_first() const noexcept { return first_; }
  const Matrix& local_second() const noexcept { return second_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(unitary_.rows()); }

  Matrix apply(const Matrix& x) const;

  /// (this o other)(X) = this(other(X)).
  SymmetryElement compose(const SymmetryElement& other) const;

  /// Same action on operators (unitaries compared up to a global phase).
  bool same_action(const SymmetryElement& other, double tol) const;

 private:
  SymmetryElement(Kind kind, Matrix unitary, Matrix first, Matrix second);

  Kind kind_;
  Matrix unitary_;
  Matrix first_;
  Matrix second_;
};

/// Finite group of symmetry elements. The constructor rejects sets that lack
/// the identity or are not closed under composition.
class SymmetryGroup {
 public:
  explicit SymmetryGroup(std::vector<SymmetryElement> elements);

  const std::vector<SymmetryElement>& elements() const noexcept { return elements_; }
  std::size_t order() const noexcept { return elements_.size(); }
  std::size_t dim() const noexcept { return elements_.front().dim(); }

 private:
  std::vector<SymmetryElement> elements_;
};

inline constexpr double kGroupClosure = 1e-10;

/// Group average (1/|G|) sum_g g(sigma).
Matrix twirl(const Matrix& sigma, const SymmetryGroup& group);
DensityMatrix twirl(const DensityMatrix& sigma, const SymmetryGroup& group);

bool is_invariant(const Matrix& rho, const SymmetryGroup& group, double tol);
bool is_invariant(const DensityMatrix& rho, const SymmetryGroup& group, double tol);

/// {I, Z(x)Z} x {I, diag(1,1,-1,1)} x {identity, transposition}; order 8.
/// Every W-family AB/AC reduction is invariant under it.
SymmetryGroup w_ab_symmetry_group();

/// The local group {I, Z(x)Z} alone.
SymmetryGroup zz_group();

/// sigma = [[x,0,0,v],[0,y,0,0],[0,0,z,0],[v,0,0,u]] with v = sqrt(yz),
/// u = 1 - x - y - z.
struct ConstrainedSigmaParams {
  double x = 0.25;
  double y = 0.25;
  double z = 0.25;

  double u() const { return 1.0 - x - y - z; }
  double v() const;
  void validate() const;
};

DensityMatrix constrained_sigma(const ConstrainedSigmaParams& params);

}  // namespace relent
