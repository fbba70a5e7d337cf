// Dense complex Hermitian linear algebra for small multipartite systems.
//
// Everything here is sized for desk-scale problems (dimension <= 64): two
// qubits, three qubits, or two copies of a two-qubit state.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace relent {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<std::size_t>;

/// Shape mismatch between operands (non-square, wrong size, incompatible dims).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller supplied an argument outside the operation's domain.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix failed a physical invariant (Hermiticity, trace, positivity).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace tolerance {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPositivity = 1e-10;
// Eigenvalues at or below this are outside the support.
inline constexpr double kSupportCutoff = 1e-12;
// herm_eigensystem accepts inputs this close to Hermitian.
inline constexpr double kEigenInput = 1e-10;
}  // namespace tolerance

std::size_t product(const Dims& dims);

/// Hermitian, unit-trace, positive semidefinite operator on a tensor product
/// of subsystems. Construction validates all three invariants.
class DensityMatrix {
 public:
  DensityMatrix(Dims dims, Matrix entries);

  const Dims& dims() const noexcept { return dims_; }
  const Matrix& matrix() const noexcept { return entries_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t parties() const noexcept { return dims_.size(); }

  /// Same entries, regrouped subsystem structure (the product must agree).
  DensityMatrix with_dims(Dims dims) const;

 private:
  Dims dims_;
  Matrix entries_;
};

struct EigenSystem {
  RealVector values;  // ascending
  Matrix vectors;     // columns, orthonormal
};

double max_abs(const Matrix& m);
double hermiticity_defect(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol);

/// Kronecker product, row-major blocks: out[i*db+k, j*db+l] = a[i,j] * b[k,l].
Matrix tensor_product(const Matrix& a, const Matrix& b);
DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);
Vector kron(const Vector& a, const Vector& b);

/// Reduced operator on the subsystems in `keep` (order of `keep` is ignored;
/// kept factors stay in their original relative order).
Matrix partial_trace(const Matrix& m, const Dims& dims, std::span<const std::size_t> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);

/// Transpose of tensor factor `sys` in the computational product basis.
Matrix partial_transpose(const Matrix& m, const Dims& dims, std::size_t sys);
Matrix partial_transpose(const DensityMatrix& rho, std::size_t sys);

/// Reorders tensor factors: new factor i is old factor perm[i].
Matrix permute_subsystems(const Matrix& m, const Dims& dims, std::span<const std::size_t> perm);

/// Cyclic complex Jacobi diagonalisation. Values ascending.
EigenSystem herm_eigensystem(const Matrix& h);
RealVector herm_eigenvalues(const Matrix& h);

/// Sum of singular values.
double trace_norm(const Matrix& a);

struct SupportLog {
  Matrix log2;        // log base 2 on the support, zero on its complement
  Matrix projector;   // projector onto the support
  std::size_t rank = 0;
};

/// Base-2 logarithm restricted to eigenvalues above the support cutoff.
/// Throws ValidationError for eigenvalues below -kPositivity.
SupportLog log2_on_support(const Matrix& h);

struct PptTest {
  bool ppt = false;
  double min_eigenvalue = 0.0;
};

PptTest is_ppt(const DensityMatrix& rho, std::size_t sys, double tol);

/// Smallest eigenvalue of the partial transpose of a bipartite operator on
/// its second factor.
double min_partial_transpose_eigenvalue(const Matrix& m, const Dims& dims);

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

}  // namespace relent
