#include "relent/symmetry.hpp"

#include <cmath>

namespace relent {

namespace {

constexpr double kUnitarity = 1e-12;

void require_unitary(const Matrix& u, const char* what) {
  if (u.rows() != u.cols()) throw DimensionError(std::string(what) + ": matrix is not square");
  const Matrix defect = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  if (max_abs(defect) > kUnitarity) throw ArgumentError(std::string(what) + ": matrix is not unitary");
}

}  // namespace

SymmetryElement::SymmetryElement(Kind kind, Matrix unitary, Matrix first, Matrix second)
    : kind_(kind), unitary_(std::move(unitary)), first_(std::move(first)), second_(std::move(second)) {}

SymmetryElement SymmetryElement::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return SymmetryElement(Kind::GlobalUnitary, Matrix::Identity(n, n), Matrix(), Matrix());
}

SymmetryElement SymmetryElement::local_pair(const Matrix& u, const Matrix& v) {
  require_unitary(u, "SymmetryElement::local_pair");
  require_unitary(v, "SymmetryElement::local_pair");
  return SymmetryElement(Kind::LocalUnitaryPair, tensor_product(u, v), u, v);
}

SymmetryElement SymmetryElement::global(const Matrix& u) {
  require_unitary(u, "SymmetryElement::global");
  return SymmetryElement(Kind::GlobalUnitary, u, Matrix(), Matrix());
}

SymmetryElement SymmetryElement::transposition(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return SymmetryElement(Kind::GlobalTransposition, Matrix::Identity(n, n), Matrix(), Matrix());
}

SymmetryElement SymmetryElement::transposition(const Matrix& u) {
  require_unitary(u, "SymmetryElement::transposition");
  return SymmetryElement(Kind::GlobalTransposition, u, Matrix(), Matrix());
}

Matrix SymmetryElement::apply(const Matrix& x) const {
  if (x.rows() != unitary_.rows() || x.cols() != unitary_.cols())
    throw DimensionError("SymmetryElement::apply: operator size does not match the element");
  if (transposes()) return unitary_ * x.transpose() * unitary_.adjoint();
  return unitary_ * x * unitary_.adjoint();
}

SymmetryElement SymmetryElement::compose(const SymmetryElement& other) const {
  if (dim() != other.dim()) throw DimensionError("SymmetryElement::compose: dimension mismatch");
  // U1 (U2 X^t U2^dag)^T U1^dag = (U1 conj(U2)) X^{t xor T} (U1 conj(U2))^dag
  const Matrix inner = transposes() ? Matrix(other.unitary_.conjugate()) : other.unitary_;
  Matrix combined = unitary_ * inner;
  const bool flips = transposes() != other.transposes();
  if (flips) return SymmetryElement(Kind::GlobalTransposition, std::move(combined), Matrix(), Matrix());
  if (kind_ == Kind::LocalUnitaryPair && other.kind_ == Kind::LocalUnitaryPair)
    return SymmetryElement(Kind::LocalUnitaryPair, std::move(combined), first_ * other.first_,
                           second_ * other.second_);
  return SymmetryElement(Kind::GlobalUnitary, std::move(combined), Matrix(), Matrix());
}

bool SymmetryElement::same_action(const SymmetryElement& other, double tol) const {
  if (dim() != other.dim() || transposes() != other.transposes()) return false;
  // Ad_U = Ad_W iff W = e^{i theta} U, i.e. |tr(U^dag W)| = d.
  const double overlap = std::abs((unitary_.adjoint() * other.unitary_).trace());
  return std::abs(overlap - static_cast<double>(dim())) <= tol;
}

SymmetryGroup::SymmetryGroup(std::vector<SymmetryElement> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw ArgumentError("SymmetryGroup: no elements");
  const std::size_t d = elements_.front().dim();
  for (const auto& g : elements_)
    if (g.dim() != d) throw DimensionError("SymmetryGroup: elements act on different dimensions");

  const SymmetryElement id = SymmetryElement::identity(d);
  bool has_identity = false;
  for (const auto& g : elements_) has_identity = has_identity || g.same_action(id, kGroupClosure);
  if (!has_identity) throw ArgumentError("SymmetryGroup: identity element missing");

  for (const auto& g : elements_)
    for (const auto& h : elements_) {
      const SymmetryElement gh = g.compose(h);
      bool found = false;
      for (const auto& k : elements_)
        if (k.same_action(gh, kGroupClosure)) {
          found = true;
          break;
        }
      if (!found) throw ArgumentError("SymmetryGroup: element set is not closed under composition");
    }
}

Matrix twirl(const Matrix& sigma, const SymmetryGroup& group) {
  if (static_cast<std::size_t>(sigma.rows()) != group.dim())
    throw DimensionError("twirl: operator size does not match the group");
  Matrix acc = Matrix::Zero(sigma.rows(), sigma.cols());
  for (const auto& g : group.elements()) acc += g.apply(sigma);
  return acc / static_cast<double>(group.order());
}

DensityMatrix twirl(const DensityMatrix& sigma, const SymmetryGroup& group) {
  Matrix t = twirl(sigma.matrix(), group);
  t = 0.5 * (t + t.adjoint());
  return DensityMatrix(sigma.dims(), std::move(t));
}

bool is_invariant(const Matrix& rho, const SymmetryGroup& group, double tol) {
  if (static_cast<std::size_t>(rho.rows()) != group.dim())
    throw DimensionError("is_invariant: operator size does not match the group");
  for (const auto& g : group.elements())
    if (max_abs(g.apply(rho) - rho) > tol) return false;
  return true;
}

bool is_invariant(const DensityMatrix& rho, const SymmetryGroup& group, double tol) {
  return is_invariant(rho.matrix(), group, tol);
}

SymmetryGroup zz_group() {
  const Matrix id = Matrix::Identity(2, 2);
  return SymmetryGroup({SymmetryElement::local_pair(id, id), SymmetryElement::local_pair(pauli_z(), pauli_z())});
}

SymmetryGroup w_ab_symmetry_group() {
  const Matrix id2 = Matrix::Identity(2, 2);
  const SymmetryElement zz = SymmetryElement::local_pair(pauli_z(), pauli_z());
  Matrix w = Matrix::Identity(4, 4);
  w(2, 2) = -1.0;
  const SymmetryElement flip = SymmetryElement::global(w);
  const SymmetryElement t = SymmetryElement::transposition(4);

  std::vector<SymmetryElement> unitary_part{SymmetryElement::local_pair(id2, id2), zz, flip, zz.compose(flip)};
  std::vector<SymmetryElement> all = unitary_part;
  for (const auto& g : unitary_part) all.push_back(t.compose(g));
  return SymmetryGroup(std::move(all));
}

double ConstrainedSigmaParams::v() const { return std::sqrt(std::max(0.0, y * z)); }

void ConstrainedSigmaParams::validate() const {
  if (!(x >= 0.0 && y >= 0.0 && z >= 0.0) || !std::isfinite(x + y + z))
    throw ArgumentError("ConstrainedSigmaParams: x, y, z must be non-negative");
  if (u() < -1e-15) throw ArgumentError("ConstrainedSigmaParams: x + y + z exceeds 1");
  if (x * std::max(0.0, u()) < y * z - 1e-15)
    throw ArgumentError("ConstrainedSigmaParams: x u < y z, the assembled matrix is not positive");
}

DensityMatrix constrained_sigma(const ConstrainedSigmaParams& params) {
  params.validate();
  const double v = params.v();
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = params.x;
  m(1, 1) = params.y;
  m(2, 2) = params.z;
  m(3, 3) = std::max(0.0, params.u());
  m(0, 3) = m(3, 0) = v;
  return DensityMatrix({2, 2}, std::move(m));
}

}  // namespace relent
