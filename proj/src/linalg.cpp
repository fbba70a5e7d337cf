#include "relent/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace relent {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw DimensionError(std::string(what) + ": matrix is not square");
}

void require_dims(const Matrix& m, const Dims& dims, const char* what) {
  require_square(m, what);
  if (dims.empty()) throw DimensionError(std::string(what) + ": empty subsystem list");
  if (product(dims) != static_cast<std::size_t>(m.rows()))
    throw DimensionError(std::string(what) + ": subsystem dimensions do not match matrix size");
}

// Mixed-radix digits of a flat index, most significant factor first.
void split_index(std::size_t index, const Dims& dims, std::vector<std::size_t>& digits) {
  digits.resize(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    digits[k] = index % dims[k];
    index /= dims[k];
  }
}

std::size_t join_index(const std::vector<std::size_t>& digits, const Dims& dims) {
  std::size_t index = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) index = index * dims[k] + digits[k];
  return index;
}

}  // namespace

std::size_t product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(m - m.adjoint());
}

bool is_hermitian(const Matrix& m, double tol) { return hermiticity_defect(m) <= tol; }

DensityMatrix::DensityMatrix(Dims dims, Matrix entries) : dims_(std::move(dims)), entries_(std::move(entries)) {
  require_dims(entries_, dims_, "DensityMatrix");
  for (std::size_t d : dims_)
    if (d == 0) throw DimensionError("DensityMatrix: zero subsystem dimension");
  const double defect = hermiticity_defect(entries_);
  if (defect > tolerance::kHermitian)
    throw ValidationError("DensityMatrix: not Hermitian (defect " + std::to_string(defect) + ")");
  const double trace = entries_.trace().real();
  if (std::abs(trace - 1.0) > tolerance::kTrace)
    throw ValidationError("DensityMatrix: trace " + std::to_string(trace) + " differs from 1");
  const double lowest = herm_eigenvalues(entries_)(0);
  if (lowest < -tolerance::kPositivity)
    throw ValidationError("DensityMatrix: negative eigenvalue " + std::to_string(lowest));
}

DensityMatrix DensityMatrix::with_dims(Dims dims) const { return DensityMatrix(std::move(dims), entries_); }

Matrix tensor_product(const Matrix& a, const Matrix& b) {
  require_square(a, "tensor_product");
  require_square(b, "tensor_product");
  const Eigen::Index da = a.rows();
  const Eigen::Index db = b.rows();
  Matrix out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j) out.block(i * db, j * db, db, db) = a(i, j) * b;
  return out;
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityMatrix(std::move(dims), tensor_product(a.matrix(), b.matrix()));
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Matrix partial_trace(const Matrix& m, const Dims& dims, std::span<const std::size_t> keep) {
  require_dims(m, dims, "partial_trace");
  if (keep.empty()) throw ArgumentError("partial_trace: nothing to keep");
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t k : keep) {
    if (k >= dims.size()) throw ArgumentError("partial_trace: subsystem index out of range");
    if (kept[k]) throw ArgumentError("partial_trace: duplicate subsystem index");
    kept[k] = true;
  }

  Dims kept_dims;
  Dims traced_dims;
  for (std::size_t k = 0; k < dims.size(); ++k) (kept[k] ? kept_dims : traced_dims).push_back(dims[k]);
  const std::size_t dk = product(kept_dims);
  const std::size_t dt = product(traced_dims);

  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  std::vector<std::size_t> kd;
  std::vector<std::size_t> td;
  std::vector<std::size_t> full(dims.size());
  // full index from (kept index, traced index)
  auto compose = [&](std::size_t ki, std::size_t ti) {
    split_index(ki, kept_dims, kd);
    split_index(ti, traced_dims, td);
    std::size_t a = 0;
    std::size_t b = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) full[k] = kept[k] ? kd[a++] : td[b++];
    return join_index(full, dims);
  };
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      Complex s = 0.0;
      for (std::size_t t = 0; t < dt; ++t) {
        const auto r = static_cast<Eigen::Index>(compose(i, t));
        const auto c = static_cast<Eigen::Index>(compose(j, t));
        s += m(r, c);
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
    }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  Matrix reduced = partial_trace(rho.matrix(), rho.dims(), keep);
  std::vector<std::size_t> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  Dims dims;
  for (std::size_t k : sorted) dims.push_back(rho.dims()[k]);
  return DensityMatrix(std::move(dims), std::move(reduced));
}

Matrix partial_transpose(const Matrix& m, const Dims& dims, std::size_t sys) {
  require_dims(m, dims, "partial_transpose");
  if (sys >= dims.size()) throw ArgumentError("partial_transpose: subsystem index out of range");
  const std::size_t n = product(dims);
  Matrix out(m.rows(), m.cols());
  std::vector<std::size_t> ri;
  std::vector<std::size_t> ci;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      split_index(r, dims, ri);
      split_index(c, dims, ci);
      std::swap(ri[sys], ci[sys]);
      out(static_cast<Eigen::Index>(join_index(ri, dims)), static_cast<Eigen::Index>(join_index(ci, dims))) =
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  return out;
}

Matrix partial_transpose(const DensityMatrix& rho, std::size_t sys) {
  return partial_transpose(rho.matrix(), rho.dims(), sys);
}

Matrix permute_subsystems(const Matrix& m, const Dims& dims, std::span<const std::size_t> perm) {
  require_dims(m, dims, "permute_subsystems");
  if (perm.size() != dims.size()) throw ArgumentError("permute_subsystems: permutation has wrong length");
  std::vector<bool> seen(dims.size(), false);
  for (std::size_t p : perm) {
    if (p >= dims.size() || seen[p]) throw ArgumentError("permute_subsystems: not a permutation");
    seen[p] = true;
  }
  Dims new_dims(dims.size());
  for (std::size_t i = 0; i < perm.size(); ++i) new_dims[i] = dims[perm[i]];

  const std::size_t n = product(dims);
  std::vector<Eigen::Index> map(n);  // old flat index -> new flat index
  std::vector<std::size_t> old_digits;
  std::vector<std::size_t> new_digits(dims.size());
  for (std::size_t idx = 0; idx < n; ++idx) {
    split_index(idx, dims, old_digits);
    for (std::size_t i = 0; i < perm.size(); ++i) new_digits[i] = old_digits[perm[i]];
    map[idx] = static_cast<Eigen::Index>(join_index(new_digits, new_dims));
  }
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      out(map[r], map[c]) = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  return out;
}

double trace_norm(const Matrix& a) {
  require_square(a, "trace_norm");
  if (a.size() == 0) return 0.0;
  if (is_hermitian(a, 1e-14 * std::max(1.0, max_abs(a)))) {
    const Matrix h = 0.5 * (a + a.adjoint());
    return herm_eigenvalues(h).cwiseAbs().sum();
  }
  const Matrix gram = a.adjoint() * a;
  const RealVector values = herm_eigenvalues(0.5 * (gram + gram.adjoint()));
  double s = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) s += std::sqrt(std::max(0.0, values(k)));
  return s;
}

SupportLog log2_on_support(const Matrix& h) {
  const EigenSystem es = herm_eigensystem(h);
  if (es.values.size() > 0 && es.values(0) < -tolerance::kPositivity)
    throw ValidationError("log2_on_support: negative eigenvalue " + std::to_string(es.values(0)));
  const Eigen::Index n = h.rows();
  RealVector logs = RealVector::Zero(n);
  RealVector mask = RealVector::Zero(n);
  SupportLog out;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (es.values(k) > tolerance::kSupportCutoff) {
      logs(k) = std::log2(es.values(k));
      mask(k) = 1.0;
      ++out.rank;
    }
  }
  out.log2 = es.vectors * logs.cast<Complex>().asDiagonal() * es.vectors.adjoint();
  out.projector = es.vectors * mask.cast<Complex>().asDiagonal() * es.vectors.adjoint();
  return out;
}

double min_partial_transpose_eigenvalue(const Matrix& m, const Dims& dims) {
  if (dims.size() != 2) throw ArgumentError("min_partial_transpose_eigenvalue: expected a bipartite operator");
  const Matrix pt = partial_transpose(m, dims, 1);
  return herm_eigenvalues(0.5 * (pt + pt.adjoint()))(0);
}

PptTest is_ppt(const DensityMatrix& rho, std::size_t sys, double tol) {
  const Matrix pt = partial_transpose(rho, sys);
  const double lowest = herm_eigenvalues(0.5 * (pt + pt.adjoint()))(0);
  return {lowest >= -tol, lowest};
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace relent
