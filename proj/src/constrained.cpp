#include <algorithm>
#include <cmath>
#include <numbers>

#include "relent/entropy.hpp"
#include "relent/reeopt.hpp"

namespace relent {

namespace detail {

InvariantPattern InvariantPattern::from_matrix(const Matrix& rho) {
  return {rho(0, 0).real(), rho(0, 3).real(), rho(1, 1).real(), rho(2, 2).real(), rho(3, 3).real()};
}

// With B = [[x, v], [v, u]] = m I + rad N, N^2 = I, any f(B) is
// (f(l+) + f(l-))/2 I + (f(l+) - f(l-))/2 N, so log2 B = a I + b N with
// a = log2(det B)/2 and b = log2(l+/l-)/2.
CrossEntropy cross_entropy(const InvariantPattern& rho, const ConstrainedSigmaParams& params) {
  constexpr double ln2 = std::numbers::ln2;
  const double x = params.x;
  const double y = params.y;
  const double z = params.z;
  const double u = params.u();
  CrossEntropy out;
  if (!(x > 0.0 && y > 0.0 && z > 0.0 && u > 0.0)) return out;
  const double det = x * u - y * z;
  if (!(det > 0.0)) return out;

  const double v = std::sqrt(y * z);
  const double m = 0.5 * (x + u);
  const double d = 0.5 * (x - u);
  const double rad = std::hypot(d, v);
  const double lp = m + rad;
  const double lm = det / lp;

  const double a = 0.5 * std::log2(det);
  const double b = 0.5 * (std::log2(lp) - std::log2(lm));
  const double c = (rho.p - rho.s) * d + 2.0 * rho.q * v;
  const double k = c / rad;  // rad > 0 since v > 0

  const double trace_block = a * (rho.p + rho.s) + k * b;
  out.value = -trace_block - rho.t * std::log2(y) - rho.r * std::log2(z);
  out.feasible = std::isfinite(out.value);

  const std::array<double, 3> dd{1.0, 0.5, 0.5};
  const std::array<double, 3> dm{0.0, -0.5, -0.5};
  const std::array<double, 3> dv{0.0, z / (2.0 * v), y / (2.0 * v)};
  const std::array<double, 3> ddet{u - x, -x - z, -x - y};
  for (std::size_t i = 0; i < 3; ++i) {
    const double drad = (d * dd[i] + v * dv[i]) / rad;
    const double da = ddet[i] / (2.0 * det * ln2);
    const double dh = (drad * m - rad * dm[i]) / (m * m);
    // d atanh(h) = dh / (1 - h^2) and 1 - h^2 = det / m^2
    const double db = dh * m * m / (det * ln2);
    const double dc = (rho.p - rho.s) * dd[i] + 2.0 * rho.q * dv[i];
    const double dk = (dc * rad - c * drad) / (rad * rad);
    out.gradient[i] = -(da * (rho.p + rho.s) + dk * b + k * db);
  }
  out.gradient[1] -= rho.t / (y * ln2);
  out.gradient[2] -= rho.r / (z * ln2);
  return out;
}

}  // namespace detail

namespace {

using detail::CrossEntropy;
using detail::InvariantPattern;

constexpr double kSimplexMargin = 1e-12;
constexpr double kGradientTarget = 1e-8;

// (x, y, z, u) = eps + (1 - 4 eps) softmax(theta0, theta1, theta2, 0)
struct SoftmaxChart {
  static ConstrainedSigmaParams point(const std::array<double, 3>& th) {
    const double mx = std::max({th[0], th[1], th[2], 0.0});
    std::array<double, 4> e{std::exp(th[0] - mx), std::exp(th[1] - mx), std::exp(th[2] - mx), std::exp(-mx)};
    const double sum = e[0] + e[1] + e[2] + e[3];
    const double scale = 1.0 - 4.0 * kSimplexMargin;
    return {kSimplexMargin + scale * e[0] / sum, kSimplexMargin + scale * e[1] / sum,
            kSimplexMargin + scale * e[2] / sum};
  }

  static std::array<double, 3> coords(const ConstrainedSigmaParams& p) {
    const double scale = 1.0 - 4.0 * kSimplexMargin;
    auto s = [&](double val) { return std::max(val - kSimplexMargin, 1e-300) / scale; };
    const double su = s(p.u());
    return {std::log(s(p.x) / su), std::log(s(p.y) / su), std::log(s(p.z) / su)};
  }

  static std::array<double, 3> pull_back(const ConstrainedSigmaParams& p, const std::array<double, 3>& g) {
    const double scale = 1.0 - 4.0 * kSimplexMargin;
    const std::array<double, 3> s{(p.x - kSimplexMargin) / scale, (p.y - kSimplexMargin) / scale,
                                  (p.z - kSimplexMargin) / scale};
    const double sg = s[0] * g[0] + s[1] * g[1] + s[2] * g[2];
    return {scale * s[0] * (g[0] - sg), scale * s[1] * (g[1] - sg), scale * s[2] * (g[2] - sg)};
  }
};

double norm3(const std::array<double, 3>& g) { return std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]); }

struct LocalSearch {
  ConstrainedSigmaParams params;
  CrossEntropy objective;
  std::size_t iterations = 0;
};

// BFGS in softmax coordinates with Armijo backtracking.
LocalSearch bfgs(const InvariantPattern& rho, ConstrainedSigmaParams start) {
  std::array<double, 3> th = SoftmaxChart::coords(start);
  ConstrainedSigmaParams p = SoftmaxChart::point(th);
  CrossEntropy f = detail::cross_entropy(rho, p);
  LocalSearch out{p, f, 0};
  if (!f.feasible) return out;

  Eigen::Matrix3d h = Eigen::Matrix3d::Identity();
  auto to_vec = [](const std::array<double, 3>& a) { return Eigen::Vector3d(a[0], a[1], a[2]); };
  Eigen::Vector3d g = to_vec(SoftmaxChart::pull_back(p, f.gradient));

  for (std::size_t it = 0; it < 2000; ++it) {
    if (g.norm() < 1e-14) break;
    Eigen::Vector3d dir = -h * g;
    if (dir.dot(g) >= 0.0) {
      h.setIdentity();
      dir = -g;
    }
    double step = 1.0;
    bool accepted = false;
    ConstrainedSigmaParams np;
    CrossEntropy nf;
    Eigen::Vector3d nth;
    for (int tries = 0; tries < 60; ++tries, step *= 0.5) {
      nth = Eigen::Vector3d(th[0], th[1], th[2]) + step * dir;
      np = SoftmaxChart::point({nth(0), nth(1), nth(2)});
      nf = detail::cross_entropy(rho, np);
      if (nf.feasible && nf.value <= f.value + 1e-4 * step * dir.dot(g)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const Eigen::Vector3d ng = to_vec(SoftmaxChart::pull_back(np, nf.gradient));
    const Eigen::Vector3d s = nth - Eigen::Vector3d(th[0], th[1], th[2]);
    const Eigen::Vector3d yv = ng - g;
    const double sy = s.dot(yv);
    if (sy > 1e-300) {
      const double r = 1.0 / sy;
      const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
      h = (id - r * s * yv.transpose()) * h * (id - r * yv * s.transpose()) + r * s * s.transpose();
    }
    const double improvement = f.value - nf.value;
    th = {nth(0), nth(1), nth(2)};
    p = np;
    f = nf;
    g = ng;
    out = {p, f, it + 1};
    if (improvement <= 1e-16 * std::max(1.0, std::abs(f.value)) && g.norm() < 1e-10) break;
  }
  return out;
}

// Newton iterations on grad = 0 in (x, y, z), Hessian from central
// differences of the analytic gradient. Accepts a step only when it keeps
// sigma feasible and shrinks the gradient.
LocalSearch polish(const InvariantPattern& rho, LocalSearch current) {
  for (int it = 0; it < 50; ++it) {
    const double gnorm = norm3(current.objective.gradient);
    if (gnorm < 1e-13) break;
    Eigen::Matrix3d hess;
    bool ok = true;
    for (int j = 0; j < 3 && ok; ++j) {
      std::array<double, 3> base{current.params.x, current.params.y, current.params.z};
      const double h = 1e-6 * std::max(base[static_cast<std::size_t>(j)], 1e-6);
      auto at = [&](double delta) {
        std::array<double, 3> q = base;
        q[static_cast<std::size_t>(j)] += delta;
        return detail::cross_entropy(rho, {q[0], q[1], q[2]});
      };
      const CrossEntropy fp = at(h);
      const CrossEntropy fm = at(-h);
      ok = fp.feasible && fm.feasible;
      for (int i = 0; i < 3 && ok; ++i)
        hess(i, j) = (fp.gradient[static_cast<std::size_t>(i)] - fm.gradient[static_cast<std::size_t>(i)]) / (2 * h);
    }
    if (!ok) break;
    hess = 0.5 * (hess + hess.transpose()).eval();
    const Eigen::Vector3d g(current.objective.gradient[0], current.objective.gradient[1],
                            current.objective.gradient[2]);
    const Eigen::Vector3d delta = hess.ldlt().solve(-g);
    if (!delta.allFinite()) break;
    bool improved = false;
    for (double step = 1.0; step > 1e-6; step *= 0.5) {
      const ConstrainedSigmaParams np{current.params.x + step * delta(0), current.params.y + step * delta(1),
                                      current.params.z + step * delta(2)};
      if (np.x < kSimplexMargin || np.y < kSimplexMargin || np.z < kSimplexMargin || np.u() < kSimplexMargin)
        continue;
      const CrossEntropy nf = detail::cross_entropy(rho, np);
      if (nf.feasible && norm3(nf.gradient) < gnorm && nf.value <= current.objective.value + 1e-13) {
        current.params = np;
        current.objective = nf;
        ++current.iterations;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return current;
}

bool near_boundary(const ConstrainedSigmaParams& p) {
  constexpr double band = 1e-9;
  return p.x < band || p.y < band || p.z < band || p.u() < band;
}

Matrix flip_first_phase() {
  Matrix zi = tensor_product(pauli_z(), Matrix::Identity(2, 2));
  return zi;
}

}  // namespace

OptimizationResult ree_constrained(const DensityMatrix& rho) {
  if (rho.dims() != Dims{2, 2}) throw ArgumentError("ree_constrained: expected a two-qubit state");
  if (!is_invariant(rho, w_ab_symmetry_group(), 1e-10))
    throw ArgumentError("ree_constrained: state is not invariant under the W-family symmetry group");

  const PptTest ppt = is_ppt(rho, 1, 1e-12);
  if (ppt.ppt) {
    return OptimizationResult{.value = 0.0,
                              .closest_state = rho,
                              .method = Method::Constrained,
                              .iterations = 0,
                              .converged = true,
                              .boundary_certificate = ppt.min_eigenvalue,
                              .restarts = 0,
                              .seed = 0,
                              .params = std::nullopt,
                              .decomposition = std::nullopt};
  }

  // The family assumes a non-negative {|00>,|11>} coherence; Z (x) I fixes the sign.
  const bool flipped = rho.matrix()(0, 3).real() < 0.0;
  const Matrix zi = flip_first_phase();
  const Matrix work = flipped ? Matrix(zi * rho.matrix() * zi) : rho.matrix();
  const InvariantPattern pattern = InvariantPattern::from_matrix(work);

  const std::array<ConstrainedSigmaParams, 4> starts{
      ConstrainedSigmaParams{(pattern.p + 0.25) / 2, (pattern.t + 0.25) / 2, (pattern.r + 0.25) / 2},
      ConstrainedSigmaParams{0.3, 0.2, 0.2}, ConstrainedSigmaParams{0.4, 0.1, 0.2},
      ConstrainedSigmaParams{0.2, 0.15, 0.25}};

  std::optional<LocalSearch> best;
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    LocalSearch ls = bfgs(pattern, starts[i]);
    if (!ls.objective.feasible) continue;
    if (!near_boundary(ls.params)) ls = polish(pattern, ls);
    if (!best || ls.objective.value < best->objective.value) {
      best = ls;
      best_index = i;
    }
  }
  if (!best) throw std::runtime_error("ree_constrained: no feasible starting point");

  const double gnorm = norm3(best->objective.gradient);
  const std::array<double, 3> chart_grad = SoftmaxChart::pull_back(best->params, best->objective.gradient);
  const bool converged = gnorm <= kGradientTarget || (near_boundary(best->params) && norm3(chart_grad) <= 1e-10);

  Matrix sigma = constrained_sigma(best->params).matrix();
  MixtureAnsatz decomposition = product_decomposition(best->params);
  if (flipped) {
    sigma = zi * sigma * zi;
    std::vector<ProductTerm> terms = decomposition.terms();
    for (auto& t : terms) t.first = pauli_z() * t.first;
    decomposition = MixtureAnsatz(decomposition.dims(), std::move(terms));
  }
  DensityMatrix closest({2, 2}, std::move(sigma));
  const Divergence value = relative_entropy(rho, closest);
  if (value.is_infinite()) throw std::runtime_error("ree_constrained: optimum has infinite relative entropy");

  return OptimizationResult{.value = value.bits(),
                            .closest_state = closest,
                            .method = Method::Constrained,
                            .iterations = best->iterations,
                            .converged = converged,
                            .boundary_certificate = min_partial_transpose_eigenvalue(closest.matrix(), {2, 2}),
                            .gradient_norm = gnorm,
                            .restarts = starts.size(),
                            .best_restart = best_index,
                            .seed = 0,
                            .params = best->params,
                            .decomposition = std::move(decomposition)};
}

StationarityResult stationarity_inverse(const ConstrainedSigmaParams& params) {
  if (!(params.x > 0.0 && params.y > 0.0 && params.z > 0.0 && params.u() > 0.0))
    throw ArgumentError("stationarity_inverse: parameters must be strictly interior");
  if (params.x * params.u() <= params.y * params.z)
    throw ArgumentError("stationarity_inverse: sigma is not positive definite on its coherent block");

  // The gradient is linear in rho, so column j holds the gradient for the
  // j-th unit pattern (p, q, r, s).
  const std::array<InvariantPattern, 4> units{InvariantPattern{1, 0, 0, 0, 0}, InvariantPattern{0, 1, 0, 0, 0},
                                              InvariantPattern{0, 0, 0, 1, 0}, InvariantPattern{0, 0, 0, 0, 1}};
  Eigen::Matrix4d system = Eigen::Matrix4d::Zero();
  for (int j = 0; j < 4; ++j) {
    const detail::CrossEntropy ce = detail::cross_entropy(units[static_cast<std::size_t>(j)], params);
    for (int i = 0; i < 3; ++i) system(i, j) = ce.gradient[static_cast<std::size_t>(i)];
  }
  system.row(3) << 1.0, 0.0, 1.0, 1.0;
  const Eigen::Vector4d rhs(0.0, 0.0, 0.0, 1.0);

  Eigen::FullPivLU<Eigen::Matrix4d> lu(system);
  if (!lu.isInvertible()) throw std::runtime_error("stationarity_inverse: singular stationarity system");
  const Eigen::Vector4d sol = lu.solve(rhs);

  StationarityResult out;
  out.rho = Matrix::Zero(4, 4);
  out.rho(0, 0) = sol(0);
  out.rho(0, 3) = out.rho(3, 0) = sol(1);
  out.rho(2, 2) = sol(2);
  out.rho(3, 3) = sol(3);

  const detail::CrossEntropy check =
      detail::cross_entropy(InvariantPattern{sol(0), sol(1), 0.0, sol(2), sol(3)}, params);
  out.residual = 0.0;
  for (double g : check.gradient) out.residual = std::max(out.residual, std::abs(g));

  const RealVector values = herm_eigenvalues(out.rho);
  out.min_eigenvalue = values(0);
  out.psd = values(0) >= -tolerance::kPositivity;
  for (Eigen::Index k = 0; k < values.size(); ++k)
    if (values(k) > tolerance::kPositivity) ++out.rank;
  return out;
}

DensityMatrix StationarityResult::density() const {
  if (!psd)
    throw ValidationError("stationarity_inverse: solution is not positive semidefinite (min eigenvalue " +
                          std::to_string(min_eigenvalue) + ")");
  return DensityMatrix({2, 2}, rho);
}

bool lemma2_certificate(const OptimizationResult& result, double tol) {
  return std::abs(result.boundary_certificate) <= tol;
}

MixtureAnsatz product_decomposition(const ConstrainedSigmaParams& params) {
  params.validate();
  const double x = params.x;
  const double y = params.y;
  const double z = params.z;
  const double u = std::max(0.0, params.u());
  // Balanced block diag(x1, y, z, u1) with x1 u1 = y z, scaled from (x, u).
  const double lambda = (x * u > 0.0) ? std::sqrt(std::min(1.0, y * z / (x * u))) : 0.0;
  const double x1 = lambda * x;
  const double u1 = lambda * u;
  const double balanced = x1 + y + z + u1;

  std::vector<ProductTerm> terms;
  auto basis = [](int k) {
    Vector v = Vector::Zero(2);
    v(k) = 1.0;
    return v;
  };
  if (balanced > 0.0) {
    const double ca = std::sqrt((x1 + y) / balanced);
    const double sa = std::sqrt(std::max(0.0, 1.0 - ca * ca));
    const double cb = std::sqrt((x1 + z) / balanced);
    const double sb = std::sqrt(std::max(0.0, 1.0 - cb * cb));
    for (int k = 0; k < 4; ++k) {
      const Complex phase = std::polar(1.0, k * std::numbers::pi / 2.0);
      Vector a(2);
      Vector b(2);
      a << ca, phase * sa;
      b << cb, std::conj(phase) * sb;
      terms.push_back({balanced / 4.0, a, b});
    }
  }
  if (x - x1 > 0.0) terms.push_back({x - x1, basis(0), basis(0)});
  if (u - u1 > 0.0) terms.push_back({u - u1, basis(1), basis(1)});
  return MixtureAnsatz({2, 2}, std::move(terms));
}

}  // namespace relent
