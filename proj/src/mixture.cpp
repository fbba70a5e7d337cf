#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <thread>

#include "relent/entropy.hpp"
#include "relent/reeopt.hpp"

namespace relent {

MixtureAnsatz::MixtureAnsatz(Dims dims, std::vector<ProductTerm> terms)
    : dims_(std::move(dims)), terms_(std::move(terms)) {
  if (dims_.size() != 2) throw DimensionError("MixtureAnsatz: expected two parties");
  if (terms_.empty()) throw ArgumentError("MixtureAnsatz: no terms");
  double total = 0.0;
  for (const auto& t : terms_) {
    if (static_cast<std::size_t>(t.first.size()) != dims_[0] || static_cast<std::size_t>(t.second.size()) != dims_[1])
      throw DimensionError("MixtureAnsatz: local state has the wrong dimension");
    if (t.weight < 0.0) throw ArgumentError("MixtureAnsatz: negative weight");
    if (std::abs(t.first.squaredNorm() - 1.0) > 1e-12 || std::abs(t.second.squaredNorm() - 1.0) > 1e-12)
      throw ArgumentError("MixtureAnsatz: local state is not normalised");
    total += t.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ArgumentError("MixtureAnsatz: weights do not sum to 1");
}

Matrix MixtureAnsatz::assemble() const {
  const auto n = static_cast<Eigen::Index>(dims_[0] * dims_[1]);
  Matrix sigma = Matrix::Zero(n, n);
  for (const auto& t : terms_) {
    const Vector psi = kron(t.first, t.second);
    sigma += t.weight * psi * psi.adjoint();
  }
  return 0.5 * (sigma + sigma.adjoint());
}

MixtureAnsatz two_copy_ansatz(const MixtureAnsatz& single, std::size_t max_terms) {
  std::vector<ProductTerm> terms;
  for (const auto& s : single.terms())
    for (const auto& t : single.terms()) {
      const double w = s.weight * t.weight;
      if (w <= 0.0) continue;
      terms.push_back({w, kron(s.first, t.first), kron(s.second, t.second)});
    }
  if (terms.size() > max_terms) {
    std::stable_sort(terms.begin(), terms.end(),
                     [](const ProductTerm& a, const ProductTerm& b) { return a.weight > b.weight; });
    terms.resize(max_terms);
  }
  double total = 0.0;
  for (const auto& t : terms) total += t.weight;
  for (auto& t : terms) t.weight /= total;
  return MixtureAnsatz({single.dims()[0] * single.dims()[0], single.dims()[1] * single.dims()[1]}, std::move(terms));
}

std::string_view to_string(Method method) {
  return method == Method::Constrained ? "constrained" : "mixture";
}

Method parse_method(std::string_view name) {
  if (name == "constrained") return Method::Constrained;
  if (name == "mixture") return Method::Mixture;
  throw ArgumentError("unknown method '" + std::string(name) + "' (expected constrained or mixture)");
}

std::size_t OptimizerConfig::resolved_mixture_size(const Dims& dims) const {
  if (mixture_size != 0) return mixture_size;
  return 4 * product(dims);
}

void OptimizerConfig::validate(const Dims& dims) const {
  if (dims.size() != 2) throw ArgumentError("OptimizerConfig: mixture search needs a bipartite state");
  if (resolved_mixture_size(dims) < product(dims))
    throw ArgumentError("OptimizerConfig: mixture size must be at least dA * dB");
  if (restarts == 0 || max_iterations == 0 || stall_window == 0 || history == 0)
    throw ArgumentError("OptimizerConfig: counts must be positive");
  if (!(value_tolerance > 0.0) || !(gradient_tolerance > 0.0) || !(initial_step > 0.0))
    throw ArgumentError("OptimizerConfig: tolerances and step must be positive");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ArgumentError("OptimizerConfig: backtrack must lie in (0, 1)");
}

namespace detail {

MixtureObjective::MixtureObjective(const Matrix& rho, std::size_t dim_a, std::size_t dim_b, std::size_t terms)
    : rho_(rho), dim_a_(dim_a), dim_b_(dim_b), terms_(terms), stride_(1 + 2 * dim_a + 2 * dim_b) {
  neg_entropy_ = -von_neumann_eigenvalues(herm_eigenvalues(rho_));
}

double MixtureObjective::evaluate(const RealVector& x, RealVector* gradient, Matrix* sigma_out) const {
  const auto da = static_cast<Eigen::Index>(dim_a_);
  const auto db = static_cast<Eigen::Index>(dim_b_);
  const Eigen::Index n = da * db;
  const auto k_terms = static_cast<Eigen::Index>(terms_);
  const auto stride = static_cast<Eigen::Index>(stride_);

  double total_weight = 0.0;
  for (Eigen::Index k = 0; k < k_terms; ++k) total_weight += x(k * stride) * x(k * stride);
  if (!(total_weight > 0.0)) return std::numeric_limits<double>::infinity();

  Matrix psi(n, k_terms);
  Matrix a(da, k_terms);
  Matrix b(db, k_terms);
  RealVector na(k_terms);
  RealVector nb(k_terms);
  RealVector p(k_terms);
  for (Eigen::Index k = 0; k < k_terms; ++k) {
    const Eigen::Index base = k * stride;
    for (Eigen::Index i = 0; i < da; ++i) a(i, k) = Complex(x(base + 1 + 2 * i), x(base + 2 + 2 * i));
    for (Eigen::Index j = 0; j < db; ++j)
      b(j, k) = Complex(x(base + 1 + 2 * da + 2 * j), x(base + 2 + 2 * da + 2 * j));
    na(k) = a.col(k).norm();
    nb(k) = b.col(k).norm();
    if (!(na(k) > 0.0 && nb(k) > 0.0)) return std::numeric_limits<double>::infinity();
    a.col(k) /= na(k);
    b.col(k) /= nb(k);
    p(k) = x(base) * x(base) / total_weight;
    for (Eigen::Index i = 0; i < da; ++i) psi.block(i * db, k, db, 1) = a(i, k) * b.col(k);
  }

  Matrix sigma = psi * p.cast<Complex>().asDiagonal() * psi.adjoint();
  sigma = 0.5 * (sigma + sigma.adjoint());
  if (sigma_out) *sigma_out = sigma;

  const EigenSystem es = herm_eigensystem(sigma);
  const Matrix r = es.vectors.adjoint() * rho_ * es.vectors;
  double leakage = 0.0;
  double cross = 0.0;
  std::vector<bool> support(static_cast<std::size_t>(n));
  RealVector lnl = RealVector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    support[static_cast<std::size_t>(i)] = es.values(i) > tolerance::kSupportCutoff;
    if (support[static_cast<std::size_t>(i)]) {
      lnl(i) = std::log(es.values(i));
      cross -= r(i, i).real() * lnl(i);
    } else {
      leakage += r(i, i).real();
    }
  }
  if (leakage > kSupportLeakage) return std::numeric_limits<double>::infinity();
  const double value = neg_entropy_ + cross / std::numbers::ln2;
  if (!gradient) return value;

  // Frechet derivative of -tr(rho log2 sigma) in sigma's eigenbasis.
  Matrix gt = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!support[static_cast<std::size_t>(i)]) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!support[static_cast<std::size_t>(j)]) continue;
      const double li = es.values(i);
      const double lj = es.values(j);
      const double gap = li - lj;
      const double divided =
          std::abs(gap) > 1e-10 * std::max(li, lj) ? (lnl(i) - lnl(j)) / gap : 2.0 / (li + lj);
      gt(i, j) = -divided * r(i, j) / std::numbers::ln2;
    }
  }
  const Matrix g_sigma = es.vectors * gt * es.vectors.adjoint();
  const Matrix g_psi = g_sigma * psi;

  gradient->resize(x.size());
  RealVector g_p(k_terms);
  for (Eigen::Index k = 0; k < k_terms; ++k) g_p(k) = psi.col(k).dot(g_psi.col(k)).real();
  const double mean = p.dot(g_p);

  for (Eigen::Index k = 0; k < k_terms; ++k) {
    const Eigen::Index base = k * stride;
    (*gradient)(base) = 2.0 * x(base) / total_weight * (g_p(k) - mean);

    // h_a = p_k (I (x) <b|) G psi,  h_b = p_k (<a| (x) I) G psi
    Vector ha = Vector::Zero(da);
    Vector hb = Vector::Zero(db);
    for (Eigen::Index i = 0; i < da; ++i)
      for (Eigen::Index j = 0; j < db; ++j) {
        const Complex gv = g_psi(i * db + j, k);
        ha(i) += std::conj(b(j, k)) * gv;
        hb(j) += std::conj(a(i, k)) * gv;
      }
    ha *= p(k);
    hb *= p(k);
    const Vector ga = (2.0 / na(k)) * (ha - a.col(k) * a.col(k).dot(ha).real());
    const Vector gb = (2.0 / nb(k)) * (hb - b.col(k) * b.col(k).dot(hb).real());
    for (Eigen::Index i = 0; i < da; ++i) {
      (*gradient)(base + 1 + 2 * i) = ga(i).real();
      (*gradient)(base + 2 + 2 * i) = ga(i).imag();
    }
    for (Eigen::Index j = 0; j < db; ++j) {
      (*gradient)(base + 1 + 2 * da + 2 * j) = gb(j).real();
      (*gradient)(base + 2 + 2 * da + 2 * j) = gb(j).imag();
    }
  }
  return value;
}

RealVector MixtureObjective::random_start(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  RealVector x(static_cast<Eigen::Index>(parameter_count()));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
  return x;
}

RealVector MixtureObjective::encode(const MixtureAnsatz& ansatz, std::mt19937_64& rng) const {
  if (ansatz.dims() != Dims{dim_a_, dim_b_}) throw DimensionError("warm start has the wrong local dimensions");
  if (ansatz.size() > terms_) throw ArgumentError("warm start has more terms than the mixture size");
  // Padding terms carry weight ~1e-8 so they barely move the starting point.
  RealVector x = random_start(rng);
  const auto stride = static_cast<Eigen::Index>(stride_);
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(terms_); ++k) x(k * stride) = 1e-4;
  for (std::size_t k = 0; k < ansatz.size(); ++k) {
    const ProductTerm& t = ansatz.terms()[k];
    const Eigen::Index base = static_cast<Eigen::Index>(k) * stride;
    x(base) = std::sqrt(t.weight);
    for (Eigen::Index i = 0; i < t.first.size(); ++i) {
      x(base + 1 + 2 * i) = t.first(i).real();
      x(base + 2 + 2 * i) = t.first(i).imag();
    }
    const Eigen::Index off = base + 1 + 2 * static_cast<Eigen::Index>(dim_a_);
    for (Eigen::Index j = 0; j < t.second.size(); ++j) {
      x(off + 2 * j) = t.second(j).real();
      x(off + 1 + 2 * j) = t.second(j).imag();
    }
  }
  return x;
}

MixtureAnsatz MixtureObjective::decode(const RealVector& x) const {
  const auto stride = static_cast<Eigen::Index>(stride_);
  double total = 0.0;
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(terms_); ++k) total += x(k * stride) * x(k * stride);
  std::vector<ProductTerm> terms;
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(terms_); ++k) {
    const Eigen::Index base = k * stride;
    Vector a(static_cast<Eigen::Index>(dim_a_));
    Vector b(static_cast<Eigen::Index>(dim_b_));
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = Complex(x(base + 1 + 2 * i), x(base + 2 + 2 * i));
    const Eigen::Index off = base + 1 + 2 * a.size();
    for (Eigen::Index j = 0; j < b.size(); ++j) b(j) = Complex(x(off + 2 * j), x(off + 1 + 2 * j));
    terms.push_back({x(base) * x(base) / total, a.normalized(), b.normalized()});
  }
  // Renormalise against accumulated rounding in the weights.
  double sum = 0.0;
  for (const auto& t : terms) sum += t.weight;
  for (auto& t : terms) t.weight /= sum;
  return MixtureAnsatz({dim_a_, dim_b_}, std::move(terms));
}

}  // namespace detail

namespace {

struct RestartOutcome {
  double value = std::numeric_limits<double>::infinity();
  RealVector x;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
  bool cancelled = false;
};

// Limited-memory BFGS with Armijo backtracking. Steps that make the value
// infinite are rejected like any other failed Armijo test.
RestartOutcome lbfgs(const detail::MixtureObjective& objective, RealVector x, const OptimizerConfig& config,
                     std::size_t restart, const MixtureOptions& options) {
  RestartOutcome out;
  RealVector g;
  Matrix sigma;
  double f = objective.evaluate(x, &g, options.observer ? &sigma : nullptr);
  if (!std::isfinite(f)) return out;

  std::deque<std::pair<RealVector, RealVector>> memory;
  std::deque<double> recent{f};
  constexpr double armijo = 1e-4;

  std::size_t it = 0;
  for (; it < config.max_iterations; ++it) {
    if (options.stop.stop_requested()) {
      out.cancelled = true;
      break;
    }
    const double gnorm = g.norm();
    if (gnorm < config.gradient_tolerance) {
      out.converged = true;
      break;
    }

    // two-loop recursion
    RealVector dir = -g;
    std::vector<double> alpha(memory.size());
    for (std::size_t i = memory.size(); i-- > 0;) {
      const auto& [s, y] = memory[i];
      alpha[i] = s.dot(dir) / y.dot(s);
      dir -= alpha[i] * y;
    }
    if (!memory.empty()) {
      const auto& [s, y] = memory.back();
      dir *= s.dot(y) / y.squaredNorm();
    }
    for (std::size_t i = 0; i < memory.size(); ++i) {
      const auto& [s, y] = memory[i];
      const double beta = y.dot(dir) / y.dot(s);
      dir += (alpha[i] - beta) * s;
    }
    double slope = dir.dot(g);
    if (!(slope < 0.0)) {
      memory.clear();
      dir = -g;
      slope = -gnorm * gnorm;
    }

    double step = memory.empty() ? std::min(1.0, config.initial_step / gnorm) : 1.0;
    bool accepted = false;
    RealVector nx;
    RealVector ng;
    double nf = 0.0;
    for (int tries = 0; tries < 60; ++tries, step *= config.backtrack) {
      nx = x + step * dir;
      nf = objective.evaluate(nx, &ng, options.observer ? &sigma : nullptr);
      if (std::isfinite(nf) && nf <= f + armijo * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      // No descent along the negative gradient at any step size.
      out.converged = true;
      break;
    }

    RealVector s = nx - x;
    RealVector y = ng - g;
    if (s.dot(y) > 1e-14 * s.norm() * y.norm()) {
      memory.emplace_back(std::move(s), std::move(y));
      if (memory.size() > config.history) memory.pop_front();
    }
    x = std::move(nx);
    g = std::move(ng);
    f = nf;
    if (options.observer) options.observer(IterationEvent{restart, it + 1, f, sigma});

    recent.push_back(f);
    if (recent.size() > config.stall_window + 1) recent.pop_front();
    if (recent.size() == config.stall_window + 1 && recent.front() - f < config.value_tolerance) {
      ++it;
      out.converged = true;
      break;
    }
  }
  out.value = f;
  out.x = std::move(x);
  out.iterations = it;
  out.gradient_norm = g.norm();
  return out;
}

}  // namespace

OptimizationResult ree_mixture(const DensityMatrix& rho, const OptimizerConfig& config,
                               const MixtureOptions& options) {
  config.validate(rho.dims());
  const std::size_t terms = config.resolved_mixture_size(rho.dims());
  const detail::MixtureObjective objective(rho.matrix(), rho.dims()[0], rho.dims()[1], terms);

  const std::size_t total = options.warm_starts.size() + config.restarts;
  std::vector<RestartOutcome> outcomes(total);

  auto run = [&](std::size_t index) {
    std::seed_seq seq{static_cast<std::uint64_t>(config.seed & 0xffffffffu), static_cast<std::uint64_t>(config.seed >> 32),
                      static_cast<std::uint64_t>(index)};
    std::mt19937_64 rng(seq);
    RealVector start = index < options.warm_starts.size() ? objective.encode(options.warm_starts[index], rng)
                                                          : objective.random_start(rng);
    outcomes[index] = lbfgs(objective, std::move(start), config, index, options);
  };

  if (config.threads <= 1) {
    for (std::size_t i = 0; i < total; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < std::min(config.threads, total); ++t)
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) run(i);
      });
  }

  // Lowest value wins; ties go to the lowest restart index.
  std::size_t best = total;
  bool any_converged = false;
  bool cancelled = false;
  for (std::size_t i = 0; i < total; ++i) {
    any_converged = any_converged || outcomes[i].converged;
    cancelled = cancelled || outcomes[i].cancelled;
    if (std::isfinite(outcomes[i].value) && (best == total || outcomes[i].value < outcomes[best].value)) best = i;
  }
  if (best == total) throw std::runtime_error("ree_mixture: no restart produced a finite value");

  const RestartOutcome& win = outcomes[best];
  MixtureAnsatz ansatz = objective.decode(win.x);
  DensityMatrix closest(rho.dims(), ansatz.assemble());
  const Divergence value = relative_entropy(rho, closest);
  if (value.is_infinite()) throw std::runtime_error("ree_mixture: best state has infinite relative entropy");

  return OptimizationResult{.value = value.bits(),
                            .closest_state = closest,
                            .method = Method::Mixture,
                            .iterations = win.iterations,
                            .converged = any_converged && !cancelled,
                            .cancelled = cancelled,
                            .boundary_certificate = min_partial_transpose_eigenvalue(closest.matrix(), closest.dims()),
                            .gradient_norm = win.gradient_norm,
                            .restarts = total,
                            .best_restart = best,
                            .seed = config.seed,
                            .params = std::nullopt,
                            .decomposition = std::move(ansatz)};
}

}  // namespace relent
