// Minimisers for the relative entropy of entanglement with respect to
// separable states.
//
// Two routes are provided:
//   * ree_constrained: for two-qubit states invariant under
//     w_ab_symmetry_group(), the closest separable state can be taken from
//     the three-parameter family constrained_sigma(x, y, z). The cross entropy
//     and its gradient have closed forms via the 2x2 {|00>, |11>} block.
//   * ree_mixture: general bipartite states; quasi-Newton descent over an
//     explicit convex combination of product pure states. Every point it
//     visits is separable, so the value is an upper bound on E_S.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stop_token>
#include <string_view>
#include <vector>

#include "relent/linalg.hpp"
#include "relent/symmetry.hpp"

namespace relent {

struct ProductTerm {
  double weight = 0.0;
  Vector first;   // local pure state on the first party
  Vector second;  // local pure state on the second party
};

/// Explicit separable state sum_k p_k |a_k><a_k| (x) |b_k><b_k|.
class MixtureAnsatz {
 public:
  MixtureAnsatz(Dims dims, std::vector<ProductTerm> terms);

  const Dims& dims() const noexcept { return dims_; }
  const std::vector<ProductTerm>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

  Matrix assemble() const;

 private:
  Dims dims_;
  std::vector<ProductTerm> terms_;
};

/// Explicit product decomposition of constrained_sigma(params): four
/// phase-averaged product states carrying the {|00>,|11>} coherence plus
/// |00> and |11> remainders.
MixtureAnsatz product_decomposition(const ConstrainedSigmaParams& params);

/// Terms of sigma (x) sigma regrouped as (A1 A2)(B1 B2). When there are more
/// than `max_terms`, the heaviest are kept and renormalised.
MixtureAnsatz two_copy_ansatz(const MixtureAnsatz& single, std::size_t max_terms);

enum class Method { Constrained, Mixture };
std::string_view to_string(Method method);
Method parse_method(std::string_view name);

struct OptimizerConfig {
  std::size_t mixture_size = 0;  // 0 selects 4 * dA * dB
  std::size_t restarts = 16;
  std::size_t max_iterations = 20000;
  double value_tolerance = 1e-10;  // minimum improvement over stall_window iterations
  std::size_t stall_window = 50;
  double gradient_tolerance = 1e-8;
  double initial_step = 1.0;  // length of the first steepest-descent step
  double backtrack = 0.5;     // step shrink factor in the line search
  std::size_t history = 10;   // L-BFGS memory
  std::uint64_t seed = 20010101;
  std::size_t threads = 1;

  std::size_t resolved_mixture_size(const Dims& dims) const;
  void validate(const Dims& dims) const;
};

struct OptimizationResult {
  double value = 0.0;  // bits, recomputed from closest_state
  DensityMatrix closest_state;
  Method method = Method::Mixture;
  std::size_t iterations = 0;  // of the restart that produced the best value
  bool converged = false;
  bool cancelled = false;
  double boundary_certificate = 0.0;  // min eigenvalue of closest_state^Gamma
  double gradient_norm = 0.0;
  std::size_t restarts = 0;
  std::size_t best_restart = 0;
  std::uint64_t seed = 0;
  std::optional<ConstrainedSigmaParams> params;
  std::optional<MixtureAnsatz> decomposition;
};

/// Refuses (ArgumentError) states that are not 2x2 or not invariant under
/// w_ab_symmetry_group(). PPT inputs return themselves with value 0.
OptimizationResult ree_constrained(const DensityMatrix& rho);

struct IterationEvent {
  std::size_t restart;
  std::size_t iteration;
  double value;
  const Matrix& sigma;
};

struct MixtureOptions {
  /// Initial ansatzes tried before the random restarts; padded with
  /// negligible-weight random terms up to the mixture size.
  std::vector<MixtureAnsatz> warm_starts;
  std::stop_token stop;
  /// Called after every accepted step. Invoked from worker threads when
  /// config.threads > 1.
  std::function<void(const IterationEvent&)> observer;
};

OptimizationResult ree_mixture(const DensityMatrix& rho, const OptimizerConfig& config,
                               const MixtureOptions& options = {});

struct StationarityResult {
  Matrix rho;  // [[p,0,0,q],[0,0,0,0],[0,0,r,0],[q,0,0,s]]
  bool psd = false;
  double min_eigenvalue = 0.0;
  std::size_t rank = 0;
  double residual = 0.0;  // max |d/dk -tr(rho log2 sigma)|, k = x, y, z

  /// Throws ValidationError when the solution is not PSD.
  DensityMatrix density() const;
};

/// Given sigma's parameters, solves the (linear in rho) stationarity
/// conditions plus unit trace for the four free entries of rho.
StationarityResult stationarity_inverse(const ConstrainedSigmaParams& params);

/// True iff |min eigenvalue of closest_state^Gamma| <= tol.
bool lemma2_certificate(const OptimizationResult& result, double tol);

namespace detail {

/// Entries of a two-qubit state invariant under w_ab_symmetry_group():
/// [[p,0,0,q],[0,t,0,0],[0,0,r,0],[q,0,0,s]].
struct InvariantPattern {
  double p = 0.0;
  double q = 0.0;
  double t = 0.0;
  double r = 0.0;
  double s = 0.0;

  static InvariantPattern from_matrix(const Matrix& rho);
};

struct CrossEntropy {
  bool feasible = false;
  double value = 0.0;                 // -tr(rho log2 sigma(x, y, z))
  std::array<double, 3> gradient{};   // d/dx, d/dy, d/dz
};

CrossEntropy cross_entropy(const InvariantPattern& rho, const ConstrainedSigmaParams& params);

/// S(rho || sigma) over a flat real parameter vector encoding a product
/// mixture: per term [w, Re/Im a..., Re/Im b...], p_k = w_k^2 / sum w^2.
class MixtureObjective {
 public:
  MixtureObjective(const Matrix& rho, std::size_t dim_a, std::size_t dim_b, std::size_t terms);

  std::size_t parameter_count() const noexcept { return terms_ * stride_; }
  std::size_t terms() const noexcept { return terms_; }

  /// +infinity when rho leaves the support of sigma.
  double evaluate(const RealVector& x, RealVector* gradient = nullptr, Matrix* sigma = nullptr) const;

  RealVector random_start(std::mt19937_64& rng) const;
  RealVector encode(const MixtureAnsatz& ansatz, std::mt19937_64& rng) const;
  MixtureAnsatz decode(const RealVector& x) const;

 private:
  Matrix rho_;
  std::size_t dim_a_;
  std::size_t dim_b_;
  std::size_t terms_;
  std::size_t stride_;
  double neg_entropy_;
};

}  // namespace detail

}  // namespace relent
