#include <random>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "relent/analysis.hpp"
#include "relent/entropy.hpp"
#include "relent/reeopt.hpp"
#include "relent/states.hpp"
#include "relent/symmetry.hpp"

using namespace relent;

namespace {

constexpr ConstrainedSigmaParams kPaper{0.4875473233, 0.1286406856, 0.2953073521};

DensityMatrix rho_ab(double f2) { return w_reduced(WParams::from_f2(f2), Pair::AB); }

OptimizerConfig quick(std::size_t restarts = 4) {
  OptimizerConfig c;
  c.restarts = restarts;
  return c;
}

DensityMatrix random_separable(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> terms(1, 6);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int k = terms(rng);
  Matrix sigma = Matrix::Zero(4, 4);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    Vector a(2);
    Vector b(2);
    for (int j = 0; j < 2; ++j) {
      a(j) = Complex(g(rng), g(rng));
      b(j) = Complex(g(rng), g(rng));
    }
    const Vector psi = kron(a.normalized(), b.normalized());
    const double w = uni(rng);
    sigma += w * psi * psi.adjoint();
    total += w;
  }
  sigma /= total;
  return DensityMatrix({2, 2}, 0.5 * (sigma + sigma.adjoint()));
}

}  // namespace

TEST_CASE("ree_constrained on the W-family reduction") {
  const OptimizationResult r = ree_constrained(rho_ab(1.0 / 6.0));
  CHECK(r.converged);
  CHECK(r.method == Method::Constrained);
  CHECK(std::abs(r.value - 0.354761489848) <= 1e-5);
  REQUIRE(r.params);
  CHECK(std::abs(r.params->x - kPaper.x) <= 1e-5);
  CHECK(std::abs(r.params->y - kPaper.y) <= 1e-5);
  CHECK(std::abs(r.params->z - kPaper.z) <= 1e-5);
  CHECK(lemma2_certificate(r, 1e-6));
  CHECK(r.value == doctest::Approx(oracle::relative_entropy(rho_ab(1.0 / 6.0).matrix(), r.closest_state.matrix()))
                       .epsilon(1e-9));
  REQUIRE(r.decomposition);
  CHECK(max_abs(r.decomposition->assemble() - r.closest_state.matrix()) < 1e-12);
}

TEST_CASE("ree_constrained on separable and refused inputs") {
  const DensityMatrix sep = constrained_sigma({0.3, 0.2, 0.1});
  const OptimizationResult r = ree_constrained(sep);
  CHECK(r.value == 0.0);
  CHECK(max_abs(r.closest_state.matrix() - sep.matrix()) == 0.0);

  std::mt19937_64 rng(41);
  CHECK_THROWS_AS(ree_constrained(DensityMatrix({2, 2}, oracle::random_density(rng, 4))), ArgumentError);
  CHECK_THROWS_AS(ree_constrained(DensityMatrix({4}, rho_ab(0.2).matrix())), ArgumentError);
}

TEST_CASE("ree_constrained handles a negative coherence") {
  Matrix m = rho_ab(0.2).matrix();
  m(0, 3) = m(3, 0) = -m(0, 3);
  const OptimizationResult flipped = ree_constrained(DensityMatrix({2, 2}, m));
  const OptimizationResult plain = ree_constrained(rho_ab(0.2));
  CHECK(flipped.value == doctest::Approx(plain.value).epsilon(1e-12));
  CHECK(flipped.closest_state.matrix()(0, 3).real() < 0.0);
}

TEST_CASE("ree_mixture examples") {
  const OptimizerConfig config;
  const OptimizationResult bell = ree_mixture(epr().density(), config);
  CHECK(std::abs(bell.value - 1.0) <= 1e-4);
  CHECK(lemma2_certificate(bell, 1e-4));

  const OptimizationResult bc = ree_mixture(w_reduced(WParams::from_f2(1.0 / 6.0), Pair::BC), config);
  CHECK(std::abs(bc.value - oracle::es_bc(1.0 / 6.0)) <= 1e-4);

  const OptimizationResult ab = ree_mixture(rho_ab(1.0 / 6.0), config);
  CHECK(std::abs(ab.value - ree_constrained(rho_ab(1.0 / 6.0)).value) <= 1e-4);
  CHECK(ab.value == doctest::Approx(oracle::relative_entropy(rho_ab(1.0 / 6.0).matrix(), ab.closest_state.matrix()))
                        .epsilon(1e-9));
  CHECK(ab.value >= 0.0);

  // Lemma 1: twirling the closest state does not cost anything.
  const DensityMatrix twirled = twirl(ab.closest_state, w_ab_symmetry_group());
  CHECK(relative_entropy(rho_ab(1.0 / 6.0), twirled).bits() <= ab.value + 1e-8);
}

TEST_CASE("ree_mixture is reproducible and thread-count independent") {
  const DensityMatrix rho = rho_ab(0.2);
  OptimizerConfig config = quick(6);
  const OptimizationResult a = ree_mixture(rho, config);
  const OptimizationResult b = ree_mixture(rho, config);
  CHECK(a.value == b.value);
  CHECK(a.best_restart == b.best_restart);
  CHECK(max_abs(a.closest_state.matrix() - b.closest_state.matrix()) == 0.0);

  config.threads = 3;
  const OptimizationResult c = ree_mixture(rho, config);
  CHECK(c.value == a.value);
  CHECK(c.best_restart == a.best_restart);

  config.threads = 1;
  config.seed = 7;
  CHECK(ree_mixture(rho, config).seed == 7);
}

TEST_CASE("ree_mixture visited states and descent (property)") {
  const DensityMatrix rho = rho_ab(1.0 / 6.0);
  const OptimizerConfig config = quick(3);
  std::vector<std::vector<double>> per_restart(3);
  double lowest_visited = std::numeric_limits<double>::infinity();
  MixtureOptions options;
  options.observer = [&](const IterationEvent& e) {
    per_restart[e.restart].push_back(e.value);
    const Divergence d = relative_entropy(rho.matrix(), e.sigma);
    REQUIRE(d.is_finite());
    lowest_visited = std::min(lowest_visited, d.bits());
    REQUIRE(oracle::min_pt_eigenvalue_2x2(e.sigma) >= -1e-12);
  };
  const OptimizationResult r = ree_mixture(rho, config, options);
  CHECK(lowest_visited >= r.value - 1e-12);
  for (const auto& values : per_restart) {
    REQUIRE_FALSE(values.empty());
    for (std::size_t i = 1; i < values.size(); ++i) REQUIRE(values[i] <= values[i - 1]);
  }
}

TEST_CASE("ree_mixture returns zero on separable inputs (property)") {
  std::mt19937_64 rng(42);
  const OptimizerConfig config;
  for (int i = 0; i < 50; ++i) {
    const DensityMatrix sep = random_separable(rng);
    const OptimizationResult r = ree_mixture(sep, config);
    REQUIRE(r.value <= 1e-5);
  }
}

TEST_CASE("ree_mixture cancellation and halted runs") {
  std::stop_source source;
  source.request_stop();
  MixtureOptions options;
  options.stop = source.get_token();
  const OptimizationResult cancelled = ree_mixture(epr().density(), quick(2), options);
  CHECK(cancelled.cancelled);
  CHECK_FALSE(cancelled.converged);

  OptimizerConfig halted = quick(1);
  halted.max_iterations = 1;
  const OptimizationResult r = ree_mixture(rho_ab(1.0 / 6.0), halted);
  CHECK_FALSE(r.converged);
  CHECK_FALSE(lemma2_certificate(r, 1e-6));
}

TEST_CASE("OptimizerConfig validation") {
  OptimizerConfig c;
  CHECK(c.resolved_mixture_size({2, 2}) == 16);
  CHECK(c.resolved_mixture_size({4, 4}) == 64);
  c.mixture_size = 3;
  CHECK_THROWS_AS(c.validate({2, 2}), ArgumentError);
  c = OptimizerConfig{};
  c.value_tolerance = 0.0;
  CHECK_THROWS_AS(c.validate({2, 2}), ArgumentError);
  c = OptimizerConfig{};
  c.backtrack = 1.0;
  CHECK_THROWS_AS(ree_mixture(epr().density(), c), ArgumentError);
  CHECK_THROWS_AS(ree_mixture(ghz().density(), OptimizerConfig{}), ArgumentError);
  CHECK(parse_method("constrained") == Method::Constrained);
  CHECK_THROWS_AS(parse_method("simplex"), ArgumentError);
}

TEST_CASE("stationarity_inverse examples") {
  const StationarityResult st = stationarity_inverse(kPaper);
  Matrix published = rho_ab(1.0 / 6.0).matrix() + reference_perturbation();
  CHECK(max_abs(st.rho - published) <= 1e-12);
  CHECK(st.residual <= 1e-9);
  CHECK(st.psd);
  CHECK(st.rank == 2);

  // Round trip through the constrained optimiser.
  const OptimizationResult r = ree_constrained(st.density());
  REQUIRE(r.params);
  CHECK(std::abs(r.params->x - kPaper.x) <= 1e-6);
  CHECK(std::abs(r.params->y - kPaper.y) <= 1e-6);
  CHECK(std::abs(r.params->z - kPaper.z) <= 1e-6);

  // y = z gives a swap-symmetric solution.
  const StationarityResult sym = stationarity_inverse({0.4, 0.15, 0.15});
  const std::array<std::size_t, 2> swap{1, 0};
  CHECK(max_abs(permute_subsystems(sym.rho, {2, 2}, swap) - sym.rho) < 1e-12);

  CHECK_THROWS_AS(stationarity_inverse({0.5, 0.0, 0.2}), ArgumentError);
}

TEST_CASE("stationarity_inverse round trip on a grid (property)") {
  int checked = 0;
  for (double x : {0.3, 0.4, 0.5})
    for (double y : {0.05, 0.1, 0.15})
      for (double z : {0.1, 0.2}) {
        const ConstrainedSigmaParams p{x, y, z};
        if (p.u() <= 0.0 || x * p.u() <= y * z) continue;
        const StationarityResult st = stationarity_inverse(p);
        REQUIRE(st.residual <= 1e-9);
        if (!st.psd || oracle::min_pt_eigenvalue_2x2(st.rho) >= 0.0) continue;
        const OptimizationResult r = ree_constrained(st.density());
        REQUIRE(r.params);
        // Convex problem: a stationary point is a global minimum.
        CHECK(r.value == doctest::Approx(relative_entropy(st.density(), constrained_sigma(p)).bits()).epsilon(1e-8));
        // A pure input leaves the minimiser degenerate along the family.
        if (st.rank > 1) {
          CHECK(std::abs(r.params->x - x) <= 1e-6);
          CHECK(std::abs(r.params->y - y) <= 1e-6);
          CHECK(std::abs(r.params->z - z) <= 1e-6);
        }
        ++checked;
      }
  CHECK(checked > 0);
}

TEST_CASE("analytic constrained gradient matches finite differences (property)") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> uni(0.02, 0.3);
  const auto pattern = detail::InvariantPattern::from_matrix(rho_ab(1.0 / 6.0).matrix());
  for (int i = 0; i < 1000;) {
    const ConstrainedSigmaParams at{uni(rng), uni(rng), uni(rng)};
    if (at.x * at.u() <= at.y * at.z) continue;
    ++i;
    const auto analytic = detail::cross_entropy(pattern, at);
    REQUIRE(analytic.feasible);
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k) {
      ConstrainedSigmaParams up = at;
      ConstrainedSigmaParams down = at;
      double& u = k == 0 ? up.x : k == 1 ? up.y : up.z;
      double& d = k == 0 ? down.x : k == 1 ? down.y : down.z;
      u += h;
      d -= h;
      const double fd = (detail::cross_entropy(pattern, up).value - detail::cross_entropy(pattern, down).value) / (2 * h);
      const double g = analytic.gradient[static_cast<std::size_t>(k)];
      REQUIRE(std::abs(g - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
    // Value against the generic relative entropy path.
    const double generic = -relative_entropy(rho_ab(1.0 / 6.0), constrained_sigma(at)).bits() -
                           von_neumann(rho_ab(1.0 / 6.0));
    REQUIRE(analytic.value == doctest::Approx(-generic).epsilon(1e-10));
  }
}

TEST_CASE("mixture objective gradient matches finite differences") {
  std::mt19937_64 rng(44);
  const detail::MixtureObjective objective(rho_ab(1.0 / 6.0).matrix(), 2, 2, 6);
  for (int trial = 0; trial < 20; ++trial) {
    const RealVector x = objective.random_start(rng);
    RealVector g;
    objective.evaluate(x, &g);
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      RealVector up = x;
      RealVector down = x;
      up(i) += h;
      down(i) -= h;
      const double fd = (objective.evaluate(up) - objective.evaluate(down)) / (2 * h);
      REQUIRE(std::abs(g(i) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("product decompositions") {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int tested = 0;
  while (tested < 200) {
    const ConstrainedSigmaParams p{uni(rng), uni(rng), uni(rng)};
    if (p.u() < 0.0 || p.x * p.u() < p.y * p.z) continue;
    ++tested;
    const MixtureAnsatz m = product_decomposition(p);
    REQUIRE(m.size() <= 6);
    REQUIRE(max_abs(m.assemble() - constrained_sigma(p).matrix()) <= 1e-12);
  }

  const MixtureAnsatz single = product_decomposition(kPaper);
  const MixtureAnsatz doubled = two_copy_ansatz(single, 64);
  const DensityMatrix sigma = constrained_sigma(kPaper);
  const DensityMatrix expected = two_copy_state(sigma);
  CHECK(max_abs(doubled.assemble() - expected.matrix()) < 1e-12);
  CHECK(doubled.dims() == Dims{4, 4});

  CHECK_THROWS_AS(MixtureAnsatz({2, 2}, {}), ArgumentError);
  Vector up = Vector::Zero(2);
  up(0) = 1.0;
  CHECK_THROWS_AS(MixtureAnsatz({2, 2}, {{0.5, up, up}}), ArgumentError);
}
