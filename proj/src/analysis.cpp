#include "relent/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "relent/entropy.hpp"
#include "relent/symmetry.hpp"

namespace relent {

double continuity_bound(const ContinuityInput& input) {
  if (!(input.delta >= 0.0) || input.delta > 2.0) throw ArgumentError("continuity_bound: delta must lie in [0, 2]");
  if (input.dim < 2) throw ArgumentError("continuity_bound: dim must be at least 2");
  const double d = input.delta;
  if (d == 0.0) return 0.0;
  return 2.0 * std::log2(static_cast<double>(input.dim)) * d - 2.0 * d * std::log2(d) + 4.0 * d;
}

MregsReport mregs_balance(const PureState& psi, const std::array<PairValue, 3>& e_values, double tolerance) {
  if (psi.parties() != 3) throw ArgumentError("mregs_balance: expected a three-party pure state");
  MregsReport report;
  report.tolerance = tolerance;
  report.e_values = e_values;
  for (std::size_t i = 0; i < 3; ++i) report.epr_yields[i] = e_values[i].bits;

  const DensityMatrix global = psi.density();
  for (std::size_t party = 0; party < 3; ++party) {
    const std::array<std::size_t, 1> keep{party};
    report.party_entropy[party] = von_neumann(partial_trace(global, keep));
  }

  // Party i touches pairs: A -> AB, AC; B -> AB, BC; C -> AC, BC.
  constexpr std::array<std::array<std::size_t, 2>, 3> touching{{{0, 1}, {0, 2}, {1, 2}}};
  double g_sum = 0.0;
  for (std::size_t party = 0; party < 3; ++party) {
    const auto& t = touching[party];
    report.g_per_party[party] = report.party_entropy[party] - report.epr_yields[t[0]] - report.epr_yields[t[1]];
    g_sum += report.g_per_party[party];
  }
  report.ghz_yield = g_sum / 3.0;
  for (std::size_t party = 0; party < 3; ++party)
    report.residuals[party] = report.g_per_party[party] - report.ghz_yield;
  const auto [lo, hi] = std::minmax_element(report.g_per_party.begin(), report.g_per_party.end());
  report.g_spread = *hi - *lo;

  report.ghz_feasible = report.ghz_yield >= -tolerance;
  double worst = 0.0;
  for (double r : report.residuals) worst = std::max(worst, std::abs(r));
  report.consistent = report.ghz_feasible && worst <= tolerance;

  report.notes.emplace_back(kConditionalCaveat);
  if (!report.ghz_feasible) report.notes.emplace_back("solved GHZ yield is negative: infeasible");

  // A pure pair reduction is a bipartite pure state, whose E_S must equal
  // the entropy of either half.
  constexpr std::array<Pair, 3> pairs{Pair::AB, Pair::AC, Pair::BC};
  for (std::size_t i = 0; i < 3; ++i) {
    const DensityMatrix pair_state = reduce(psi, pairs[i]);
    const double purity = (pair_state.matrix() * pair_state.matrix()).trace().real();
    if (purity < 1.0 - 1e-10) continue;
    const std::array<std::size_t, 1> first{0};
    const double entropy = von_neumann(partial_trace(pair_state, first));
    std::ostringstream note;
    note << to_string(pairs[i]) << " reduction is pure: E = " << e_values[i].bits
         << ", entropy of reduction = " << entropy;
    if (std::abs(entropy - e_values[i].bits) > tolerance) note << " (MISMATCH)";
    report.notes.push_back(note.str());
  }
  return report;
}

PairValue pair_entanglement(const DensityMatrix& rho, Method method, const OptimizerConfig& config) {
  if (method == Method::Constrained && rho.dims() == Dims{2, 2} && is_invariant(rho, w_ab_symmetry_group(), 1e-10)) {
    const OptimizationResult r = ree_constrained(rho);
    return {r.value, "constrained", r.converged};
  }
  const OptimizationResult r = ree_mixture(rho, config);
  return {r.value, method == Method::Constrained ? "mixture (constrained not applicable)" : "mixture", r.converged};
}

std::array<PairValue, 3> pair_entanglements(const PureState& psi, Method method, const OptimizerConfig& config) {
  return {pair_entanglement(reduce(psi, Pair::AB), method, config),
          pair_entanglement(reduce(psi, Pair::AC), method, config),
          pair_entanglement(reduce(psi, Pair::BC), method, config)};
}

double necessary_residual(double f2, double es_ab) {
  if (!(f2 > 0.0 && f2 < 0.5)) throw ArgumentError("necessary_residual: f2 must lie in (0, 1/2)");
  return es_ab - necnew_rhs(f2);
}

double lambda_prediction(double a2) {
  const LambdaParams params = LambdaParams::from_a2(a2);
  return von_neumann(lambda_reduced(params, Pair::BC)) - von_neumann(lambda_reduced(params, Pair::AB));
}

LambdaAudit lambda_audit(double a2, const OptimizerConfig& config) {
  LambdaAudit audit;
  audit.params = LambdaParams::from_a2(a2);
  const DensityMatrix ab = lambda_reduced(audit.params, Pair::AB);
  const DensityMatrix bc = lambda_reduced(audit.params, Pair::BC);
  audit.bc = is_ppt(bc, 1, tolerance::kPositivity);
  audit.ab = is_ppt(ab, 1, tolerance::kPositivity);
  if (!audit.bc.ppt) throw std::runtime_error("lambda_audit: rho_BC failed the PPT check");
  audit.s_ab = von_neumann(ab);
  audit.s_bc = von_neumann(bc);
  audit.prediction = audit.s_bc - audit.s_ab;
  const OptimizationResult r = ree_mixture(ab, config);
  audit.upper_bound = r.value;
  audit.converged = r.converged;
  audit.gap = audit.upper_bound - audit.prediction;
  return audit;
}

DensityMatrix two_copy_state(const DensityMatrix& rho) {
  if (rho.parties() != 2) throw ArgumentError("two_copy_state: expected a bipartite state");
  const Dims& d = rho.dims();
  const Matrix doubled = tensor_product(rho.matrix(), rho.matrix());
  constexpr std::array<std::size_t, 4> order{0, 2, 1, 3};  // A1 B1 A2 B2 -> A1 A2 B1 B2
  Matrix regrouped = permute_subsystems(doubled, {d[0], d[1], d[0], d[1]}, order);
  regrouped = 0.5 * (regrouped + regrouped.adjoint());
  return DensityMatrix({d[0] * d[0], d[1] * d[1]}, std::move(regrouped));
}

AdditivityReport additivity_gap(const DensityMatrix& rho, std::size_t copies, const OptimizerConfig& config,
                                std::stop_token stop) {
  if (copies != 2) throw ArgumentError("additivity_gap: only two copies are supported");
  if (rho.parties() != 2) throw ArgumentError("additivity_gap: expected a bipartite state");

  // Best available single-copy upper bound and its separable decomposition.
  MixtureOptions single_options;
  single_options.stop = stop;
  OptimizationResult single = ree_mixture(rho, config, single_options);
  std::string method = "mixture";
  if (rho.dims() == Dims{2, 2} && is_invariant(rho, w_ab_symmetry_group(), 1e-10)) {
    OptimizationResult constrained = ree_constrained(rho);
    if (constrained.value <= single.value && constrained.decomposition) {
      single = std::move(constrained);
      method = "constrained";
    }
  }

  const DensityMatrix doubled = two_copy_state(rho);
  MixtureOptions options;
  options.stop = stop;
  if (single.decomposition)
    options.warm_starts.push_back(
        two_copy_ansatz(*single.decomposition, config.resolved_mixture_size(doubled.dims())));

  AdditivityReport report{.single_copy = single.value,
                          .single_copy_method = method,
                          .two_copy = ree_mixture(doubled, config, options)};
  report.gap = report.two_copy.value - 2.0 * report.single_copy;
  report.within_tolerance = std::abs(report.gap) <= report.tolerance;
  return report;
}

ConstrainedSigmaParams reference_sigma_params() { return {0.4875473233, 0.1286406856, 0.2953073521}; }

Matrix reference_perturbation() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 0.672;
  m(0, 3) = m(3, 0) = 1.32;
  m(2, 2) = -1.67;
  m(3, 3) = 0.995;
  return 1e-10 * m;
}

SubadditivityWitness subadditivity_witness(const OptimizerConfig& config) {
  const double f2 = 1.0 / 6.0;
  const WParams w = WParams::from_f2(f2);
  const DensityMatrix rho_ab = w_reduced(w, Pair::AB);
  const ConstrainedSigmaParams params = reference_sigma_params();
  const StationarityResult stationary = stationarity_inverse(params);
  const Matrix published = rho_ab.matrix() + reference_perturbation();
  const double delta = trace_norm(reference_perturbation());

  const Divergence es = relative_entropy(stationary.density(), constrained_sigma(params));
  OptimizationResult constrained = ree_constrained(rho_ab);
  OptimizationResult mixture = ree_mixture(rho_ab, config);
  const double residual = necessary_residual(f2, constrained.value);
  const double continuity = continuity_bound({delta, 4});

  return SubadditivityWitness{
      .f2 = f2,
      .sigma_params = params,
      .stationary = stationary,
      .reconstruction_residual = max_abs(stationary.rho - published),
      .es_stationary = es.bits(),
      .delta = delta,
      .continuity = continuity,
      .constrained = std::move(constrained),
      .mixture = std::move(mixture),
      .prediction = necnew_rhs(f2),
      .residual = residual,
      // Violation must exceed both the continuity slack and optimiser noise.
      .violated = std::abs(residual) > continuity + 1e-5,
  };
}

}  // namespace relent
