#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relent/analysis.hpp"
#include "relent/entropy.hpp"
#include "relent/io.hpp"
#include "relent/reeopt.hpp"
#include "relent/states.hpp"

namespace relent::cli {

namespace {

struct RunConfig {
  std::string family;
  std::optional<double> e2;
  std::optional<double> f2;
  std::optional<double> a2;
  std::optional<double> b2;
  std::string pair = "AB";
  std::string method = "mixture";
  std::string input;
  std::string output;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> restarts;
  std::optional<std::size_t> mixture_size;
  std::optional<std::size_t> threads;
  std::string optimizer_config;
  std::string sweep;
  std::string rho1;
  std::string rho2;
  std::optional<double> delta;
  std::size_t dim = 4;
  std::size_t copies = 2;
  double tolerance = kOptimizerGradeTolerance;
  bool pair_given = false;
};

// Wide rows for csv; a single row is shown vertically as a table.
struct Report {
  Json json;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  int status = kExitOk;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string flag(bool b) { return b ? "true" : "false"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void render(const Report& report, const std::string& format, std::ostream& os) {
  if (format == "json") {
    os << report.json.dump(2) << "\n";
    return;
  }
  if (format == "csv") {
    for (std::size_t i = 0; i < report.columns.size(); ++i)
      os << (i ? "," : "") << csv_field(report.columns[i]);
    os << "\n";
    for (const auto& row : report.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
      os << "\n";
    }
    return;
  }
  if (report.rows.size() == 1) {
    std::size_t w = 0;
    for (const auto& c : report.columns) w = std::max(w, c.size());
    for (std::size_t i = 0; i < report.columns.size(); ++i)
      os << report.columns[i] << std::string(w - report.columns[i].size() + 2, ' ') << report.rows[0][i] << "\n";
    return;
  }
  std::vector<std::size_t> widths(report.columns.size());
  for (std::size_t i = 0; i < widths.size(); ++i) {
    widths[i] = report.columns[i].size();
    for (const auto& row : report.rows) widths[i] = std::max(widths[i], row[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      os << cells[i];
      if (i + 1 < cells.size()) os << std::string(widths[i] - cells[i].size() + 2, ' ');
    }
    os << "\n";
  };
  line(report.columns);
  for (const auto& row : report.rows) line(row);
}

std::vector<double> parse_sweep(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("--sweep: cannot parse '" + item + "' as a number");
    }
  }
  if (parts.size() != 3) throw InputError("--sweep expects start:stop:step");
  const double start = parts[0];
  const double stop = parts[1];
  const double step = parts[2];
  if (!(step > 0.0) || stop < start) throw InputError("--sweep needs step > 0 and stop >= start");
  std::vector<double> grid;
  for (std::size_t i = 0;; ++i) {
    const double v = start + static_cast<double>(i) * step;
    if (v > stop + 1e-9 * step) break;
    grid.push_back(v);
    if (grid.size() > 100000) throw InputError("--sweep grid is too large");
  }
  return grid;
}

OptimizerConfig optimizer_config(const RunConfig& rc) {
  OptimizerConfig config;
  if (!rc.optimizer_config.empty()) config = config_from_json(read_json_file(rc.optimizer_config));
  if (rc.seed) config.seed = *rc.seed;
  if (rc.restarts) config.restarts = *rc.restarts;
  if (rc.mixture_size) config.mixture_size = *rc.mixture_size;
  if (rc.threads) config.threads = *rc.threads;
  return config;
}

// Family parameter (f2 for w, a2 for lambda) from the flags; nullopt for
// parameterless families.
std::optional<double> family_parameter(const RunConfig& rc) {
  if (rc.family == "w") {
    if (rc.a2 || rc.b2) throw InputError("--a2/--b2 belong to the lambda family");
    if (rc.e2 && rc.f2) throw InputError("give either --e2 or --f2, not both");
    if (rc.f2) return *rc.f2;
    if (rc.e2) return (1.0 - *rc.e2) / 2.0;
    throw InputError("the w family needs --f2 or --e2");
  }
  if (rc.family == "lambda") {
    if (rc.e2 || rc.f2) throw InputError("--e2/--f2 belong to the w family");
    if (rc.a2 && rc.b2) throw InputError("give either --a2 or --b2, not both");
    if (rc.a2) return *rc.a2;
    if (rc.b2) return 1.0 - 4.0 * *rc.b2;
    throw InputError("the lambda family needs --a2 or --b2");
  }
  if (rc.family == "ghz" || rc.family == "epr") {
    if (rc.e2 || rc.f2 || rc.a2 || rc.b2) throw InputError("the " + rc.family + " family takes no parameters");
    return std::nullopt;
  }
  throw InputError("unknown family '" + rc.family + "' (expected w, lambda, ghz or epr)");
}

const char* parameter_name(const std::string& family) { return family == "w" ? "f2" : "a2"; }

std::vector<std::optional<double>> parameter_grid(const RunConfig& rc) {
  if (!rc.input.empty()) return {std::nullopt};
  if (rc.sweep.empty()) return {family_parameter(rc)};
  if (rc.family != "w" && rc.family != "lambda") throw InputError("--sweep needs --family w or lambda");
  if (rc.e2 || rc.f2 || rc.a2 || rc.b2) throw InputError("--sweep replaces the family parameter flag");
  std::vector<std::optional<double>> grid;
  for (double v : parse_sweep(rc.sweep)) grid.emplace_back(v);
  return grid;
}

PureState family_state(const std::string& family, std::optional<double> param) {
  if (family == "w") return w_state(WParams::from_f2(*param));
  if (family == "lambda") return lambda_state(LambdaParams::from_a2(*param));
  if (family == "ghz") return ghz();
  return epr();
}

Json family_json(const RunConfig& rc, std::optional<double> param) {
  Json j{{"family", rc.family}};
  if (rc.family == "w") {
    const WParams w = WParams::from_f2(*param);
    j["e2"] = w.e2();
    j["f2"] = w.f2();
  } else if (rc.family == "lambda") {
    const LambdaParams l = LambdaParams::from_a2(*param);
    j["a2"] = l.a2();
    j["b2"] = l.b2();
  }
  return j;
}

// The bipartite state a command acts on.
DensityMatrix target_state(const RunConfig& rc, std::optional<double> param) {
  if (!rc.input.empty()) {
    DensityMatrix rho = load_density(rc.input);
    if (rho.parties() != 2) throw InputError(rc.input + ": expected a bipartite state");
    return rho;
  }
  if (rc.family == "epr") {
    if (rc.pair_given) throw InputError("--pair does not apply to the epr family");
    return epr().density();
  }
  return reduce(family_state(rc.family, param), parse_pair(rc.pair));
}

void require_one_source(const RunConfig& rc) {
  if (rc.input.empty() == rc.family.empty()) throw InputError("give exactly one of --input or --family");
  if (!rc.input.empty() && (!rc.sweep.empty() || rc.e2 || rc.f2 || rc.a2 || rc.b2 || rc.pair_given))
    throw InputError("--input cannot be combined with family parameters");
}

Json source_json(const RunConfig& rc, std::optional<double> param) {
  if (!rc.input.empty()) return Json{{"input", rc.input}};
  Json j = family_json(rc, param);
  if (rc.family != "epr") j["pair"] = rc.pair;
  return j;
}

Report cmd_compute(const RunConfig& rc) {
  require_one_source(rc);
  const Method method = parse_method(rc.method);
  const OptimizerConfig config = optimizer_config(rc);
  const auto grid = parameter_grid(rc);
  const bool sweep = !rc.sweep.empty();

  Report report;
  Json results = Json::array();
  if (sweep) report.columns = {parameter_name(rc.family)};
  for (const char* c : {"value_bits", "method", "converged", "iterations", "restarts", "seed",
                        "boundary_certificate"})
    report.columns.emplace_back(c);
  if (method == Method::Constrained) report.columns.insert(report.columns.end(), {"x", "y", "z"});

  for (const auto& param : grid) {
    const DensityMatrix rho = target_state(rc, param);
    const OptimizationResult r = method == Method::Constrained ? ree_constrained(rho) : ree_mixture(rho, config);
    if (!r.converged) report.status = kExitUnconverged;

    Json entry{{"source", source_json(rc, param)}, {"result", to_json(r)}};
    if (rc.family == "w" && rc.pair == "BC") entry["closed_form_bits"] = es_bc_closed_form(*param);
    results.push_back(std::move(entry));

    std::vector<std::string> row;
    if (sweep) row.push_back(num(*param));
    row.insert(row.end(), {num(r.value), std::string(to_string(r.method)), flag(r.converged),
                           std::to_string(r.iterations), std::to_string(r.restarts), std::to_string(r.seed),
                           num(r.boundary_certificate)});
    if (method == Method::Constrained) {
      if (r.params) row.insert(row.end(), {num(r.params->x), num(r.params->y), num(r.params->z)});
      else row.insert(row.end(), {"", "", ""});
    }
    report.rows.push_back(std::move(row));
  }
  report.json = Json{{"command", "compute"}, {"method", rc.method}};
  if (method == Method::Mixture) report.json["optimizer_config"] = to_json(config);
  if (sweep) report.json["sweep"] = std::move(results);
  else report.json.update(results[0]);
  return report;
}

Report cmd_theorem1(const RunConfig& rc) {
  const OptimizerConfig config = optimizer_config(rc);
  const SubadditivityWitness w = subadditivity_witness(config);
  Report report;
  report.json = Json{{"command", "theorem1"}, {"optimizer_config", to_json(config)}};
  report.json.update(to_json(w));
  if (!w.constrained.converged || !w.mixture.converged) report.status = kExitUnconverged;

  const bool ok_constrained = w.constrained.params.has_value();
  report.columns = {"quantity", "value", "method / tolerance"};
  report.rows = {
      {"E_S(rho^a || sigma)", num(w.es_stationary), "analytic stationary state, no optimisation"},
      {"E_S(rho_AB(2/3,1/6))", num(w.constrained.value), "constrained search, tol 1e-5"},
      {"E_S(rho_AB(2/3,1/6))", num(w.mixture.value), "mixture search, upper bound, tol 1e-4"},
      {"x", ok_constrained ? num(w.constrained.params->x) : "", "constrained optimum"},
      {"y", ok_constrained ? num(w.constrained.params->y) : "", "constrained optimum"},
      {"z", ok_constrained ? num(w.constrained.params->z) : "", "constrained optimum"},
      {"rho^a reconstruction residual", num(w.reconstruction_residual), "max entry vs published rho^a"},
      {"rho^a rank", std::to_string(w.stationary.rank), "not forced to 2"},
      {"rho^a min eigenvalue", num(w.stationary.min_eigenvalue), "PSD within 1e-10"},
      {"Delta", num(w.delta), "trace norm of published perturbation"},
      {"continuity bound", num(w.continuity), "dim 4, log base 2"},
      {"prediction", num(w.prediction), "closed form, required for balance"},
      {"residual", num(w.residual), "E_S - prediction"},
      {"verdict", w.violated ? "necessary-condition violated" : "necessary condition holds",
       std::string(kConditionalCaveat)},
  };
  return report;
}

Report cmd_mregs(const RunConfig& rc) {
  if (rc.family.empty() || !rc.input.empty()) throw InputError("mregs needs --family (w, lambda or ghz)");
  if (rc.family == "epr") throw InputError("mregs needs a three-party family");
  const Method method = parse_method(rc.method);
  const OptimizerConfig config = optimizer_config(rc);
  const auto grid = parameter_grid(rc);
  const bool sweep = !rc.sweep.empty();
  const bool lambda = rc.family == "lambda";

  Report report;
  if (sweep) report.columns = {parameter_name(rc.family)};
  for (const char* c : {"S_A", "S_B", "S_C", "E_AB", "E_AC", "E_BC", "method_AB", "g", "g_spread", "residual_A",
                        "residual_B", "residual_C", "tolerance", "consistent"})
    report.columns.emplace_back(c);
  if (lambda) report.columns.insert(report.columns.end(), {"lambda_prediction", "E_AB_minus_prediction"});

  Json results = Json::array();
  for (const auto& param : grid) {
    const PureState psi = family_state(rc.family, param);
    const auto e = pair_entanglements(psi, method, config);
    for (const auto& v : e)
      if (!v.converged) report.status = kExitUnconverged;
    const MregsReport m = mregs_balance(psi, e, rc.tolerance);

    Json entry{{"source", family_json(rc, param)}, {"report", to_json(m)}};
    std::vector<std::string> row;
    if (sweep) row.push_back(num(*param));
    row.insert(row.end(), {num(m.party_entropy[0]), num(m.party_entropy[1]), num(m.party_entropy[2]),
                           num(e[0].bits), num(e[1].bits), num(e[2].bits), e[0].method, num(m.ghz_yield),
                           num(m.g_spread), num(m.residuals[0]), num(m.residuals[1]), num(m.residuals[2]),
                           num(m.tolerance), flag(m.consistent)});
    if (lambda) {
      const double prediction = lambda_prediction(*param);
      entry["lambda_prediction"] = Json{{"bits", prediction}, {"note", kConditionalCaveat}};
      entry["e_ab_minus_prediction"] = e[0].bits - prediction;
      row.insert(row.end(), {num(prediction), num(e[0].bits - prediction)});
    }
    results.push_back(std::move(entry));
    report.rows.push_back(std::move(row));
  }
  report.json = Json{{"command", "mregs"}, {"method", rc.method}, {"optimizer_config", to_json(config)}};
  if (sweep) report.json["sweep"] = std::move(results);
  else report.json.update(results[0]);
  return report;
}

Report cmd_additivity(const RunConfig& rc) {
  require_one_source(rc);
  if (!rc.sweep.empty()) throw InputError("additivity does not support --sweep");
  const OptimizerConfig config = optimizer_config(rc);
  const std::optional<double> param = rc.input.empty() ? family_parameter(rc) : std::nullopt;
  const DensityMatrix rho = target_state(rc, param);
  const AdditivityReport a = additivity_gap(rho, rc.copies, config);

  Report report;
  report.json = Json{{"command", "additivity"},
                     {"source", source_json(rc, param)},
                     {"copies", rc.copies},
                     {"regrouping", "(A1 A2)(B1 B2)"},
                     {"optimizer_config", to_json(config)}};
  report.json.update(to_json(a));
  if (!a.two_copy.converged) report.status = kExitUnconverged;
  report.columns = {"single_copy", "single_copy_method", "two_copy", "two_copy_method", "gap", "tolerance",
                    "within_tolerance", "two_copy_converged"};
  report.rows = {{num(a.single_copy), a.single_copy_method, num(a.two_copy.value), "mixture", num(a.gap),
                  num(a.tolerance), flag(a.within_tolerance), flag(a.two_copy.converged)}};
  return report;
}

Report cmd_bound(const RunConfig& rc) {
  const bool files = !rc.rho1.empty() || !rc.rho2.empty();
  if (files == rc.delta.has_value()) throw InputError("give either --rho1 and --rho2, or --delta");
  double delta = 0.0;
  std::size_t dim = rc.dim;
  Json source;
  if (files) {
    if (rc.rho1.empty() || rc.rho2.empty()) throw InputError("--rho1 and --rho2 go together");
    const DensityMatrix a = load_density(rc.rho1);
    const DensityMatrix b = load_density(rc.rho2);
    if (a.dims() != b.dims()) throw InputError("--rho1 and --rho2 have different subsystem dimensions");
    delta = trace_norm(a.matrix() - b.matrix());
    dim = a.dim();
    source = Json{{"rho1", rc.rho1}, {"rho2", rc.rho2}};
  } else {
    delta = *rc.delta;
    source = Json{{"delta", delta}};
  }
  const double bound = continuity_bound({delta, dim});
  Report report;
  report.json = Json{{"command", "bound"},         {"source", source},
                     {"delta", delta},              {"dim", dim},
                     {"bound_bits", bound},         {"convention", "dim = joint Hilbert-space dimension, log base 2"}};
  report.columns = {"delta", "dim", "bound_bits"};
  report.rows = {{num(delta), std::to_string(dim), num(bound)}};
  return report;
}

Report cmd_state(const RunConfig& rc) {
  if (rc.family.empty() || !rc.input.empty()) throw InputError("state needs --family");
  if (!rc.sweep.empty()) throw InputError("state does not support --sweep");
  const std::optional<double> param = family_parameter(rc);
  const PureState psi = family_state(rc.family, param);
  const bool reduced = rc.pair_given && rc.family != "epr";
  if (rc.pair_given && rc.family == "epr") throw InputError("--pair does not apply to the epr family");
  const DensityMatrix rho = reduced ? reduce(psi, parse_pair(rc.pair)) : psi.density();

  Report report;
  report.json = to_json(rho);
  report.columns = {"row", "col", "re", "im"};
  for (Eigen::Index r = 0; r < rho.matrix().rows(); ++r)
    for (Eigen::Index c = 0; c < rho.matrix().cols(); ++c)
      report.rows.push_back({std::to_string(r), std::to_string(c), num(rho.matrix()(r, c).real()),
                             num(rho.matrix()(r, c).imag())});
  return report;
}

void add_family_options(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--family", rc.family, "state family: w, lambda, ghz, epr");
  sub->add_option("--e2", rc.e2, "w family: e^2");
  sub->add_option("--f2", rc.f2, "w family: f^2");
  sub->add_option("--a2", rc.a2, "lambda family: a^2");
  sub->add_option("--b2", rc.b2, "lambda family: b^2");
  sub->add_option("--pair", rc.pair, "two-party reduction: AB, AC, BC")->each([&](const std::string&) {
    rc.pair_given = true;
  });
}

void add_optimizer_options(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--seed", rc.seed, "base RNG seed");
  sub->add_option("--restarts", rc.restarts, "random restarts");
  sub->add_option("--mixture-size", rc.mixture_size, "product terms in the mixture (0 = 4 dA dB)");
  sub->add_option("--threads", rc.threads, "worker threads for restarts");
  sub->add_option("--optimizer-config", rc.optimizer_config, "OptimizerConfig JSON file");
}

void add_output_options(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--format", rc.format, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));
  sub->add_option("--output", rc.output, "write to this file instead of stdout");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Relative entropy of entanglement and MREGS audits for small quantum states", "relent"};
  app.require_subcommand(1);

  auto* compute = app.add_subcommand("compute", "E_S of a bipartite state");
  add_family_options(compute, rc);
  compute->add_option("--input", rc.input, "density matrix JSON file");
  compute->add_option("--method", rc.method, "constrained or mixture");
  compute->add_option("--sweep", rc.sweep, "start:stop:step over f2 (w) or a2 (lambda)");
  add_optimizer_options(compute, rc);
  add_output_options(compute, rc);

  auto* theorem1 = app.add_subcommand("theorem1", "reproduce the W-family subadditivity argument");
  add_optimizer_options(theorem1, rc);
  add_output_options(theorem1, rc);

  auto* mregs = app.add_subcommand("mregs", "GHZ/EPR balance audit of a three-qubit pure state");
  add_family_options(mregs, rc);
  mregs->add_option("--method", rc.method, "constrained or mixture");
  mregs->add_option("--sweep", rc.sweep, "start:stop:step over f2 (w) or a2 (lambda)");
  mregs->add_option("--tolerance", rc.tolerance, "consistency tolerance (1e-3 optimiser-grade, 1e-9 closed form)");
  add_optimizer_options(mregs, rc);
  add_output_options(mregs, rc);

  auto* additivity = app.add_subcommand("additivity", "two-copy additivity gap");
  add_family_options(additivity, rc);
  additivity->add_option("--input", rc.input, "density matrix JSON file");
  additivity->add_option("--copies", rc.copies, "number of copies (only 2)");
  add_optimizer_options(additivity, rc);
  add_output_options(additivity, rc);

  auto* bound = app.add_subcommand("bound", "continuity bound on |E_S(rho1) - E_S(rho2)|");
  bound->add_option("--rho1", rc.rho1, "first density matrix JSON file");
  bound->add_option("--rho2", rc.rho2, "second density matrix JSON file");
  bound->add_option("--delta", rc.delta, "trace distance, instead of --rho1/--rho2");
  bound->add_option("--dim", rc.dim, "joint dimension used with --delta");
  add_output_options(bound, rc);

  auto* state = app.add_subcommand("state", "print a family state or one of its reductions");
  add_family_options(state, rc);
  add_output_options(state, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    Report report;
    if (*compute) report = cmd_compute(rc);
    else if (*theorem1) report = cmd_theorem1(rc);
    else if (*mregs) report = cmd_mregs(rc);
    else if (*additivity) report = cmd_additivity(rc);
    else if (*bound) report = cmd_bound(rc);
    else report = cmd_state(rc);

    if (rc.output.empty()) {
      render(report, rc.format, out);
    } else {
      std::ofstream file(rc.output);
      if (!file) throw InputError("cannot write " + rc.output);
      render(report, rc.format, file);
    }
    if (report.status == kExitUnconverged) err << "warning: optimiser did not converge\n";
    return report.status;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace relent::cli
