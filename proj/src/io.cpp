#include "relent/io.hpp"

#include <fstream>

namespace relent {

namespace {

Dims dims_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InputError("\"dims\" must be a non-empty array");
  Dims dims;
  for (const auto& d : j) {
    if (!d.is_number_unsigned() || d.get<std::size_t>() == 0)
      throw InputError("\"dims\" entries must be positive integers");
    dims.push_back(d.get<std::size_t>());
  }
  return dims;
}

RealVector::Index checked_rows(const Json& j, const char* key, std::size_t n) {
  if (!j.is_array() || j.size() != n) throw InputError(std::string("\"") + key + "\" must have one row per basis state");
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != n) throw InputError(std::string("\"") + key + "\" must be square");
    for (const auto& v : row)
      if (!v.is_number()) throw InputError(std::string("\"") + key + "\" entries must be numbers");
  }
  return static_cast<RealVector::Index>(n);
}

}  // namespace

Json matrix_to_json(const Matrix& m, const Dims& dims) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json rr = Json::array();
    Json ri = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return Json{{"dims", dims}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Json to_json(const DensityMatrix& rho) { return matrix_to_json(rho.matrix(), rho.dims()); }

DensityMatrix density_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("matrix JSON must be an object");
  for (const char* key : {"dims", "re", "im"})
    if (!j.contains(key)) throw InputError(std::string("matrix JSON is missing \"") + key + "\"");
  Dims dims = dims_from_json(j.at("dims"));
  const std::size_t n = product(dims);
  const auto side = checked_rows(j.at("re"), "re", n);
  checked_rows(j.at("im"), "im", n);
  Matrix m(side, side);
  for (Eigen::Index r = 0; r < side; ++r)
    for (Eigen::Index c = 0; c < side; ++c) {
      const auto ur = static_cast<std::size_t>(r);
      const auto uc = static_cast<std::size_t>(c);
      m(r, c) = Complex(j.at("re")[ur][uc].get<double>(), j.at("im")[ur][uc].get<double>());
    }
  return DensityMatrix(std::move(dims), std::move(m));
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

DensityMatrix load_density(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  try {
    return density_from_json(j);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

Json to_json(const OptimizerConfig& c) {
  return Json{{"mixture_size", c.mixture_size},     {"restarts", c.restarts},
              {"max_iterations", c.max_iterations}, {"value_tolerance", c.value_tolerance},
              {"stall_window", c.stall_window},     {"gradient_tolerance", c.gradient_tolerance},
              {"initial_step", c.initial_step},     {"backtrack", c.backtrack},
              {"history", c.history},               {"seed", c.seed},
              {"threads", c.threads}};
}

OptimizerConfig config_from_json(const Json& j, OptimizerConfig base) {
  if (!j.is_object()) throw InputError("optimizer config must be a JSON object");
  auto count = [](const Json& v, const std::string& key) {
    if (!v.is_number_unsigned()) throw InputError("optimizer config: \"" + key + "\" must be a non-negative integer");
    return v.get<std::uint64_t>();
  };
  auto real = [](const Json& v, const std::string& key) {
    if (!v.is_number()) throw InputError("optimizer config: \"" + key + "\" must be a number");
    return v.get<double>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "mixture_size") base.mixture_size = count(v, key);
    else if (key == "restarts") base.restarts = count(v, key);
    else if (key == "max_iterations") base.max_iterations = count(v, key);
    else if (key == "value_tolerance") base.value_tolerance = real(v, key);
    else if (key == "stall_window") base.stall_window = count(v, key);
    else if (key == "gradient_tolerance") base.gradient_tolerance = real(v, key);
    else if (key == "initial_step") base.initial_step = real(v, key);
    else if (key == "backtrack") base.backtrack = real(v, key);
    else if (key == "history") base.history = count(v, key);
    else if (key == "seed") base.seed = count(v, key);
    else if (key == "threads") base.threads = count(v, key);
    else throw InputError("optimizer config: unknown key \"" + key + "\"");
  }
  return base;
}

Json to_json(const ConstrainedSigmaParams& p) {
  return Json{{"x", p.x}, {"y", p.y}, {"z", p.z}, {"u", p.u()}, {"v", p.v()}};
}

Json to_json(const PptTest& t) { return Json{{"ppt", t.ppt}, {"min_eigenvalue", t.min_eigenvalue}}; }

Json to_json(const OptimizationResult& r) {
  Json j{{"value_bits", r.value},
         {"method", to_string(r.method)},
         {"converged", r.converged},
         {"cancelled", r.cancelled},
         {"iterations", r.iterations},
         {"gradient_norm", r.gradient_norm},
         {"boundary_certificate", r.boundary_certificate},
         {"restarts", r.restarts},
         {"best_restart", r.best_restart},
         {"seed", r.seed}};
  if (r.method == Method::Mixture) j["note"] = kUpperBoundCaveat;
  if (r.params) j["params"] = to_json(*r.params);
  if (r.decomposition) j["decomposition_terms"] = r.decomposition->size();
  j["closest_state"] = to_json(r.closest_state);
  return j;
}

Json to_json(const StationarityResult& s) {
  return Json{{"rho", matrix_to_json(s.rho, {2, 2})},
              {"psd", s.psd},
              {"min_eigenvalue", s.min_eigenvalue},
              {"rank", s.rank},
              {"stationarity_residual", s.residual}};
}

Json to_json(const MregsReport& r) {
  static constexpr std::array<const char*, 3> parties{"A", "B", "C"};
  static constexpr std::array<const char*, 3> pairs{"AB", "AC", "BC"};
  Json entropy = Json::object();
  Json g_party = Json::object();
  Json residuals = Json::object();
  for (std::size_t i = 0; i < 3; ++i) {
    entropy[parties[i]] = r.party_entropy[i];
    g_party[parties[i]] = r.g_per_party[i];
    residuals[parties[i]] = r.residuals[i];
  }
  Json e = Json::object();
  Json s = Json::object();
  for (std::size_t i = 0; i < 3; ++i) {
    e[pairs[i]] = Json{{"bits", r.e_values[i].bits},
                     {"method", r.e_values[i].method},
                     {"converged", r.e_values[i].converged}};
    s[pairs[i]] = r.epr_yields[i];
  }
  return Json{{"party_entropy", std::move(entropy)},
              {"e_values", std::move(e)},
              {"epr_yields", std::move(s)},
              {"ghz_yield", r.ghz_yield},
              {"g_per_party", std::move(g_party)},
              {"g_spread", r.g_spread},
              {"residuals", std::move(residuals)},
              {"tolerance", r.tolerance},
              {"ghz_feasible", r.ghz_feasible},
              {"consistent", r.consistent},
              {"notes", r.notes}};
}

Json to_json(const LambdaAudit& a) {
  return Json{{"a2", a.params.a2()},
              {"b2", a.params.b2()},
              {"s_ab", a.s_ab},
              {"s_bc", a.s_bc},
              {"prediction", a.prediction},
              {"prediction_note", kConditionalCaveat},
              {"rho_bc_ppt", to_json(a.bc)},
              {"rho_ab_ppt", to_json(a.ab)},
              {"upper_bound", a.upper_bound},
              {"upper_bound_method", "mixture"},
              {"gap", a.gap},
              {"converged", a.converged}};
}

Json to_json(const AdditivityReport& r) {
  Json two = to_json(r.two_copy);
  two.erase("closest_state");
  return Json{{"single_copy", r.single_copy},
              {"single_copy_method", r.single_copy_method},
              {"two_copy", r.two_copy.value},
              {"gap", r.gap},
              {"tolerance", r.tolerance},
              {"within_tolerance", r.within_tolerance},
              {"two_copy_run", std::move(two)},
              {"note", kUpperBoundCaveat}};
}

Json to_json(const SubadditivityWitness& w) {
  Json constrained = to_json(w.constrained);
  constrained.erase("closest_state");
  Json mixture = to_json(w.mixture);
  mixture.erase("closest_state");
  return Json{{"f2", w.f2},
              {"sigma_params", to_json(w.sigma_params)},
              {"stationary", to_json(w.stationary)},
              {"reconstruction_residual", w.reconstruction_residual},
              {"es_stationary", w.es_stationary},
              {"delta", w.delta},
              {"continuity_bound", w.continuity},
              {"continuity_convention", "dim = 4 (joint), log base 2"},
              {"es_constrained", std::move(constrained)},
              {"es_mixture", std::move(mixture)},
              {"prediction", w.prediction},
              {"residual", w.residual},
              {"violated", w.violated},
              {"verdict", w.violated ? "necessary condition violated" : "necessary condition holds"},
              {"note", kConditionalCaveat}};
}

}  // namespace relent
