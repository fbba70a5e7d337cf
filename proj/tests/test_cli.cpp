#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "doctest.h"
#include "relent/io.hpp"
#include "relent/states.hpp"

using namespace relent;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "relent");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch() {
  const auto dir = std::filesystem::temp_directory_path() / "relent_test_cli";
  std::filesystem::create_directories(dir);
  return dir;
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("compute with the constrained method") {
  const Run r = run({"compute", "--family", "w", "--f2", "0.1666666667", "--pair", "AB", "--method", "constrained"});
  REQUIRE(r.code == cli::kExitOk);
  const Json j = Json::parse(r.out);
  CHECK(j.at("result").at("value_bits").get<double>() == doctest::Approx(0.3548).epsilon(1e-3));
  CHECK(j.at("result").at("method") == "constrained");
  CHECK(j.at("source").at("pair") == "AB");
}

TEST_CASE("compute with the mixture method") {
  const Run r = run({"compute", "--family", "w", "--f2", "0.1666666667", "--pair", "BC", "--method", "mixture",
                     "--restarts", "4"});
  REQUIRE(r.code == cli::kExitOk);
  const Json j = Json::parse(r.out);
  CHECK(j.at("result").at("value_bits").get<double>() == doctest::Approx(0.0484).epsilon(1e-3));
  CHECK(j.at("closed_form_bits").get<double>() == doctest::Approx(0.0484).epsilon(1e-3));
  CHECK(j.at("optimizer_config").at("restarts") == 4);
}

TEST_CASE("compute on a separable input file") {
  const auto dir = scratch();
  Json sep = to_json(DensityMatrix({2, 2}, 0.25 * Matrix::Identity(4, 4)));
  write(dir / "sep.json", sep.dump());
  const Run r = run({"compute", "--input", (dir / "sep.json").string(), "--restarts", "2"});
  CHECK(r.code == cli::kExitOk);
  CHECK(Json::parse(r.out).at("result").at("value_bits").get<double>() <= 1e-5);
}

TEST_CASE("identical runs give byte-identical JSON") {
  const std::vector<std::string> args{"compute", "--family", "lambda", "--a2", "0.5", "--restarts", "3", "--seed", "5"};
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.code == cli::kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.find("seed") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == cli::kExitInput);
  CHECK(run({"compute", "--family", "w", "--f2", "0.9"}).code == cli::kExitInput);
  CHECK(run({"compute", "--family", "x"}).code == cli::kExitInput);
  CHECK(run({"compute", "--family", "w", "--f2", "0.2", "--method", "simplex"}).code == cli::kExitInput);
  CHECK(run({"compute", "--family", "lambda", "--a2", "0.5", "--method", "constrained"}).code == cli::kExitInput);
  CHECK(run({"compute", "--family", "w", "--f2", "0.2", "--format", "xml"}).code == cli::kExitInput);
  CHECK(run({"compute", "--input", "/nonexistent/file.json"}).code == cli::kExitInput);
  CHECK(run({"compute", "--input", "a.json", "--family", "w"}).code == cli::kExitInput);

  const auto dir = scratch();
  write(dir / "bad.json", R"({"dims":[2],"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]})");
  const Run invalid = run({"compute", "--input", (dir / "bad.json").string()});
  CHECK(invalid.code == cli::kExitInput);
  CHECK(invalid.err.find("trace") != std::string::npos);

  write(dir / "cfg.json", R"({"max_iterations": 2, "restarts": 1})");
  const Run halted = run({"compute", "--family", "w", "--f2", "0.2", "--optimizer-config", (dir / "cfg.json").string()});
  CHECK(halted.code == cli::kExitUnconverged);
  CHECK_FALSE(Json::parse(halted.out).at("result").at("converged").get<bool>());

  CHECK(run({"compute", "--help"}).code == cli::kExitOk);
}

TEST_CASE("theorem1 report") {
  const Run r = run({"theorem1", "--restarts", "4"});
  REQUIRE(r.code == cli::kExitOk);
  const Json j = Json::parse(r.out);
  CHECK(j.at("prediction").get<double>() == doctest::Approx(0.316689).epsilon(1e-6));
  CHECK(j.at("es_constrained").at("value_bits").get<double>() == doctest::Approx(0.354761).epsilon(1e-5));
  CHECK(j.at("verdict") == "necessary condition violated");
  CHECK(j.at("violated").get<bool>());

  const Run table = run({"theorem1", "--restarts", "4", "--format", "table"});
  CHECK(table.out.find("necessary-condition violated") != std::string::npos);
  CHECK(table.out.find("0.316689") != std::string::npos);
}

TEST_CASE("mregs and sweeps") {
  const Run r = run({"mregs", "--family", "w", "--f2", "0.3333333333", "--restarts", "4"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(Json::parse(r.out).at("report").at("consistent").get<bool>());

  const Run sweep = run({"mregs", "--family", "w", "--sweep", "0.1:0.3:0.1", "--restarts", "2", "--format", "csv"});
  REQUIRE(sweep.code == cli::kExitOk);
  std::istringstream lines(sweep.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header.rfind("f2,S_A,", 0) == 0);
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 3);

  const Run lambda = run({"mregs", "--family", "lambda", "--a2", "0.5", "--restarts", "2"});
  REQUIRE(lambda.code == cli::kExitOk);
  CHECK(Json::parse(lambda.out).contains("lambda_prediction"));

  CHECK(run({"mregs", "--family", "epr"}).code == cli::kExitInput);
  CHECK(run({"mregs", "--family", "w", "--sweep", "0.1:0.05:0.1"}).code == cli::kExitInput);
}

TEST_CASE("bound") {
  const auto dir = scratch();
  write(dir / "a.json", to_json(w_reduced(WParams::from_f2(0.2), Pair::AB)).dump());
  const Run same = run({"bound", "--rho1", (dir / "a.json").string(), "--rho2", (dir / "a.json").string()});
  REQUIRE(same.code == cli::kExitOk);
  CHECK(Json::parse(same.out).at("bound_bits").get<double>() == 0.0);

  const Run delta = run({"bound", "--delta", "4.3297e-10", "--format", "csv"});
  CHECK(delta.code == cli::kExitOk);
  CHECK(delta.out.find("delta,dim,bound_bits") == 0);

  CHECK(run({"bound", "--rho1", (dir / "a.json").string()}).code == cli::kExitInput);
}

TEST_CASE("state output feeds compute") {
  const auto dir = scratch();
  const Run state = run({"state", "--family", "w", "--e2", "0.6666666666666666", "--pair", "AB", "--output",
                         (dir / "ab.json").string()});
  REQUIRE(state.code == cli::kExitOk);
  const DensityMatrix ab = load_density(dir / "ab.json");
  CHECK(max_abs(ab.matrix() - w_reduced(WParams::from_f2(1.0 / 6.0), Pair::AB).matrix()) < 1e-12);

  const Run full = run({"state", "--family", "ghz"});
  CHECK(density_from_json(Json::parse(full.out)).dims() == Dims{2, 2, 2});

  const Run table = run({"state", "--family", "epr", "--format", "csv"});
  CHECK(table.out.rfind("row,col,re,im", 0) == 0);
}

TEST_CASE("additivity on a small case") {
  const Run r = run({"additivity", "--family", "epr", "--restarts", "1"});
  REQUIRE(r.code == cli::kExitOk);
  const Json j = Json::parse(r.out);
  CHECK(j.at("two_copy").get<double>() == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(j.at("regrouping") == "(A1 A2)(B1 B2)");
  CHECK(j.contains("note"));
  CHECK(run({"additivity", "--family", "epr", "--copies", "3"}).code == cli::kExitInput);
}
