// JSON interchange for matrices, optimiser configuration and reports.
//
// Matrix format: {"dims":[d1,...],"re":[[...]],"im":[[...]]}, row-major.

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "relent/analysis.hpp"
#include "relent/linalg.hpp"
#include "relent/reeopt.hpp"

namespace relent {

using Json = nlohmann::ordered_json;

/// Malformed or unreadable input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json matrix_to_json(const Matrix& m, const Dims& dims);
Json to_json(const DensityMatrix& rho);
/// Parses and validates against the DensityMatrix invariants.
DensityMatrix density_from_json(const Json& j);
DensityMatrix load_density(const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);

Json to_json(const OptimizerConfig& config);
/// Keys missing from `j` keep the values in `base`; unknown keys are rejected.
OptimizerConfig config_from_json(const Json& j, OptimizerConfig base = {});

Json to_json(const ConstrainedSigmaParams& params);
Json to_json(const PptTest& test);
Json to_json(const OptimizationResult& result);
Json to_json(const StationarityResult& result);
Json to_json(const MregsReport& report);
Json to_json(const LambdaAudit& audit);
Json to_json(const AdditivityReport& report);
Json to_json(const SubadditivityWitness& witness);

}  // namespace relent
