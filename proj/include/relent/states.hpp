// Three-qubit state families and their two-party reductions.
//
// Basis convention: party A is the most significant qubit, so |abc> has flat
// index 4a + 2b + c. All family amplitudes are real and non-negative.

#pragma once

#include <string_view>

#include "relent/linalg.hpp"

namespace relent {

/// Normalised amplitude vector over a tensor-product party structure.
class PureState {
 public:
  PureState(Dims dims, Vector amplitudes);

  const Dims& dims() const noexcept { return dims_; }
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  std::size_t parties() const noexcept { return dims_.size(); }

  /// |psi><psi|
  DensityMatrix density() const;

 private:
  Dims dims_;
  Vector amplitudes_;
};

/// e|000> + f|101> + f|110>, with e^2 + 2 f^2 = 1.
struct WParams {
  double e = 1.0;
  double f = 0.0;

  static WParams from_f2(double f2);
  double e2() const { return e * e; }
  double f2() const { return f * f; }
  void validate() const;
};

/// a|000> + b(|100> + |101> + |110> + |111>), with a^2 + 4 b^2 = 1.
struct LambdaParams {
  double a = 1.0;
  double b = 0.0;

  static LambdaParams from_a2(double a2);
  double a2() const { return a * a; }
  double b2() const { return b * b; }
  void validate() const;
};

enum class Pair { AB, AC, BC };

Pair parse_pair(std::string_view label);
std::string_view to_string(Pair pair);

/// Reduced state of a three-party pure state on the given pair.
DensityMatrix reduce(const PureState& psi, Pair pair);

PureState w_state(const WParams& params);
DensityMatrix w_reduced(const WParams& params, Pair pair);

PureState lambda_state(const LambdaParams& params);
DensityMatrix lambda_reduced(const LambdaParams& params, Pair pair);

PureState ghz();
PureState epr();

}  // namespace relent
