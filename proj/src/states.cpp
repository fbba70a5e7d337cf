#include "relent/states.hpp"

#include <array>
#include <cmath>

namespace relent {

namespace {

constexpr double kNormalisation = 1e-12;

Matrix real_matrix(const std::array<std::array<double, 4>, 4>& rows) {
  Matrix m(4, 4);
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

}  // namespace

PureState::PureState(Dims dims, Vector amplitudes) : dims_(std::move(dims)), amplitudes_(std::move(amplitudes)) {
  if (dims_.empty() || product(dims_) != static_cast<std::size_t>(amplitudes_.size()))
    throw DimensionError("PureState: amplitude count does not match party dimensions");
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormalisation)
    throw ArgumentError("PureState: squared norm " + std::to_string(norm2) + " differs from 1");
}

DensityMatrix PureState::density() const {
  Matrix m = amplitudes_ * amplitudes_.adjoint();
  return DensityMatrix(dims_, std::move(m));
}

WParams WParams::from_f2(double f2) {
  if (!(f2 >= 0.0 && f2 <= 0.5)) throw ArgumentError("W family: f2 must lie in [0, 1/2]");
  WParams p{std::sqrt(std::max(0.0, 1.0 - 2.0 * f2)), std::sqrt(f2)};
  return p;
}

void WParams::validate() const {
  if (e < 0.0 || f < 0.0) throw ArgumentError("W family: amplitudes must be non-negative");
  if (std::abs(e * e + 2.0 * f * f - 1.0) > kNormalisation)
    throw ArgumentError("W family: e^2 + 2 f^2 must equal 1");
}

LambdaParams LambdaParams::from_a2(double a2) {
  if (!(a2 >= 0.0 && a2 <= 1.0)) throw ArgumentError("Lambda family: a2 must lie in [0, 1]");
  return LambdaParams{std::sqrt(a2), std::sqrt((1.0 - a2) / 4.0)};
}

void LambdaParams::validate() const {
  if (a < 0.0 || b < 0.0) throw ArgumentError("Lambda family: amplitudes must be non-negative");
  if (std::abs(a * a + 4.0 * b * b - 1.0) > kNormalisation)
    throw ArgumentError("Lambda family: a^2 + 4 b^2 must equal 1");
}

Pair parse_pair(std::string_view label) {
  if (label == "AB" || label == "ab") return Pair::AB;
  if (label == "AC" || label == "ac") return Pair::AC;
  if (label == "BC" || label == "bc") return Pair::BC;
  throw ArgumentError("unknown party pair '" + std::string(label) + "' (expected AB, AC or BC)");
}

std::string_view to_string(Pair pair) {
  switch (pair) {
    case Pair::AB: return "AB";
    case Pair::AC: return "AC";
    case Pair::BC: return "BC";
  }
  return "?";
}

DensityMatrix reduce(const PureState& psi, Pair pair) {
  if (psi.parties() != 3) throw ArgumentError("reduce: expected a three-party state");
  static constexpr std::array<std::size_t, 2> kAB{0, 1};
  static constexpr std::array<std::size_t, 2> kAC{0, 2};
  static constexpr std::array<std::size_t, 2> kBC{1, 2};
  const DensityMatrix rho = psi.density();
  switch (pair) {
    case Pair::AB: return partial_trace(rho, kAB);
    case Pair::AC: return partial_trace(rho, kAC);
    case Pair::BC: return partial_trace(rho, kBC);
  }
  throw ArgumentError("reduce: invalid pair");
}

PureState w_state(const WParams& params) {
  params.validate();
  Vector amps = Vector::Zero(8);
  amps(0b000) = params.e;
  amps(0b101) = params.f;
  amps(0b110) = params.f;
  return PureState({2, 2, 2}, std::move(amps));
}

DensityMatrix w_reduced(const WParams& params, Pair pair) {
  params.validate();
  const double e2 = params.e2();
  const double f2 = params.f2();
  const double ef = params.e * params.f;
  if (pair == Pair::BC)
    return DensityMatrix({2, 2}, real_matrix({{{e2, 0, 0, 0}, {0, f2, f2, 0}, {0, f2, f2, 0}, {0, 0, 0, 0}}}));
  return DensityMatrix({2, 2}, real_matrix({{{e2, 0, 0, ef}, {0, 0, 0, 0}, {0, 0, f2, 0}, {ef, 0, 0, f2}}}));
}

PureState lambda_state(const LambdaParams& params) {
  params.validate();
  Vector amps = Vector::Zero(8);
  amps(0b000) = params.a;
  for (int idx : {0b100, 0b101, 0b110, 0b111}) amps(idx) = params.b;
  return PureState({2, 2, 2}, std::move(amps));
}

DensityMatrix lambda_reduced(const LambdaParams& params, Pair pair) {
  params.validate();
  const double a2 = params.a2();
  const double ab = params.a * params.b;
  const double tb2 = 2.0 * params.b2();
  if (pair == Pair::BC) {
    // a^2 |00><00| + 4 b^2 |++><++|
    const double q = params.b2();
    return DensityMatrix(
        {2, 2}, real_matrix({{{a2 + q, q, q, q}, {q, q, q, q}, {q, q, q, q}, {q, q, q, q}}}));
  }
  return DensityMatrix({2, 2},
                       real_matrix({{{a2, 0, ab, ab}, {0, 0, 0, 0}, {ab, 0, tb2, tb2}, {ab, 0, tb2, tb2}}}));
}

PureState ghz() {
  Vector amps = Vector::Zero(8);
  amps(0) = amps(7) = 1.0 / std::sqrt(2.0);
  return PureState({2, 2, 2}, std::move(amps));
}

PureState epr() {
  Vector amps = Vector::Zero(4);
  amps(0) = amps(3) = 1.0 / std::sqrt(2.0);
  return PureState({2, 2}, std::move(amps));
}

}  // namespace relent
