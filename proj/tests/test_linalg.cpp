#include <array>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "relent/analysis.hpp"
#include "relent/linalg.hpp"
#include "relent/states.hpp"
#include "relent/symmetry.hpp"

using namespace relent;

namespace {

Matrix diag(std::initializer_list<double> values) {
  RealVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v.cast<Complex>().asDiagonal();
}

DensityMatrix bell() { return epr().density(); }

DensityMatrix rho_ab_reference() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 2.0 / 3.0;
  m(0, 3) = m(3, 0) = 1.0 / 3.0;
  m(2, 2) = 1.0 / 6.0;
  m(3, 3) = 1.0 / 6.0;
  return DensityMatrix({2, 2}, m);
}

}  // namespace

TEST_CASE("tensor_product examples") {
  CHECK(max_abs(tensor_product(Matrix::Identity(2, 2), Matrix::Identity(2, 2)) - Matrix::Identity(4, 4)) == 0.0);
  CHECK(max_abs(tensor_product(diag({1, -1}), diag({1, -1})) - diag({1, -1, -1, 1})) == 0.0);

  const DensityMatrix rho = rho_ab_reference();
  const Matrix doubled = tensor_product(rho.matrix(), rho.matrix());
  CHECK(std::abs(doubled.trace().real() - 1.0) < 1e-14);
  CHECK(hermiticity_defect(doubled) < 1e-15);
  CHECK(oracle::eigenvalues(doubled)(0) > -1e-14);
  CHECK_NOTHROW(DensityMatrix({2, 2, 2, 2}, doubled));

  // Row-major block convention against Eigen's own Kronecker expansion by index.
  std::mt19937_64 rng(1);
  const Matrix a = oracle::random_hermitian(rng, 2);
  const Matrix b = oracle::random_hermitian(rng, 3);
  const Matrix k = tensor_product(a, b);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) CHECK(std::abs(k(i * 3 + p, j * 3 + q) - a(i, j) * b(p, q)) == 0.0);

  CHECK_THROWS_AS(tensor_product(Matrix::Zero(2, 3), Matrix::Identity(2, 2)), DimensionError);
}

TEST_CASE("partial_trace examples") {
  const std::array<std::size_t, 1> first{0};
  const DensityMatrix reduced = partial_trace(bell(), first);
  CHECK(max_abs(reduced.matrix() - 0.5 * Matrix::Identity(2, 2)) < 1e-15);
  CHECK(reduced.dims() == Dims{2});

  const PureState w = w_state(WParams::from_f2(1.0 / 6.0));
  const std::array<std::size_t, 2> ab{0, 1};
  CHECK(max_abs(partial_trace(w.density(), ab).matrix() - rho_ab_reference().matrix()) < 1e-12);

  std::mt19937_64 rng(2);
  const DensityMatrix rho({2}, oracle::random_density(rng, 2));
  const DensityMatrix tau({3}, oracle::random_density(rng, 3));
  CHECK(max_abs(partial_trace(tensor_product(rho, tau), first).matrix() - rho.matrix()) < 1e-12);

  const std::array<std::size_t, 1> second{1};
  CHECK(max_abs(partial_trace(tensor_product(rho, tau), second).matrix() - tau.matrix()) < 1e-12);

  CHECK_THROWS_AS(partial_trace(bell(), std::span<const std::size_t>{}), ArgumentError);
  const std::array<std::size_t, 1> bad{2};
  CHECK_THROWS_AS(partial_trace(bell(), bad), ArgumentError);
  const std::array<std::size_t, 2> dup{0, 0};
  CHECK_THROWS_AS(partial_trace(bell(), dup), ArgumentError);
}

TEST_CASE("partial_trace of a product is the factor (property)") {
  std::mt19937_64 rng(3);
  const std::array<std::size_t, 1> first{0};
  for (int i = 0; i < 200; ++i) {
    const DensityMatrix rho({2}, oracle::random_density(rng, 2));
    const DensityMatrix tau({2}, oracle::random_density(rng, 2));
    REQUIRE(max_abs(partial_trace(tensor_product(rho, tau), first).matrix() - rho.matrix()) < 1e-12);
  }
}

TEST_CASE("partial_transpose examples") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    const Matrix h = oracle::random_hermitian(rng, 4);
    const Matrix once = partial_transpose(h, {2, 2}, 1);
    REQUIRE(max_abs(partial_transpose(once, {2, 2}, 1) - h) <= 1e-14);
    REQUIRE(max_abs(once - oracle::partial_transpose_2x2(h)) == 0.0);
    REQUIRE(hermiticity_defect(once) < 1e-14);
  }

  CHECK(oracle::eigenvalues(partial_transpose(bell(), 1))(0) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(herm_eigenvalues(partial_transpose(bell(), 1))(0) == doctest::Approx(-0.5).epsilon(1e-13));

  const DensityMatrix sigma = constrained_sigma({0.3, 0.2, 0.1});
  CHECK(std::abs(oracle::eigenvalues(partial_transpose(sigma, 1))(0)) < 1e-12);

  CHECK_THROWS_AS(partial_transpose(bell(), 2), ArgumentError);
}

TEST_CASE("permute_subsystems swaps tensor factors") {
  std::mt19937_64 rng(5);
  const Matrix a = oracle::random_density(rng, 2);
  const Matrix b = oracle::random_density(rng, 3);
  const std::array<std::size_t, 2> swap{1, 0};
  CHECK(max_abs(permute_subsystems(tensor_product(a, b), {2, 3}, swap) - tensor_product(b, a)) < 1e-15);
  const std::array<std::size_t, 2> not_perm{0, 0};
  CHECK_THROWS_AS(permute_subsystems(tensor_product(a, b), {2, 3}, not_perm), ArgumentError);
}

TEST_CASE("herm_eigensystem examples") {
  CHECK(max_abs(herm_eigenvalues(Matrix::Identity(4, 4)).cast<Complex>() - Vector::Ones(4)) < 1e-15);
  const RealVector d = herm_eigenvalues(diag({1, -1}));
  CHECK(d(0) == doctest::Approx(-1.0));
  CHECK(d(1) == doctest::Approx(1.0));

  const RealVector v = herm_eigenvalues(rho_ab_reference().matrix());
  CHECK(std::abs(v(0)) < 1e-15);
  CHECK(std::abs(v(1)) < 1e-15);
  CHECK(v(2) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(v(3) == doctest::Approx(5.0 / 6.0).epsilon(1e-14));

  Matrix skew = Matrix::Zero(2, 2);
  skew(0, 1) = 1.0;
  CHECK_THROWS_AS(herm_eigensystem(skew), ValidationError);
  CHECK_THROWS_AS(herm_eigensystem(Matrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("herm_eigensystem invariants on random matrices (property)") {
  std::mt19937_64 rng(6);
  for (int n : {4, 16}) {
    for (int i = 0; i < 1000; ++i) {
      const Matrix h = oracle::random_hermitian(rng, n);
      const EigenSystem es = herm_eigensystem(h);
      const Matrix rebuilt = es.vectors * es.values.cast<Complex>().asDiagonal() * es.vectors.adjoint();
      REQUIRE(max_abs(h - rebuilt) <= 1e-10);
      REQUIRE(max_abs(es.vectors.adjoint() * es.vectors - Matrix::Identity(n, n)) <= 1e-10);
      for (Eigen::Index k = 1; k < es.values.size(); ++k) REQUIRE(es.values(k - 1) <= es.values(k));
      REQUIRE((es.values - oracle::eigenvalues(h)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("herm_eigensystem handles degenerate spectra") {
  std::mt19937_64 rng(7);
  const Matrix u = oracle::random_unitary(rng, 16);
  RealVector values(16);
  for (int k = 0; k < 16; ++k) values(k) = k < 6 ? 0.0 : (k < 12 ? 0.25 : 1.0);
  const Matrix h = u * values.cast<Complex>().asDiagonal() * u.adjoint();
  const EigenSystem es = herm_eigensystem(0.5 * (h + h.adjoint()));
  CHECK((es.values - values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(max_abs(es.vectors.adjoint() * es.vectors - Matrix::Identity(16, 16)) < 1e-12);
}

TEST_CASE("trace_norm examples") {
  std::mt19937_64 rng(8);
  CHECK(trace_norm(oracle::random_density(rng, 4)) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(trace_norm(Matrix::Zero(4, 4)) == 0.0);

  const Matrix p = reference_perturbation();
  CHECK(trace_norm(p) == doctest::Approx(oracle::trace_norm(p)).epsilon(1e-12));
  CHECK(trace_norm(p) == doctest::Approx(4.33e-10).epsilon(1e-3));

  // Non-Hermitian input: sum of singular values.
  const Matrix a = Matrix::Random(3, 3);
  Eigen::JacobiSVD<Matrix> svd(a);
  CHECK(trace_norm(a) == doctest::Approx(svd.singularValues().sum()).epsilon(1e-12));
}

TEST_CASE("trace_norm triangle inequality and zero test (property)") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 500; ++i) {
    const Matrix a = oracle::random_density(rng, 4);
    const Matrix b = oracle::random_density(rng, 4);
    const Matrix c = oracle::random_density(rng, 4);
    REQUIRE(trace_norm(a - c) <= trace_norm(a - b) + trace_norm(b - c) + 1e-10);
    REQUIRE(trace_norm(a - a) == 0.0);
    REQUIRE(trace_norm(a - b) > 1e-8);
  }
}

TEST_CASE("log2_on_support examples") {
  const SupportLog id = log2_on_support(Matrix::Identity(4, 4));
  CHECK(max_abs(id.log2) < 1e-15);
  CHECK(max_abs(id.projector - Matrix::Identity(4, 4)) < 1e-15);
  CHECK(id.rank == 4);

  const SupportLog half = log2_on_support(diag({0.5, 0.5, 0, 0}));
  CHECK(half.rank == 2);
  CHECK(max_abs(half.log2 - diag({-1, -1, 0, 0})) < 1e-14);
  CHECK(max_abs(half.projector - diag({1, 1, 0, 0})) < 1e-14);

  const SupportLog two = log2_on_support(diag({1.0 / 6.0, 5.0 / 6.0}));
  CHECK(two.log2(0, 0).real() == doctest::Approx(-2.584963).epsilon(1e-6));
  CHECK(two.log2(1, 1).real() == doctest::Approx(-0.263034).epsilon(1e-5));

  CHECK_THROWS_AS(log2_on_support(diag({1.0, -1e-9})), ValidationError);
  CHECK_NOTHROW(log2_on_support(diag({1.0, -1e-11})));
}

TEST_CASE("is_ppt examples") {
  const PptTest mixed = is_ppt(DensityMatrix({2, 2}, 0.25 * Matrix::Identity(4, 4)), 1, 1e-10);
  CHECK(mixed.ppt);
  CHECK(mixed.min_eigenvalue == doctest::Approx(0.25));

  const PptTest w = is_ppt(rho_ab_reference(), 1, 1e-10);
  CHECK_FALSE(w.ppt);
  CHECK(w.min_eigenvalue < 0.0);

  const LambdaParams lambda = LambdaParams::from_a2(0.4);
  CHECK(is_ppt(lambda_reduced(lambda, Pair::BC), 1, 1e-10).ppt);
}

TEST_CASE("DensityMatrix validates its invariants") {
  CHECK_THROWS_AS(DensityMatrix({2, 2}, Matrix::Identity(4, 4)), ValidationError);
  CHECK_THROWS_AS(DensityMatrix({2, 2}, diag({1.2, -0.2, 0, 0})), ValidationError);
  Matrix nh = 0.5 * Matrix::Identity(2, 2);
  nh(0, 1) = 1e-9;
  CHECK_THROWS_AS(DensityMatrix({2}, nh), ValidationError);
  CHECK_THROWS_AS(DensityMatrix({2, 3}, 0.25 * Matrix::Identity(4, 4)), DimensionError);
  CHECK_NOTHROW(DensityMatrix({2, 2}, diag({1.0 + 5e-11, -5e-11, 0, 0})));
}
