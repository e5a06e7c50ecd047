#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lassoflow/objective.hpp"

using namespace lassoflow;

namespace {

ProblemInstance random_instance(std::uint64_t seed, std::size_t m, std::size_t n) {
  RngStream rng(seed, 0);
  return ProblemInstance::generate(rng, m, n, 0.1, 0.2);
}

ProblemInstance scalar_instance() {
  Mat a(1, 1);
  a(0, 0) = 1.0;
  return ProblemInstance(std::move(a), 0.0, 1.0);
}

}  // namespace

TEST_CASE("soft_abs values and symmetry") {
  CHECK(soft_abs(50.0, 0.0) == doctest::Approx(std::log(2.0) / 50.0).epsilon(1e-14));
  CHECK(soft_abs(50.0, 0.0) == doctest::Approx(0.013862944).epsilon(1e-7));
  CHECK(std::fabs(soft_abs(50.0, 1.0) - 1.0) <= 1e-12);
  CHECK(std::isfinite(soft_abs(1000.0, 1000.0)));

  RngStream rng(1, 0);
  for (int i = 0; i < 100; ++i) {
    const double alpha = 0.5 + 99.5 * rng.uniform();
    const double x = 5.0 * rng.normal();
    CHECK(soft_abs(alpha, x) == soft_abs(alpha, -x));
  }
  CHECK_THROWS_AS(soft_abs(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(soft_abs(-2.0, 1.0), std::invalid_argument);
}

TEST_CASE("soft_abs sandwich bound") {
  RngStream rng(2, 0);
  for (double alpha : {1.0, 5.0, 50.0, 100.0}) {
    for (int i = 0; i < 250; ++i) {
      const double x = 4.0 * rng.normal();
      const double gap = soft_abs(alpha, x) - std::fabs(x);
      CHECK(gap >= 0.0);
      CHECK(gap <= std::log(2.0) / alpha + 1e-15);
    }
  }
}

TEST_CASE("lasso objective values") {
  // least-squares term is 0.5 ||y - a x||^2, matching the gradient the flow
  // integrates
  const ProblemInstance eye2(Mat::identity(2), 0.0, 0.5);
  const Vec zero2(2, 0.0);

  CHECK(lasso_objective(Vec{1.0, 1.0}, eye2, zero2, 1.0) == doctest::Approx(3.0));

  const Vec y{2.0, -1.0};
  CHECK(lasso_objective(zero2, eye2, y, 1.0) ==
        doctest::Approx(0.5 * (4.0 + 1.0)));

  // lambda = 0 leaves half the pure least-squares error
  const ProblemInstance inst = random_instance(3, 4, 6);
  RngStream rng(3, 1);
  Vec x(6);
  for (double& v : x) v = rng.normal();
  Vec yy(4);
  for (double& v : yy) v = rng.normal();
  const Vec ax = matvec(inst.a(), x);
  CHECK(lasso_objective(x, inst, yy, 0.0) ==
        doctest::Approx(0.5 * squared_error(ax, yy)).epsilon(1e-14));

  CHECK_THROWS_AS(lasso_objective(Vec{1.0}, eye2, zero2, 1.0), std::invalid_argument);
}

TEST_CASE("smooth energy values and relation to the lasso objective") {
  const SmoothLassoParams params(2.0, 50.0);
  const ProblemInstance eye3(Mat::identity(3), 0.0, 0.5);
  const Vec zero3(3, 0.0);
  CHECK(smooth_energy(zero3, eye3, zero3, params) ==
        doctest::Approx(2.0 * 3.0 * std::log(2.0) / 50.0).epsilon(1e-14));

  // tight once every component is bounded away from zero
  const ProblemInstance inst = random_instance(5, 6, 9);
  RngStream rng(5, 7);
  Vec y(6);
  for (double& v : y) v = rng.normal();
  Vec x(9);
  for (double& v : x) v = (0.5 + rng.uniform()) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
  const double f = lasso_objective(x, inst, y, params.lambda);
  const double g = smooth_energy(x, inst, y, params);
  CHECK(std::fabs(g - f) <= params.lambda * 9.0 * 1e-12);

  // g >= f everywhere
  for (int i = 0; i < 1000; ++i) {
    for (double& v : x) v = 2.0 * rng.normal();
    CHECK(smooth_energy(x, inst, y, params) >=
          lasso_objective(x, inst, y, params.lambda));
  }
}

TEST_CASE("smooth energy is convex along segments") {
  const ProblemInstance inst = random_instance(6, 5, 8);
  const SmoothLassoParams params(1.5, 30.0);
  RngStream rng(6, 1);
  Vec y(5);
  for (double& v : y) v = rng.normal();
  for (int rep = 0; rep < 200; ++rep) {
    Vec a(8);
    Vec b(8);
    Vec mid(8);
    for (std::size_t i = 0; i < 8; ++i) {
      a[i] = 2.0 * rng.normal();
      b[i] = 2.0 * rng.normal();
      mid[i] = 0.5 * (a[i] + b[i]);
    }
    const double lhs = smooth_energy(mid, inst, y, params);
    const double rhs = 0.5 * (smooth_energy(a, inst, y, params) +
                              smooth_energy(b, inst, y, params));
    CHECK(lhs <= rhs + 1e-10);
  }
}

TEST_CASE("gradient at zero is -a^T y") {
  const ProblemInstance inst = random_instance(7, 4, 6);
  const SmoothLassoParams params(1.0, 50.0);
  RngStream rng(7, 1);
  Vec y(4);
  for (double& v : y) v = rng.normal();
  const Vec g = smooth_energy_grad(Vec(6, 0.0), inst, y, params);
  const Vec aty = matvec_transposed(inst.a(), y);
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(g[i] == doctest::Approx(-aty[i]).epsilon(1e-14));
}

TEST_CASE("gradient matches central finite differences") {
  RngStream rng(8, 0);
  for (int rep = 0; rep < 5; ++rep) {
    const ProblemInstance inst = random_instance(80 + rep, 8, 12);
    const SmoothLassoParams params(0.5 + 2.0 * rng.uniform(), 5.0 + 45.0 * rng.uniform());
    Vec y(8);
    for (double& v : y) v = rng.normal();
    Vec x(12);
    for (double& v : x) v = rng.normal();

    const Vec g = smooth_energy_grad(x, inst, y, params);
    const double h = 1e-6;
    for (std::size_t i = 0; i < x.size(); ++i) {
      Vec xp = x;
      Vec xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (smooth_energy(xp, inst, y, params) -
                         smooth_energy(xm, inst, y, params)) /
                        (2.0 * h);
      const double denom = std::max({std::fabs(fd), std::fabs(g[i]), 1e-6});
      CHECK(std::fabs(g[i] - fd) / denom <= 1e-5);
    }
  }
}

TEST_CASE("scalar equilibrium point zeroes the gradient") {
  const ProblemInstance inst = scalar_instance();
  const SmoothLassoParams params(1.0, 50.0);
  const Vec y{2.0};
  const Vec g = smooth_energy_grad(Vec{1.0}, inst, y, params);
  CHECK(std::fabs(g[0]) <= 1e-12);
  CHECK(equilibrium_residual(Vec{1.0}, inst, y, params) <= 1e-12);
}

TEST_CASE("equilibrium residual away from stationarity") {
  const ProblemInstance inst = random_instance(9, 4, 6);
  const SmoothLassoParams params(1.0, 50.0);
  RngStream rng(9, 1);
  Vec y(4);
  for (double& v : y) v = rng.normal();
  const double r = equilibrium_residual(Vec(6, 0.0), inst, y, params);
  CHECK(r == doctest::Approx(norm2(matvec_transposed(inst.a(), y))).epsilon(1e-12));
  CHECK(r > 0.0);
}

TEST_CASE("tanh jacobian diagonal") {
  const Vec at_zero = tanh_jacobian_diag(Vec(5, 0.0), 7.5);
  for (double v : at_zero) CHECK(v == doctest::Approx(7.5).epsilon(1e-14));

  const Vec saturated = tanh_jacobian_diag(Vec{1.0}, 50.0);
  CHECK(saturated[0] > 0.0);
  CHECK(saturated[0] <= 1e-41);
  CHECK(saturated[0] ==
        doctest::Approx(50.0 / std::pow(std::cosh(50.0), 2)).epsilon(1e-12));

  // finite differences of tanh(alpha x) at x = 0.01
  const double alpha = 50.0;
  const double x = 0.01;
  const double h = 1e-7;
  const double fd = (std::tanh(alpha * (x + h)) - std::tanh(alpha * (x - h))) / (2.0 * h);
  const Vec d = tanh_jacobian_diag(Vec{x}, alpha);
  CHECK(std::fabs(d[0] - fd) / std::fabs(fd) <= 1e-5);

  // strictly positive over the whole range doubles can express the value on
  // (alpha |x| beyond ~370 underflows; equilibria live well below that)
  RngStream rng(10, 0);
  for (int i = 0; i < 200; ++i) {
    const Vec dd = tanh_jacobian_diag(Vec{12.0 * (rng.uniform() - 0.5)}, 50.0);
    CHECK(dd[0] > 0.0);
  }

  CHECK_THROWS_AS(tanh_jacobian_diag(Vec{1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("params reject nonpositive values") {
  CHECK_THROWS_AS(SmoothLassoParams(0.0, 50.0), std::invalid_argument);
  CHECK_THROWS_AS(SmoothLassoParams(-1.0, 50.0), std::invalid_argument);
  CHECK_THROWS_AS(SmoothLassoParams(1.0, 0.0), std::invalid_argument);
}
