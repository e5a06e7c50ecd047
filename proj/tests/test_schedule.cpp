#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lassoflow/io.hpp"
#include "lassoflow/rng.hpp"
#include "lassoflow/schedule.hpp"

using namespace lassoflow;

TEST_CASE("constant schedules return their value everywhere") {
  const Schedule s = Schedule::constant(5.0);
  CHECK(s.is_constant());
  for (double t : {-1.0, 0.0, 0.5, 100.0}) CHECK(s.eval(t) == 5.0);
  CHECK_THROWS_AS(Schedule::constant(std::nan("")), std::invalid_argument);
}

TEST_CASE("single bump evaluation") {
  const RBFSchedule s(Vec{1.0}, Vec{0.0}, 20.0);
  CHECK(s.eval(0.0) == doctest::Approx(1.0));
  CHECK(s.eval(0.1) == doctest::Approx(std::exp(-0.2)).epsilon(1e-14));
  CHECK(s.eval(0.1) == doctest::Approx(0.81873).epsilon(1e-4));
}

TEST_CASE("center grid construction") {
  const Vec c = make_centers(20, 0.25, 0.5);
  REQUIRE(c.size() == 20);
  CHECK(c.front() == doctest::Approx(-0.25));
  CHECK(c[1] == doctest::Approx(0.0));
  CHECK(c[2] == doctest::Approx(0.25));
  CHECK(c.back() == doctest::Approx(4.5));

  const Vec demo = make_centers(50, 0.05, 0.55);
  CHECK(demo.front() == doctest::Approx(-0.5));

  const Vec single = make_centers(1, 0.3, 0.1);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == doctest::Approx(0.2));
}

TEST_CASE("basis values and the dot-product identity") {
  const Vec centers = make_centers(6, 0.2, 0.3);
  RngStream rng(4, 0);
  Vec w(6);
  for (double& v : w) v = rng.normal();
  const RBFSchedule s(w, centers, 20.0);

  for (std::size_t j = 0; j < centers.size(); ++j) {
    const Vec b = s.basis(centers[j]);
    CHECK(b[j] == doctest::Approx(1.0));
  }

  for (int i = 0; i < 100; ++i) {
    const double t = 3.0 * rng.uniform() - 0.5;
    const Vec b = s.basis(t);
    double acc = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) acc += w[j] * b[j];
    CHECK(std::fabs(acc - s.eval(t)) <= 1e-14 * (1.0 + std::fabs(acc)));
  }

  // finite differences of eval with respect to a weight recover the basis
  const double h = 1e-6;
  for (std::size_t j = 0; j < w.size(); ++j) {
    Vec wp = w;
    Vec wm = w;
    wp[j] += h;
    wm[j] -= h;
    const double t = 0.37;
    const double fd = (s.with_weights(wp).eval(t) - s.with_weights(wm).eval(t)) / (2.0 * h);
    CHECK(std::fabs(fd - s.basis(t)[j]) <= 1e-8);
  }
}

TEST_CASE("evaluation is linear in the weights") {
  const Vec centers = make_centers(5, 0.25, 0.5);
  RngStream rng(5, 0);
  Vec w1(5);
  Vec w2(5);
  Vec sum(5);
  for (std::size_t i = 0; i < 5; ++i) {
    w1[i] = rng.normal();
    w2[i] = rng.normal();
    sum[i] = w1[i] + w2[i];
  }
  const RBFSchedule a(w1, centers, 20.0);
  const RBFSchedule b(w2, centers, 20.0);
  const RBFSchedule c(sum, centers, 20.0);
  for (int i = 0; i < 50; ++i) {
    const double t = 2.0 * rng.uniform();
    CHECK(std::fabs(a.eval(t) + b.eval(t) - c.eval(t)) <= 1e-12);
  }

  const RBFSchedule zeros(Vec(5, 0.0), centers, 20.0);
  for (double t : {-0.3, 0.0, 0.8, 2.5}) CHECK(zeros.eval(t) == 0.0);
}

TEST_CASE("bump decay bound") {
  const RBFSchedule s(Vec{1.0}, Vec{0.0}, 20.0);
  for (double d : {0.3, 0.5, 1.0, 2.0}) {
    const Vec b = s.basis(d);
    CHECK(b[0] <= std::exp(-20.0 * d * d) + 1e-15);
  }
}

TEST_CASE("construction validates invariants") {
  CHECK_THROWS_AS(RBFSchedule(Vec{1.0, 2.0}, Vec{0.0}, 20.0), std::invalid_argument);
  CHECK_THROWS_AS(RBFSchedule(Vec{1.0, 2.0}, Vec{0.5, 0.25}, 20.0), std::invalid_argument);
  CHECK_THROWS_AS(RBFSchedule(Vec{1.0, 2.0}, Vec{0.25, 0.25}, 20.0), std::invalid_argument);
  CHECK_THROWS_AS(RBFSchedule(Vec{1.0}, Vec{0.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(RBFSchedule(Vec{}, Vec{}, 20.0), std::invalid_argument);
}

TEST_CASE("schedule serialization round trip") {
  RngStream rng(6, 0);
  Vec w(8);
  for (double& v : w) v = rng.normal();
  const RBFSchedule s(w, make_centers(8, 0.25, 0.5), 20.0);
  const std::string path = "test_schedule_roundtrip.txt";
  save_schedule(s, path);
  const RBFSchedule loaded = load_schedule(path);
  std::remove(path.c_str());

  CHECK(loaded.beta() == s.beta());
  REQUIRE(loaded.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(loaded.centers()[i] == s.centers()[i]);
    CHECK(loaded.weights()[i] == s.weights()[i]);
  }

  CHECK_THROWS_AS(load_schedule("missing_schedule_98765.txt"), std::runtime_error);
}

TEST_CASE("sampled schedule csv has the expected shape") {
  const std::string path = "test_schedule_curve.csv";
  io::write_schedule_curve_csv(Schedule::constant(2.5), 0.2, 0.1, path);
  std::ifstream in(path);
  std::stringstream content;
  content << in.rdbuf();
  in.close();
  std::remove(path.c_str());
  CHECK(content.str() ==
        "t,lambda\n0,2.5\n0.10000000000000001,2.5\n0.20000000000000001,2.5\n");
}
