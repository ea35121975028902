#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "otb/errors.hpp"
#include "otb/metric_space.hpp"
#include "test_support.hpp"

using otb::FiniteMetricSpace;
using otb::ValidationError;

namespace {

Eigen::MatrixXd two_point(double d) {
  Eigen::MatrixXd m(2, 2);
  m << 0.0, d, d, 0.0;
  return m;
}

}  // namespace

TEST_CASE("metric space accepts a valid distance matrix") {
  const FiniteMetricSpace space({"a", "b"}, two_point(2.5));
  CHECK(space.size() == 2);
  CHECK(space.label(0) == "a");
  CHECK(space.label(1) == "b");
  CHECK(space.dist(0, 1) == 2.5);
  CHECK(space.dist(1, 0) == 2.5);
  CHECK(space.diameter() == 2.5);
}

TEST_CASE("metric space rejects malformed input") {
  SUBCASE("no points") {
    CHECK_THROWS_AS(FiniteMetricSpace({}, Eigen::MatrixXd()), ValidationError);
  }
  SUBCASE("label count differs from matrix size") {
    CHECK_THROWS_AS(FiniteMetricSpace({"a"}, two_point(1.0)), ValidationError);
  }
  SUBCASE("non-square matrix") {
    CHECK_THROWS_AS(FiniteMetricSpace({"a", "b"}, Eigen::MatrixXd::Zero(2, 3)),
                    ValidationError);
  }
  SUBCASE("duplicate labels") {
    CHECK_THROWS_AS(FiniteMetricSpace({"a", "a"}, two_point(1.0)), ValidationError);
  }
  SUBCASE("nonzero diagonal") {
    Eigen::MatrixXd m = two_point(1.0);
    m(0, 0) = 1e-6;
    CHECK_THROWS_AS(FiniteMetricSpace({"a", "b"}, m), ValidationError);
  }
  SUBCASE("zero off-diagonal distance") {
    CHECK_THROWS_AS(FiniteMetricSpace({"a", "b"}, two_point(0.0)), ValidationError);
  }
  SUBCASE("negative distance") {
    CHECK_THROWS_AS(FiniteMetricSpace({"a", "b"}, two_point(-1.0)), ValidationError);
  }
  SUBCASE("non-finite distance") {
    CHECK_THROWS_AS(
        FiniteMetricSpace({"a", "b"}, two_point(std::numeric_limits<double>::infinity())),
        ValidationError);
  }
  SUBCASE("asymmetry") {
    Eigen::MatrixXd m = two_point(1.0);
    m(0, 1) = 1.0 + 1e-15;  // any bitwise difference counts
    CHECK_THROWS_AS(FiniteMetricSpace({"a", "b"}, m), ValidationError);
  }
  SUBCASE("triangle inequality violation") {
    Eigen::MatrixXd m(3, 3);
    m << 0.0, 1.0, 5.0,  //
        1.0, 0.0, 1.0,   //
        5.0, 1.0, 0.0;   // d(0,2) = 5 > 1 + 1 = d(0,1) + d(1,2)
    CHECK_THROWS_AS(FiniteMetricSpace({"a", "b", "c"}, m), ValidationError);
  }
}

TEST_CASE("triangle check tolerates rounding-level slack") {
  Eigen::MatrixXd m(3, 3);
  const double eps = 5e-13;  // below the 1e-12 validation tolerance
  m << 0.0, 1.0, 2.0 + eps,  //
      1.0, 0.0, 1.0,         //
      2.0 + eps, 1.0, 0.0;
  CHECK_NOTHROW(FiniteMetricSpace({"a", "b", "c"}, m));
}

TEST_CASE("single-point space has diameter zero") {
  const FiniteMetricSpace space({"only"}, Eigen::MatrixXd::Zero(1, 1));
  CHECK(space.size() == 1);
  CHECK(space.diameter() == 0.0);
}

TEST_CASE("structural equality compares labels and distances bitwise") {
  const FiniteMetricSpace a({"x", "y"}, two_point(1.0));
  const FiniteMetricSpace same({"x", "y"}, two_point(1.0));
  const FiniteMetricSpace other_label({"x", "z"}, two_point(1.0));
  const FiniteMetricSpace other_dist({"x", "y"}, two_point(1.0 + 1e-15));
  CHECK(a.same_as(a));
  CHECK(a.same_as(same));
  CHECK_FALSE(a.same_as(other_label));
  CHECK_FALSE(a.same_as(other_dist));
  const FiniteMetricSpace bigger({"x", "y", "z"}, [] {
    Eigen::MatrixXd m(3, 3);
    m << 0, 1, 2, 1, 0, 1, 2, 1, 0;
    return m;
  }());
  CHECK_FALSE(a.same_as(bigger));
}

TEST_CASE("line space helper builds absolute-difference distances") {
  const otb::SpacePtr space = otb::make_line_space({0.0, 0.5, 2.0}, "v");
  CHECK(space->size() == 3);
  CHECK(space->label(0) == "v0");
  CHECK(space->label(2) == "v2");
  CHECK(space->dist(0, 1) == 0.5);
  CHECK(space->dist(0, 2) == 2.0);
  CHECK(space->dist(1, 2) == 1.5);
  CHECK(space->diameter() == 2.0);
  SUBCASE("duplicate positions are rejected") {
    CHECK_THROWS_AS(otb::make_line_space({0.0, 1.0, 1.0}), ValidationError);
  }
}

TEST_CASE("random planar spaces pass construction") {
  // Euclidean point clouds satisfy the axioms up to rounding; construction
  // must accept them without triangle-tolerance false alarms.
  std::mt19937_64 rng(7101);
  for (int rep = 0; rep < 50; ++rep) {
    const otb::SpacePtr space = otbtest::random_planar_space(rng, 2 + rep % 7);
    CHECK(space->diameter() > 0.0);
    CHECK(space->diameter() <= std::sqrt(2.0) + 1e-12);
  }
}
