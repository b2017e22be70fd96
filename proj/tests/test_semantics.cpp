#include <doctest.h>

#include <carol/rng.hpp>
#include <carol/semantics.hpp>

#include "test_support.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

using namespace carol;
using carol::test::planar;

// ---------------------------------------------------------------------------
// entailment_score
// ---------------------------------------------------------------------------

TEST_CASE("entailment_score matches hand arithmetic") {
  Eigen::Vector2d a(1.0, 0.0);
  Eigen::Vector2d b(3.0, 4.0);
  // <a,b> / ||b|| = 3 / 5
  CHECK(entailment_score(a, b) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("entailment_score is asymmetric by design") {
  Eigen::Vector2d a(2.0, 0.0);
  Eigen::Vector2d b(0.5, 0.0);
  CHECK(entailment_score(a, b) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(entailment_score(b, a) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("entailment_score equals cosine for unit-norm inputs") {
  Eigen::VectorXd a = planar(0.0);
  Eigen::VectorXd b = planar(60.0);
  CHECK(entailment_score(a, b) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("entailment_score input validation") {
  // Dynamic vectors: the size mismatch must surface as a runtime InputError.
  Eigen::VectorXd a(2), c(3), zero(2), empty;
  a << 1.0, 0.0;
  c << 1.0, 0.0, 0.0;
  zero << 0.0, 0.0;
  CHECK_THROWS_AS(entailment_score(a, c), InputError);
  CHECK_THROWS_AS(entailment_score(empty, empty), InputError);
  CHECK_THROWS_AS(entailment_score(a, zero), DegenerateInputError);
}

// ---------------------------------------------------------------------------
// entailment_distance
// ---------------------------------------------------------------------------

TEST_CASE("entailment_distance hand values on the unit circle") {
  // Exact coordinates (no trig): the orthogonal and antipodal cases are
  // exact in floating point.
  Eigen::VectorXd e0 = carol::test::vec2(1.0, 0.0);
  Eigen::VectorXd e90 = carol::test::vec2(0.0, 1.0);
  Eigen::VectorXd e180 = carol::test::vec2(-1.0, 0.0);

  CHECK(entailment_distance(e0, e0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(entailment_distance(e0, e0) >= 0.0);  // clamp floor holds
  // Orthogonal vectors: dot product is exactly zero, so distance is exactly 1.
  CHECK(entailment_distance(e0, e90) == 1.0);
  CHECK(entailment_distance(e0, e180) == 2.0);
  CHECK(entailment_distance(e0, e180) <= kMaxEntailmentDistance);
}

TEST_CASE("entailment_distance is scale invariant and symmetric") {
  Eigen::Vector2d a(0.3, 0.4);
  Eigen::Vector2d a_scaled = 7.5 * a;
  Eigen::Vector2d b(-1.0, 2.0);
  CHECK(entailment_distance(a, b) ==
        doctest::Approx(entailment_distance(a_scaled, b)).epsilon(1e-12));
  // Cosine is symmetric, so the distance is too (identical arithmetic).
  CHECK(entailment_distance(a, b) == entailment_distance(b, a));
}

TEST_CASE("entailment_distance stays in [0, 2]") {
  Rng rng(7, 0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd a(4), b(4);
    for (int i = 0; i < 4; ++i) {
      a(i) = rng.uniform01() * 2.0 - 1.0;
      b(i) = rng.uniform01() * 2.0 - 1.0;
    }
    if (a.norm() == 0.0 || b.norm() == 0.0) continue;
    const double d = entailment_distance(a, b);
    CHECK(d >= 0.0);
    CHECK(d <= kMaxEntailmentDistance);
  }
}

TEST_CASE("entailment_distance input validation") {
  Eigen::VectorXd a(2), c(3), zero(2);
  a << 1.0, 0.0;
  c << 1.0, 0.0, 0.0;
  zero << 0.0, 0.0;
  CHECK_THROWS_AS(entailment_distance(a, c), InputError);
  CHECK_THROWS_AS(entailment_distance(a, zero), DegenerateInputError);
  CHECK_THROWS_AS(entailment_distance(zero, a), DegenerateInputError);
}

// ---------------------------------------------------------------------------
// softmax
// ---------------------------------------------------------------------------

TEST_CASE("softmax worked example pins the first coordinate") {
  Eigen::Vector4d logits(2.0, 1.0, 0.5, -1.0);
  Eigen::VectorXd p = softmax(logits);
  // Independently computed: e^2 / (e^2 + e^1 + e^0.5 + e^-1).
  CHECK(p(0) == doctest::Approx(0.609460037598877).epsilon(1e-12));
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("softmax agrees with the naive formula on generic input") {
  Eigen::VectorXd logits(5);
  logits << 0.3, -1.2, 2.7, 0.0, 1.1;
  Eigen::VectorXd p = softmax(logits);
  double denom = 0.0;
  for (int i = 0; i < logits.size(); ++i) denom += std::exp(logits(i));
  for (int i = 0; i < logits.size(); ++i) {
    CHECK(p(i) == doctest::Approx(std::exp(logits(i)) / denom).epsilon(1e-12));
  }
}

TEST_CASE("softmax handles extreme logits without overflow") {
  Eigen::Vector2d logits(1e308, 0.0);
  Eigen::VectorXd p = softmax(logits);
  CHECK(std::isfinite(p(0)));
  CHECK(p(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p(1) == doctest::Approx(0.0).epsilon(1e-12));

  Eigen::Vector2d lo(-1e308, -1e308);
  Eigen::VectorXd q = softmax(lo);
  CHECK(q(0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("softmax is invariant under a constant shift") {
  Eigen::Vector3d logits(0.2, -0.7, 1.4);
  Eigen::Vector3d shifted = logits.array() + 123.0;
  Eigen::VectorXd p = softmax(logits);
  Eigen::VectorXd q = softmax(shifted);
  for (int i = 0; i < 3; ++i) CHECK(p(i) == doctest::Approx(q(i)).epsilon(1e-12));
}

TEST_CASE("softmax degenerate and invalid inputs") {
  Eigen::VectorXd one(1);
  one << 42.0;
  Eigen::VectorXd p = softmax(one);
  CHECK(p.size() == 1);
  CHECK(p(0) == 1.0);

  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(4, 3.0);
  Eigen::VectorXd u = softmax(uniform);
  for (int i = 0; i < 4; ++i) CHECK(u(i) == doctest::Approx(0.25).epsilon(1e-15));

  Eigen::VectorXd empty;
  CHECK_THROWS_AS(softmax(empty), InputError);
  Eigen::Vector2d with_nan(0.0, std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(softmax(with_nan), InputError);
}

// ---------------------------------------------------------------------------
// shannon_entropy / perplexity
// ---------------------------------------------------------------------------

TEST_CASE("shannon_entropy of uniform and one-hot distributions") {
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(8, 1.0 / 8.0);
  CHECK(shannon_entropy(uniform) == doctest::Approx(std::log(8.0)).epsilon(1e-12));

  Eigen::Vector4d onehot(0.0, 1.0, 0.0, 0.0);
  CHECK(shannon_entropy(onehot) == 0.0);  // 0 * ln 0 contributes exactly nothing
}

TEST_CASE("shannon_entropy applies the 0 ln 0 convention") {
  Eigen::Vector3d p(0.5, 0.5, 0.0);
  CHECK(shannon_entropy(p) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("shannon_entropy validates its input") {
  Eigen::Vector2d not_normalized(0.5, 0.6);
  CHECK_THROWS_AS(shannon_entropy(not_normalized), InputError);
  Eigen::Vector2d negative(1.2, -0.2);
  CHECK_THROWS_AS(shannon_entropy(negative), InputError);
  Eigen::Vector2d with_nan(1.0, std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(shannon_entropy(with_nan), InputError);
  Eigen::VectorXd empty;
  CHECK_THROWS_AS(shannon_entropy(empty), InputError);
}

TEST_CASE("perplexity is exp of entropy") {
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(8, 1.0 / 8.0);
  CHECK(perplexity(uniform) == doctest::Approx(8.0).epsilon(1e-12));
  Eigen::Vector4d onehot(1.0, 0.0, 0.0, 0.0);
  CHECK(perplexity(onehot) == doctest::Approx(1.0).epsilon(1e-15));
}
