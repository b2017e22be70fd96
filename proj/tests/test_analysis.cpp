#include <doctest.h>

#include <carol/analysis.hpp>
#include <carol/chain.hpp>
#include <carol/objective.hpp>

#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

using namespace carol;

namespace {

CandidatePool data_pool(const std::string& name) {
  Embedder emb = carol::test::default_embedder();
  return load_pool(std::string(CAROL_DATA_DIR) + "/" + name, emb);
}

bool has_note(const std::vector<std::string>& notes, const std::string& needle) {
  for (const auto& n : notes) {
    if (n.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// curvature
// ---------------------------------------------------------------------------

TEST_CASE("curvature vanishes exactly at beta zero") {
  Context ctx = carol::test::fixture_context();
  CandidatePool pool = data_pool("pool_small4.jsonl");
  CHECK(curvature(ctx, pool, 0.0) == 0.0);
}

TEST_CASE("curvature matches an independent triple-loop oracle") {
  Context ctx = carol::test::fixture_context();
  CandidatePool pool = data_pool("pool_small4.jsonl");
  const double beta = 1.0;

  const double got = curvature(ctx, pool, beta);

  // Recompute from the subset objective table with independently written
  // loops: max over states S and candidates j ∉ S of
  // sum over ALL i of tanh((beta/2) |dF(i|S) - dF(i|S∪j)|).  The sum has
  // no exclusions: i ∈ S contributes zero (both gains vanish) and i == j
  // contributes tanh((beta/2)|dF(j|S)|) since the gain at S∪{j} is zero.
  auto f = mutual_info_over_subsets(ctx, pool.candidates, beta);
  const int n = static_cast<int>(pool.size());
  double expected = 0.0;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    for (int j = 0; j < n; ++j) {
      const std::uint32_t jbit = 1u << j;
      if (s & jbit) continue;
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        const std::uint32_t ibit = 1u << i;
        const double gain_s = f[(s | ibit)] - f[s];
        const double gain_sj = f[(s | jbit) | ibit] - f[s | jbit];
        sum += std::tanh(0.5 * beta * std::abs(gain_s - gain_sj));
      }
      expected = std::max(expected, sum);
    }
  }
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));

  // The table-driven entry point computes the identical quantity.
  CHECK(curvature_from_table(f, n, beta) == got);
}

TEST_CASE("curvature validation") {
  Context ctx = carol::test::fixture_context();
  CandidatePool pool = data_pool("pool_small4.jsonl");
  CHECK_THROWS_AS(curvature(ctx, pool, -1.0), InputError);
  CHECK_THROWS_AS(
      curvature(ctx, pool, std::numeric_limits<double>::quiet_NaN()), InputError);

  Embedder emb = carol::test::default_embedder();
  std::vector<std::string> many;
  for (int i = 0; i < 13; ++i) many.push_back("filler statement number " + std::to_string(i));
  CandidatePool big = make_pool(many, emb);
  CHECK_THROWS_AS(curvature(ctx, big, 1.0), InputError);

  std::vector<Scalar> table = {0.0, 0.1, 0.1, 0.3};
  CHECK_THROWS_AS(curvature_from_table(table, 3, 1.0), InputError);  // size != 2^n
  CHECK_THROWS_AS(curvature_from_table(table, 0, 1.0), InputError);
}

// ---------------------------------------------------------------------------
// mixing_bound
// ---------------------------------------------------------------------------

TEST_CASE("mixing_bound reproduces the hand-computed value") {
  // gamma_bar=0, q=1/4 uniform, n=4, eps=0.05:
  // statement form: 4 * (ln 4 + ln 20) / 0.25 = 70.112426...
  MixingReport r = mixing_bound(0.0, 0.25, 0.25, 4, 0.05);
  REQUIRE(r.denominator_positive);
  REQUIRE(r.tau_theorem.has_value());
  CHECK(*r.tau_theorem == doctest::Approx(70.112426154782).epsilon(1e-9));
  CHECK(r.bound_variant == "theorem-statement");
  CHECK(r.gamma_bar == 0.0);
  CHECK(r.n == 4);

  // The coupling derivation omits the leading n.
  MixingReport c = mixing_bound(0.0, 0.25, 0.25, 4, 0.05, BoundVariant::CouplingDerivation);
  REQUIRE(c.tau_theorem.has_value());
  CHECK(*c.tau_theorem == doctest::Approx(17.528106538696).epsilon(1e-9));
  CHECK(c.bound_variant == "coupling-derivation");
  CHECK(*r.tau_theorem == doctest::Approx(4.0 * *c.tau_theorem).epsilon(1e-12));

  // Both reports carry the variant-discrepancy note.
  CHECK(has_note(r.notes, "leading n"));
  CHECK(has_note(c.notes, "leading n"));
}

TEST_CASE("mixing_bound positivity condition") {
  // gamma_bar = q_min/q_max exactly: the denominator is zero, the bound
  // vacuous.
  MixingReport r = mixing_bound(1.0, 0.25, 0.25, 4, 0.05);
  CHECK_FALSE(r.denominator_positive);
  CHECK_FALSE(r.tau_theorem.has_value());
  CHECK(has_note(r.notes, "vacuous"));

  MixingReport above = mixing_bound(2.0, 0.2, 0.3, 5, 0.1);
  CHECK_FALSE(above.denominator_positive);

  MixingReport below = mixing_bound(0.5, 0.25, 0.25, 4, 0.05);
  CHECK(below.denominator_positive);
  REQUIRE(below.tau_theorem.has_value());
  // Denominator 0.25 - 0.25*0.5 = 0.125: twice the gamma=0 budget.
  CHECK(*below.tau_theorem == doctest::Approx(2 * 70.112426154782).epsilon(1e-9));
}

TEST_CASE("mixing_bound validation") {
  CHECK_THROWS_AS(mixing_bound(-0.1, 0.25, 0.25, 4, 0.05), InputError);
  CHECK_THROWS_AS(mixing_bound(0.0, 0.0, 0.25, 4, 0.05), InputError);
  CHECK_THROWS_AS(mixing_bound(0.0, 0.5, 0.25, 4, 0.05), InputError);   // min > max
  CHECK_THROWS_AS(mixing_bound(0.0, 0.25, 1.5, 4, 0.05), InputError);   // q_max > 1
  CHECK_THROWS_AS(mixing_bound(0.0, 0.25, 0.25, 0, 0.05), InputError);
  CHECK_THROWS_AS(mixing_bound(0.0, 0.25, 0.25, 4, 0.0), InputError);
  CHECK_THROWS_AS(mixing_bound(0.0, 0.25, 0.25, 4, 1.0), InputError);
}

// ---------------------------------------------------------------------------
// robust bound
// ---------------------------------------------------------------------------

TEST_CASE("robust bound at zero perturbation is bit-identical to the base") {
  RobustBoundInput in;
  in.gamma_star = 0.3;
  in.beta = 0.7;
  in.m = 6;
  in.eta_gamma = 0.0;
  MixingReport robust = robust_mixing_bound(in, 0.125, 0.25, 6, 0.05);
  MixingReport base = mixing_bound(0.3, 0.125, 0.25, 6, 0.05);
  CHECK(robust.gamma_bar == base.gamma_bar);
  CHECK(robust.denominator_positive == base.denominator_positive);
  REQUIRE(robust.tau_theorem.has_value() == base.tau_theorem.has_value());
  if (base.tau_theorem) {
    CHECK(*robust.tau_theorem == *base.tau_theorem);  // bitwise
  }
  CHECK(robust.notes.size() == base.notes.size());  // no perturbation note
}

TEST_CASE("positive perturbation inflates curvature as gamma + 2*beta*m*eta") {
  RobustBoundInput in;
  in.gamma_star = 0.1;
  in.beta = 0.5;
  in.m = 4;
  in.eta_gamma = 0.01;
  MixingReport robust = robust_mixing_bound(in, 0.25, 0.25, 4, 0.05);
  CHECK(robust.gamma_bar == 0.1 + 2 * 0.5 * 4 * 0.01);
  CHECK(has_note(robust.notes, "gamma_hat"));

  MixingReport base = mixing_bound(robust.gamma_bar, 0.25, 0.25, 4, 0.05);
  REQUIRE(robust.tau_theorem.has_value());
  REQUIRE(base.tau_theorem.has_value());
  CHECK(*robust.tau_theorem == *base.tau_theorem);
}

TEST_CASE("robust bound validation") {
  RobustBoundInput in;
  in.gamma_star = 0.1;
  in.beta = 0.5;
  in.m = 0;  // must be >= 1
  in.eta_gamma = 0.01;
  CHECK_THROWS_AS(robust_mixing_bound(in, 0.25, 0.25, 4, 0.05), InputError);
  in.m = 4;
  in.eta_gamma = -0.01;
  CHECK_THROWS_AS(robust_mixing_bound(in, 0.25, 0.25, 4, 0.05), InputError);
  in.eta_gamma = 0.01;
  in.gamma_star = -1.0;
  CHECK_THROWS_AS(robust_mixing_bound(in, 0.25, 0.25, 4, 0.05), InputError);
}

// ---------------------------------------------------------------------------
// stationary enumeration / objective table
// ---------------------------------------------------------------------------

TEST_CASE("subset_objective_table matches mutual information per mask") {
  Context ctx = carol::test::fixture_context();
  CandidatePool pool = data_pool("pool_small4.jsonl");
  const double beta = 1.0;
  auto table = subset_objective_table(ctx, pool, beta);
  auto direct = mutual_info_over_subsets(ctx, pool.candidates, beta);
  REQUIRE(table.size() == 16);
  REQUIRE(direct.size() == 16);
  for (std::size_t m = 0; m < table.size(); ++m) CHECK(table[m] == direct[m]);
  CHECK(table[0] == 0.0);

  auto zero = subset_objective_table(ctx, pool, 0.0);
  for (double v : zero) CHECK(v == 0.0);
}

TEST_CASE("enumerate_stationary at beta zero is exactly uniform") {
  Context ctx = carol::test::fixture_context();
  CandidatePool pool = data_pool("pool_small4.jsonl");
  auto pi = enumerate_stationary(ctx, pool, 0.0);
  REQUIRE(pi.size() == 16);
  for (double p : pi) CHECK(p == 1.0 / 16.0);  // power-of-two division is exact
}

TEST_CASE("enumerate_stationary matches direct Gibbs weights") {
  Context ctx = carol::test::fixture_context();
  CandidatePool pool = data_pool("pool_small4.jsonl");
  const double beta = 1.3;
  auto pi = enumerate_stationary(ctx, pool, beta);
  auto f = mutual_info_over_subsets(ctx, pool.candidates, beta);

  // Independent normalization without the max-shift trick.
  double total = 0.0;
  for (double v : f) total += std::exp(beta * v);
  double sum = 0.0;
  for (std::size_t m = 0; m < pi.size(); ++m) {
    CHECK(pi[m] == doctest::Approx(std::exp(beta * f[m]) / total).epsilon(1e-12));
    sum += pi[m];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

// ---------------------------------------------------------------------------
// schedules and TV distance
// ---------------------------------------------------------------------------

TEST_CASE("checkpoint_schedule doubles and always ends at max_steps") {
  CHECK(checkpoint_schedule(1) == std::vector<int>{1});
  CHECK(checkpoint_schedule(8) == std::vector<int>{1, 2, 4, 8});
  CHECK(checkpoint_schedule(10) == std::vector<int>{1, 2, 4, 8, 10});
  CHECK(checkpoint_schedule(512) ==
        std::vector<int>{1, 2, 4, 8, 16, 32, 64, 128, 256, 512});
  CHECK_THROWS_AS(checkpoint_schedule(0), InputError);
}

TEST_CASE("tv_distance hand values") {
  CHECK(tv_distance({1.0, 0.0}, {0.0, 1.0}) == 1.0);
  CHECK(tv_distance({0.5, 0.5}, {0.5, 0.5}) == 0.0);
  CHECK(tv_distance({0.7, 0.3}, {0.4, 0.6}) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(tv_distance({0.5, 0.5}, {1.0}), InputError);
}

// ---------------------------------------------------------------------------
// empirical mixing
// ---------------------------------------------------------------------------

TEST_CASE("empirical_mixing converges fast on the free chain") {
  Context ctx = carol::test::fixture_context();
  CandidatePool pool = data_pool("pool_small4.jsonl");
  // 10k replicas keep the TV estimation floor (~4/sqrt(R)) safely under the
  // 0.05 target.
  MixingReport r = empirical_mixing(ctx, pool, 0.0, 0.05, 128, 10000, /*seed=*/1);

  CHECK(r.n == 4);
  CHECK(r.q_min == 0.25);
  CHECK(r.q_max == 0.25);
  CHECK(r.gamma_bar == 0.0);
  REQUIRE(r.denominator_positive);
  REQUIRE(r.tau_theorem.has_value());
  // Same parameters as the hand-computed bound: n=4, q=1/4, eps=0.05.
  CHECK(*r.tau_theorem == doctest::Approx(70.112426154782).epsilon(1e-9));

  REQUIRE(r.empirical_tmix.has_value());
  CHECK(*r.empirical_tmix <= 64);  // beta 0 mixes almost immediately
  CHECK(*r.empirical_tmix <= static_cast<int>(std::ceil(*r.tau_theorem)));

  REQUIRE_FALSE(r.tv_curve.empty());
  CHECK(r.tv_curve.front().first == 1);
  CHECK(r.tv_curve.back().first == 128);
  // TV at the final checkpoint is near the estimation floor, far below the
  // first checkpoint.
  CHECK(r.tv_curve.back().second < r.tv_curve.front().second);
  CHECK(r.tv_curve.back().second <= 0.05);
}

TEST_CASE("empirical_mixing is deterministic for a fixed seed") {
  Context ctx = carol::test::fixture_context();
  CandidatePool pool = data_pool("pool_small4.jsonl");
  MixingReport a = empirical_mixing(ctx, pool, 0.3, 0.05, 64, 2000, 5);
  MixingReport b = empirical_mixing(ctx, pool, 0.3, 0.05, 64, 2000, 5);
  REQUIRE(a.tv_curve.size() == b.tv_curve.size());
  for (std::size_t i = 0; i < a.tv_curve.size(); ++i) {
    CHECK(a.tv_curve[i].first == b.tv_curve[i].first);
    CHECK(a.tv_curve[i].second == b.tv_curve[i].second);  // bitwise
  }
  CHECK(a.empirical_tmix == b.empirical_tmix);
}

TEST_CASE("empirical_mixing notes non-convergence within max_steps") {
  Context ctx = carol::test::fixture_context();
  CandidatePool pool = data_pool("pool_small4.jsonl");
  // One step cannot erase the worst-case start bias at any beta.
  MixingReport r = empirical_mixing(ctx, pool, 1.0, 0.01, 1, 2000, 2);
  CHECK_FALSE(r.empirical_tmix.has_value());
  CHECK(has_note(r.notes, "did not reach"));
}

TEST_CASE("empirical_mixing validation") {
  Context ctx = carol::test::fixture_context();
  CandidatePool pool = data_pool("pool_small4.jsonl");
  CHECK_THROWS_AS(empirical_mixing(ctx, pool, 0.0, 0.05, 64, 999), InputError);
  CHECK_THROWS_AS(empirical_mixing(ctx, pool, 0.0, 0.05, 0, 2000), InputError);
  CHECK_THROWS_AS(empirical_mixing(ctx, pool, -1.0, 0.05, 64, 2000), InputError);
  CHECK_THROWS_AS(empirical_mixing(ctx, pool, 0.0, 1.5, 64, 2000), InputError);
}
