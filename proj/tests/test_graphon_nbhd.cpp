#include "robnet/graphon_nbhd.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "robnet/errors.hpp"
#include "robnet/graph_models.hpp"
#include "robnet/info_indices.hpp"
#include "robnet/rng.hpp"
#include "test_support.hpp"

using robnet::dirichlet_expected_kl;
using robnet::digamma;
using robnet::graph_law_kl;
using robnet::GraphonBall;
using robnet::make_graphon_ball;
using robnet::Rng;
using robnet::StepGraphon;

namespace {

StepGraphon one_block(double p) {
  StepGraphon w;
  w.K = 1;
  w.pi = {1.0};
  w.B = {{p}};
  return w;
}

StepGraphon two_block_center() {
  StepGraphon w;
  w.K = 2;
  w.pi = {0.5, 0.5};
  w.B = {{0.10, 0.02}, {0.02, 0.08}};
  return w;
}

bool same_matrix(const StepGraphon& a, const StepGraphon& b) {
  for (int i = 0; i < a.K; ++i)
    for (int j = 0; j < a.K; ++j)
      if (a.B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] !=
          b.B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
        return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Digamma
// ---------------------------------------------------------------------------

TEST(GraphonNbhd, DigammaReferenceValues) {
  // psi(1) = -Euler-Mascheroni.
  EXPECT_NEAR(digamma(1.0), -0.5772156649015329, 1e-12);
  EXPECT_NEAR(digamma(0.5), -1.9635100260214235, 1e-12);
  EXPECT_NEAR(digamma(10.5), 2.3030010342976864, 1e-12);
  EXPECT_NEAR(digamma(3.25), 1.0169909110681790, 1e-12);
}

TEST(GraphonNbhd, DigammaRecurrenceAndGrowth) {
  // psi(x+1) = psi(x) + 1/x across scales.
  for (double x : {0.1, 0.7, 1.0, 2.5, 9.9, 25.0, 1000.0})
    EXPECT_NEAR(digamma(x + 1.0), digamma(x) + 1.0 / x, 1e-11);
  // psi(x) ~ log(x) for large x.
  EXPECT_NEAR(digamma(1e6), std::log(1e6), 1e-6);
  EXPECT_THROW(digamma(0.0), robnet::parameter_error);
  EXPECT_THROW(digamma(-1.0), robnet::parameter_error);
}

// ---------------------------------------------------------------------------
// Graph-law KL
// ---------------------------------------------------------------------------

TEST(GraphonNbhd, GraphLawKlHandValue) {
  // One-block graphons: n = 10 has 45 pairs so the law divergence is
  // 45 * kl(0.4, 0.5).
  EXPECT_NEAR(graph_law_kl(one_block(0.4), one_block(0.5), 10),
              0.9060981097809993, 1e-13);
  EXPECT_DOUBLE_EQ(graph_law_kl(one_block(0.3), one_block(0.3), 10), 0.0);
  // n = 1 has no pairs.
  EXPECT_DOUBLE_EQ(graph_law_kl(one_block(0.4), one_block(0.5), 1), 0.0);
}

TEST(GraphonNbhd, PerEdgeKlMixesBlocks) {
  StepGraphon w = two_block_center();
  StepGraphon v = two_block_center();
  v.B[0][0] = 0.12;
  const double expected = 0.25 * robnet::bernoulli_kl(0.10, 0.12);
  EXPECT_NEAR(robnet::per_edge_graphon_kl(w, v), expected, 1e-15);
  // Identical graphons diverge by zero.
  EXPECT_DOUBLE_EQ(robnet::per_edge_graphon_kl(w, w), 0.0);
}

TEST(GraphonNbhd, CommonPartitionEnforced) {
  StepGraphon w = two_block_center();
  StepGraphon v = two_block_center();
  v.pi = {0.6, 0.4};
  EXPECT_THROW(robnet::per_edge_graphon_kl(w, v), robnet::parameter_error);
  EXPECT_THROW(graph_law_kl(w, one_block(0.1), 10), robnet::parameter_error);
  EXPECT_THROW(graph_law_kl(w, w, 0), robnet::parameter_error);
}

TEST(GraphonNbhd, MonteCarloMatchesExactOneBlock) {
  // K = 1 removes latent randomness: the estimate is exact with zero SE.
  const auto est = robnet::graphon_kl_mc(one_block(0.4), one_block(0.5), 10, 5, 1);
  EXPECT_NEAR(est.estimate, 0.9060981097809993, 1e-12);
  EXPECT_DOUBLE_EQ(est.std_error, 0.0);
  EXPECT_NEAR(est.per_edge_exact, robnet::bernoulli_kl(0.4, 0.5), 1e-15);
}

TEST(GraphonNbhd, MonteCarloWithinErrorBars) {
  StepGraphon w = two_block_center();
  StepGraphon v = two_block_center();
  v.B[0][0] = 0.13;
  v.B[1][1] = 0.05;
  const int n = 40;
  const auto est = robnet::graphon_kl_mc(w, v, n, 500, 42);
  // E[graph-law KL] over latent draws: within-cell pair counts have exact
  // means n(n-1)/2 * pi_a pi_b (a != b doubled), matching the closed form.
  const double exact = graph_law_kl(w, v, n);
  EXPECT_GT(est.std_error, 0.0);
  EXPECT_NEAR(est.estimate, exact, 3.0 * est.std_error + 1e-12);
  EXPECT_THROW(robnet::graphon_kl_mc(w, v, 0, 10, 1), robnet::parameter_error);
  EXPECT_THROW(robnet::graphon_kl_mc(w, v, 10, 0, 1), robnet::parameter_error);
}

// ---------------------------------------------------------------------------
// Dirichlet expected KL
// ---------------------------------------------------------------------------

TEST(GraphonNbhd, DirichletExpectedKlReferenceValues) {
  const std::vector<double> uniform4(4, 0.25);
  EXPECT_NEAR(dirichlet_expected_kl(uniform4, 50.0), 0.029500338966910470, 1e-13);
  EXPECT_NEAR(dirichlet_expected_kl(uniform4, 100.0), 0.014875021233777227, 1e-13);
  EXPECT_NEAR(dirichlet_expected_kl(uniform4, 500.0), 0.0029950000339989601, 1e-13);
}

TEST(GraphonNbhd, DirichletExpectedKlAsymptotics) {
  // Expected KL ~ (K-1)/(2 alpha) for Dirichlet(alpha * pstar).
  const std::vector<double> uniform4(4, 0.25);
  for (double alpha : {50.0, 100.0, 500.0}) {
    const double v = dirichlet_expected_kl(uniform4, alpha);
    EXPECT_LE(std::abs(v - 1.5 / alpha), 5.0 / (alpha * alpha));
  }
}

TEST(GraphonNbhd, DirichletExpectedKlMatchesMonteCarlo) {
  // Independent check: draw Dirichlet(alpha * pstar) via Gamma draws and
  // average KL(ptilde || pstar).
  const std::vector<double> pstar{0.1, 0.2, 0.3, 0.4};
  const double alpha = 80.0;
  Rng rng(2718);
  const int reps = 4000;
  double mean = 0.0, m2 = 0.0;
  std::vector<double> draw(4);
  for (int r = 0; r < reps; ++r) {
    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      draw[i] = rng.gamma(alpha * pstar[i]);
      total += draw[i];
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      draw[i] /= total;
      kl += draw[i] * std::log(draw[i] / pstar[i]);
    }
    const double delta = kl - mean;
    mean += delta / (r + 1);
    m2 += delta * (kl - mean);
  }
  const double se = std::sqrt(m2 / (reps - 1.0) / reps);
  EXPECT_NEAR(dirichlet_expected_kl(pstar, alpha), mean, 3.0 * se);
}

TEST(GraphonNbhd, DirichletExpectedKlValidation) {
  EXPECT_THROW(dirichlet_expected_kl({}, 1.0), robnet::parameter_error);
  EXPECT_THROW(dirichlet_expected_kl({0.5, 0.5}, 0.0), robnet::parameter_error);
  EXPECT_THROW(dirichlet_expected_kl({0.5, 0.4}, 1.0), robnet::parameter_error);
  EXPECT_THROW(dirichlet_expected_kl({1.0, 0.0}, 1.0), robnet::parameter_error);
}

// ---------------------------------------------------------------------------
// Ball construction and membership
// ---------------------------------------------------------------------------

TEST(GraphonNbhd, BallConstructionAndMembership) {
  const auto ball = make_graphon_ball(two_block_center(), 1.0, 30);
  EXPECT_DOUBLE_EQ(ball.stored_scale, 0.10 + 0.02 + 0.02 + 0.08);
  EXPECT_TRUE(robnet::graphon_ball_contains(two_block_center(), ball));
  StepGraphon far = two_block_center();
  far.B[0][0] = 0.9;
  far.B[1][1] = 0.9;
  EXPECT_FALSE(robnet::graphon_ball_contains(far, ball));
  StepGraphon near = two_block_center();
  near.B[0][0] = 0.101;
  EXPECT_TRUE(robnet::graphon_ball_contains(near, ball));
  EXPECT_THROW(make_graphon_ball(two_block_center(), 0.0, 30),
               robnet::parameter_error);
  EXPECT_THROW(make_graphon_ball(two_block_center(), 1.0, 1),
               robnet::parameter_error);
}

// ---------------------------------------------------------------------------
// Chain moves
// ---------------------------------------------------------------------------

TEST(GraphonNbhd, PerturbStepValidationAndDeterminism) {
  const auto ball = make_graphon_ball(two_block_center(), 5.0, 20);
  const std::vector<double> alpha(4, 50.0);
  EXPECT_THROW(robnet::perturb_step(two_block_center(), ball, {1.0, 1.0}, 1),
               robnet::parameter_error);
  EXPECT_THROW(robnet::perturb_step(two_block_center(), ball,
                                    {1.0, 1.0, 0.0, 1.0}, 1),
               robnet::parameter_error);
  const auto a = robnet::perturb_step(two_block_center(), ball, alpha, 9);
  const auto b = robnet::perturb_step(two_block_center(), ball, alpha, 9);
  EXPECT_EQ(a.accepted, b.accepted);
  EXPECT_TRUE(same_matrix(a.next, b.next));
}

TEST(GraphonNbhd, PerturbPreservesScaleAndSymmetry) {
  const auto ball = make_graphon_ball(two_block_center(), 50.0, 20);
  const std::vector<double> alpha(4, 30.0);
  int accepted = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto mv = robnet::perturb_step(two_block_center(), ball, alpha, seed);
    if (!mv.accepted) continue;
    ++accepted;
    robnet::validate(mv.next);  // symmetric, entries in [0,1], pi intact
    double total = 0.0;
    for (const auto& row : mv.next.B)
      for (double v : row) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
        total += v;
      }
    EXPECT_NEAR(total, ball.stored_scale, 1e-6);
    EXPECT_EQ(mv.next.pi, ball.center.pi);
  }
  EXPECT_GT(accepted, 0);
}

TEST(GraphonNbhd, PerturbRejectionKeepsState) {
  // Tiny ball: wild proposals must be rejected and return the input state.
  const auto ball = make_graphon_ball(two_block_center(), 1e-10, 200);
  const std::vector<double> alpha(4, 1.0);
  int rejected = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto mv = robnet::perturb_step(two_block_center(), ball, alpha, seed);
    if (!mv.accepted) {
      ++rejected;
      EXPECT_TRUE(same_matrix(mv.next, two_block_center()));
    }
  }
  EXPECT_GT(rejected, 15);
}

TEST(GraphonNbhd, RescaleStepBehaviour) {
  const auto ball = make_graphon_ball(two_block_center(), 3.0, 20);
  EXPECT_THROW(robnet::rescale_step(two_block_center(), ball, -0.1, 1),
               robnet::parameter_error);
  EXPECT_THROW(robnet::rescale_step(two_block_center(), ball, 1.0, 1),
               robnet::parameter_error);
  // rho = 0: factor is exactly 1, so accepted moves never change the state.
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto mv = robnet::rescale_step(two_block_center(), ball, 0.0, seed);
    EXPECT_TRUE(mv.accepted);
    EXPECT_TRUE(same_matrix(mv.next, two_block_center()));
  }
  // Lazy half: roughly half the seeds leave the state untouched even with a
  // broad factor range; the rest mostly change it.
  int unchanged = 0, changed = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const auto mv = robnet::rescale_step(two_block_center(), ball, 0.5, seed);
    if (same_matrix(mv.next, two_block_center())) ++unchanged;
    else ++changed;
  }
  EXPECT_GT(unchanged, 90);
  EXPECT_GT(changed, 90);
  // Determinism.
  const auto a = robnet::rescale_step(two_block_center(), ball, 0.3, 77);
  const auto b = robnet::rescale_step(two_block_center(), ball, 0.3, 77);
  EXPECT_TRUE(same_matrix(a.next, b.next));
}

TEST(GraphonNbhd, AlternatingChainStaysInsideBall) {
  // Alpha proportional to the center keeps proposals near it, so both move
  // types accept often; every visited state must remain inside the ball.
  const auto center = two_block_center();
  const auto ball = make_graphon_ball(center, 2.0, 30);
  std::vector<double> alpha(4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      alpha[static_cast<std::size_t>(a * 2 + b)] =
          200.0 * center.B[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] /
          ball.stored_scale;
  StepGraphon state = center;
  int accepted_perturb = 0, accepted_rescale = 0;
  for (int step = 1; step <= 600; ++step) {
    const std::uint64_t seed = Rng::derive_seed(12345, static_cast<std::uint64_t>(step));
    robnet::MoveResult mv =
        step % 2 == 1 ? robnet::perturb_step(state, ball, alpha, seed)
                      : robnet::rescale_step(state, ball, 0.1, seed);
    if (mv.accepted) (step % 2 == 1 ? accepted_perturb : accepted_rescale)++;
    state = mv.next;
    ASSERT_TRUE(robnet::graphon_ball_contains(state, ball))
        << "chain escaped the ball at step " << step;
    robnet::validate(state);
  }
  EXPECT_GT(accepted_perturb, 0);
  EXPECT_GT(accepted_rescale, 0);
}
