#include "hyperembed/objectives.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hyperembed/errors.hpp"
#include "test_support.hpp"

namespace hyperembed {
namespace {

using testing::densify;
using testing::objective_gradient_error;
using testing::random_ball_point;

EmbeddingMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t dim, ScoreKind kind) {
  EmbeddingMatrix m(n, dim, kind);
  for (NodeId i = 0; i < n; ++i) {
    const auto p = random_ball_point(rng, dim, kind == ScoreKind::poincare ? 0.8 : 1.5);
    std::copy(p.begin(), p.end(), m.row(i).begin());
  }
  if (kind == ScoreKind::translational) {
    const auto r = random_ball_point(rng, dim, 0.7);
    std::copy(r.begin(), r.end(), m.translation().begin());
  }
  return m;
}

TrainingExample random_example(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  TrainingExample ex;
  ex.u = static_cast<NodeId>(rng() % n);
  do {
    ex.v = static_cast<NodeId>(rng() % n);
  } while (ex.v == ex.u);
  // Negatives may repeat and may include u itself.
  for (std::size_t i = 0; i < k; ++i) ex.negatives.push_back(static_cast<NodeId>(rng() % n));
  return ex;
}

TEST(RankingLoss, NoNegativesGivesZeroLossAndGradient) {
  EmbeddingMatrix m(2, 2, ScoreKind::poincare);
  m.row(0)[0] = 0.3;
  m.row(1)[1] = -0.4;
  const auto result = ranking_loss_and_grads({0, 1, {}}, m);
  EXPECT_EQ(result.loss, 0.0);
  for (double g : densify(result.grad, m)) EXPECT_EQ(g, 0.0);
}

TEST(RankingLoss, EquidistantCandidatesGiveLogOfCount) {
  // v and three negatives on a circle around the origin row.
  EmbeddingMatrix m(5, 2, ScoreKind::poincare);
  const double r = 0.5;
  m.row(1)[0] = r;
  m.row(2)[0] = -r;
  m.row(3)[1] = r;
  m.row(4)[1] = -r;
  const auto result = ranking_loss_and_grads({0, 1, {2, 3, 4}}, m);
  EXPECT_NEAR(result.loss, std::log(4.0), 1e-15);
}

TEST(RankingLoss, LossDropsAsThePositiveMovesCloser) {
  EmbeddingMatrix m(3, 1, ScoreKind::poincare);
  m.row(2)[0] = -0.5;
  double previous = INFINITY;
  for (double x : {0.9, 0.6, 0.3, 0.1}) {
    m.row(1)[0] = x;
    const double loss = ranking_loss_and_grads({0, 1, {2}}, m).loss;
    EXPECT_LT(loss, previous);
    previous = loss;
  }
}

TEST(RankingLoss, SelfNegativeAddsNoPointGradient) {
  EmbeddingMatrix m(2, 2, ScoreKind::poincare);
  m.row(0)[0] = 0.2;
  m.row(1)[0] = -0.3;
  const auto with_self = ranking_loss_and_grads({0, 1, {0}}, m);
  // Self term contributes exp(0) = 1 to the partition.
  const double d = poincare_distance(m.row(0), m.row(1));
  EXPECT_NEAR(with_self.loss, d + std::log(std::exp(-d) + 1.0), 1e-14);
  for (double g : densify(with_self.grad, m)) EXPECT_TRUE(std::isfinite(g));
}

TEST(RankingLoss, OutOfRangeIdsAreRejected) {
  EmbeddingMatrix m(2, 2, ScoreKind::euclidean);
  EXPECT_THROW(ranking_loss_and_grads({0, 5, {}}, m), InputError);
  EXPECT_THROW(ranking_loss_and_grads({0, 1, {9}}, m), InputError);
}

class ObjectiveGradients : public ::testing::TestWithParam<ScoreKind> {};

TEST_P(ObjectiveGradients, RankingMatchesFiniteDifferences) {
  std::mt19937_64 rng(100 + static_cast<int>(GetParam()));
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = random_matrix(rng, 6, 1 + trial % 5, GetParam());
    const auto ex = random_example(rng, 6, 1 + trial % 10);
    const auto result = ranking_loss_and_grads(ex, m);
    const double err = objective_gradient_error(
        m, [&](const EmbeddingMatrix& x) { return ranking_loss_and_grads(ex, x).loss; },
        densify(result.grad, m));
    worst = std::max(worst, err);
  }
  EXPECT_LT(worst, 1e-5);
}

TEST_P(ObjectiveGradients, FermiDiracMatchesFiniteDifferences) {
  std::mt19937_64 rng(200 + static_cast<int>(GetParam()));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = random_matrix(rng, 6, 1 + trial % 5, GetParam());
    const auto ex = random_example(rng, 6, trial % 10);
    const FermiDiracParams p{0.2 + 2.0 * unit(rng), 0.1 + unit(rng)};
    const int label = trial % 3 == 0 ? 0 : 1;
    const auto result = fermi_dirac_loss_and_grads(ex.u, ex.v, label, ex.negatives, m, p);
    const double err = objective_gradient_error(
        m,
        [&](const EmbeddingMatrix& x) {
          return fermi_dirac_loss_and_grads(ex.u, ex.v, label, ex.negatives, x, p).loss;
        },
        densify(result.grad, m));
    worst = std::max(worst, err);
  }
  EXPECT_LT(worst, 1e-5);
}

INSTANTIATE_TEST_SUITE_P(AllKinds, ObjectiveGradients,
                         ::testing::Values(ScoreKind::poincare, ScoreKind::euclidean,
                                           ScoreKind::translational),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(FermiDirac, ProbabilityValues) {
  const FermiDiracParams p{1.0, 1.0};
  EXPECT_EQ(fermi_dirac_prob(1.0, p), 0.5);
  // 1 / (e + 1), from a 60-digit mpmath evaluation.
  EXPECT_NEAR(fermi_dirac_prob(2.0, p), 0.268941421369995120748840457426, 1e-16);
  EXPECT_NEAR(fermi_dirac_prob(0.0, p), 1.0 - 0.268941421369995120748840457426, 1e-16);
}

TEST(FermiDirac, ProbabilityIsBoundedAndDecreasing) {
  const FermiDiracParams p{2.0, 0.1};
  double previous = 1.0;
  for (double d = 0.0; d < 3.9; d += 0.05) {
    const double prob = fermi_dirac_prob(d, p);
    EXPECT_GT(prob, 0.0);
    EXPECT_LT(prob, 1.0);
    EXPECT_LE(prob, previous);
    previous = prob;
  }
  EXPECT_EQ(fermi_dirac_prob(1e6, p), 0.0);
  EXPECT_EQ(fermi_dirac_prob(-1e6, p), 1.0);
}

TEST(FermiDirac, PositiveAtTheRadiusCostsLogTwo) {
  EmbeddingMatrix m(2, 1, ScoreKind::euclidean);
  m.row(1)[0] = 1.0;  // squared distance 1
  const auto result = fermi_dirac_loss_and_grads(0, 1, 1, {}, m, {1.0, 0.5});
  EXPECT_NEAR(result.loss, std::log(2.0), 1e-15);
}

TEST(FermiDirac, ExtremeDistancesStayFinite) {
  EmbeddingMatrix m(2, 1, ScoreKind::euclidean);
  m.row(1)[0] = 1e3;
  const auto pos = fermi_dirac_loss_and_grads(0, 1, 1, {}, m, {0.5, 0.01});
  EXPECT_TRUE(std::isfinite(pos.loss));
  EXPECT_GT(pos.loss, 1e7);
  const auto neg = fermi_dirac_loss_and_grads(0, 1, 0, {}, m, {0.5, 0.01});
  EXPECT_EQ(neg.loss, 0.0);
}

TEST(FermiDirac, RejectsBadParameters) {
  EmbeddingMatrix m(2, 1, ScoreKind::euclidean);
  EXPECT_THROW(fermi_dirac_loss_and_grads(0, 1, 1, {}, m, {1.0, 0.0}), InputError);
  EXPECT_THROW(fermi_dirac_loss_and_grads(0, 1, 2, {}, m, {1.0, 1.0}), InputError);
}

TEST(SparseGradient, AccumulatesRepeatedRows) {
  SparseGradient g;
  g.reset(2, false);
  g.row(3)[0] += 1.0;
  g.row(5)[1] += 2.0;
  g.row(3)[0] += 1.5;
  EXPECT_EQ(g.ids().size(), 2u);
  EXPECT_EQ(g.find(3)[0], 2.5);
  EXPECT_TRUE(g.find(4).empty());
}

}  // namespace
}  // namespace hyperembed
