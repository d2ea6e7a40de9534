#include "hyperembed/trainer.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstring>

#include "hyperembed/errors.hpp"
#include "test_support.hpp"

namespace hyperembed {
namespace {

using testing::balanced_tree;

bool bitwise_equal(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  return a.data().size() == b.data().size() &&
         std::memcmp(a.data().data(), b.data().data(), a.data().size() * sizeof(double)) == 0;
}

EdgeSet star(std::size_t leaves) {
  EdgeSet edges(leaves + 1, true);
  for (NodeId leaf = 1; leaf <= leaves; ++leaf) edges.add(leaf, 0);
  return edges;
}

TEST(LearningRate, BurnInDividesTheRate) {
  TrainConfig cfg;
  cfg.lr = 0.1;
  cfg.burn_in_divisor = 10.0;
  cfg.burn_in_epochs = 10;
  EXPECT_DOUBLE_EQ(learning_rate_for_epoch(cfg, 0), 0.01);  // first epoch
  EXPECT_DOUBLE_EQ(learning_rate_for_epoch(cfg, 9), 0.01);
  EXPECT_EQ(learning_rate_for_epoch(cfg, 10), 0.1);  // eleventh epoch
  cfg.burn_in_epochs = 0;
  EXPECT_EQ(learning_rate_for_epoch(cfg, 0), 0.1);
}

TEST(TrainConfig, Validation) {
  TrainConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  auto bad = [](auto mutate) {
    TrainConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(validate(bad([](TrainConfig& c) { c.lr = 0.0; })), InputError);
  EXPECT_THROW(validate(bad([](TrainConfig& c) { c.epochs = 0; })), InputError);
  EXPECT_THROW(validate(bad([](TrainConfig& c) { c.burn_in_divisor = 1.0; })), InputError);
  EXPECT_THROW(validate(bad([](TrainConfig& c) { c.threads = 0; })), InputError);
  EXPECT_THROW(validate(bad([](TrainConfig& c) { c.batch = 0; })), InputError);
}

TEST(TrainConfig, DescribeCoversEveryField) {
  const auto fields = describe(TrainConfig{});
  EXPECT_EQ(fields.size(), 13u);
  EXPECT_EQ(fields.front(), (std::pair<std::string, std::string>{"lr", "0.5"}));
}

TEST(Train, SingleEdgePullsThePairTogether) {
  // Start from spread-out rows; the default initialisation is already tight.
  EdgeSet edges(3, true);
  edges.add(0, 1);
  EmbeddingMatrix m(3, 2, ScoreKind::poincare);
  m.row(0)[0] = 0.3;
  m.row(1)[0] = -0.3;
  m.row(2)[1] = 0.3;
  const double before = poincare_distance(m.row(0), m.row(1));
  TrainConfig cfg;
  cfg.lr = 0.05;
  cfg.epochs = 100;
  cfg.negatives = 2;
  train(edges, m, cfg);
  const double after = poincare_distance(m.row(0), m.row(1));
  EXPECT_LT(after, before);
  EXPECT_LT(after, poincare_distance(m.row(0), m.row(2)));
}

TEST(Train, SingleThreadIsBitReproducible) {
  const auto closure = transitive_closure(balanced_tree(2, 4).edges);
  for (auto kind : {ScoreKind::poincare, ScoreKind::euclidean, ScoreKind::translational}) {
    TrainConfig cfg;
    cfg.epochs = 15;
    cfg.seed = 7;
    cfg.score_kind = kind;
    cfg.lr = kind == ScoreKind::poincare ? 0.5 : 0.05;
    auto a = init_embeddings(closure.node_count(), 3, 7, kind);
    auto b = a;
    const auto ra = train(closure, a, cfg);
    const auto rb = train_parallel(closure, b, cfg);
    EXPECT_TRUE(bitwise_equal(a, b)) << to_string(kind);
    EXPECT_EQ(ra.epoch_loss, rb.epoch_loss);
    EXPECT_TRUE(a == b);
  }
}

TEST(Train, SeedMatters) {
  const auto closure = transitive_closure(balanced_tree(2, 3).edges);
  TrainConfig cfg;
  cfg.epochs = 5;
  auto a = init_embeddings(closure.node_count(), 3, 0, ScoreKind::poincare);
  auto b = a;
  train(closure, a, cfg);
  cfg.seed = 1;
  train(closure, b, cfg);
  EXPECT_FALSE(bitwise_equal(a, b));
}

TEST(Train, ParallelRunKeepsEveryRowInTheBall) {
  const auto closure = transitive_closure(balanced_tree(3, 4).edges);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.threads = 4;
  cfg.lr = 2.0;  // aggressive steps push rows against the boundary
  auto m = init_embeddings(closure.node_count(), 2, 3, ScoreKind::poincare);
  const auto report = train_parallel(closure, m, cfg);
  EXPECT_EQ(report.epochs_run, 30u);
  const double limit = 1.0 - cfg.epsilon;
  for (std::size_t i = 0; i < m.count(); ++i) {
    EXPECT_LE(std::sqrt(squared_norm(m.row(static_cast<NodeId>(i)))), limit);
  }
}

TEST(Train, StarLossIsNonIncreasing) {
  const auto edges = star(4);
  auto m = init_embeddings(5, 2, 1, ScoreKind::poincare);
  TrainConfig cfg;
  cfg.lr = 0.01;
  cfg.epochs = 20;
  cfg.negatives = 3;
  const auto report = train(edges, m, cfg);
  ASSERT_EQ(report.epoch_loss.size(), 20u);
  for (std::size_t e = 1; e < 20; ++e) {
    EXPECT_LE(report.epoch_loss[e], report.epoch_loss[e - 1] * 1.05) << "epoch " << e;
  }
  EXPECT_LT(report.epoch_loss.back(), report.epoch_loss.front());
}

TEST(Train, BatchesAndFermiDiracRun) {
  const auto closure = transitive_closure(balanced_tree(2, 3).edges);
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch = 4;
  cfg.objective = Objective::fermi_dirac;
  auto m = init_embeddings(closure.node_count(), 2, 0, ScoreKind::poincare);
  const auto report = train(closure, m, cfg);
  EXPECT_LT(report.epoch_loss.back(), report.epoch_loss.front());
}

TEST(Train, UndirectedEdgesVisitBothOrientations) {
  EdgeSet edges(4, false);
  edges.add(0, 1);
  edges.add(2, 3);
  auto m = init_embeddings(4, 2, 0, ScoreKind::poincare);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.negatives = 2;
  train(edges, m, cfg);
  EXPECT_LT(poincare_distance(m.row(0), m.row(1)), poincare_distance(m.row(0), m.row(2)));
  EXPECT_LT(poincare_distance(m.row(3), m.row(2)), poincare_distance(m.row(3), m.row(1)));
}

TEST(Train, RejectsMismatchesAndUnsupportedInputs) {
  EdgeSet edges(2, true);
  edges.add(0, 1);
  auto m = init_embeddings(2, 2, 0, ScoreKind::euclidean);
  TrainConfig cfg;
  EXPECT_THROW(train(edges, m, cfg), InputError);  // kind mismatch

  EdgeSet undirected(2, false);
  undirected.add(0, 1);
  auto t = init_embeddings(2, 2, 0, ScoreKind::translational);
  cfg.score_kind = ScoreKind::translational;
  try {
    train(undirected, t, cfg);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_STREQ(e.what(), "translational score requires directed data");
  }

  EdgeSet empty(2, true);
  auto p = init_embeddings(2, 2, 0, ScoreKind::poincare);
  EXPECT_THROW(train(empty, p, TrainConfig{}), InputError);
}

TEST(Train, DivergenceAbortsWithEpochAndExample) {
  const auto edges = star(4);
  auto m = init_embeddings(5, 2, 0, ScoreKind::euclidean);
  TrainConfig cfg;
  cfg.score_kind = ScoreKind::euclidean;
  cfg.lr = 1e200;
  cfg.burn_in_epochs = 0;
  try {
    train(edges, m, cfg);
    FAIL() << "expected divergence";
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("(epoch "), std::string::npos) << msg;
    EXPECT_NE(msg.find(", example "), std::string::npos) << msg;
  }
}

TEST(Train, EpochCallbackSeesEveryEpoch) {
  const auto edges = star(3);
  auto m = init_embeddings(4, 2, 0, ScoreKind::poincare);
  TrainConfig cfg;
  cfg.epochs = 7;
  std::vector<std::size_t> seen;
  const auto report = train(edges, m, cfg, [&](std::size_t e, double loss) {
    seen.push_back(e);
    EXPECT_TRUE(std::isfinite(loss));
  });
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_EQ(seen.back(), 6u);
  EXPECT_EQ(report.epoch_loss.size(), 7u);
}

// Per-update cost should grow linearly in the dimension. Timing is noisy, so
// take the best of several runs and allow a factor of 3 over linear.
TEST(Train, CostIsLinearInDimension) {
  const auto closure = transitive_closure(balanced_tree(3, 3).edges);
  TrainConfig cfg;
  cfg.epochs = 3;
  auto seconds_for = [&](std::size_t dim) {
    double best = INFINITY;
    for (int rep = 0; rep < 5; ++rep) {
      auto m = init_embeddings(closure.node_count(), dim, 0, ScoreKind::poincare);
      const auto start = std::chrono::steady_clock::now();
      train(closure, m, cfg);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
  };
  const double t10 = seconds_for(10), t100 = seconds_for(100), t1000 = seconds_for(1000);
  EXPECT_LE(t100 / t10, 3.0 * 10.0);
  EXPECT_LE(t1000 / t100, 3.0 * 10.0);
  EXPECT_LE(t1000 / t10, 3.0 * 100.0);
}

}  // namespace
}  // namespace hyperembed
