#include "hyperembed/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "hyperembed/errors.hpp"
#include "hyperembed/random.hpp"

namespace hyperembed {

std::string_view to_string(Objective objective) {
  return objective == Objective::ranking ? "ranking" : "fermi-dirac";
}

Objective parse_objective(std::string_view name) {
  if (name == "ranking") return Objective::ranking;
  if (name == "fermi-dirac") return Objective::fermi_dirac;
  throw InputError("unknown objective '" + std::string(name) +
                   "' (expected ranking or fermi-dirac)");
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.lr > 0.0) || !std::isfinite(cfg.lr)) throw InputError("learning rate must be positive");
  if (cfg.epochs == 0) throw InputError("epochs must be positive");
  if (!(cfg.burn_in_divisor > 1.0)) throw InputError("burn-in divisor must exceed 1");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw InputError("epsilon must lie in (0, 1)");
  if (cfg.threads == 0) throw InputError("threads must be at least 1");
  if (cfg.batch == 0) throw InputError("batch must be positive");
  if (cfg.objective == Objective::fermi_dirac &&
      !(cfg.fermi_dirac.radius > 0.0 && cfg.fermi_dirac.temperature > 0.0)) {
    throw InputError("Fermi-Dirac radius and temperature must be positive");
  }
}

double learning_rate_for_epoch(const TrainConfig& cfg, std::size_t epoch) {
  return epoch < cfg.burn_in_epochs ? cfg.lr / cfg.burn_in_divisor : cfg.lr;
}

std::vector<std::pair<std::string, std::string>> describe(const TrainConfig& cfg) {
  return {
      {"lr", format_double(cfg.lr)},
      {"epochs", std::to_string(cfg.epochs)},
      {"burn_in_epochs", std::to_string(cfg.burn_in_epochs)},
      {"burn_in_divisor", format_double(cfg.burn_in_divisor)},
      {"negatives", std::to_string(cfg.negatives)},
      {"epsilon", format_double(cfg.epsilon)},
      {"seed", std::to_string(cfg.seed)},
      {"threads", std::to_string(cfg.threads)},
      {"objective", std::string(to_string(cfg.objective))},
      {"score", std::string(to_string(cfg.score_kind))},
      {"batch", std::to_string(cfg.batch)},
      {"fd_radius", format_double(cfg.fermi_dirac.radius)},
      {"fd_temperature", format_double(cfg.fermi_dirac.temperature)},
  };
}

namespace {

// Relaxed atomic access keeps Hogwild's racy row traffic well defined; on
// the usual 64-bit targets these compile to plain loads and stores.
double load(double& x) { return std::atomic_ref<double>(x).load(std::memory_order_relaxed); }
void store(double& x, double v) { std::atomic_ref<double>(x).store(v, std::memory_order_relaxed); }

// Per-thread training state: its own sampler plus scratch buffers reused
// across batches.
class Worker {
 public:
  Worker(const TrainConfig& cfg, const Adjacency& adjacency, EmbeddingMatrix& shared,
         std::uint64_t sampler_seed)
      : cfg_(cfg),
        shared_(shared),
        sampler_(adjacency, sampler_seed, cfg.negatives),
        local_(cfg.batch * (cfg.negatives + 2), shared.dim(), shared.score_kind(),
               shared.epsilon()),
        update_(shared.dim()) {}

  // Runs one batch of examples; returns the summed loss.
  double run_batch(std::span<const Edge> pairs, double lr) {
    local_ids_.clear();
    global_ids_.clear();
    examples_.resize(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      TrainingExample& ex = examples_[i];
      sampler_.sample_into(pairs[i].u, negatives_);
      ex.u = local_id(pairs[i].u);
      ex.v = local_id(pairs[i].v);
      ex.negatives.resize(negatives_.size());
      for (std::size_t j = 0; j < negatives_.size(); ++j) ex.negatives[j] = local_id(negatives_[j]);
    }
    gather();

    grad_.reset(shared_.dim(), shared_.score_kind() == ScoreKind::translational);
    double loss = 0.0;
    for (const TrainingExample& ex : examples_) {
      loss += cfg_.objective == Objective::ranking
                  ? accumulate_ranking(ex, local_, grad_)
                  : accumulate_fermi_dirac(ex.u, ex.v, 1, ex.negatives, local_, cfg_.fermi_dirac,
                                           grad_);
    }
    apply(lr);
    return loss;
  }

 private:
  NodeId local_id(NodeId global) {
    auto [it, inserted] = local_ids_.try_emplace(global, static_cast<NodeId>(global_ids_.size()));
    if (inserted) global_ids_.push_back(global);
    return it->second;
  }

  void gather() {
    for (std::size_t slot = 0; slot < global_ids_.size(); ++slot) {
      auto src = shared_.row(global_ids_[slot]);
      auto dst = local_.row(static_cast<NodeId>(slot));
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = load(src[i]);
    }
    auto r_src = shared_.translation();
    auto r_dst = local_.translation();
    for (std::size_t i = 0; i < r_src.size(); ++i) r_dst[i] = load(r_src[i]);
  }

  void apply(double lr) {
    const bool riemannian = shared_.score_kind() == ScoreKind::poincare;
    const auto ids = grad_.ids();
    for (std::size_t slot = 0; slot < ids.size(); ++slot) {
      auto target = shared_.row(global_ids_[ids[slot]]);
      const auto g = grad_.row_at(slot);
      for (std::size_t i = 0; i < target.size(); ++i) update_[i] = load(target[i]);
      const double step = riemannian ? lr * riemannian_scale(update_) : lr;
      for (std::size_t i = 0; i < target.size(); ++i) update_[i] -= step * g[i];
      for (double x : update_) {
        if (!std::isfinite(x)) throw NumericalError("non-finite coordinate after update");
      }
      if (riemannian) project_in_place(update_, shared_.epsilon());
      for (std::size_t i = 0; i < target.size(); ++i) store(target[i], update_[i]);
    }
    auto r = shared_.translation();
    const auto gr = grad_.translation();
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double next = load(r[i]) - lr * gr[i];
      if (!std::isfinite(next)) throw NumericalError("non-finite translation after update");
      store(r[i], next);
    }
  }

  const TrainConfig& cfg_;
  EmbeddingMatrix& shared_;
  NegativeSampler sampler_;
  EmbeddingMatrix local_;
  SparseGradient grad_;
  std::vector<double> update_;
  std::vector<NodeId> negatives_;
  std::vector<TrainingExample> examples_;
  std::unordered_map<NodeId, NodeId> local_ids_;
  std::vector<NodeId> global_ids_;
};

std::vector<Edge> training_pairs(const EdgeSet& edges) {
  std::vector<Edge> pairs;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges.split_of(i) != Split::train) continue;
    const Edge& e = edges.edges()[i];
    pairs.push_back(e);
    if (!edges.directed()) pairs.push_back({e.v, e.u});
  }
  return pairs;
}

// Processes pairs[begin, end) in batches; returns the summed loss. Errors are
// rethrown with the epoch and example index attached.
double run_shard(Worker& worker, std::span<const Edge> pairs, std::size_t begin,
                 std::size_t end, std::size_t batch, double lr, std::size_t epoch,
                 const std::atomic<bool>& stop) {
  double loss = 0.0;
  for (std::size_t start = begin; start < end && !stop.load(std::memory_order_relaxed);
       start += batch) {
    const std::size_t stop_at = std::min(end, start + batch);
    try {
      loss += worker.run_batch(pairs.subspan(start, stop_at - start), lr);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (epoch " + std::to_string(epoch + 1) +
                           ", example " + std::to_string(start) + ")");
    }
  }
  return loss;
}

void check_sampled_rows(const EmbeddingMatrix& m, std::size_t epoch) {
  if (m.score_kind() != ScoreKind::poincare) return;
  const double max_norm = 1.0 - m.epsilon();
  const std::size_t stride = std::max<std::size_t>(1, m.count() / 64);
  for (std::size_t i = 0; i < m.count(); i += stride) {
    if (std::sqrt(squared_norm(m.row(static_cast<NodeId>(i)))) > max_norm) {
      throw NumericalError("row " + std::to_string(i) + " left the ball after epoch " +
                           std::to_string(epoch + 1));
    }
  }
}

}  // namespace

TrainReport train(const EdgeSet& edges, EmbeddingMatrix& m, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  validate(cfg);
  if (m.score_kind() != cfg.score_kind) {
    throw InputError("embedding score kind does not match the training config");
  }
  if (m.epsilon() != cfg.epsilon) throw InputError("embedding epsilon does not match the config");
  if (edges.node_count() > m.count()) throw InputError("edge ids exceed the embedding count");
  if (cfg.score_kind == ScoreKind::translational && !edges.directed()) {
    throw InputError("translational score requires directed data");
  }

  std::vector<Edge> pairs = training_pairs(edges);
  if (pairs.empty()) throw InputError("no training edges");

  EdgeSet full = edges;
  full.set_node_count(m.count());
  const Adjacency adjacency(full, Split::train);

  std::vector<Worker> workers;
  workers.reserve(cfg.threads);
  for (std::size_t t = 0; t < cfg.threads; ++t) {
    workers.emplace_back(cfg, adjacency, m, mix_seed(cfg.seed, 1000 + t));
  }

  TrainReport report;
  const auto started = std::chrono::steady_clock::now();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::mt19937_64 order(mix_seed(cfg.seed, epoch));
    shuffle(std::span<Edge>(pairs), order);
    const double lr = learning_rate_for_epoch(cfg, epoch);

    double total = 0.0;
    std::atomic<bool> stop{false};
    if (cfg.threads == 1) {
      total = run_shard(workers[0], pairs, 0, pairs.size(), cfg.batch, lr, epoch, stop);
    } else {
      std::vector<double> shard_loss(cfg.threads, 0.0);
      std::exception_ptr failure;
      std::mutex failure_mutex;
      std::vector<std::thread> threads;
      for (std::size_t t = 0; t < cfg.threads; ++t) {
        const std::size_t begin = pairs.size() * t / cfg.threads;
        const std::size_t end = pairs.size() * (t + 1) / cfg.threads;
        threads.emplace_back([&, t, begin, end] {
          try {
            shard_loss[t] = run_shard(workers[t], pairs, begin, end, cfg.batch, lr, epoch, stop);
          } catch (...) {
            stop = true;
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        });
      }
      for (auto& th : threads) th.join();
      if (failure) std::rethrow_exception(failure);
      for (double l : shard_loss) total += l;
    }

    const double mean = total / static_cast<double>(pairs.size());
    if (!std::isfinite(mean)) {
      throw NumericalError("non-finite mean loss in epoch " + std::to_string(epoch + 1));
    }
    check_sampled_rows(m, epoch);
    report.epoch_loss.push_back(mean);
    report.epochs_run = epoch + 1;
    if (on_epoch) on_epoch(epoch, mean);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (!m.satisfies_ball_invariant()) throw NumericalError("ball invariant violated after training");
  return report;
}

TrainReport train_parallel(const EdgeSet& edges, EmbeddingMatrix& m, const TrainConfig& cfg,
                           const EpochCallback& on_epoch) {
  return train(edges, m, cfg, on_epoch);
}

}  // namespace hyperembed
