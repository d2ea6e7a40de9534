#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hyperembed/dataset.hpp"
#include "hyperembed/embedding_store.hpp"
#include "hyperembed/objectives.hpp"

namespace hyperembed {

enum class Objective { ranking, fermi_dirac };

std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view name);

struct TrainConfig {
  double lr = 0.5;
  std::size_t epochs = 300;
  std::size_t burn_in_epochs = 10;
  double burn_in_divisor = 10.0;
  std::size_t negatives = kDefaultNegatives;
  double epsilon = kDefaultEpsilon;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  Objective objective = Objective::ranking;
  ScoreKind score_kind = ScoreKind::poincare;
  std::size_t batch = 1;
  FermiDiracParams fermi_dirac;  // only read by the Fermi-Dirac objective
};

/// Throws InputError when a field is out of range.
void validate(const TrainConfig& cfg);

/// Step size for a zero-based epoch: lr / c during burn-in, lr afterwards.
double learning_rate_for_epoch(const TrainConfig& cfg, std::size_t epoch);

/// Every config field as key/value strings, for run metadata.
std::vector<std::pair<std::string, std::string>> describe(const TrainConfig& cfg);

struct TrainReport {
  std::vector<double> epoch_loss;  // mean loss per positive example
  double wall_seconds = 0.0;
  std::size_t epochs_run = 0;
};

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

/// Riemannian SGD (or plain SGD for the flat score kinds) over the train-tagged
/// edges of `edges`. Undirected edges are visited in both orientations.
/// With cfg.threads > 1 workers update `m` without locks (Hogwild); with a
/// single thread the result is bit-reproducible for a fixed config.
/// Throws NumericalError naming the epoch and example on non-finite values.
TrainReport train(const EdgeSet& edges, EmbeddingMatrix& m, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// Same contract as train(); requires cfg.threads >= 1 and is the entry point
/// used for multi-threaded runs.
TrainReport train_parallel(const EdgeSet& edges, EmbeddingMatrix& m, const TrainConfig& cfg,
                           const EpochCallback& on_epoch = {});

}  // namespace hyperembed
