#pragma once

// Command implementations behind the `hyperembed` executable. Each command
// returns a process exit code and writes only to the streams it is given, so
// tests can drive them in-process.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hyperembed/dataset.hpp"
#include "hyperembed/embedding_store.hpp"
#include "hyperembed/trainer.hpp"

namespace hyperembed::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// Default Fermi-Dirac search grid.
inline const std::vector<double> kDefaultRadii = {0.5, 1.0, 2.0, 5.0};
inline const std::vector<double> kDefaultTemperatures = {0.1, 0.5, 1.0};

/// Learning rate used when none is given: 0.5 for the ball, 0.05 otherwise.
double default_learning_rate(ScoreKind kind);

struct ClosureOptions {
  fs::path input;
  fs::path output;
  fs::path manifest;  // empty: <output>.manifest
};
int cmd_closure(const ClosureOptions& opt, std::ostream& out, std::ostream& err);

struct SplitOptions {
  fs::path input;
  fs::path output;
  fs::path manifest;
  double valid_frac = 0.05;
  double test_frac = 0.05;
  std::uint64_t seed = 0;
  HoldoutBase base = HoldoutBase::closure;
};
int cmd_split(const SplitOptions& opt, std::ostream& out, std::ostream& err);

struct TrainOptions {
  fs::path data;
  fs::path output;
  fs::path manifest;
  std::size_t dim = 5;
  bool undirected = false;
  std::optional<double> lr;  // default_learning_rate(score) when unset
  TrainConfig config;
  bool fd_grid = false;
  std::vector<double> fd_radii = kDefaultRadii;
  std::vector<double> fd_temperatures = kDefaultTemperatures;
};
int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err);

enum class EvalMode { reconstruction, linkpred };

struct EvalOptions {
  fs::path checkpoint;
  fs::path relations;
  fs::path truth;  // empty: every edge of the relations file
  fs::path manifest;  // empty: <checkpoint>.eval.manifest
  fs::path dump_ranks;
  EvalMode mode = EvalMode::reconstruction;
  std::optional<Split> split;  // linkpred defaults to test
  bool undirected = false;
  std::size_t threads = 0;
};
int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err);

struct EntailOptions {
  fs::path checkpoint;
  fs::path pairs;
  fs::path manifest;  // empty: <checkpoint>.entail.manifest
  double penalty_alpha = 1e3;
};
int cmd_entail(const EntailOptions& opt, std::ostream& out, std::ostream& err);

struct PlotOptions {
  fs::path checkpoint;
  fs::path edges;
  fs::path output;
  fs::path manifest;
  bool labels = true;
};
int cmd_plot(const PlotOptions& opt, std::ostream& out, std::ostream& err);

struct GridCell {
  FermiDiracParams params;
  double valid_map = 0.0;
};

struct GridResult {
  std::vector<GridCell> cells;
  std::size_t best = 0;
  EmbeddingMatrix best_matrix;
};

/// Trains one model per (radius, temperature) from the same initialisation and
/// keeps the one with the highest validation MAP. `edges` must carry valid tags;
/// validation edges are ranked against every known edge.
GridResult fermi_dirac_grid_search(const EdgeSet& edges, const EmbeddingMatrix& initial,
                                   TrainConfig cfg, const std::vector<double>& radii,
                                   const std::vector<double>& temperatures);

}  // namespace hyperembed::cli
