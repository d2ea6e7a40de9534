#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hyperembed/dataset.hpp"
#include "hyperembed/embedding_store.hpp"

namespace hyperembed {

inline constexpr double kDefaultEntailmentPenalty = 1e3;

struct RankReport {
  std::vector<std::size_t> ranks;  // one per evaluated relation, input order
  double mean_rank = 0.0;
  double map = 0.0;
  std::size_t relation_count = 0;
  std::size_t source_count = 0;  // nodes contributing to MAP
};

/// Filtered rank of v among u's ground-truth negatives (every symbol other
/// than u that `truth` does not relate to u):
///   1 + #{closer negatives} + ceil(#{equally distant negatives} / 2).
std::size_t rank_relation(NodeId u, NodeId v, const Adjacency& truth, const EmbeddingMatrix& m);

/// AP of one source node from its positives' filtered ranks (any order).
/// The i-th best positive sits at list position r_i + (i - 1) once the
/// better-ranked positives are counted, giving precision i / (r_i + i - 1).
double average_precision(std::vector<std::size_t> filtered_ranks);

/// Mean rank over `relations` and MAP over their source nodes, each relation
/// ranked against the negatives of `truth`. `threads` == 0 picks the hardware
/// concurrency; results do not depend on the thread count.
RankReport evaluate_ranking(const EdgeSet& relations, const EdgeSet& truth,
                            const EmbeddingMatrix& m, std::size_t threads = 0);

/// Writes `metric<TAB>value` lines.
void write_rank_report(std::ostream& out, const RankReport& report);
/// Writes `u<TAB>v<TAB>rank` lines.
void write_rank_dump(std::ostream& out, const EdgeSet& relations, const RankReport& report,
                     const Vocabulary& vocab);

/// Graded is-a(u, v) score -(1 + alpha (|v| - |u|)) d(u, v).
double entailment_score(NodeId u, NodeId v, const EmbeddingMatrix& m,
                        double penalty_alpha = kDefaultEntailmentPenalty);

struct EntailmentPair {
  std::string u;
  std::string v;
  double gold = 0.0;  // rating on [0, 10]
};

/// Reads `u<TAB>v<TAB>score` lines; `#` comments and blank lines are skipped.
std::vector<EntailmentPair> read_entailment_pairs(std::istream& in, const std::string& source);

struct EntailmentReport {
  double spearman_rho = 0.0;
  double coverage = 0.0;
  std::size_t scored = 0;
  std::size_t total = 0;
};

/// Spearman's rho between model scores and gold ratings over the pairs whose
/// symbols are both in `vocab`; out-of-vocabulary pairs are skipped and counted.
EntailmentReport evaluate_entailment(std::span<const EntailmentPair> pairs,
                                     const Vocabulary& vocab, const EmbeddingMatrix& m,
                                     double penalty_alpha = kDefaultEntailmentPenalty);

/// Ranks 1..n with tied values sharing their average rank.
std::vector<double> average_ranks(std::span<const double> values);
double pearson(std::span<const double> x, std::span<const double> y);
double spearman_rho(std::span<const double> x, std::span<const double> y);

}  // namespace hyperembed
