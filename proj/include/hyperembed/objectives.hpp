#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hyperembed/embedding_store.hpp"

namespace hyperembed {

/// One positive pair with the negatives drawn for its source node.
struct TrainingExample {
  NodeId u = 0;
  NodeId v = 0;
  std::vector<NodeId> negatives;
};

struct FermiDiracParams {
  double radius = 1.0;
  double temperature = 1.0;
};

/// Row gradients keyed by node id, plus the translation gradient when the
/// score kind has one. Rows touched more than once are accumulated.
class SparseGradient {
 public:
  explicit SparseGradient(std::size_t dim = 0) : dim_(dim) {}

  void reset(std::size_t dim, bool with_translation);

  /// Returns the (zero-initialised on first touch) gradient slot of `id`.
  std::span<double> row(NodeId id);
  std::span<const double> row_at(std::size_t slot) const {
    return {values_.data() + slot * dim_, dim_};
  }
  /// Gradient of `id`, or an empty span if the row was never touched.
  std::span<const double> find(NodeId id) const;

  std::span<const NodeId> ids() const { return ids_; }
  std::span<double> translation() { return translation_; }
  std::span<const double> translation() const { return translation_; }
  std::size_t dim() const noexcept { return dim_; }

 private:
  std::size_t dim_;
  std::vector<NodeId> ids_;
  std::vector<double> values_;
  std::vector<double> translation_;
};

struct ObjectiveResult {
  double loss = 0.0;
  SparseGradient grad;
};

/// Negative log-softmax of the positive against the sampled negatives,
///   loss = d(u, v) + log sum_{c in {v} + negatives} exp(-d(u, c)),
/// with exact Euclidean gradients through the matrix's score kind. A negative
/// equal to u enters the denominator but contributes no point gradient.
ObjectiveResult ranking_loss_and_grads(const TrainingExample& ex, const EmbeddingMatrix& m);
/// Accumulates into `grad` (which must already be reset) and returns the loss.
double accumulate_ranking(const TrainingExample& ex, const EmbeddingMatrix& m,
                          SparseGradient& grad);

/// 1 / (exp((dist - r) / t) + 1), evaluated without overflow.
double fermi_dirac_prob(double dist, const FermiDiracParams& p);

/// Cross-entropy of the edge (u, v) with the given label plus one label-0 term
/// per negative.
ObjectiveResult fermi_dirac_loss_and_grads(NodeId u, NodeId v, int label,
                                           std::span<const NodeId> negatives,
                                           const EmbeddingMatrix& m, const FermiDiracParams& p);
double accumulate_fermi_dirac(NodeId u, NodeId v, int label, std::span<const NodeId> negatives,
                              const EmbeddingMatrix& m, const FermiDiracParams& p,
                              SparseGradient& grad);

}  // namespace hyperembed
