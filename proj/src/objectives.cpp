#include "hyperembed/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "hyperembed/errors.hpp"
#include "hyperembed/metric_kernels.hpp"

namespace hyperembed {

void SparseGradient::reset(std::size_t dim, bool with_translation) {
  dim_ = dim;
  ids_.clear();
  values_.clear();
  translation_.assign(with_translation ? dim : 0, 0.0);
}

std::span<double> SparseGradient::row(NodeId id) {
  for (std::size_t slot = 0; slot < ids_.size(); ++slot) {
    if (ids_[slot] == id) return {values_.data() + slot * dim_, dim_};
  }
  ids_.push_back(id);
  values_.resize(values_.size() + dim_, 0.0);
  return {values_.data() + (ids_.size() - 1) * dim_, dim_};
}

std::span<const double> SparseGradient::find(NodeId id) const {
  for (std::size_t slot = 0; slot < ids_.size(); ++slot) {
    if (ids_[slot] == id) return row_at(slot);
  }
  return {};
}

namespace {

// Adds weight * d score(a, b) / d(a, b, r) into grad. Coincident ids carry no
// point gradient (it cancels for the flat kinds and is singular for the ball).
void add_score_gradient(const EmbeddingMatrix& m, NodeId a, NodeId b, double weight,
                        SparseGradient& grad, std::vector<double>& scratch) {
  if (weight == 0.0) return;
  const std::size_t dim = m.dim();
  scratch.resize(dim);
  auto axpy = [&](std::span<double> dst, double w) {
    for (std::size_t i = 0; i < dim; ++i) dst[i] += w * scratch[i];
  };

  switch (m.score_kind()) {
    case ScoreKind::poincare: {
      if (a == b) return;
      const auto ra = m.row(a);
      const auto rb = m.row(b);
      const auto parts = distance_parts(ra, rb);
      if (!(parts.gamma > 1.0)) return;  // numerically coincident rows
      poincare_distance_grad(ra, rb, scratch);
      axpy(grad.row(a), weight);
      poincare_distance_grad(rb, ra, scratch);
      axpy(grad.row(b), weight);
      return;
    }
    case ScoreKind::euclidean: {
      if (a == b) return;
      euclidean_score_grad(m.row(a), m.row(b), scratch);
      axpy(grad.row(a), weight);
      axpy(grad.row(b), -weight);
      return;
    }
    case ScoreKind::translational: {
      translational_score_grad(m.row(a), m.row(b), m.translation(), scratch);
      if (a != b) {
        axpy(grad.row(a), weight);
        axpy(grad.row(b), -weight);
      }
      axpy(grad.translation(), weight);
      return;
    }
  }
}

double score_of(const EmbeddingMatrix& m, NodeId a, NodeId b) {
  if (a == b && m.score_kind() != ScoreKind::translational) return 0.0;
  return m.score(a, b);
}

void check_ids(const EmbeddingMatrix& m, NodeId u, NodeId v, std::span<const NodeId> negatives) {
  const auto n = m.count();
  if (u >= n || v >= n) throw InputError("example id out of range");
  for (NodeId id : negatives) {
    if (id >= n) throw InputError("negative id out of range");
  }
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double accumulate_ranking(const TrainingExample& ex, const EmbeddingMatrix& m,
                          SparseGradient& grad) {
  check_ids(m, ex.u, ex.v, ex.negatives);
  const std::size_t k = ex.negatives.size();
  auto candidate = [&](std::size_t i) { return i == 0 ? ex.v : ex.negatives[i - 1]; };

  thread_local std::vector<double> scores;
  thread_local std::vector<double> scratch;
  scores.resize(k + 1);
  double lowest = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    scores[i] = score_of(m, ex.u, candidate(i));
    lowest = i == 0 ? scores[i] : std::min(lowest, scores[i]);
  }
  double partition = 0.0;
  for (std::size_t i = 0; i <= k; ++i) partition += std::exp(lowest - scores[i]);
  const double loss = scores[0] - lowest + std::log(partition);
  if (!std::isfinite(loss)) throw NumericalError("ranking loss is not finite");

  // dL/ds_i = [i == 0] - softmax_i
  for (std::size_t i = 0; i <= k; ++i) {
    const double weight = (i == 0 ? 1.0 : 0.0) - std::exp(lowest - scores[i]) / partition;
    add_score_gradient(m, ex.u, candidate(i), weight, grad, scratch);
  }
  return loss;
}

ObjectiveResult ranking_loss_and_grads(const TrainingExample& ex, const EmbeddingMatrix& m) {
  ObjectiveResult result{0.0, SparseGradient(m.dim())};
  result.grad.reset(m.dim(), m.score_kind() == ScoreKind::translational);
  result.loss = accumulate_ranking(ex, m, result.grad);
  return result;
}

double fermi_dirac_prob(double dist, const FermiDiracParams& p) {
  return sigmoid((p.radius - dist) / p.temperature);
}

double accumulate_fermi_dirac(NodeId u, NodeId v, int label, std::span<const NodeId> negatives,
                              const EmbeddingMatrix& m, const FermiDiracParams& p,
                              SparseGradient& grad) {
  check_ids(m, u, v, negatives);
  if (!(p.radius > 0.0 && p.temperature > 0.0)) {
    throw InputError("Fermi-Dirac radius and temperature must be positive");
  }
  if (label != 0 && label != 1) throw InputError("label must be 0 or 1");
  thread_local std::vector<double> scratch;

  double loss = 0.0;
  auto term = [&](NodeId target, bool positive) {
    const double x = (score_of(m, u, target) - p.radius) / p.temperature;
    if (positive) {
      // -log P = softplus((d - r) / t)
      loss += softplus(x);
      add_score_gradient(m, u, target, sigmoid(x) / p.temperature, grad, scratch);
    } else {
      // -log(1 - P) = softplus((r - d) / t)
      loss += softplus(-x);
      add_score_gradient(m, u, target, -sigmoid(-x) / p.temperature, grad, scratch);
    }
  };
  term(v, label == 1);
  for (NodeId neg : negatives) term(neg, false);
  if (!std::isfinite(loss)) throw NumericalError("Fermi-Dirac loss is not finite");
  return loss;
}

ObjectiveResult fermi_dirac_loss_and_grads(NodeId u, NodeId v, int label,
                                           std::span<const NodeId> negatives,
                                           const EmbeddingMatrix& m,
                                           const FermiDiracParams& p) {
  ObjectiveResult result{0.0, SparseGradient(m.dim())};
  result.grad.reset(m.dim(), m.score_kind() == ScoreKind::translational);
  result.loss = accumulate_fermi_dirac(u, v, label, negatives, m, p, result.grad);
  return result;
}

}  // namespace hyperembed
