#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hyperembed/dataset.hpp"
#include "hyperembed/embedding_store.hpp"
#include "hyperembed/objectives.hpp"

namespace hyperembed::testing {

/// Balanced tree with `branching` children per node and `levels` levels below
/// the root; edges point child -> parent ("child is-a parent"). Symbols are
/// n0 (root), n1, n2, ... in breadth-first order.
inline EdgeList balanced_tree(std::size_t branching, std::size_t levels) {
  EdgeList out;
  out.vocab.intern("n0");
  std::vector<NodeId> frontier{0};
  std::vector<Edge> edges;
  for (std::size_t depth = 0; depth < levels; ++depth) {
    std::vector<NodeId> next;
    for (NodeId parent : frontier) {
      for (std::size_t c = 0; c < branching; ++c) {
        const NodeId child = out.vocab.intern("n" + std::to_string(out.vocab.size()));
        edges.push_back({child, parent});
        next.push_back(child);
      }
    }
    frontier = std::move(next);
  }
  out.edges = EdgeSet(out.vocab.size(), true);
  for (const Edge& e : edges) out.edges.add(e.u, e.v);
  return out;
}

/// Reachability by depth-first search from every node, written without any
/// library code: reach[u][w] is true iff w is reachable from u by >= 1 edge.
inline std::vector<std::vector<bool>> reachability_oracle(std::size_t n,
                                                          const std::vector<Edge>& edges) {
  std::vector<std::vector<NodeId>> out(n);
  for (const Edge& e : edges) out[e.u].push_back(e.v);
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t u = 0; u < n; ++u) {
    std::vector<NodeId> stack(out[u].begin(), out[u].end());
    while (!stack.empty()) {
      const NodeId w = stack.back();
      stack.pop_back();
      if (reach[u][w]) continue;
      reach[u][w] = true;
      for (NodeId x : out[w]) stack.push_back(x);
    }
  }
  return reach;
}

/// Uniform direction scaled to a uniform norm in [0, max_norm].
inline std::vector<double> random_ball_point(std::mt19937_64& rng, std::size_t dim,
                                             double max_norm) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& c : x) {
      c = gauss(rng);
      norm += c * c;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  const double target = max_norm * unit(rng);
  for (double& c : x) c *= target / norm;
  return x;
}

/// Central finite-difference gradient of f at x.
inline std::vector<double> central_difference(const std::function<double(std::vector<double>&)>& f,
                                              std::vector<double> x, double step) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double plus = f(x);
    x[i] = saved - step;
    const double minus = f(x);
    x[i] = saved;
    g[i] = (plus - minus) / (2.0 * step);
  }
  return g;
}

/// Five-point central difference; O(step^4) truncation, so a larger step keeps
/// round-off small for losses whose gradients are tiny next to their value.
inline std::vector<double> five_point_difference(const std::function<double(std::vector<double>&)>& f,
                                                 std::vector<double> x, double step) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    auto at = [&](double offset) {
      x[i] = saved + offset;
      return f(x);
    };
    const double p2 = at(2 * step), p1 = at(step), m1 = at(-step), m2 = at(-2 * step);
    x[i] = saved;
    g[i] = (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * step);
  }
  return g;
}

/// max_i |a_i - b_i| / max(max_i |b_i|, floor): error relative to the size of
/// the reference gradient.
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b,
                             double floor = 1e-12) {
  double diff = 0.0, scale = floor;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / scale;
}

/// All parameters of `m` (rows, then translation) as one flat vector.
inline std::vector<double> flatten(const EmbeddingMatrix& m) {
  std::vector<double> x(m.data().begin(), m.data().end());
  x.insert(x.end(), m.translation().begin(), m.translation().end());
  return x;
}

inline void unflatten(const std::vector<double>& x, EmbeddingMatrix& m) {
  const auto rows = m.data().size();
  std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(rows), m.data().begin());
  std::copy(x.begin() + static_cast<std::ptrdiff_t>(rows), x.end(), m.translation().begin());
}

/// A sparse gradient laid out like flatten(m).
inline std::vector<double> densify(const SparseGradient& g, const EmbeddingMatrix& m) {
  std::vector<double> out(m.data().size() + m.translation().size(), 0.0);
  for (std::size_t slot = 0; slot < g.ids().size(); ++slot) {
    const auto row = g.row_at(slot);
    std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(g.ids()[slot] * m.dim()));
  }
  std::copy(g.translation().begin(), g.translation().end(),
            out.begin() + static_cast<std::ptrdiff_t>(m.data().size()));
  return out;
}

/// Relative error of an objective's analytic gradient against five-point
/// differences over every parameter of `m`. Gradients smaller than 1e-6 are
/// compared in absolute terms: an exactly zero gradient (a negative equal to
/// the positive, say) has no meaningful relative error.
inline double objective_gradient_error(
    EmbeddingMatrix m, const std::function<double(const EmbeddingMatrix&)>& loss,
    const std::vector<double>& analytic, double step = 1e-4) {
  const auto numeric = five_point_difference(
      [&](std::vector<double>& x) {
        unflatten(x, m);
        return loss(m);
      },
      flatten(m), step);
  return relative_error(analytic, numeric, 1e-6);
}

struct OracleReport {
  std::vector<std::size_t> ranks;
  double mean_rank = 0.0;
  double map = 0.0;
};

/// Ranking by materialising, for every relation, the full candidate list of
/// (score, is_target) pairs and sorting it. AP is computed from the sorted
/// filtered ranks of each source's positives.
inline OracleReport brute_force_ranking(const EdgeSet& relations, const EdgeSet& truth,
                                        const EmbeddingMatrix& m) {
  const std::size_t n = m.count();
  std::vector<std::vector<bool>> related(n, std::vector<bool>(n, false));
  for (const Edge& e : truth.edges()) {
    related[e.u][e.v] = true;
    if (!truth.directed()) related[e.v][e.u] = true;
  }
  OracleReport out;
  std::vector<NodeId> sources;
  std::vector<std::vector<std::size_t>> per_source(n);
  for (const Edge& rel : relations.edges()) {
    std::vector<std::pair<double, bool>> list;
    list.emplace_back(m.score(rel.u, rel.v), true);
    for (std::size_t c = 0; c < n; ++c) {
      if (c == rel.u || c == rel.v || related[rel.u][c]) continue;
      list.emplace_back(m.score(rel.u, static_cast<NodeId>(c)), false);
    }
    std::sort(list.begin(), list.end());
    std::size_t target_pos = 0;
    while (!list[target_pos].second) ++target_pos;
    std::size_t closer = 0, ties = 0;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i == target_pos) continue;
      if (list[i].first < list[target_pos].first) ++closer;
      if (list[i].first == list[target_pos].first) ++ties;
    }
    const std::size_t rank = 1 + closer + (ties + 1) / 2;
    out.ranks.push_back(rank);
    if (per_source[rel.u].empty()) sources.push_back(rel.u);
    per_source[rel.u].push_back(rank);
  }
  double rank_sum = 0.0;
  for (std::size_t r : out.ranks) rank_sum += static_cast<double>(r);
  out.mean_rank = rank_sum / static_cast<double>(out.ranks.size());
  double ap_sum = 0.0;
  for (NodeId u : sources) {
    auto ranks = per_source[u];
    std::sort(ranks.begin(), ranks.end());
    double ap = 0.0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      ap += static_cast<double>(i + 1) / static_cast<double>(ranks[i] + i);
    }
    ap_sum += ap / static_cast<double>(ranks.size());
  }
  out.map = ap_sum / static_cast<double>(sources.size());
  return out;
}

/// Spearman's rho by counting: rank_i = 1 + #{x_j < x_i} + #{j != i, x_j == x_i} / 2,
/// then Pearson in long double.
inline double spearman_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<long double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      long double below = 0, equal = 0;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] < v[i]) below += 1;
        if (j != i && v[j] == v[i]) equal += 1;
      }
      r[i] = 1 + below + equal / 2;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const long double n = static_cast<long double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

/// Random graph of 2..max_nodes nodes with 2-d embeddings. Coordinates sit on
/// a coarse grid on odd trials so that equal distances (ties) are common.
struct RandomRankingInstance {
  EdgeSet truth;
  EdgeSet relations;
  EmbeddingMatrix m;
};

inline RandomRankingInstance random_ranking_instance(std::mt19937_64& rng, std::size_t max_nodes,
                                                     ScoreKind kind, bool coarse) {
  const std::size_t n = 2 + rng() % (max_nodes - 1);
  RandomRankingInstance inst{EdgeSet(n, true), EdgeSet(n, true), EmbeddingMatrix(n, 2, kind)};
  std::uniform_real_distribution<double> coord(-0.6, 0.6);
  for (double& x : inst.m.data()) {
    x = coarse ? 0.2 * static_cast<double>(static_cast<int>(rng() % 7) - 3) : coord(rng);
  }
  for (double& x : inst.m.translation()) x = coord(rng);
  const std::size_t edges = 1 + rng() % (2 * n);
  for (std::size_t e = 0; e < edges; ++e) {
    const auto u = static_cast<NodeId>(rng() % n), v = static_cast<NodeId>(rng() % n);
    if (u == v) continue;
    inst.truth.add(u, v);
    if (rng() % 2 == 0) inst.relations.add(u, v);
  }
  // Occasionally evaluate a relation the truth set does not contain.
  const auto u = static_cast<NodeId>(rng() % n), v = static_cast<NodeId>(rng() % n);
  if (u != v) inst.relations.add(u, v);
  if (inst.relations.empty()) inst.relations.add(0, 1);
  return inst;
}

}  // namespace hyperembed::testing
