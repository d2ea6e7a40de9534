#include "hyperembed/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <thread>

#include "hyperembed/errors.hpp"

namespace hyperembed {

std::size_t rank_relation(NodeId u, NodeId v, const Adjacency& truth, const EmbeddingMatrix& m) {
  if (u >= m.count() || v >= m.count()) throw InputError("relation endpoint out of vocabulary");
  const double target = m.score(u, v);
  std::size_t closer = 0;
  std::size_t ties = 0;
  for (std::size_t c = 0; c < m.count(); ++c) {
    const auto cand = static_cast<NodeId>(c);
    if (cand == u || cand == v) continue;
    if (cand < truth.node_count() && u < truth.node_count() && truth.has_edge(u, cand)) continue;
    const double d = m.score(u, cand);
    if (d < target) {
      ++closer;
    } else if (d == target) {
      ++ties;
    }
  }
  return 1 + closer + (ties + 1) / 2;
}

double average_precision(std::vector<std::size_t> filtered_ranks) {
  if (filtered_ranks.empty()) throw InputError("average precision of an empty ranking");
  std::sort(filtered_ranks.begin(), filtered_ranks.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < filtered_ranks.size(); ++i) {
    const double hits = static_cast<double>(i + 1);
    sum += hits / static_cast<double>(filtered_ranks[i] + i);
  }
  return sum / static_cast<double>(filtered_ranks.size());
}

RankReport evaluate_ranking(const EdgeSet& relations, const EdgeSet& truth,
                            const EmbeddingMatrix& m, std::size_t threads) {
  if (relations.empty()) throw InputError("no relations to evaluate");
  if (relations.node_count() > m.count() || truth.node_count() > m.count()) {
    throw InputError("relation ids exceed the embedding count");
  }
  EdgeSet truth_full = truth;
  truth_full.set_node_count(m.count());
  const Adjacency truth_adj(truth_full);

  // Group relation indices by source node, in first-appearance order.
  const auto& rel = relations.edges();
  std::vector<std::vector<std::size_t>> by_source;
  std::vector<std::size_t> slot_of(m.count(), SIZE_MAX);
  std::vector<NodeId> sources;
  for (std::size_t i = 0; i < rel.size(); ++i) {
    const NodeId u = rel[i].u;
    if (slot_of[u] == SIZE_MAX) {
      slot_of[u] = sources.size();
      sources.push_back(u);
      by_source.emplace_back();
    }
    by_source[slot_of[u]].push_back(i);
  }

  RankReport report;
  report.ranks.assign(rel.size(), 0);
  std::vector<double> ap(sources.size(), 0.0);

  auto work = [&](std::size_t first, std::size_t stride) {
    std::vector<double> negatives;
    std::vector<std::size_t> filtered;
    for (std::size_t s = first; s < sources.size(); s += stride) {
      const NodeId u = sources[s];
      negatives.clear();
      for (std::size_t c = 0; c < m.count(); ++c) {
        const auto cand = static_cast<NodeId>(c);
        if (cand == u || truth_adj.has_edge(u, cand)) continue;
        negatives.push_back(m.score(u, cand));
      }
      std::sort(negatives.begin(), negatives.end());
      filtered.clear();
      for (std::size_t idx : by_source[s]) {
        const double target = m.score(u, rel[idx].v);
        const auto lo = std::lower_bound(negatives.begin(), negatives.end(), target);
        const auto hi = std::upper_bound(lo, negatives.end(), target);
        std::size_t ties = static_cast<std::size_t>(hi - lo);
        // A positive missing from `truth` sits among the negatives; drop its self-tie.
        if (!truth_adj.has_edge(u, rel[idx].v)) --ties;
        const std::size_t closer = static_cast<std::size_t>(lo - negatives.begin());
        const std::size_t rank = 1 + closer + (ties + 1) / 2;
        report.ranks[idx] = rank;
        filtered.push_back(rank);
      }
      ap[s] = average_precision(filtered);
    }
  };

  std::size_t workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = std::min(workers, sources.size());
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work, t, workers);
    for (auto& th : pool) th.join();
  }

  double rank_sum = 0.0;
  for (std::size_t r : report.ranks) rank_sum += static_cast<double>(r);
  report.relation_count = rel.size();
  report.mean_rank = rank_sum / static_cast<double>(rel.size());
  report.source_count = sources.size();
  report.map = std::accumulate(ap.begin(), ap.end(), 0.0) / static_cast<double>(ap.size());
  return report;
}

void write_rank_report(std::ostream& out, const RankReport& report) {
  out << "mean_rank\t" << format_double(report.mean_rank) << '\n'
      << "map\t" << format_double(report.map) << '\n'
      << "relations\t" << report.relation_count << '\n'
      << "sources\t" << report.source_count << '\n';
}

void write_rank_dump(std::ostream& out, const EdgeSet& relations, const RankReport& report,
                     const Vocabulary& vocab) {
  for (std::size_t i = 0; i < relations.size(); ++i) {
    const Edge& e = relations.edges()[i];
    out << vocab.symbol(e.u) << '\t' << vocab.symbol(e.v) << '\t' << report.ranks.at(i) << '\n';
  }
}

double entailment_score(NodeId u, NodeId v, const EmbeddingMatrix& m, double penalty_alpha) {
  if (m.score_kind() != ScoreKind::poincare) {
    throw InputError("entailment scoring requires a Poincare embedding");
  }
  if (u >= m.count() || v >= m.count()) throw InputError("entailment symbol out of vocabulary");
  const double norm_u = std::sqrt(squared_norm(m.row(u)));
  const double norm_v = std::sqrt(squared_norm(m.row(v)));
  return -(1.0 + penalty_alpha * (norm_v - norm_u)) * poincare_distance(m.row(u), m.row(v));
}

std::vector<EntailmentPair> read_entailment_pairs(std::istream& in, const std::string& source) {
  std::vector<EntailmentPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw ParseError(source, line_no, "expected '<u><TAB><v><TAB><score>'");
    }
    EntailmentPair p;
    p.u = line.substr(0, t1);
    p.v = line.substr(t1 + 1, t2 - t1 - 1);
    try {
      validate_symbol(p.u);
      validate_symbol(p.v);
      p.gold = parse_double(std::string_view(line).substr(t2 + 1));
    } catch (const InputError& e) {
      throw ParseError(source, line_no, e.what());
    }
    if (!(p.gold >= 0.0 && p.gold <= 10.0)) {
      throw ParseError(source, line_no, "gold rating outside [0, 10]");
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

EntailmentReport evaluate_entailment(std::span<const EntailmentPair> pairs,
                                     const Vocabulary& vocab, const EmbeddingMatrix& m,
                                     double penalty_alpha) {
  std::vector<double> model;
  std::vector<double> gold;
  for (const EntailmentPair& p : pairs) {
    const auto u = vocab.find(p.u);
    const auto v = vocab.find(p.v);
    if (!u || !v) continue;
    model.push_back(entailment_score(*u, *v, m, penalty_alpha));
    gold.push_back(p.gold);
  }
  if (model.size() < 2) throw InputError("fewer than two scorable entailment pairs");
  EntailmentReport report;
  report.scored = model.size();
  report.total = pairs.size();
  report.coverage = static_cast<double>(report.scored) / static_cast<double>(report.total);
  report.spearman_rho = spearman_rho(model, gold);
  return report;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share the mean of ranks i+1..j+1
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("pearson needs two equal lists of >= 2");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DomainError("correlation is undefined for a constant list");
  return sxy / std::sqrt(sxx * syy);
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

}  // namespace hyperembed
