#include "hyperembed/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "hyperembed/errors.hpp"
#include "hyperembed/random.hpp"

namespace hyperembed {

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train:
      return "train";
    case Split::valid:
      return "valid";
    case Split::test:
      return "test";
  }
  return "unknown";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "valid") return Split::valid;
  if (name == "test") return Split::test;
  throw InputError("unknown split tag '" + std::string(name) + "'");
}

bool EdgeSet::add(NodeId u, NodeId v, Split split) {
  if (u == v) throw InputError("self-loop on node " + std::to_string(u));
  if (u >= node_count_ || v >= node_count_) throw InputError("edge endpoint out of range");
  if (!directed_ && u > v) std::swap(u, v);
  if (!index_.insert(key(u, v)).second) return false;
  edges_.push_back({u, v});
  splits_.push_back(split);
  return true;
}

bool EdgeSet::contains(NodeId u, NodeId v) const {
  if (!directed_ && u > v) std::swap(u, v);
  return index_.count(key(u, v)) != 0;
}

EdgeSet EdgeSet::filter(Split split) const {
  EdgeSet out(node_count_, directed_);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (splits_[i] == split) out.add(edges_[i].u, edges_[i].v);
  }
  return out;
}

std::size_t EdgeSet::count(Split split) const {
  return static_cast<std::size_t>(std::count(splits_.begin(), splits_.end(), split));
}

namespace {

std::vector<std::string_view> tab_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find('\t', start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

template <class Resolve>
EdgeSet read_edges_impl(std::istream& in, const std::string& source, bool directed,
                        bool allow_split_column, std::size_t initial_nodes, Resolve&& resolve) {
  EdgeSet edges(initial_nodes, directed);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = tab_fields(line);
    const bool ok = fields.size() == 2 || (allow_split_column && fields.size() == 3);
    if (!ok) {
      throw ParseError(source, line_no,
                       allow_split_column ? "expected '<u><TAB><v>[<TAB><split>]'"
                                          : "expected exactly one tab: '<u><TAB><v>'");
    }
    try {
      const NodeId u = resolve(fields[0]);
      const NodeId v = resolve(fields[1]);
      edges.set_node_count(std::size_t{std::max(u, v)} + 1);
      if (u == v) throw InputError("self-loop '" + std::string(fields[0]) + "'");
      const Split split = fields.size() == 3 ? parse_split(fields[2]) : Split::train;
      edges.add(u, v, split);
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  if (in.bad()) throw InputError("failed reading '" + source + "'");
  return edges;
}

}  // namespace

EdgeSet read_edges(std::istream& in, const std::string& source, bool directed, Vocabulary& vocab,
                   bool allow_split_column) {
  EdgeSet edges = read_edges_impl(in, source, directed, allow_split_column, vocab.size(),
                                  [&](std::string_view s) { return vocab.intern(s); });
  edges.set_node_count(vocab.size());
  return edges;
}

EdgeList parse_edge_list(const std::filesystem::path& path, bool directed,
                         bool allow_split_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open edge list '" + path.string() + "'");
  EdgeList out;
  out.edges = read_edges(in, path.string(), directed, out.vocab, allow_split_column);
  return out;
}

EdgeSet parse_edge_list_with_vocabulary(const std::filesystem::path& path, bool directed,
                                        const Vocabulary& vocab, bool allow_split_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open edge list '" + path.string() + "'");
  EdgeSet edges = read_edges_impl(in, path.string(), directed, allow_split_column, vocab.size(),
                                  [&](std::string_view s) { return vocab.at(s); });
  return edges;
}

void write_edges(std::ostream& out, const EdgeSet& edges, const Vocabulary& vocab,
                 bool with_splits) {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges.edges()[i];
    out << vocab.symbol(e.u) << '\t' << vocab.symbol(e.v);
    if (with_splits) out << '\t' << to_string(edges.split_of(i));
    out << '\n';
  }
}

EdgeSet transitive_closure(const EdgeSet& edges) {
  if (!edges.directed()) throw InputError("transitive closure requires directed edges");
  const Adjacency adj(edges);
  const std::size_t n = edges.node_count();

  // Cycle check: iterative three-colour DFS.
  enum : std::uint8_t { white, grey, black };
  std::vector<std::uint8_t> colour(n, white);
  std::vector<std::pair<NodeId, std::size_t>> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (colour[start] != white) continue;
    stack.emplace_back(static_cast<NodeId>(start), 0);
    colour[start] = grey;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const auto out = adj.neighbors(node);
      if (next == out.size()) {
        colour[node] = black;
        stack.pop_back();
        continue;
      }
      const NodeId w = out[next++];
      if (colour[w] == grey) {
        throw InputError("cycle detected through node id " + std::to_string(w));
      }
      if (colour[w] == white) {
        colour[w] = grey;
        stack.emplace_back(w, 0);
      }
    }
  }

  EdgeSet closure(n, true);
  std::vector<std::size_t> stamp(n, 0);
  std::vector<NodeId> frontier;
  std::vector<NodeId> reached;
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t mark = u + 1;
    frontier.assign(adj.neighbors(static_cast<NodeId>(u)).begin(),
                    adj.neighbors(static_cast<NodeId>(u)).end());
    reached.clear();
    while (!frontier.empty()) {
      const NodeId w = frontier.back();
      frontier.pop_back();
      if (stamp[w] == mark) continue;
      stamp[w] = mark;
      reached.push_back(w);
      for (NodeId x : adj.neighbors(w)) {
        if (stamp[x] != mark) frontier.push_back(x);
      }
    }
    std::sort(reached.begin(), reached.end());
    for (NodeId w : reached) closure.add(static_cast<NodeId>(u), w);
  }
  return closure;
}

namespace {

std::size_t requested_count(double frac, std::size_t base) {
  if (frac <= 0.0) return 0;
  // The small slack keeps exact products like 0.1 * 1640 from rounding up.
  return static_cast<std::size_t>(std::ceil(frac * static_cast<double>(base) - 1e-9));
}

}  // namespace

EdgeSet split_links(const EdgeSet& closure, const SplitRequest& request) {
  if (!closure.directed()) throw InputError("split_links requires a directed closure");
  auto check_frac = [](double f, const char* name) {
    if (!(f >= 0.0 && f < 0.5)) {
      throw InputError(std::string(name) + " fraction must lie in [0, 0.5)");
    }
  };
  check_frac(request.valid_frac, "validation");
  check_frac(request.test_frac, "test");

  EdgeSet out = closure;
  for (std::size_t i = 0; i < out.size(); ++i) out.set_split(i, Split::train);

  const std::size_t n = closure.node_count();
  std::vector<std::size_t> out_degree(n, 0), in_degree(n, 0);
  for (const Edge& e : closure.edges()) {
    ++out_degree[e.u];
    ++in_degree[e.v];
  }
  // Roots have no hypernym (no outgoing edge); leaves have no hyponym.
  auto is_root = [&](NodeId x) { return out_degree[x] == 0; };
  auto is_leaf = [&](NodeId x) { return in_degree[x] == 0; };

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < closure.size(); ++i) {
    const Edge& e = closure.edges()[i];
    if (!is_root(e.u) && !is_leaf(e.u) && !is_root(e.v) && !is_leaf(e.v)) {
      candidates.push_back(i);
    }
  }

  const std::size_t base =
      request.base == HoldoutBase::closure ? closure.size() : candidates.size();
  const std::size_t n_valid = requested_count(request.valid_frac, base);
  const std::size_t n_test = requested_count(request.test_frac, base);
  const std::size_t wanted = n_valid + n_test;
  if (wanted == 0) return out;

  auto infeasible = [&](std::size_t achievable) {
    const double max_frac =
        base == 0 ? 0.0 : static_cast<double>(achievable) / static_cast<double>(base);
    return InputError("cannot hold out " + std::to_string(wanted) + " edges: at most " +
                      std::to_string(achievable) + " of " + std::to_string(base) +
                      " edges (fraction " + std::to_string(max_frac) +
                      ") avoid root and leaf nodes");
  };
  if (wanted > candidates.size()) throw infeasible(candidates.size());

  std::mt19937_64 engine(request.seed);
  shuffle(std::span<std::size_t>(candidates), engine);

  // Training degree (in + out) per node; a held-out edge may not leave an
  // endpoint without training edges.
  std::vector<std::size_t> train_degree(n, 0);
  for (std::size_t i = 0; i < n; ++i) train_degree[i] = in_degree[i] + out_degree[i];

  std::size_t assigned = 0;
  for (std::size_t index : candidates) {
    if (assigned == wanted) break;
    const Edge& e = closure.edges()[index];
    if (train_degree[e.u] < 2 || train_degree[e.v] < 2) continue;
    --train_degree[e.u];
    --train_degree[e.v];
    out.set_split(index, assigned < n_valid ? Split::valid : Split::test);
    ++assigned;
  }
  if (assigned < wanted) throw infeasible(assigned);
  return out;
}

Adjacency::Adjacency(const EdgeSet& edges) { build(edges, std::nullopt); }

Adjacency::Adjacency(const EdgeSet& edges, Split split) { build(edges, split); }

void Adjacency::build(const EdgeSet& edges, std::optional<Split> only) {
  const std::size_t n = edges.node_count();
  offsets_.assign(n + 1, 0);
  auto selected = [&](std::size_t i) { return !only || edges.split_of(i) == *only; };
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!selected(i)) continue;
    const Edge& e = edges.edges()[i];
    ++offsets_[e.u + 1];
    if (!edges.directed()) ++offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  targets_.assign(offsets_[n], 0);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!selected(i)) continue;
    const Edge& e = edges.edges()[i];
    targets_[fill[e.u]++] = e.v;
    if (!edges.directed()) targets_[fill[e.v]++] = e.u;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  }
}

bool Adjacency::has_edge(NodeId u, NodeId v) const {
  const auto out = neighbors(u);
  return std::binary_search(out.begin(), out.end(), v);
}

NegativeSampler::NegativeSampler(const Adjacency& adjacency, std::uint64_t seed, std::size_t k)
    : adjacency_(&adjacency), engine_(seed), k_(k) {}

std::vector<NodeId> NegativeSampler::sample(NodeId u) {
  std::vector<NodeId> out;
  sample_into(u, out);
  return out;
}

void NegativeSampler::sample_into(NodeId u, std::vector<NodeId>& out) {
  const std::size_t n = adjacency_->node_count();
  if (u >= n) throw InputError("node id out of range in negative sampling");
  out.clear();
  const auto neighbors = adjacency_->neighbors(u);
  const std::size_t admissible = n - neighbors.size();  // includes u itself
  if (admissible < 2) {
    out.assign(k_, u);
    return;
  }
  if (admissible * 10 >= n) {
    while (out.size() < k_) {
      const auto cand = static_cast<NodeId>(uniform_index(engine_, n));
      if (cand == u || !adjacency_->has_edge(u, cand)) out.push_back(cand);
    }
    return;
  }
  // Densely connected u: rejection would mostly miss, so draw from the
  // explicit complement instead. Both routes are uniform over N(u).
  complement_.clear();
  std::size_t j = 0;
  for (std::size_t cand = 0; cand < n; ++cand) {
    while (j < neighbors.size() && neighbors[j] < cand) ++j;
    if (j < neighbors.size() && neighbors[j] == cand) continue;
    complement_.push_back(static_cast<NodeId>(cand));
  }
  while (out.size() < k_) {
    out.push_back(complement_[uniform_index(engine_, complement_.size())]);
  }
}

}  // namespace hyperembed
