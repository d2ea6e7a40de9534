#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "hyperembed/embedding_store.hpp"

namespace hyperembed {

enum class Split : std::uint8_t { train, valid, test };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Set of relations over a vocabulary. Directed edges read "u is-a v";
/// undirected edges are kept in canonical (min, max) order. Every edge
/// carries a split tag, train by default.
class EdgeSet {
 public:
  EdgeSet() = default;
  EdgeSet(std::size_t node_count, bool directed) : node_count_(node_count), directed_(directed) {}

  /// Adds (u, v); returns false if it was already present. Self-loops and
  /// out-of-range ids throw InputError.
  bool add(NodeId u, NodeId v, Split split = Split::train);
  bool contains(NodeId u, NodeId v) const;

  std::size_t node_count() const noexcept { return node_count_; }
  /// Grows the id range (never shrinks it).
  void set_node_count(std::size_t n) { node_count_ = std::max(node_count_, n); }
  bool directed() const noexcept { return directed_; }
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<Split>& splits() const noexcept { return splits_; }
  Split split_of(std::size_t index) const { return splits_.at(index); }
  void set_split(std::size_t index, Split s) { splits_.at(index) = s; }

  /// Edges carrying the given tag, as a new all-train set over the same ids.
  EdgeSet filter(Split split) const;
  std::size_t count(Split split) const;

 private:
  static std::uint64_t key(NodeId u, NodeId v) {
    return (std::uint64_t{u} << 32) | std::uint64_t{v};
  }

  std::size_t node_count_ = 0;
  bool directed_ = true;
  std::vector<Edge> edges_;
  std::vector<Split> splits_;
  std::unordered_set<std::uint64_t> index_;
};

struct EdgeList {
  EdgeSet edges;
  Vocabulary vocab;
};

/// Reads `<u><TAB><v>` lines (and, when `allow_split_column`, an optional third
/// `train|valid|test` column). Blank lines and `#` comments are skipped,
/// duplicates collapse, self-loops are rejected. Symbols are interned into
/// `vocab` in first-appearance order.
EdgeSet read_edges(std::istream& in, const std::string& source, bool directed, Vocabulary& vocab,
                   bool allow_split_column = false);
EdgeList parse_edge_list(const std::filesystem::path& path, bool directed,
                         bool allow_split_column = false);
/// Like parse_edge_list but resolves symbols against a fixed vocabulary;
/// unknown symbols are a parse error.
EdgeSet parse_edge_list_with_vocabulary(const std::filesystem::path& path, bool directed,
                                        const Vocabulary& vocab, bool allow_split_column = true);

/// Writes two columns, or three with the split tag when `with_splits`.
void write_edges(std::ostream& out, const EdgeSet& edges, const Vocabulary& vocab,
                 bool with_splits);

/// All pairs (u, w) with w reachable from u by one or more edges. The input
/// must be a directed acyclic graph; a cycle raises InputError naming one of
/// its nodes. Output is ordered by u, then w.
EdgeSet transitive_closure(const EdgeSet& edges);

/// What the held-out fractions of split_links are measured against.
enum class HoldoutBase {
  closure,   // fractions of all edges in the closure
  eligible,  // fractions of the edges that avoid roots and leaves
};

struct SplitRequest {
  double valid_frac = 0.05;
  double test_frac = 0.05;
  std::uint64_t seed = 0;
  HoldoutBase base = HoldoutBase::closure;
};

/// Tags a copy of `closure` with train/valid/test. Held-out edges never touch a
/// root (no outgoing edge) or a leaf (no incoming edge), and every node keeps
/// at least one training edge. Infeasible requests raise InputError stating the
/// achievable maximum.
EdgeSet split_links(const EdgeSet& closure, const SplitRequest& request);

/// Per-node neighbour lists. Directed sets index out-neighbours; undirected
/// sets index both endpoints.
class Adjacency {
 public:
  explicit Adjacency(const EdgeSet& edges);
  /// Only edges carrying `split` are indexed.
  Adjacency(const EdgeSet& edges, Split split);

  std::span<const NodeId> neighbors(NodeId u) const {
    return {targets_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  bool has_edge(NodeId u, NodeId v) const;
  std::size_t node_count() const noexcept { return offsets_.size() - 1; }

 private:
  void build(const EdgeSet& edges, std::optional<Split> only);

  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;  // sorted within each node
};

inline constexpr std::size_t kDefaultNegatives = 10;

/// Draws negatives for u uniformly from N(u) = {v : (u, v) not observed} + {u}.
/// Each instance owns its generator; share the Adjacency, not the sampler.
class NegativeSampler {
 public:
  NegativeSampler(const Adjacency& adjacency, std::uint64_t seed,
                  std::size_t k = kDefaultNegatives);

  std::vector<NodeId> sample(NodeId u);
  void sample_into(NodeId u, std::vector<NodeId>& out);
  std::size_t k() const noexcept { return k_; }

 private:
  const Adjacency* adjacency_;
  std::mt19937_64 engine_;
  std::size_t k_;
  std::vector<NodeId> complement_;
};

}  // namespace hyperembed
