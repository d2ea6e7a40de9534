#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hyperembed/metric_kernels.hpp"

namespace hyperembed {

using NodeId = std::uint32_t;

/// Reserved checkpoint symbol holding the translation vector.
inline constexpr std::string_view kTranslationSymbol = "__translation__";

/// Bijection between symbols and contiguous ids, in first-appearance order.
class Vocabulary {
 public:
  /// Returns the id of `symbol`, adding it if unseen.
  NodeId intern(std::string_view symbol);
  std::optional<NodeId> find(std::string_view symbol) const;
  /// Throws InputError for unknown symbols.
  NodeId at(std::string_view symbol) const;
  const std::string& symbol(NodeId id) const { return symbols_.at(id); }
  std::size_t size() const noexcept { return symbols_.size(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.symbols_ == b.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, NodeId> ids_;
};

/// Checks the symbol rules (non-empty, no tab/newline); throws InputError.
void validate_symbol(std::string_view symbol);

/// Dense count x dim table of embeddings plus the optional translation vector.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t count, std::size_t dim, ScoreKind kind,
                  double epsilon = kDefaultEpsilon);

  std::size_t count() const noexcept { return count_; }
  std::size_t dim() const noexcept { return dim_; }
  ScoreKind score_kind() const noexcept { return kind_; }
  double epsilon() const noexcept { return epsilon_; }

  std::span<double> row(NodeId id) { return {data_.data() + std::size_t{id} * dim_, dim_}; }
  std::span<const double> row(NodeId id) const {
    return {data_.data() + std::size_t{id} * dim_, dim_};
  }

  /// Empty unless the score kind is translational.
  std::span<double> translation() { return translation_; }
  std::span<const double> translation() const { return translation_; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Dissimilarity of (u, v) under this matrix's score kind.
  double score(NodeId u, NodeId v) const;

  /// True iff every Poincare row lies within the (1 - epsilon) ball (always
  /// true for the flat kinds) and every coordinate is finite.
  bool satisfies_ball_invariant() const;

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t count_ = 0;
  std::size_t dim_ = 0;
  ScoreKind kind_ = ScoreKind::poincare;
  double epsilon_ = kDefaultEpsilon;
  std::vector<double> data_;
  std::vector<double> translation_;
};

/// Uniform(-0.001, 0.001) initialization from a seeded generator; the
/// translation vector starts at zero.
EmbeddingMatrix init_embeddings(std::size_t count, std::size_t dim, std::uint64_t seed,
                                 ScoreKind kind, double epsilon = kDefaultEpsilon);

struct Checkpoint {
  EmbeddingMatrix matrix;
  Vocabulary vocab;
};

void write_checkpoint(std::ostream& out, const EmbeddingMatrix& m, const Vocabulary& vocab);
void save_checkpoint(const std::filesystem::path& path, const EmbeddingMatrix& m,
                     const Vocabulary& vocab);

/// `source` names the stream in error messages.
Checkpoint read_checkpoint(std::istream& in, const std::string& source = "<checkpoint>");
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);
/// Strict parse of a full token; throws InputError on trailing garbage.
double parse_double(std::string_view token);

}  // namespace hyperembed
