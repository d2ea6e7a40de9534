#include "hyperembed/embedding_store.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <unordered_set>

#include "hyperembed/errors.hpp"

namespace hyperembed {

NodeId Vocabulary::intern(std::string_view symbol) {
  if (auto it = ids_.find(std::string(symbol)); it != ids_.end()) return it->second;
  validate_symbol(symbol);
  const auto id = static_cast<NodeId>(symbols_.size());
  symbols_.emplace_back(symbol);
  ids_.emplace(symbols_.back(), id);
  return id;
}

std::optional<NodeId> Vocabulary::find(std::string_view symbol) const {
  if (auto it = ids_.find(std::string(symbol)); it != ids_.end()) return it->second;
  return std::nullopt;
}

NodeId Vocabulary::at(std::string_view symbol) const {
  if (auto id = find(symbol)) return *id;
  throw InputError("unknown symbol '" + std::string(symbol) + "'");
}

void validate_symbol(std::string_view symbol) {
  if (symbol.empty()) throw InputError("empty symbol");
  if (symbol.find_first_of("\t\n\r") != std::string_view::npos) {
    throw InputError("symbol contains a tab or newline: '" + std::string(symbol) + "'");
  }
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t count, std::size_t dim, ScoreKind kind,
                                 double epsilon)
    : count_(count), dim_(dim), kind_(kind), epsilon_(epsilon), data_(count * dim, 0.0) {
  if (dim == 0) throw InputError("embedding dimension must be positive");
  if (kind == ScoreKind::translational) translation_.assign(dim, 0.0);
}

double EmbeddingMatrix::score(NodeId u, NodeId v) const {
  switch (kind_) {
    case ScoreKind::poincare:
      return poincare_distance(row(u), row(v));
    case ScoreKind::euclidean:
      return euclidean_score(row(u), row(v));
    case ScoreKind::translational:
      return translational_score(row(u), row(v), translation_);
  }
  return 0.0;
}

bool EmbeddingMatrix::satisfies_ball_invariant() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  if (kind_ != ScoreKind::poincare) return true;
  const double max_norm = 1.0 - epsilon_;
  for (std::size_t i = 0; i < count_; ++i) {
    if (std::sqrt(squared_norm(row(static_cast<NodeId>(i)))) > max_norm) return false;
  }
  return true;
}

EmbeddingMatrix init_embeddings(std::size_t count, std::size_t dim, std::uint64_t seed,
                                 ScoreKind kind, double epsilon) {
  if (count == 0) throw InputError("embedding count must be positive");
  EmbeddingMatrix m(count, dim, kind, epsilon);
  std::mt19937_64 engine(seed);
  // Midpoints of a 2^53 grid give values strictly inside (-0.001, 0.001)
  // independent of the standard library's distribution implementation.
  for (double& x : m.data()) {
    const double unit = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
    x = -0.001 + 0.002 * unit;
  }
  return m;
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw DomainError("cannot format value");
  return std::string(buf, end);
}

double parse_double(std::string_view token) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || token.empty()) {
    throw InputError("invalid number '" + std::string(token) + "'");
  }
  return value;
}

namespace {

void write_row(std::ostream& out, std::string_view symbol, std::span<const double> coords) {
  out << symbol << '\t';
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i) out << ',';
    out << format_double(coords[i]);
  }
  out << '\n';
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

void write_checkpoint(std::ostream& out, const EmbeddingMatrix& m, const Vocabulary& vocab) {
  if (vocab.size() != m.count()) {
    throw InputError("vocabulary size does not match embedding count");
  }
  out << "#hyperembed v1\tdim=" << m.dim() << "\tscore=" << to_string(m.score_kind())
      << "\tepsilon=" << format_double(m.epsilon()) << '\n';
  for (std::size_t i = 0; i < m.count(); ++i) {
    const auto id = static_cast<NodeId>(i);
    write_row(out, vocab.symbol(id), m.row(id));
  }
  if (m.score_kind() == ScoreKind::translational) {
    write_row(out, kTranslationSymbol, m.translation());
  }
}

void save_checkpoint(const std::filesystem::path& path, const EmbeddingMatrix& m,
                     const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  write_checkpoint(out, m, vocab);
  out.flush();
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

Checkpoint read_checkpoint(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(source, line_no, "missing header");

  const auto fields = split(line, '\t');
  if (fields.size() != 4 || fields[0] != "#hyperembed v1") {
    throw ParseError(source, line_no, "malformed header");
  }
  auto value_of = [&](std::string_view field, std::string_view key) {
    if (field.substr(0, key.size()) != key) {
      throw ParseError(source, line_no, "expected header field '" + std::string(key) + "'");
    }
    return field.substr(key.size());
  };
  std::size_t dim = 0;
  ScoreKind kind{};
  double epsilon = 0.0;
  try {
    const auto dim_text = value_of(fields[1], "dim=");
    auto [ptr, ec] = std::from_chars(dim_text.data(), dim_text.data() + dim_text.size(), dim);
    if (ec != std::errc{} || ptr != dim_text.data() + dim_text.size() || dim == 0) {
      throw InputError("invalid dim");
    }
    kind = parse_score_kind(value_of(fields[2], "score="));
    epsilon = parse_double(value_of(fields[3], "epsilon="));
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon out of range");
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(source, line_no, std::string("malformed header: ") + e.what());
  }

  Vocabulary vocab;
  std::vector<double> coords;
  std::vector<double> translation;
  bool translation_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (translation_seen) {
      throw ParseError(source, line_no, "rows after the translation row");
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(source, line_no, "expected '<symbol><TAB><coordinates>'");
    }
    const std::string_view symbol(line.data(), tab);
    const auto values = split(std::string_view(line).substr(tab + 1), ',');
    if (values.size() != dim) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(dim) + " coordinates, found " +
                           std::to_string(values.size()));
    }
    std::vector<double> row;
    row.reserve(dim);
    for (auto token : values) {
      try {
        row.push_back(parse_double(token));
      } catch (const InputError& e) {
        throw ParseError(source, line_no, e.what());
      }
      if (!std::isfinite(row.back())) throw ParseError(source, line_no, "non-finite coordinate");
    }

    if (symbol == kTranslationSymbol) {
      if (kind != ScoreKind::translational) {
        throw ParseError(source, line_no, "translation row in a non-translational checkpoint");
      }
      translation = std::move(row);
      translation_seen = true;
      continue;
    }
    if (vocab.find(symbol)) {
      throw ParseError(source, line_no, "duplicate symbol '" + std::string(symbol) + "'");
    }
    try {
      vocab.intern(symbol);
    } catch (const InputError& e) {
      throw ParseError(source, line_no, e.what());
    }
    if (kind == ScoreKind::poincare && squared_norm(row) >= 1.0) {
      throw ParseError(source, line_no, "point lies outside the open unit ball");
    }
    coords.insert(coords.end(), row.begin(), row.end());
  }
  if (kind == ScoreKind::translational && !translation_seen) {
    throw ParseError(source, line_no, "translational checkpoint lacks the translation row");
  }
  if (vocab.size() == 0) throw ParseError(source, line_no, "checkpoint has no rows");

  Checkpoint cp{EmbeddingMatrix(vocab.size(), dim, kind, epsilon), std::move(vocab)};
  std::copy(coords.begin(), coords.end(), cp.matrix.data().begin());
  if (translation_seen) std::copy(translation.begin(), translation.end(), cp.matrix.translation().begin());
  return cp;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint '" + path.string() + "'");
  return read_checkpoint(in, path.string());
}

}  // namespace hyperembed
