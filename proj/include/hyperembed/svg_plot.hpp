#pragma once

#include <iosfwd>

#include "hyperembed/dataset.hpp"
#include "hyperembed/embedding_store.hpp"

namespace hyperembed {

struct SvgOptions {
  int size = 800;        // square viewport, pixels
  int margin = 20;       // space between the unit circle and the viewport edge
  double point_radius = 3.0;
  bool labels = true;
};

/// Renders a two-dimensional embedding: the unit circle, one marker per
/// symbol, and one straight chord per edge. Output depends only on the inputs.
/// Throws InputError unless the embedding is two-dimensional.
void write_svg_plot(std::ostream& out, const EmbeddingMatrix& m, const Vocabulary& vocab,
                    const EdgeSet& edges, const SvgOptions& options = {});

}  // namespace hyperembed
