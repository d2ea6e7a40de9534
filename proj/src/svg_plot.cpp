#include "hyperembed/svg_plot.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <ostream>
#include <string>

#include "hyperembed/errors.hpp"

namespace hyperembed {
namespace {

std::string escape_xml(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_svg_plot(std::ostream& out, const EmbeddingMatrix& m, const Vocabulary& vocab,
                    const EdgeSet& edges, const SvgOptions& options) {
  if (m.dim() != 2) {
    throw InputError("plotting requires a 2-dimensional embedding, got dim=" +
                     std::to_string(m.dim()));
  }
  if (vocab.size() != m.count()) throw InputError("vocabulary does not match the embedding");

  const double center = options.size / 2.0;
  const double radius = center - options.margin;
  // SVG's y axis points down; flip so the picture reads like the usual plane.
  auto px = [&](NodeId id) { return center + radius * m.row(id)[0]; };
  auto py = [&](NodeId id) { return center - radius * m.row(id)[1]; };

  fmt::print(out,
             "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
             "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" "
             "height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
             options.size);
  fmt::print(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
  fmt::print(out,
             "<circle id=\"boundary\" cx=\"{:.4f}\" cy=\"{:.4f}\" r=\"{:.4f}\" fill=\"none\" "
             "stroke=\"black\" stroke-width=\"1\"/>\n",
             center, center, radius);

  fmt::print(out, "<g id=\"edges\" stroke=\"#4a78c2\" stroke-width=\"0.6\" opacity=\"0.7\">\n");
  for (const Edge& e : edges.edges()) {
    fmt::print(out, "<line x1=\"{:.4f}\" y1=\"{:.4f}\" x2=\"{:.4f}\" y2=\"{:.4f}\"/>\n", px(e.u),
               py(e.u), px(e.v), py(e.v));
  }
  fmt::print(out, "</g>\n");

  fmt::print(out, "<g id=\"points\" fill=\"#c0392b\">\n");
  for (std::size_t i = 0; i < m.count(); ++i) {
    const auto id = static_cast<NodeId>(i);
    fmt::print(out, "<circle cx=\"{:.4f}\" cy=\"{:.4f}\" r=\"{:.2f}\"><title>{}</title></circle>\n",
               px(id), py(id), options.point_radius, escape_xml(vocab.symbol(id)));
  }
  fmt::print(out, "</g>\n");

  if (options.labels) {
    fmt::print(out, "<g id=\"labels\" font-family=\"sans-serif\" font-size=\"8\" fill=\"#333\">\n");
    for (std::size_t i = 0; i < m.count(); ++i) {
      const auto id = static_cast<NodeId>(i);
      fmt::print(out, "<text x=\"{:.4f}\" y=\"{:.4f}\">{}</text>\n", px(id) + options.point_radius,
                 py(id) - options.point_radius, escape_xml(vocab.symbol(id)));
    }
    fmt::print(out, "</g>\n");
  }
  fmt::print(out, "</svg>\n");
}

}  // namespace hyperembed
