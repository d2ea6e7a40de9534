#include "hyperembed/commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "hyperembed/errors.hpp"
#include "hyperembed/evaluation.hpp"
#include "hyperembed/manifest.hpp"
#include "hyperembed/svg_plot.hpp"

namespace hyperembed::cli {
namespace {

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

fs::path manifest_path(const fs::path& explicit_path, const fs::path& base, const char* suffix) {
  if (!explicit_path.empty()) return explicit_path;
  fs::path p = base;
  p += suffix;
  return p;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += format_double(values[i]);
  }
  return s;
}

}  // namespace

double default_learning_rate(ScoreKind kind) { return kind == ScoreKind::poincare ? 0.5 : 0.05; }

int cmd_closure(const ClosureOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunManifest manifest("closure");
    manifest.add_input("input", opt.input);
    auto [edges, vocab] = parse_edge_list(opt.input, /*directed=*/true);
    const EdgeSet closure = transitive_closure(edges);
    {
      auto file = open_output(opt.output);
      write_edges(file, closure, vocab, /*with_splits=*/false);
    }
    manifest.set("output", opt.output.string());
    manifest.set("nodes", std::to_string(vocab.size()));
    manifest.set("input_edges", std::to_string(edges.size()));
    manifest.set("closure_edges", std::to_string(closure.size()));
    manifest.write(manifest_path(opt.manifest, opt.output, ".manifest"));
    out << "nodes\t" << vocab.size() << "\nclosure_edges\t" << closure.size() << '\n';
    return kOk;
  });
}

int cmd_split(const SplitOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunManifest manifest("split");
    manifest.add_input("input", opt.input);
    auto [closure, vocab] = parse_edge_list(opt.input, /*directed=*/true);
    const EdgeSet split = split_links(
        closure, SplitRequest{opt.valid_frac, opt.test_frac, opt.seed, opt.base});
    {
      auto file = open_output(opt.output);
      write_edges(file, split, vocab, /*with_splits=*/true);
    }
    manifest.set("output", opt.output.string());
    manifest.set("valid_frac", format_double(opt.valid_frac));
    manifest.set("test_frac", format_double(opt.test_frac));
    manifest.set("fraction_of", opt.base == HoldoutBase::closure ? "closure" : "eligible");
    manifest.set("seed", std::to_string(opt.seed));
    for (Split s : {Split::train, Split::valid, Split::test}) {
      manifest.set(std::string(to_string(s)) + "_edges", std::to_string(split.count(s)));
      out << to_string(s) << '\t' << split.count(s) << '\n';
    }
    manifest.write(manifest_path(opt.manifest, opt.output, ".manifest"));
    return kOk;
  });
}

GridResult fermi_dirac_grid_search(const EdgeSet& edges, const EmbeddingMatrix& initial,
                                   TrainConfig cfg, const std::vector<double>& radii,
                                   const std::vector<double>& temperatures) {
  if (radii.empty() || temperatures.empty()) throw InputError("empty Fermi-Dirac grid");
  const EdgeSet valid = edges.filter(Split::valid);
  if (valid.empty()) throw InputError("Fermi-Dirac grid search needs validation edges");
  cfg.objective = Objective::fermi_dirac;

  GridResult result;
  double best_map = -1.0;
  for (double r : radii) {
    for (double t : temperatures) {
      cfg.fermi_dirac = {r, t};
      EmbeddingMatrix m = initial;
      train(edges, m, cfg);
      const double map = evaluate_ranking(valid, edges, m).map;
      result.cells.push_back({cfg.fermi_dirac, map});
      if (map > best_map) {
        best_map = map;
        result.best = result.cells.size() - 1;
        result.best_matrix = std::move(m);
      }
    }
  }
  return result;
}

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    TrainConfig cfg = opt.config;
    cfg.lr = opt.lr.value_or(default_learning_rate(cfg.score_kind));
    if (cfg.score_kind == ScoreKind::translational && opt.undirected) {
      throw InputError("translational score requires directed data");
    }
    validate(cfg);
    if (opt.dim == 0) throw InputError("--dim must be positive");

    RunManifest manifest("train");
    manifest.add_input("data", opt.data);
    manifest.set("dataset_sha256", *manifest.get("data_sha256"));
    auto [edges, vocab] = parse_edge_list(opt.data, !opt.undirected, /*allow_split_column=*/true);
    manifest.set("dim", std::to_string(opt.dim));
    manifest.set("undirected", opt.undirected ? "true" : "false");

    EmbeddingMatrix m = init_embeddings(vocab.size(), opt.dim, cfg.seed, cfg.score_kind, cfg.epsilon);
    TrainReport report;
    if (opt.fd_grid) {
      if (cfg.objective != Objective::fermi_dirac) {
        throw InputError("--fd-grid requires --objective fermi-dirac");
      }
      GridResult grid = fermi_dirac_grid_search(edges, m, cfg, opt.fd_radii, opt.fd_temperatures);
      for (const GridCell& c : grid.cells) {
        out << "fd_grid\t" << format_double(c.params.radius) << '\t'
            << format_double(c.params.temperature) << '\t' << format_double(c.valid_map) << '\n';
      }
      cfg.fermi_dirac = grid.cells[grid.best].params;
      manifest.set("fd_grid_radii", join(opt.fd_radii));
      manifest.set("fd_grid_temperatures", join(opt.fd_temperatures));
      manifest.set("fd_grid_best_valid_map", format_double(grid.cells[grid.best].valid_map));
      // Retrain the winning cell so the epoch log and report describe it.
      report = train(edges, m, cfg, [&](std::size_t epoch, double loss) {
        out << "epoch\t" << epoch + 1 << '\t' << format_double(loss) << '\n';
      });
    } else {
      report = train(edges, m, cfg, [&](std::size_t epoch, double loss) {
        out << "epoch\t" << epoch + 1 << '\t' << format_double(loss) << '\n';
      });
    }

    save_checkpoint(opt.output, m, vocab);
    for (const auto& [k, v] : describe(cfg)) manifest.set(k, v);
    manifest.set("output", opt.output.string());
    manifest.set("nodes", std::to_string(vocab.size()));
    manifest.set("train_edges", std::to_string(edges.count(Split::train)));
    manifest.set("epochs_run", std::to_string(report.epochs_run));
    manifest.set("final_loss", format_double(report.epoch_loss.back()));
    manifest.set("wall_seconds", format_double(report.wall_seconds));
    manifest.write(manifest_path(opt.manifest, opt.output, ".manifest"));
    return kOk;
  });
}

int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunManifest manifest("eval");
    manifest.add_input("checkpoint", opt.checkpoint);
    manifest.add_input("relations", opt.relations);
    const Checkpoint cp = load_checkpoint(opt.checkpoint);
    const bool directed = !opt.undirected;

    const EdgeSet relation_file =
        parse_edge_list_with_vocabulary(opt.relations, directed, cp.vocab);
    EdgeSet truth = relation_file;
    if (!opt.truth.empty()) {
      manifest.add_input("truth", opt.truth);
      truth = parse_edge_list_with_vocabulary(opt.truth, directed, cp.vocab);
    }

    std::optional<Split> selected = opt.split;
    if (!selected && opt.mode == EvalMode::linkpred) selected = Split::test;
    EdgeSet relations = selected ? relation_file.filter(*selected) : relation_file;
    // Relations are always part of the ground truth they are ranked against.
    for (const Edge& e : relations.edges()) truth.add(e.u, e.v);

    const RankReport report = evaluate_ranking(relations, truth, cp.matrix, opt.threads);
    write_rank_report(out, report);
    if (!opt.dump_ranks.empty()) {
      auto file = open_output(opt.dump_ranks);
      write_rank_dump(file, relations, report, cp.vocab);
      manifest.set("dump_ranks", opt.dump_ranks.string());
    }
    manifest.set("mode", opt.mode == EvalMode::reconstruction ? "reconstruction" : "linkpred");
    manifest.set("split", selected ? std::string(to_string(*selected)) : "all");
    manifest.set("mean_rank", format_double(report.mean_rank));
    manifest.set("map", format_double(report.map));
    manifest.set("relations_evaluated", std::to_string(report.relation_count));
    manifest.write(manifest_path(opt.manifest, opt.checkpoint, ".eval.manifest"));
    return kOk;
  });
}

int cmd_entail(const EntailOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunManifest manifest("entail");
    manifest.add_input("checkpoint", opt.checkpoint);
    manifest.add_input("pairs", opt.pairs);
    const Checkpoint cp = load_checkpoint(opt.checkpoint);
    std::ifstream in(opt.pairs, std::ios::binary);
    if (!in) throw InputError("cannot open '" + opt.pairs.string() + "'");
    const auto pairs = read_entailment_pairs(in, opt.pairs.string());
    const EntailmentReport report = evaluate_entailment(pairs, cp.vocab, cp.matrix, opt.penalty_alpha);
    out << "spearman_rho\t" << format_double(report.spearman_rho) << '\n'
        << "coverage\t" << format_double(report.coverage) << '\n'
        << "scored\t" << report.scored << '\n'
        << "total\t" << report.total << '\n';
    manifest.set("penalty_alpha", format_double(opt.penalty_alpha));
    manifest.set("spearman_rho", format_double(report.spearman_rho));
    manifest.set("coverage", format_double(report.coverage));
    manifest.write(manifest_path(opt.manifest, opt.checkpoint, ".entail.manifest"));
    return kOk;
  });
}

int cmd_plot(const PlotOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunManifest manifest("plot");
    manifest.add_input("checkpoint", opt.checkpoint);
    const Checkpoint cp = load_checkpoint(opt.checkpoint);
    if (cp.matrix.dim() != 2) {
      throw InputError("plot requires a 2-dimensional checkpoint, got dim=" +
                       std::to_string(cp.matrix.dim()));
    }
    EdgeSet edges(cp.vocab.size(), true);
    if (!opt.edges.empty()) {
      manifest.add_input("edges", opt.edges);
      edges = parse_edge_list_with_vocabulary(opt.edges, true, cp.vocab);
    }
    SvgOptions svg;
    svg.labels = opt.labels;
    {
      auto file = open_output(opt.output);
      write_svg_plot(file, cp.matrix, cp.vocab, edges, svg);
    }
    manifest.set("output", opt.output.string());
    manifest.set("labels", opt.labels ? "true" : "false");
    manifest.write(manifest_path(opt.manifest, opt.output, ".manifest"));
    out << "points\t" << cp.vocab.size() << "\nedges\t" << edges.size() << '\n';
    return kOk;
  });
}

}  // namespace hyperembed::cli
