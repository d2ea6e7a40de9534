// hyperembed: closure, split, train, eval, entail and plot subcommands.

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "hyperembed/commands.hpp"
#include "hyperembed/errors.hpp"
#include "hyperembed/manifest.hpp"

namespace cli = hyperembed::cli;
using hyperembed::HoldoutBase;
using hyperembed::Objective;
using hyperembed::ScoreKind;
using hyperembed::Split;

namespace {

const std::map<std::string, ScoreKind> kScores = {{"poincare", ScoreKind::poincare},
                                                  {"euclidean", ScoreKind::euclidean},
                                                  {"translational", ScoreKind::translational}};
const std::map<std::string, Objective> kObjectives = {{"ranking", Objective::ranking},
                                                      {"fermi-dirac", Objective::fermi_dirac}};
const std::map<std::string, cli::EvalMode> kModes = {{"reconstruction", cli::EvalMode::reconstruction},
                                                     {"linkpred", cli::EvalMode::linkpred}};
const std::map<std::string, Split> kSplits = {
    {"train", Split::train}, {"valid", Split::valid}, {"test", Split::test}};
const std::map<std::string, HoldoutBase> kBases = {{"closure", HoldoutBase::closure},
                                                   {"eligible", HoldoutBase::eligible}};

// --config is consumed by expand_config before parsing; registering it keeps
// it in the help text.
void add_config(CLI::App* sub) {
  static std::string unused;
  sub->add_option("--config", unused, "Read key=value defaults from a file (flags take precedence)");
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

// Replaces `--config path` with one `--key=value` argument per line of the file,
// skipping keys already given on the command line. Underscores in keys map to
// dashes, so `burn_in=5` means `--burn-in=5`.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;
  const auto given = args;
  for (auto [key, value] : hyperembed::read_key_values(path)) {
    for (char& c : key) c = c == '_' ? '-' : c;
    if (!has_flag(given, "--" + key)) args.push_back("--" + key + "=" + value);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poincare ball embeddings of hierarchies: train, evaluate and plot"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hyperembed::kToolVersion));

  cli::ClosureOptions closure;
  auto* closure_cmd = app.add_subcommand("closure", "Transitive closure of a directed edge list");
  closure_cmd->add_option("input", closure.input, "Edge list (u<TAB>v per line)")->required();
  closure_cmd->add_option("output", closure.output, "Closure edge list to write")->required();
  closure_cmd->add_option("--manifest", closure.manifest, "Manifest path (default <output>.manifest)");
  add_config(closure_cmd);

  cli::SplitOptions split;
  std::string split_base = "closure";
  auto* split_cmd = app.add_subcommand("split", "Hold out validation/test links of a closure");
  split_cmd->add_option("input", split.input, "Closure edge list")->required();
  split_cmd->add_option("output", split.output, "Tagged edge list to write")->required();
  split_cmd->add_option("--valid", split.valid_frac, "Validation fraction")->capture_default_str();
  split_cmd->add_option("--test", split.test_frac, "Test fraction")->capture_default_str();
  split_cmd->add_option("--seed", split.seed, "Random seed")->capture_default_str();
  split_cmd->add_option("--fraction-of", split_base, "Fractions relative to the whole closure or to the eligible edges")
      ->check(CLI::IsMember({"closure", "eligible"}))
      ->capture_default_str();
  split_cmd->add_option("--manifest", split.manifest, "Manifest path (default <output>.manifest)");
  add_config(split_cmd);

  cli::TrainOptions train;
  std::string score = "poincare", objective = "ranking";
  double lr = 0.0;
  auto* train_cmd = app.add_subcommand("train", "Train embeddings and write a checkpoint");
  train_cmd->add_option("data", train.data, "Edge list, optionally with a split column")->required();
  train_cmd->add_option("-o,--output", train.output, "Checkpoint to write")->required();
  train_cmd->add_option("--dim", train.dim, "Embedding dimension")->capture_default_str();
  train_cmd->add_option("--score", score, "poincare, euclidean or translational")
      ->check(CLI::IsMember({"poincare", "euclidean", "translational"}))
      ->capture_default_str();
  train_cmd->add_option("--objective", objective, "ranking or fermi-dirac")
      ->check(CLI::IsMember({"ranking", "fermi-dirac"}))
      ->capture_default_str();
  auto* lr_opt = train_cmd->add_option("--lr", lr, "Learning rate (default 0.5 poincare, 0.05 otherwise)");
  train_cmd->add_option("--epochs", train.config.epochs, "Training epochs")->capture_default_str();
  train_cmd->add_option("--burn-in", train.config.burn_in_epochs, "Burn-in epochs")->capture_default_str();
  train_cmd->add_option("--burn-in-divisor", train.config.burn_in_divisor,
                        "Learning-rate divisor during burn-in")
      ->capture_default_str();
  train_cmd->add_option("--negatives", train.config.negatives, "Negatives per positive")->capture_default_str();
  train_cmd->add_option("--epsilon", train.config.epsilon, "Projection margin")->capture_default_str();
  train_cmd->add_option("--seed", train.config.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--threads", train.config.threads, "Worker threads (>1 is lock-free)")
      ->capture_default_str();
  train_cmd->add_option("--batch", train.config.batch, "Examples per update")->capture_default_str();
  train_cmd->add_flag("--undirected", train.undirected, "Treat edges as undirected");
  train_cmd->add_option("--fd-radius", train.config.fermi_dirac.radius, "Fermi-Dirac radius r")
      ->capture_default_str();
  train_cmd->add_option("--fd-temperature", train.config.fermi_dirac.temperature,
                        "Fermi-Dirac temperature t")
      ->capture_default_str();
  train_cmd->add_flag("--fd-grid", train.fd_grid, "Pick r and t by validation MAP over a grid");
  train_cmd->add_option("--fd-radii", train.fd_radii, "Grid radii")->delimiter(',');
  train_cmd->add_option("--fd-temperatures", train.fd_temperatures, "Grid temperatures")->delimiter(',');
  train_cmd->add_option("--manifest", train.manifest, "Manifest path (default <output>.manifest)");
  add_config(train_cmd);

  cli::EvalOptions eval;
  std::string mode = "reconstruction", eval_split;
  auto* eval_cmd = app.add_subcommand("eval", "Rank relations: mean rank and MAP");
  eval_cmd->add_option("checkpoint", eval.checkpoint, "Checkpoint")->required();
  eval_cmd->add_option("relations", eval.relations, "Relations to rank (2 or 3 columns)")->required();
  eval_cmd->add_option("--truth", eval.truth, "Ground-truth edges (default: all relations-file edges)");
  eval_cmd->add_option("--mode", mode, "reconstruction or linkpred")
      ->check(CLI::IsMember({"reconstruction", "linkpred"}))
      ->capture_default_str();
  eval_cmd->add_option("--split", eval_split, "Evaluate only edges with this tag (linkpred: test)")
      ->check(CLI::IsMember({"train", "valid", "test"}));
  eval_cmd->add_flag("--undirected", eval.undirected, "Treat edges as undirected");
  eval_cmd->add_option("--threads", eval.threads, "Evaluation threads (0 = all cores)")->capture_default_str();
  eval_cmd->add_option("--dump-ranks", eval.dump_ranks, "Write u<TAB>v<TAB>rank lines here");
  eval_cmd->add_option("--manifest", eval.manifest, "Manifest path (default <checkpoint>.eval.manifest)");
  add_config(eval_cmd);

  cli::EntailOptions entail;
  auto* entail_cmd = app.add_subcommand("entail", "Spearman's rho of graded is-a scores");
  entail_cmd->add_option("checkpoint", entail.checkpoint, "Poincare checkpoint")->required();
  entail_cmd->add_option("pairs", entail.pairs, "u<TAB>v<TAB>rating lines")->required();
  entail_cmd->add_option("--alpha", entail.penalty_alpha, "Norm penalty")->capture_default_str();
  entail_cmd->add_option("--manifest", entail.manifest, "Manifest path (default <checkpoint>.entail.manifest)");
  add_config(entail_cmd);

  cli::PlotOptions plot;
  bool no_labels = false;
  auto* plot_cmd = app.add_subcommand("plot", "Render a 2-d checkpoint as SVG");
  plot_cmd->add_option("checkpoint", plot.checkpoint, "2-dimensional checkpoint")->required();
  plot_cmd->add_option("-o,--output", plot.output, "SVG file to write")->required();
  plot_cmd->add_option("--edges", plot.edges, "Edges to draw as chords");
  plot_cmd->add_flag("--no-labels", no_labels, "Omit symbol labels");
  plot_cmd->add_option("--manifest", plot.manifest, "Manifest path (default <output>.manifest)");
  add_config(plot_cmd);

  try {
    auto args = expand_config(std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const hyperembed::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kUsage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kUsage;
  }

  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
  if (closure_cmd->parsed()) return cli::cmd_closure(closure, out, err);
  if (split_cmd->parsed()) {
    split.base = kBases.at(split_base);
    return cli::cmd_split(split, out, err);
  }
  if (train_cmd->parsed()) {
    train.config.score_kind = kScores.at(score);
    train.config.objective = kObjectives.at(objective);
    if (lr_opt->count() > 0) train.lr = lr;
    return cli::cmd_train(train, out, err);
  }
  if (eval_cmd->parsed()) {
    eval.mode = kModes.at(mode);
    if (!eval_split.empty()) eval.split = kSplits.at(eval_split);
    return cli::cmd_eval(eval, out, err);
  }
  if (entail_cmd->parsed()) return cli::cmd_entail(entail, out, err);
  if (plot_cmd->parsed()) {
    plot.labels = !no_labels;
    return cli::cmd_plot(plot, out, err);
  }
  return cli::kUsage;
}
