#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ignr/dataset_io.hpp"
#include "ignr/error.hpp"
#include "ignr/eval.hpp"
#include "ignr/format.hpp"
#include "ignr/recipe.hpp"
#include "ignr/report.hpp"
#include "ignr/train.hpp"

using namespace ignr;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::string sibling_path(const std::string& path, const std::string& name) {
  const fs::path parent = fs::path(path).parent_path();
  return (parent.empty() ? fs::path(name) : parent / name).string();
}

// ---- gen

struct GenArgs {
  std::string spec;
  std::string sizes;
  int count = 0;
  std::string mode = "stochastic";
  std::uint64_t seed = 1;
  int split = 0;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  Dataset ds;
  if (a.spec == "s1" || a.spec == "s2" || a.spec == "S1" || a.spec == "S2") {
    const Family fam = parse_family(a.spec);
    const int count = a.count > 0 ? a.count : (fam == Family::kS1 ? 600 : 100);
    ds = make_dataset_family(fam, count, a.seed);
  } else {
    if (a.count > 0) throw UsageError("--count applies to family specs (s1, s2) only");
    const GraphonSpec spec = GraphonSpec::parse(a.spec);
    const std::vector<int> sizes = a.sizes.empty() ? default_single_sizes() : parse_int_list(a.sizes);
    const SamplingMode mode = parse_sampling_mode(a.mode);
    if (mode == SamplingMode::kStochastic) {
      ds = make_dataset_single(spec, sizes, a.seed);
    } else {
      ds.provenance = spec.name() + " deterministic seed=" + std::to_string(a.seed);
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        ds.graphs.push_back(sample_graph(spec, sizes[i], mode, a.seed + i));
        ds.labels.push_back(GraphLabel{std::nullopt, a.seed + i});
      }
    }
  }
  if (a.split < 0 || a.split >= static_cast<int>(ds.size())) {
    throw UsageError("--split must be between 1 and the graph count minus one");
  }
  ensure_parent(a.out);
  save_dataset(a.out, ds);
  if (a.split > 0) {
    const fs::path out(a.out);
    const fs::path stem = out.parent_path() / out.stem();
    const std::string train_path = stem.string() + "_train" + out.extension().string();
    const std::string test_path = stem.string() + "_test" + out.extension().string();
    save_dataset(train_path, ds.slice(0, static_cast<std::size_t>(a.split)));
    save_dataset(test_path, ds.slice(static_cast<std::size_t>(a.split), ds.size()));
    std::cout << "split " << a.split << "/" << ds.size() - a.split << " into " << train_path << " and " << test_path
              << "\n";
  }
  int lo = ds.graphs.front().n(), hi = lo;
  double density = 0.0;
  for (const auto& g : ds.graphs) {
    lo = std::min(lo, g.n());
    hi = std::max(hi, g.n());
    density += g.edge_density();
  }
  std::cout << "wrote " << ds.size() << " graphs to " << a.out << "\n"
            << "sizes " << lo << ".." << hi << ", mean edge density " << format_double(density / ds.size()) << "\n";
  return kOk;
}

// ---- train

struct TrainArgs {
  std::string objective;
  std::string data;
  std::string config;
  std::string out;
  std::string loss_history;
  std::string solver;
  int epochs = 0;
  double lr = -1.0;
  int latent_dim = 0;
  long long seed = -1;
  int gw_iters = 0;
  bool no_shuffle = false;
  bool verbose = false;
};

TrainConfig build_config(const TrainArgs& a) {
  TrainConfig cfg;
  if (!a.config.empty()) {
    cfg = load_config(a.config);
    if (!a.objective.empty() && parse_objective(a.objective) != cfg.objective) {
      throw UsageError("--objective " + a.objective + " conflicts with the config file's objective " +
                       to_string(cfg.objective));
    }
  } else {
    if (a.objective.empty()) throw UsageError("train needs --objective or --config");
    cfg = TrainConfig::defaults(parse_objective(a.objective));
  }
  if (a.latent_dim != 0) {
    if (cfg.objective == Objective::kIgnr) throw UsageError("--latent-dim does not apply to the ignr objective");
    if (a.latent_dim < 1) throw UsageError("--latent-dim must be positive");
    cfg.latent_dim = a.latent_dim;
  }
  if (!a.solver.empty()) cfg.solver = parse_gw_solver(a.solver);
  if (a.epochs != 0) cfg.epochs = a.epochs;
  if (a.lr >= 0.0) cfg.lr = a.lr;
  if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
  if (a.gw_iters != 0) cfg.gw.max_outer_iters = a.gw_iters;
  if (a.no_shuffle) cfg.shuffle = false;
  cfg.validate();
  return cfg;
}

int cmd_train(const TrainArgs& a) {
  const TrainConfig cfg = build_config(a);
  const Dataset ds = load_dataset(a.data);
  EpochCallback cb;
  if (a.verbose) {
    cb = [](int e, double loss) { std::cerr << "epoch " << e << " mean GW2 " << format_double(loss) << "\n"; };
  }
  const Checkpoint ckpt = train(ds, cfg, cb);
  ensure_parent(a.out);
  save_checkpoint(a.out, ckpt);
  const std::string hist = a.loss_history.empty() ? sibling_path(a.out, "loss_history.csv") : a.loss_history;
  save_loss_history(hist, ckpt.loss_history);
  std::cout << "final mean GW2 " << format_double(ckpt.loss_history.back()) << "\n"
            << "checkpoint " << a.out << ", loss history " << hist << "\n";
  return kOk;
}

// ---- eval

struct EvalArgs {
  std::vector<std::string> checkpoints;
  std::string spec;
  std::string data;
  std::string family;
  int resolution = 300;
  std::string metric = "gw";
  std::string solver = "cg";
  int jobs = 0;
  std::string out_dir = ".";
};

EvalOptions eval_options(const EvalArgs& a) {
  EvalOptions o;
  if (a.resolution < 1) throw UsageError("--resolution must be positive");
  o.resolution = a.resolution;
  o.solver = parse_gw_solver(a.solver);
  std::stringstream ss(a.metric);
  std::string m;
  bool gw = false;
  while (std::getline(ss, m, ',')) {
    if (m == "gw") {
      gw = true;
    } else if (m == "msesorted") {
      o.mse_sorted = true;
    } else {
      throw UsageError("unknown metric '" + m + "' (expected gw, msesorted)");
    }
  }
  if (!gw) throw UsageError("the gw metric is always computed; include it in --metric");
  o.jobs = resolve_jobs(a.jobs);
  return o;
}

int cmd_eval(const EvalArgs& a) {
  EvalOptions o = eval_options(a);
  if (a.spec.empty() == a.data.empty()) throw UsageError("eval needs exactly one of --spec or --data");
  std::vector<ReportRow> rows;
  if (!a.spec.empty()) {
    const GraphonSpec spec = GraphonSpec::parse(a.spec);
    const std::string label = spec.kind == GraphonKind::kBenchmark ? std::to_string(spec.index) : spec.name();
    const int trials = static_cast<int>(a.checkpoints.size());
    std::vector<std::vector<ReportRow>> per(trials);
    const int jobs = o.jobs;
    o.jobs = 1;
    std::vector<Checkpoint> ckpts;
    for (const auto& p : a.checkpoints) ckpts.push_back(load_checkpoint(p));
    for (const auto& c : ckpts) {
      if (c.model.has_encoder()) throw UsageError("--spec evaluation needs ignr checkpoints");
    }
    parallel_for(trials, jobs, [&](int t) {
      per[t] = report_rows(evaluate_single(ckpts[t].model, spec, o), t, {label});
    });
    for (auto& p : per) rows.insert(rows.end(), p.begin(), p.end());
  } else {
    if (a.family.empty()) throw UsageError("--data evaluation needs --family s1|s2");
    const Family fam = parse_family(a.family);
    const Dataset test = load_dataset(a.data);
    if (test.size() == 0) throw UsageError("test set is empty");
    for (std::size_t t = 0; t < a.checkpoints.size(); ++t) {
      const Checkpoint c = load_checkpoint(a.checkpoints[t]);
      if (!c.model.has_encoder()) throw UsageError("--data evaluation needs a cignr or discrete checkpoint");
      const EvalReport rep = evaluate_family(c.model, test, fam, o);
      std::vector<std::string> names;
      for (const auto& l : test.labels) names.push_back(family_member(fam, *l.alpha).name());
      const auto r = report_rows(rep, static_cast<int>(t), names);
      rows.insert(rows.end(), r.begin(), r.end());
    }
  }
  fs::create_directories(a.out_dir);
  save_report_csv((fs::path(a.out_dir) / "report.csv").string(), rows);
  write_text_file((fs::path(a.out_dir) / "report.json").string(), report_json(rows, o.resolution));
  std::cout << format_table(summarize(rows));
  return kOk;
}

// ---- embed

int cmd_embed(const std::string& ckpt_path, const std::string& data, const std::string& out) {
  const Checkpoint c = load_checkpoint(ckpt_path);
  if (!c.model.has_encoder()) throw UsageError("embed needs a checkpoint with an encoder (cignr or discrete)");
  const Dataset ds = load_dataset(data);
  std::vector<EmbeddingRow> rows;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EmbeddingRow r;
    r.index = static_cast<int>(i);
    if (i < ds.labels.size()) r.alpha = ds.labels[i].alpha;
    r.z = c.model.encode(ds.graphs[i]);
    rows.push_back(r);
  }
  std::ostringstream ss;
  write_embeddings_csv(ss, rows);
  ensure_parent(out);
  write_text_file(out, ss.str());
  std::cout << "wrote " << rows.size() << " embeddings (d=" << c.model.latent_dim() << ") to " << out << "\n";
  return kOk;
}

// ---- generate

struct GenerateArgs {
  std::string checkpoint;
  std::string data;
  int z_index = -1;
  std::string z;
  std::string sizes;
  std::string mode = "stochastic";
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  const Checkpoint c = load_checkpoint(a.checkpoint);
  std::optional<Vector> z;
  if (c.model.has_encoder()) {
    if ((a.z_index >= 0) == !a.z.empty()) throw UsageError("give exactly one of --z-index (with --data) or --z");
    if (a.z_index >= 0) {
      if (a.data.empty()) throw UsageError("--z-index needs --data");
      const Dataset ds = load_dataset(a.data);
      if (a.z_index >= static_cast<int>(ds.size())) throw UsageError("--z-index is out of range");
      z = c.model.encode(ds.graphs[a.z_index]);
    } else {
      std::vector<double> v;
      std::stringstream ss(a.z);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          v.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw UsageError("--z must be a comma-separated list of numbers");
        }
      }
      if (static_cast<int>(v.size()) != c.model.latent_dim()) {
        throw UsageError("--z has " + std::to_string(v.size()) + " values but the model's latent dimension is " +
                         std::to_string(c.model.latent_dim()));
      }
      z = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
  } else if (a.z_index >= 0 || !a.z.empty()) {
    throw UsageError("an ignr checkpoint takes no latent code");
  }
  if (c.model.config.objective == Objective::kDiscrete) throw UsageError("generate needs an ignr or cignr checkpoint");
  if (a.sizes.empty()) throw UsageError("generate needs --sizes");
  const std::vector<int> sizes = parse_int_list(a.sizes);
  const SamplingMode mode = parse_sampling_mode(a.mode);
  ensure_parent(a.out);
  Dataset out;
  out.provenance = "generated from " + a.checkpoint;
  const fs::path stem = fs::path(a.out).parent_path() / fs::path(a.out).stem();
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::uint64_t seed = a.seed + i;
    const GeneratedGraph g = generate_graph(c.model, z, sizes[i], mode, seed);
    out.graphs.push_back(g.graph);
    out.labels.push_back(GraphLabel{std::nullopt, seed});
    std::ostringstream grid;
    for (Eigen::Index r = 0; r < g.probabilities.rows(); ++r) {
      for (Eigen::Index k = 0; k < g.probabilities.cols(); ++k) {
        if (k) grid << ',';
        grid << format_double(g.probabilities(r, k));
      }
      grid << '\n';
    }
    const std::string grid_path = stem.string() + "_grid_" + std::to_string(i) + "_n" + std::to_string(sizes[i]) + ".csv";
    write_text_file(grid_path, grid.str());
    std::cout << "graph " << i << ": n=" << sizes[i] << ", density " << format_double(g.graph.edge_density())
              << ", grid " << grid_path << "\n";
  }
  save_dataset(a.out, out);
  return kOk;
}

// ---- report

int cmd_report(const std::vector<std::string>& inputs, const std::string& embeddings, const std::string& svg,
               const std::string& table) {
  if (inputs.empty() && embeddings.empty()) throw UsageError("report needs report.csv inputs or --embeddings");
  if (!inputs.empty()) {
    std::vector<ReportRow> rows;
    for (const auto& p : inputs) {
      const auto r = load_report_csv(p);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    if (rows.empty()) throw ParseError("the report inputs contain no rows");
    const std::string text = format_table(summarize(rows));
    std::cout << text;
    if (!table.empty()) {
      ensure_parent(table);
      write_text_file(table, text);
    }
  }
  if (!embeddings.empty()) {
    std::ifstream in(embeddings);
    if (!in) throw ParseError("cannot open " + embeddings);
    const auto rows = read_embeddings_csv(in);
    if (rows.empty()) throw ParseError("the embeddings file has no rows");
    const std::string out = svg.empty() ? sibling_path(embeddings, "latent_scatter.svg") : svg;
    ensure_parent(out);
    write_text_file(out, scatter_svg(rows));
    std::cout << "scatter of " << rows.size() << " codes written to " << out << "\n";
  }
  return kOk;
}

// ---- run

int cmd_run(const std::string& recipe_path, const std::string& out_dir, int jobs) {
  const ExperimentRecipe recipe = load_recipe(recipe_path);
  const std::string dir = out_dir.empty() ? recipe.name : out_dir;
  const RecipeResult res = run_recipe(recipe, dir, jobs, [](const std::string& m) { std::cerr << m << "\n"; });
  std::cout << format_table(summarize(res.rows)) << "outputs in " << dir << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graphon learning with implicit neural representations and a Gromov-Wasserstein loss"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Sample a graph dataset (JSON Lines)");
  g->add_option("--spec", gen.spec, "benchmark:<0-12>, two_block:<alpha>, noisy_ring:<alpha>, s1 or s2")->required();
  g->add_option("--sizes", gen.sizes, "Comma-separated graph sizes (single graphons; default: 50,77,...,300)");
  g->add_option("--count", gen.count, "Number of graphs (s1 default 600, s2 default 100)");
  g->add_option("--mode", gen.mode, "stochastic or deterministic node positions (single graphons)");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--split", gen.split, "Also write the first N graphs to <stem>_train and the rest to <stem>_test");
  g->add_option("--out", gen.out, "Output dataset file")->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train ignr, cignr or the discrete baseline");
  t->add_option("--objective", tr.objective, "ignr, cignr or discrete");
  t->add_option("--data", tr.data, "Training dataset")->required();
  t->add_option("--config", tr.config, "key = value config file (see TrainConfig keys)");
  t->add_option("--out", tr.out, "Checkpoint path")->required();
  t->add_option("--loss-history", tr.loss_history, "Loss CSV path (default: loss_history.csv next to --out)");
  t->add_option("--solver", tr.solver, "GW solver: pg or cg");
  t->add_option("--epochs", tr.epochs, "Epochs");
  t->add_option("--lr", tr.lr, "Adam learning rate");
  t->add_option("--latent-dim", tr.latent_dim, "Latent dimension (cignr, discrete)");
  t->add_option("--seed", tr.seed, "Initialization / shuffle seed");
  t->add_option("--gw-iters", tr.gw_iters, "Outer GW iterations per step");
  t->add_flag("--no-shuffle", tr.no_shuffle, "Visit graphs in dataset order");
  t->add_flag("-v,--verbose", tr.verbose, "Print the loss after every epoch");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Estimation error against the true graphon(s)");
  e->add_option("--checkpoint", ev.checkpoints, "Checkpoint(s); one report row set per checkpoint (trial)")
      ->required();
  e->add_option("--spec", ev.spec, "True graphon for an ignr checkpoint");
  e->add_option("--data", ev.data, "Labeled test dataset for a cignr/discrete checkpoint");
  e->add_option("--family", ev.family, "s1 or s2 (with --data)");
  e->add_option("--resolution", ev.resolution, "Evaluation grid resolution R");
  e->add_option("--metric", ev.metric, "gw or gw,msesorted");
  e->add_option("--solver", ev.solver, "GW solver for the error: cg or pg");
  e->add_option("--jobs", ev.jobs, "Parallel evaluations (default: $IGNR_JOBS or 1)");
  e->add_option("--out-dir", ev.out_dir, "Directory for report.csv and report.json");

  std::string em_ckpt, em_data, em_out;
  auto* m = app.add_subcommand("embed", "Latent codes of a dataset as CSV");
  m->add_option("--checkpoint", em_ckpt, "cignr or discrete checkpoint")->required();
  m->add_option("--data", em_data, "Dataset")->required();
  m->add_option("--out", em_out, "Output CSV")->required();

  GenerateArgs ge;
  auto* n = app.add_subcommand("generate", "Sample new graphs from a trained model");
  n->add_option("--checkpoint", ge.checkpoint, "ignr or cignr checkpoint")->required();
  n->add_option("--data", ge.data, "Dataset for --z-index");
  n->add_option("--z-index", ge.z_index, "Use the code of this graph of --data");
  n->add_option("--z", ge.z, "Literal latent code, comma-separated");
  n->add_option("--sizes", ge.sizes, "Comma-separated sizes to generate")->required();
  n->add_option("--mode", ge.mode, "stochastic or deterministic node positions");
  n->add_option("--seed", ge.seed, "Random seed");
  n->add_option("--out", ge.out, "Output dataset; grids go to <out-stem>_grid_<i>_n<size>.csv")->required();

  std::vector<std::string> rp_inputs;
  std::string rp_emb, rp_svg, rp_table;
  auto* r = app.add_subcommand("report", "Summary table of report.csv files and latent scatter SVG");
  r->add_option("inputs", rp_inputs, "report.csv files");
  r->add_option("--embeddings", rp_emb, "Embeddings CSV to plot");
  r->add_option("--svg", rp_svg, "SVG output path (default: latent_scatter.svg next to the embeddings)");
  r->add_option("--table", rp_table, "Also write the table to this file");

  std::string rn_recipe, rn_out;
  int rn_jobs = 0;
  auto* u = app.add_subcommand("run", "Run an experiment recipe (gen -> train -> eval over trials)");
  u->add_option("--recipe", rn_recipe, "Recipe JSON file")->required();
  u->add_option("--out-dir", rn_out, "Output directory (default: the recipe name)");
  u->add_option("--jobs", rn_jobs, "Parallel trials (default: $IGNR_JOBS or 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*t) return cmd_train(tr);
    if (*e) return cmd_eval(ev);
    if (*m) return cmd_embed(em_ckpt, em_data, em_out);
    if (*n) return cmd_generate(ge);
    if (*r) return cmd_report(rp_inputs, rp_emb, rp_svg, rp_table);
    if (*u) return cmd_run(rn_recipe, rn_out, rn_jobs);
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return kUsage;
  } catch (const InputDomainError& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return kUsage;
  } catch (const ParseError& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return kData;
  } catch (const NumericalError& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return kNumerical;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kData;
  }
  return kUsage;
}
