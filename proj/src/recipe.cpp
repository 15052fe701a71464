#include "ignr/recipe.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>

#include "ignr/dataset_io.hpp"
#include "ignr/error.hpp"
#include "ignr/format.hpp"
#include "ignr/train.hpp"

namespace ignr {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string value_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) {
      if (!s.empty()) s += ',';
      s += value_text(e);
    }
    return s;
  }
  throw ParseError("recipe train values must be strings, numbers, booleans or lists");
}

}  // namespace

void ExperimentRecipe::validate() const {
  if (trials < 1) throw InputDomainError("recipe needs at least one trial");
  if (is_family()) {
    parse_family(family);
    if (count < 2 || train_count < 1 || train_count >= count) {
      throw InputDomainError("family data needs 1 <= train < count");
    }
  } else {
    if (spec.empty()) throw InputDomainError("recipe data needs a spec or a family");
    GraphonSpec::parse(spec);
    if (sizes.empty()) throw InputDomainError("recipe data needs sizes");
  }
  for (const auto& [k, v] : train) {
    if (k == "seed") throw InputDomainError("recipe train section must not set seed (use the recipe seed)");
  }
  const TrainConfig cfg = trial_config(0);
  if (is_family() == (cfg.objective == Objective::kIgnr)) {
    throw InputDomainError(is_family() ? "family data needs a cignr or discrete objective"
                                       : "single-graphon data needs the ignr objective");
  }
  if (eval.resolution < 1) throw InputDomainError("eval resolution must be positive");
}

TrainConfig ExperimentRecipe::trial_config(int trial) const {
  auto pairs = train;
  pairs.emplace_back("seed", std::to_string(seed + static_cast<std::uint64_t>(trial) + kModelSeedOffset));
  return TrainConfig::from_pairs(pairs);
}

ExperimentRecipe parse_recipe(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("recipe is not valid JSON: ") + e.what());
  }
  ExperimentRecipe r;
  try {
    r.name = j.value("name", r.name);
    r.seed = j.value("seed", r.seed);
    r.trials = j.value("trials", r.trials);
    const json& data = j.at("data");
    if (data.contains("family")) {
      r.family = data.at("family").get<std::string>();
      r.count = data.at("count").get<int>();
      r.train_count = data.at("train").get<int>();
    } else {
      r.spec = data.at("spec").get<std::string>();
      r.sizes = data.at("sizes").get<std::vector<int>>();
    }
    for (const auto& [k, v] : j.at("train").items()) r.train.emplace_back(k, value_text(v));
    if (j.contains("eval")) {
      const json& e = j.at("eval");
      r.eval.resolution = e.value("resolution", r.eval.resolution);
      if (e.contains("solver")) r.eval.solver = parse_gw_solver(e.at("solver").get<std::string>());
      for (const auto& m : e.value("metrics", std::vector<std::string>{"gw"})) {
        if (m == "msesorted") {
          r.eval.mse_sorted = true;
        } else if (m != "gw") {
          throw ParseError("unknown metric '" + m + "'");
        }
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed recipe: ") + e.what());
  }
  try {
    r.validate();
  } catch (const InputDomainError& e) {
    throw ParseError(std::string("recipe: ") + e.what());
  }
  return r;
}

ExperimentRecipe load_recipe(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open recipe " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_recipe(ss.str());
}

std::string recipe_to_json(const ExperimentRecipe& recipe) {
  json j;
  j["name"] = recipe.name;
  j["seed"] = recipe.seed;
  j["trials"] = recipe.trials;
  if (recipe.is_family()) {
    j["data"] = {{"family", recipe.family}, {"count", recipe.count}, {"train", recipe.train_count}};
  } else {
    j["data"] = {{"spec", recipe.spec}, {"sizes", recipe.sizes}};
  }
  json t = json::object();
  for (const auto& [k, v] : recipe.train) t[k] = v;
  j["train"] = t;
  std::vector<std::string> metrics{"gw"};
  if (recipe.eval.mse_sorted) metrics.push_back("msesorted");
  j["eval"] = {{"resolution", recipe.eval.resolution}, {"solver", to_string(recipe.eval.solver)}, {"metrics", metrics}};
  return j.dump(1) + "\n";
}

RecipeResult run_recipe(const ExperimentRecipe& recipe, const std::string& out_dir, int jobs, const RecipeLog& log) {
  recipe.validate();
  fs::create_directories(out_dir);
  write_text_file((fs::path(out_dir) / "recipe.json").string(), recipe_to_json(recipe));
  std::mutex log_mu;
  auto say = [&](const std::string& msg) {
    if (!log) return;
    std::lock_guard<std::mutex> lock(log_mu);
    log(msg);
  };

  RecipeResult result;
  result.trials.resize(static_cast<std::size_t>(recipe.trials));
  parallel_for(recipe.trials, resolve_jobs(jobs), [&](int t) {
    const fs::path dir = fs::path(out_dir) / ("trial_" + std::to_string(t));
    fs::create_directories(dir);
    const std::uint64_t data_seed = recipe.seed + static_cast<std::uint64_t>(t);
    const TrainConfig cfg = recipe.trial_config(t);
    {
      std::ostringstream ss;
      write_config(ss, cfg);
      write_text_file((dir / "config.txt").string(), ss.str());
    }
    EvalOptions eo = recipe.eval;
    eo.jobs = 1;
    TrialOutcome& out = result.trials[static_cast<std::size_t>(t)];
    if (recipe.is_family()) {
      const Family fam = parse_family(recipe.family);
      const Dataset all = make_dataset_family(fam, recipe.count, data_seed);
      const Dataset train_set = all.slice(0, static_cast<std::size_t>(recipe.train_count));
      const Dataset test = all.slice(static_cast<std::size_t>(recipe.train_count), all.size());
      save_dataset((dir / "train.jsonl").string(), train_set);
      save_dataset((dir / "test.jsonl").string(), test);
      const Checkpoint ckpt = train(train_set, cfg);
      save_checkpoint((dir / "checkpoint.json").string(), ckpt);
      save_loss_history((dir / "loss_history.csv").string(), ckpt.loss_history);
      const EvalReport rep = evaluate_family(ckpt.model, test, fam, eo);
      std::vector<std::string> names;
      for (const auto& l : test.labels) names.push_back(family_member(fam, *l.alpha).name());
      out.rows = report_rows(rep, t, names);
      out.loss_history = ckpt.loss_history;
    } else {
      const GraphonSpec spec = GraphonSpec::parse(recipe.spec);
      const Dataset train_set = make_dataset_single(spec, recipe.sizes, data_seed);
      save_dataset((dir / "train.jsonl").string(), train_set);
      const Checkpoint ckpt = train_ignr(train_set, cfg);
      save_checkpoint((dir / "checkpoint.json").string(), ckpt);
      save_loss_history((dir / "loss_history.csv").string(), ckpt.loss_history);
      const EvalReport rep = evaluate_single(ckpt.model, spec, eo);
      const std::string label = spec.kind == GraphonKind::kBenchmark ? std::to_string(spec.index) : spec.name();
      out.rows = report_rows(rep, t, {label});
      out.loss_history = ckpt.loss_history;
    }
    save_report_csv((dir / "report.csv").string(), out.rows);
    say(recipe.name + " trial " + std::to_string(t) + ": final loss " + format_double(out.loss_history.back()) +
        ", mean error " + format_double(mean_of([&] {
          std::vector<double> e;
          for (const auto& r : out.rows) e.push_back(r.error);
          return e;
        }())));
  });

  for (const auto& t : result.trials) result.rows.insert(result.rows.end(), t.rows.begin(), t.rows.end());
  save_report_csv((fs::path(out_dir) / "report.csv").string(), result.rows);
  write_text_file((fs::path(out_dir) / "report.json").string(), report_json(result.rows, recipe.eval.resolution));
  write_text_file((fs::path(out_dir) / "summary.txt").string(), format_table(summarize(result.rows)));
  return result;
}

}  // namespace ignr
