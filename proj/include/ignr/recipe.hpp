#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ignr/config.hpp"
#include "ignr/eval.hpp"
#include "ignr/report.hpp"

namespace ignr {

// A gen -> train -> eval pipeline repeated over trials. JSON form:
//   {"name": "bench0",
//    "seed": 1, "trials": 3,
//    "data": {"spec": "benchmark:0", "sizes": [50, 77, ...]}
//         or {"family": "s1", "count": 600, "train": 480},
//    "train": {"objective": "ignr", "solver": "pg", "epochs": 40, ...},
//    "eval": {"resolution": 300, "metrics": ["gw", "msesorted"], "solver": "cg"}}
// Trial t draws its data with seed + t and initializes the model with
// seed + t + kModelSeedOffset. Layout under out_dir:
//   recipe.json, report.csv, report.json, summary.txt,
//   trial_<t>/{train.jsonl, test.jsonl, config.txt, checkpoint.json,
//              loss_history.csv, report.csv}
struct ExperimentRecipe {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  int trials = 1;

  std::string spec;                 // single-graphon data
  std::vector<int> sizes;
  std::string family;               // or family data
  int count = 0;
  int train_count = 0;

  std::vector<std::pair<std::string, std::string>> train;  // TrainConfig keys
  EvalOptions eval;

  bool is_family() const { return !family.empty(); }
  void validate() const;
  TrainConfig trial_config(int trial) const;
};

inline constexpr std::uint64_t kModelSeedOffset = 1000003;

ExperimentRecipe parse_recipe(const std::string& json_text);
ExperimentRecipe load_recipe(const std::string& path);
std::string recipe_to_json(const ExperimentRecipe& recipe);

struct TrialOutcome {
  std::vector<ReportRow> rows;
  std::vector<double> loss_history;
};

struct RecipeResult {
  std::vector<TrialOutcome> trials;
  std::vector<ReportRow> rows;  // all trials, trial order
};

using RecipeLog = std::function<void(const std::string&)>;

/// Runs every trial (trials in parallel when jobs > 1; each trial itself is
/// sequential and seed-deterministic) and writes the layout above.
RecipeResult run_recipe(const ExperimentRecipe& recipe, const std::string& out_dir, int jobs = 1,
                        const RecipeLog& log = {});

}  // namespace ignr
