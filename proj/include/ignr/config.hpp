#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ignr/gin.hpp"
#include "ignr/gw.hpp"

namespace ignr {

enum class Objective { kIgnr, kCignr, kDiscrete };

Objective parse_objective(const std::string& text);
std::string to_string(Objective objective);

struct TrainConfig {
  Objective objective = Objective::kIgnr;
  int epochs = 300;
  double lr = 1e-3;
  GwSolver solver = GwSolver::kProximalGradient;
  GwSolverOptions gw;
  int latent_dim = 16;
  std::uint64_t seed = 0;
  bool shuffle = true;
  std::string recon_size_policy = "match_input";
  std::vector<int> siren_widths{20, 20, 20};
  std::vector<int> modsiren_widths{48, 36, 24};
  double omega0 = 30.0;
  int gin_width = 32;
  int gin_layers = 3;
  NodeFeature node_feature = NodeFeature::kDegree;
  std::vector<int> decoder_widths{32, 64};
  int resolution = 24;  // discrete baseline grid size K

  /// Defaults for an objective (epochs and coupling-solver budget differ).
  static TrainConfig defaults(Objective objective);

  /// Throws InputDomainError on an out-of-range field.
  void validate() const;

  /// Flat "key = value" pairs in a fixed order.
  std::vector<std::pair<std::string, std::string>> to_pairs() const;
  /// Starts from defaults(objective) and applies every pair; unknown keys
  /// are rejected.
  static TrainConfig from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs);
};

/// Reads "key = value" lines ('#' starts a comment). Throws ParseError.
TrainConfig read_config(std::istream& in);
TrainConfig load_config(const std::string& path);
void write_config(std::ostream& out, const TrainConfig& cfg);

std::vector<int> parse_int_list(const std::string& text);
std::string join_ints(const std::vector<int>& values);

}  // namespace ignr
