#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ignr/graphon.hpp"
#include "ignr/model.hpp"

namespace ignr {

/// Called after every epoch with (epoch index, mean GW2 over the epoch).
using EpochCallback = std::function<void(int, double)>;

// One Adam step per graph: reconstruct at the graph's size, solve the
// coupling (PG warm-starts from the graph's previous coupling, CG starts
// fresh), differentiate GW2 in the reconstruction at the fixed coupling and
// backpropagate. loss_history[e] is the mean per-graph GW2 seen during
// epoch e.
Checkpoint train(const Dataset& ds, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

Checkpoint train_ignr(const Dataset& ds, const TrainConfig& cfg, const EpochCallback& on_epoch = {});
Checkpoint train_cignr(const Dataset& ds, const TrainConfig& cfg, const EpochCallback& on_epoch = {});
Checkpoint train_discrete_baseline(const Dataset& ds, const TrainConfig& cfg,
                                   const EpochCallback& on_epoch = {});

/// GW2 between model.decode at the graph's size and the graph, using the
/// model's configured solver from a fresh start.
double reconstruction_cost(const Model& model, const Graph& g);

struct GeneratedGraph {
  Graph graph;
  Matrix probabilities;  // symmetric n x n edge probabilities
};

/// Evaluate the (conditional) network at n node positions (grid or uniform
/// random per mode) and Bernoulli-sample the upper triangle.
GeneratedGraph generate_graph(const Model& model, const std::optional<Vector>& z, int n, SamplingMode mode,
                              std::uint64_t seed);

/// "epoch,mean_gw2" CSV.
void write_loss_history(std::ostream& out, const std::vector<double>& history);
void save_loss_history(const std::string& path, const std::vector<double>& history);

}  // namespace ignr
