#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ignr/types.hpp"

namespace ignr {

enum class GraphonKind { kBenchmark, kTwoBlockRatio, kNoisyRing };

/// Closed-form ground-truth graphon. Benchmark indices 0-12 are the standard
/// single-graphon test set; TwoBlockRatio and NoisyRing are the alpha
/// parameterized families.
struct GraphonSpec {
  GraphonKind kind = GraphonKind::kBenchmark;
  int index = 0;       // kBenchmark only
  double alpha = 0.0;  // kTwoBlockRatio / kNoisyRing only

  static GraphonSpec benchmark(int index);
  static GraphonSpec two_block(double alpha);
  static GraphonSpec noisy_ring(double alpha);

  /// Throws InputDomainError if index/alpha is outside its legal range.
  void validate() const;
  /// "benchmark:3", "two_block:0.25", "noisy_ring:0.1".
  std::string name() const;
  static GraphonSpec parse(const std::string& text);
};

inline constexpr int kNumBenchmarks = 13;

/// W(x, y) for x, y in [0, 1].
double eval_graphon(const GraphonSpec& spec, double x, double y);

/// A graph with node weights. adj is dense and symmetric; hist sums to one.
struct Graph {
  Matrix adj;
  Vector hist;

  int n() const { return static_cast<int>(adj.rows()); }
  static Graph from_adjacency(Matrix adj);
  double edge_density() const;
};

/// K x K discretization of a graphon (or of a network output).
struct GraphonGrid {
  Matrix values;
  int resolution() const { return static_cast<int>(values.rows()); }
};

/// Regular node positions (p-1)/N, p = 1..N.
std::vector<double> grid_positions(int n);

/// All N*N coordinate pairs (x_p, y_q) in row-major order.
std::vector<std::pair<double, double>> coordinate_grid(int n);

GraphonGrid sample_grid(const GraphonSpec& spec, int k);

enum class SamplingMode { kStochastic, kDeterministic };

SamplingMode parse_sampling_mode(const std::string& text);
std::string to_string(SamplingMode mode);

/// Draws node positions (uniform or on the grid), then Bernoulli edges on the
/// upper triangle, mirrored, zero diagonal.
Graph sample_graph(const GraphonSpec& spec, int n, SamplingMode mode, std::uint64_t seed);

/// Bernoulli edges for fixed node positions (upper triangle, mirrored).
Graph sample_graph_at(const GraphonSpec& spec, const std::vector<double>& positions,
                      std::uint64_t seed);

/// Node positions used by sample_graph for the given mode and seed.
std::vector<double> sample_node_positions(int n, SamplingMode mode, std::uint64_t seed);

enum class Family { kS1, kS2 };

struct GraphLabel {
  std::optional<double> alpha;
  std::uint64_t seed = 0;
};

struct Dataset {
  std::vector<Graph> graphs;
  std::vector<GraphLabel> labels;  // empty or one per graph
  std::string provenance;

  std::size_t size() const { return graphs.size(); }
  bool has_alpha() const;
  /// Returns the graphs [begin, end) as a new dataset.
  Dataset slice(std::size_t begin, std::size_t end) const;
};

/// One stochastic graph per requested size; graph i uses seed + i.
Dataset make_dataset_single(const GraphonSpec& spec, const std::vector<int>& sizes,
                            std::uint64_t seed);

/// S1: two-block graphons, alpha ~ U[0.1, 0.5], n ~ U{50..79}.
/// S2: noisy rings, alpha ~ U[0.05, 0.15], n ~ U{50..59}.
/// Deterministic node grid, Bernoulli edges.
Dataset make_dataset_family(Family family, int count, std::uint64_t seed);

GraphonSpec family_member(Family family, double alpha);
Family parse_family(const std::string& text);

/// The node sizes used for single-graphon experiments.
std::vector<int> default_single_sizes();

}  // namespace ignr
