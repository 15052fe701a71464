#include "ignr/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ignr/error.hpp"

namespace ignr {

namespace {

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

// Second of the two half-open blocks [0, 1/2), [1/2, 1].
bool upper_half(double t) { return t >= 0.5; }

double eval_benchmark(int index, double x, double y) {
  const double hi = std::max(x, y);
  const double lo = std::min(x, y);
  switch (index) {
    case 0:
      return x * y;
    case 1:
      return std::exp(-(std::pow(x, 0.7) + std::pow(y, 0.7)));
    case 2:
      return 0.25 * ((x * x + std::sqrt(x)) + (y * y + std::sqrt(y)));
    case 3:
      return 0.5 * (x + y);
    case 4:
      return 1.0 / (1.0 + std::exp(-2.0 * (x * x + y * y)));
    case 5:
      return 1.0 / (1.0 + std::exp(-(hi * hi) - std::pow(lo, 4)));
    case 6:
      return std::exp(-std::pow(hi, 0.75));
    case 7:
      return std::exp(-0.5 * (lo + (std::sqrt(x) + std::sqrt(y))));
    case 8:
      return std::log(1.0 + hi);
    case 9:
      return std::abs(x - y);
    case 10:
      return 1.0 - std::abs(x - y);
    case 11:
      return upper_half(x) == upper_half(y) ? 0.8 : 0.0;
    case 12:
      return upper_half(x) != upper_half(y) ? 0.8 : 0.0;
    default:
      throw InputDomainError("benchmark graphon index out of range: " + std::to_string(index));
  }
}

double eval_two_block(double alpha, double x, double y) {
  const bool first = x <= alpha && y <= alpha;
  const bool second = x >= 1.0 - alpha && y >= 1.0 - alpha;
  // At alpha = 0.5 the blocks touch at a single point; it is counted once.
  return (first || second) ? 0.9 : 0.1;
}

double eval_noisy_ring(double alpha, double x, double y) {
  const double a2 = alpha * alpha;
  const double corner1 = std::exp((-(y * y) - (x - 1.0) * (x - 1.0)) / a2);
  const double corner2 = std::exp((-((y - 1.0) * (y - 1.0)) - x * x) / a2);
  // sin(3pi/4) x + cos(3pi/4) y = (x - y) / sqrt(2)
  const double band = std::numbers::sqrt2 / 2.0 * (x - y) / alpha;
  return 0.9 * (corner1 + corner2) + 0.9 * std::exp(-band * band);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

GraphonSpec GraphonSpec::benchmark(int index) {
  GraphonSpec s;
  s.kind = GraphonKind::kBenchmark;
  s.index = index;
  s.validate();
  return s;
}

GraphonSpec GraphonSpec::two_block(double alpha) {
  GraphonSpec s;
  s.kind = GraphonKind::kTwoBlockRatio;
  s.alpha = alpha;
  s.validate();
  return s;
}

GraphonSpec GraphonSpec::noisy_ring(double alpha) {
  GraphonSpec s;
  s.kind = GraphonKind::kNoisyRing;
  s.alpha = alpha;
  s.validate();
  return s;
}

void GraphonSpec::validate() const {
  switch (kind) {
    case GraphonKind::kBenchmark:
      if (index < 0 || index >= kNumBenchmarks) {
        throw InputDomainError("benchmark graphon index must be in [0, 12], got " +
                               std::to_string(index));
      }
      break;
    case GraphonKind::kTwoBlockRatio:
      if (!(alpha >= 0.1 && alpha <= 0.5)) {
        throw InputDomainError("two-block alpha must be in [0.1, 0.5]");
      }
      break;
    case GraphonKind::kNoisyRing:
      if (!(alpha >= 0.05 && alpha <= 0.15)) {
        throw InputDomainError("noisy-ring alpha must be in [0.05, 0.15]");
      }
      break;
  }
}

std::string GraphonSpec::name() const {
  std::ostringstream out;
  switch (kind) {
    case GraphonKind::kBenchmark:
      out << "benchmark:" << index;
      break;
    case GraphonKind::kTwoBlockRatio:
      out << "two_block:" << alpha;
      break;
    case GraphonKind::kNoisyRing:
      out << "noisy_ring:" << alpha;
      break;
  }
  return out.str();
}

GraphonSpec GraphonSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw InputDomainError("graphon spec must look like kind:value, got '" + text + "'");
  }
  const std::string kind = text.substr(0, colon);
  const std::string value = text.substr(colon + 1);
  try {
    if (kind == "benchmark") return benchmark(std::stoi(value));
    if (kind == "two_block") return two_block(std::stod(value));
    if (kind == "noisy_ring") return noisy_ring(std::stod(value));
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InputDomainError*>(&e) != nullptr) throw;
    throw InputDomainError("bad graphon parameter in '" + text + "'");
  }
  throw InputDomainError("unknown graphon kind '" + kind + "'");
}

double eval_graphon(const GraphonSpec& spec, double x, double y) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    throw InputDomainError("graphon coordinates must lie in [0, 1]");
  }
  // Evaluate in sorted order so the result is bitwise symmetric.
  if (x > y) std::swap(x, y);
  switch (spec.kind) {
    case GraphonKind::kBenchmark:
      return clamp_unit(eval_benchmark(spec.index, x, y));
    case GraphonKind::kTwoBlockRatio:
      spec.validate();
      return eval_two_block(spec.alpha, x, y);
    case GraphonKind::kNoisyRing:
      spec.validate();
      return clamp_unit(eval_noisy_ring(spec.alpha, x, y));
  }
  return 0.0;
}

Graph Graph::from_adjacency(Matrix adj) {
  if (adj.rows() != adj.cols() || adj.rows() == 0) {
    throw InputDomainError("adjacency matrix must be square and non-empty");
  }
  Graph g;
  const auto n = adj.rows();
  g.adj = std::move(adj);
  g.hist = Vector::Constant(n, 1.0 / static_cast<double>(n));
  return g;
}

double Graph::edge_density() const {
  const int nn = n();
  if (nn < 2) return 0.0;
  return adj.sum() / (static_cast<double>(nn) * (nn - 1));
}

std::vector<double> grid_positions(int n) {
  if (n < 1) throw InputDomainError("grid size must be positive");
  std::vector<double> pos(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) pos[p] = static_cast<double>(p) / n;
  return pos;
}

std::vector<std::pair<double, double>> coordinate_grid(int n) {
  const auto pos = grid_positions(n);
  std::vector<std::pair<double, double>> coords;
  coords.reserve(static_cast<std::size_t>(n) * n);
  for (double x : pos) {
    for (double y : pos) coords.emplace_back(x, y);
  }
  return coords;
}

GraphonGrid sample_grid(const GraphonSpec& spec, int k) {
  const auto pos = grid_positions(k);
  GraphonGrid grid{Matrix(k, k)};
  for (int p = 0; p < k; ++p) {
    for (int q = 0; q < k; ++q) grid.values(p, q) = eval_graphon(spec, pos[p], pos[q]);
  }
  return grid;
}

SamplingMode parse_sampling_mode(const std::string& text) {
  if (text == "stochastic") return SamplingMode::kStochastic;
  if (text == "deterministic") return SamplingMode::kDeterministic;
  throw InputDomainError("sampling mode must be stochastic or deterministic");
}

std::string to_string(SamplingMode mode) {
  return mode == SamplingMode::kStochastic ? "stochastic" : "deterministic";
}

std::vector<double> sample_node_positions(int n, SamplingMode mode, std::uint64_t seed) {
  if (n < 1) throw InputDomainError("graph size must be positive");
  if (mode == SamplingMode::kDeterministic) return grid_positions(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> pos(static_cast<std::size_t>(n));
  for (auto& v : pos) v = unif(rng);
  return pos;
}

Graph sample_graph_at(const GraphonSpec& spec, const std::vector<double>& positions,
                      std::uint64_t seed) {
  const int n = static_cast<int>(positions.size());
  if (n < 1) throw InputDomainError("graph size must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix adj = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p = eval_graphon(spec, positions[i], positions[j]);
      if (unif(rng) < p) {
        adj(i, j) = 1.0;
        adj(j, i) = 1.0;
      }
    }
  }
  return Graph::from_adjacency(std::move(adj));
}

Graph sample_graph(const GraphonSpec& spec, int n, SamplingMode mode, std::uint64_t seed) {
  spec.validate();
  const auto positions = sample_node_positions(n, mode, seed);
  return sample_graph_at(spec, positions, splitmix64(seed));
}

bool Dataset::has_alpha() const {
  return !labels.empty() &&
         std::all_of(labels.begin(), labels.end(), [](const GraphLabel& l) { return l.alpha.has_value(); });
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > graphs.size()) throw InputDomainError("dataset slice out of range");
  Dataset out;
  out.provenance = provenance;
  out.graphs.assign(graphs.begin() + begin, graphs.begin() + end);
  if (!labels.empty()) out.labels.assign(labels.begin() + begin, labels.begin() + end);
  return out;
}

Dataset make_dataset_single(const GraphonSpec& spec, const std::vector<int>& sizes,
                            std::uint64_t seed) {
  if (sizes.empty()) throw InputDomainError("size list must be non-empty");
  Dataset ds;
  ds.provenance = spec.name() + " stochastic seed=" + std::to_string(seed);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::uint64_t s = seed + i;
    ds.graphs.push_back(sample_graph(spec, sizes[i], SamplingMode::kStochastic, s));
    ds.labels.push_back(GraphLabel{std::nullopt, s});
  }
  return ds;
}

GraphonSpec family_member(Family family, double alpha) {
  return family == Family::kS1 ? GraphonSpec::two_block(alpha) : GraphonSpec::noisy_ring(alpha);
}

Family parse_family(const std::string& text) {
  if (text == "s1" || text == "S1") return Family::kS1;
  if (text == "s2" || text == "S2") return Family::kS2;
  throw InputDomainError("family must be s1 or s2");
}

Dataset make_dataset_family(Family family, int count, std::uint64_t seed) {
  if (count < 1) throw InputDomainError("family dataset needs at least one graph");
  const bool s1 = family == Family::kS1;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> alpha_dist(s1 ? 0.1 : 0.05, s1 ? 0.5 : 0.15);
  std::uniform_int_distribution<int> size_dist(50, s1 ? 79 : 59);
  Dataset ds;
  ds.provenance = std::string(s1 ? "s1" : "s2") + " deterministic seed=" + std::to_string(seed);
  for (int i = 0; i < count; ++i) {
    const double alpha = alpha_dist(rng);
    const int n = size_dist(rng);
    const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
    ds.graphs.push_back(sample_graph(family_member(family, alpha), n, SamplingMode::kDeterministic, s));
    ds.labels.push_back(GraphLabel{alpha, s});
  }
  return ds;
}

std::vector<int> default_single_sizes() {
  return {50, 77, 105, 133, 161, 188, 216, 244, 272, 300};
}

}  // namespace ignr
