#include "ignr/train.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "ignr/adam.hpp"
#include "ignr/error.hpp"
#include "ignr/format.hpp"
#include "ignr/gw.hpp"

namespace ignr {

namespace {

std::string digest(const std::mt19937_64& engine) {
  std::ostringstream ss;
  ss << engine;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : ss.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

class CoordCache {
 public:
  const Matrix& get(int n) {
    auto it = cache_.find(n);
    if (it == cache_.end()) it = cache_.emplace(n, grid_coords(n)).first;
    return it->second;
  }

 private:
  std::map<int, Matrix> cache_;
};

Vector to_upstream(const Matrix& d) {
  const Eigen::Index n = d.rows();
  Vector up(n * n);
  Eigen::Map<RowMatrix>(up.data(), n, n) = 0.5 * (d + d.transpose());
  return up;
}

Matrix to_grid(const Vector& out, int n) { return Eigen::Map<const RowMatrix>(out.data(), n, n); }

struct StepResult {
  double cost;
  Matrix coupling;
};

GwResult solve_step(const TrainConfig& cfg, const Matrix& recon, const Graph& g, const std::optional<Matrix>& warm) {
  GwSolverOptions opts = cfg.gw;
  if (cfg.solver == GwSolver::kProximalGradient && warm) {
    opts.init = GwInit::kWarm;
    opts.warm = *warm;
  }
  return solve_gw(cfg.solver, recon, g.adj, uniform_hist(static_cast<int>(recon.rows())), g.hist, opts);
}

// Fills grad with d GW2 / d params for one graph and returns the cost.
StepResult graph_step(const Model& model, Model& grad, const Graph& g, const std::optional<Matrix>& warm,
                      CoordCache& coords) {
  const TrainConfig& cfg = model.config;
  const int n = g.n();
  switch (cfg.objective) {
    case Objective::kIgnr: {
      SirenTrace trace;
      const Vector out = siren_forward(model.siren, coords.get(n), &trace);
      const Matrix recon = symmetrize(to_grid(out, n));
      GwResult r = solve_step(cfg, recon, g, warm);
      grad.siren = siren_backward(model.siren, trace, to_upstream(gw_grad_first(recon, g.adj, r.coupling)));
      return {r.cost, std::move(r.coupling)};
    }
    case Objective::kCignr: {
      GinTrace gtrace;
      const Vector z = gin_encode(model.gin, g, &gtrace);
      ModSirenTrace trace;
      const Vector out = modsiren_forward(model.modsiren, z, coords.get(n), &trace);
      const Matrix recon = symmetrize(to_grid(out, n));
      GwResult r = solve_step(cfg, recon, g, warm);
      ModSirenGrad mg = modsiren_backward(model.modsiren, trace, to_upstream(gw_grad_first(recon, g.adj, r.coupling)));
      grad.modsiren = std::move(mg.params);
      grad.gin = gin_backward(model.gin, gtrace, mg.dz);
      return {r.cost, std::move(r.coupling)};
    }
    case Objective::kDiscrete: {
      GinTrace gtrace;
      const Vector z = gin_encode(model.gin, g, &gtrace);
      DiscreteTrace trace;
      const Matrix recon = discrete_decode(model.decoder, z, &trace);
      GwResult r = solve_step(cfg, recon, g, warm);
      DiscreteGrad dg = discrete_backward(model.decoder, trace, gw_grad_first(recon, g.adj, r.coupling));
      grad.decoder = std::move(dg.params);
      grad.gin = gin_backward(model.gin, gtrace, dg.dz);
      return {r.cost, std::move(r.coupling)};
    }
  }
  throw InputDomainError("unknown objective");
}

}  // namespace

Checkpoint train(const Dataset& ds, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (ds.size() == 0) throw InputDomainError("cannot train on an empty dataset");
  Checkpoint ckpt;
  ckpt.model = Model::init(cfg);
  Model& model = ckpt.model;
  Model grad = Model::zeros(cfg);
  Adam adam(model.refs(), AdamOptions{cfg.lr});

  std::mt19937_64 order_rng(cfg.seed ^ 0x73687566666c65ULL);
  std::vector<std::optional<Matrix>> couplings(ds.size());
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  CoordCache coords;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(order_rng() % i);
        std::swap(order[i - 1], order[j]);
      }
    }
    std::vector<double> costs(ds.size(), 0.0);
    for (std::size_t idx : order) {
      StepResult step;
      try {
        step = graph_step(model, grad, ds.graphs[idx], couplings[idx], coords);
      } catch (const NumericalError& e) {
        throw NumericalError("epoch " + std::to_string(epoch) + ", graph " + std::to_string(idx) + ": " + e.what());
      }
      if (!std::isfinite(step.cost)) {
        throw NumericalError("epoch " + std::to_string(epoch) + ", graph " + std::to_string(idx) +
                             ": non-finite GW2 cost");
      }
      costs[idx] = step.cost;
      if (cfg.solver == GwSolver::kProximalGradient) couplings[idx] = std::move(step.coupling);
      adam.step(grad.refs());
    }
    const double mean = std::accumulate(costs.begin(), costs.end(), 0.0) / static_cast<double>(ds.size());
    ckpt.loss_history.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  ckpt.rng_digest = digest(order_rng);
  return ckpt;
}

Checkpoint train_ignr(const Dataset& ds, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  if (cfg.objective != Objective::kIgnr) throw InputDomainError("train_ignr needs objective = ignr");
  return train(ds, cfg, on_epoch);
}

Checkpoint train_cignr(const Dataset& ds, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  if (cfg.objective != Objective::kCignr) throw InputDomainError("train_cignr needs objective = cignr");
  return train(ds, cfg, on_epoch);
}

Checkpoint train_discrete_baseline(const Dataset& ds, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  if (cfg.objective != Objective::kDiscrete) {
    throw InputDomainError("train_discrete_baseline needs objective = discrete");
  }
  return train(ds, cfg, on_epoch);
}

double reconstruction_cost(const Model& model, const Graph& g) {
  const Vector z = model.has_encoder() ? model.encode(g) : Vector();
  const Matrix recon = model.decode(z, g.n());
  return solve_step(model.config, recon, g, std::nullopt).cost;
}

GeneratedGraph generate_graph(const Model& model, const std::optional<Vector>& z, int n, SamplingMode mode,
                              std::uint64_t seed) {
  if (n < 1) throw InputDomainError("graph size must be positive");
  if (model.config.objective == Objective::kDiscrete) {
    throw InputDomainError("graph generation needs a continuous (ignr or cignr) model");
  }
  if (model.has_encoder() && !z) throw InputDomainError("a latent code is required for a conditional model");
  const std::vector<double> pos = sample_node_positions(n, mode, seed);
  Matrix coords(2, static_cast<Eigen::Index>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      coords(0, static_cast<Eigen::Index>(a) * n + b) = pos[a];
      coords(1, static_cast<Eigen::Index>(a) * n + b) = pos[b];
    }
  }
  const Vector out = model.has_encoder() ? modsiren_forward(model.modsiren, *z, coords)
                                         : siren_forward(model.siren, coords);
  GeneratedGraph gen;
  gen.probabilities = symmetrize(to_grid(out, n));
  Matrix adj = Matrix::Zero(n, n);
  Rng rng(seed ^ 0x65646765735f6765ULL);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform() < gen.probabilities(i, j)) adj(i, j) = adj(j, i) = 1.0;
    }
  }
  gen.graph = Graph::from_adjacency(std::move(adj));
  return gen;
}

void write_loss_history(std::ostream& out, const std::vector<double>& history) {
  out << "epoch,mean_gw2\n";
  for (std::size_t e = 0; e < history.size(); ++e) out << e << ',' << format_double(history[e]) << '\n';
}

void save_loss_history(const std::string& path, const std::vector<double>& history) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  write_loss_history(out, history);
}

}  // namespace ignr
