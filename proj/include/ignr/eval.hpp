#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ignr/graphon.hpp"
#include "ignr/gw.hpp"
#include "ignr/model.hpp"

namespace ignr {

inline constexpr double kMseScale = 1e4;

/// GW2 between two R x R grids with uniform weights. With a warm init this is
/// a single solve; otherwise the solver runs from the identity coupling and
/// from the product coupling and the smaller cost is returned.
double graphon_error_gw(const GraphonGrid& estimate, const GraphonGrid& truth,
                        GwSolver solver = GwSolver::kConditionalGradient, const GwSolverOptions& opts = {});

/// Row means of the grid.
Vector degree_function(const GraphonGrid& grid);

/// Rows and columns permuted so the degree vector is nondecreasing (stable).
GraphonGrid sort_by_degree(const GraphonGrid& grid);

/// Mean squared difference of the degree-sorted grids, times kMseScale.
double graphon_error_mse_sorted(const GraphonGrid& estimate, const GraphonGrid& truth);

// Bilinear interpolation between cell centers (index p sits at (p + 1/2)/K),
// clamped at the borders.
GraphonGrid upsample_linear(const GraphonGrid& grid, int r);

/// Symmetrized model grid at resolution R. A discrete model's native grid is
/// upsampled with upsample_linear.
GraphonGrid estimate_grid(const Model& model, const Vector& z, int r);

struct EvalOptions {
  int resolution = 300;
  GwSolver solver = GwSolver::kConditionalGradient;
  GwSolverOptions gw;
  bool mse_sorted = false;
  int jobs = 1;
};

struct EvalReport {
  std::vector<double> errors;       // GW2 per trial / test graph
  std::vector<double> mse_sorted;   // empty unless requested
  std::vector<double> seconds;      // per entry
  double mean = 0.0;
  double stddev = 0.0;  // population
  int resolution = 0;
  double total_seconds = 0.0;

  void finalize();
};

double mean_of(const std::vector<double>& v);
double stddev_of(const std::vector<double>& v);

/// One-entry report: trained (unconditional) model against the true graphon.
EvalReport evaluate_single(const Model& model, const GraphonSpec& spec, const EvalOptions& opts);

/// Encode each test graph, decode at R, compare to the family member that
/// generated it.
EvalReport evaluate_family(const Model& model, const Dataset& test, Family family, const EvalOptions& opts);

/// |Spearman rho| between alphas and the projection of the codes on their
/// first principal direction. Ties get average ranks.
double latent_alpha_correlation(const std::vector<Vector>& codes, const std::vector<double>& alphas);

std::vector<double> average_ranks(const std::vector<double>& v);
double spearman(const std::vector<double>& a, const std::vector<double>& b);
/// Unit-norm leading eigenvector of the centered covariance (power iteration).
Vector first_principal_direction(const std::vector<Vector>& codes);

/// requested > 0 wins; otherwise IGNR_JOBS; otherwise 1.
int resolve_jobs(int requested);
/// Runs fn(i) for i in [0, n) on up to jobs threads.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace ignr
