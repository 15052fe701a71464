#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ignr/types.hpp"

namespace ignr {

// Squared 2-order Gromov-Wasserstein discrepancy between weighted graphs
//
//   GW2(A1, A2) = min_{T in C(h1, h2)} sum_{i,k,j,l} (A1[i,k] - A2[j,l])^2 T[i,j] T[k,l]
//
// with two local solvers (conditional gradient, proximal gradient) and the
// gradient of the objective in A1 at a fixed coupling.

enum class GwInit { kProduct, kIdentityIfSquare, kWarm };
enum class GwSolver { kConditionalGradient, kProximalGradient };

GwSolver parse_gw_solver(const std::string& text);
std::string to_string(GwSolver solver);
GwInit parse_gw_init(const std::string& text);
std::string to_string(GwInit init);

struct GwSolverOptions {
  int max_outer_iters = 200;
  double tol = 1e-9;          // relative objective decrease
  double pg_epsilon = 0.01;   // KL-proximal weight
  int pg_inner_iters = 50;    // scaling iterations per proximal step
  GwInit init = GwInit::kProduct;
  std::optional<Matrix> warm;  // used when init == kWarm

  void validate() const;
};

struct GwResult {
  double cost = 0.0;
  Matrix coupling;
  int iterations = 0;
  bool converged = false;
  double last_relative_decrease = 0.0;
  /// Objective after the initial coupling and after every outer iteration.
  std::vector<double> history;
};

Vector uniform_hist(int n);

/// Product coupling h1 h2^T.
Matrix product_coupling(const Vector& h1, const Vector& h2);

/// Objective at coupling t, via the squared-loss decomposition
///   sum A1^2 r r^T + sum A2^2 c c^T - 2 <A1 T A2^T, T>
/// where r, c are the marginals of t. O(N1^2 N2 + N1 N2^2).
double gw_cost(const Matrix& a1, const Matrix& a2, const Matrix& t);

/// d gw_cost / d A1 at fixed t: 2 (A1 .* r r^T - T A2 T^T).
Matrix gw_grad_first(const Matrix& a1, const Matrix& a2, const Matrix& t);

/// Largest absolute deviation of t's row/column sums from h1/h2.
double marginal_error(const Matrix& t, const Vector& h1, const Vector& h2);

/// Frank-Wolfe: linearize, solve the linear OT subproblem exactly by network
/// simplex, exact line search on the quadratic. Objective never increases.
GwResult solve_cg(const Matrix& a1, const Matrix& a2, const Vector& h1, const Vector& h2,
                  const GwSolverOptions& opts = {});

/// KL-proximal point iterations, each solved by Sinkhorn scaling of
/// T_k .* exp(-grad / epsilon), followed by a rounding step onto C(h1, h2).
GwResult solve_pg(const Matrix& a1, const Matrix& a2, const Vector& h1, const Vector& h2,
                  const GwSolverOptions& opts = {});

GwResult solve_gw(GwSolver solver, const Matrix& a1, const Matrix& a2, const Vector& h1,
                  const Vector& h2, const GwSolverOptions& opts = {});

}  // namespace ignr
