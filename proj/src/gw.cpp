#include "ignr/gw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ignr/error.hpp"
#include "ignr/network_simplex.hpp"

namespace ignr {

namespace {

void check_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InputDomainError(std::string(what) + " must be a non-empty square matrix");
  }
}

void check_hist(const Vector& h, Eigen::Index n, const char* what) {
  if (h.size() != n) throw InputDomainError(std::string(what) + " length does not match its matrix");
  if ((h.array() <= 0.0).any() || !h.allFinite()) {
    throw InputDomainError(std::string(what) + " must be strictly positive (degenerate histogram)");
  }
  if (std::abs(h.sum() - 1.0) > 1e-9) throw InputDomainError(std::string(what) + " must sum to one");
}

void check_problem(const Matrix& a1, const Matrix& a2, const Vector& h1, const Vector& h2) {
  check_square(a1, "A1");
  check_square(a2, "A2");
  check_hist(h1, a1.rows(), "h1");
  check_hist(h2, a2.rows(), "h2");
}

bool is_symmetric(const Matrix& a) { return (a - a.transpose()).cwiseAbs().maxCoeff() == 0.0; }

Matrix initial_coupling(const Vector& h1, const Vector& h2, const GwSolverOptions& opts) {
  switch (opts.init) {
    case GwInit::kProduct:
      return product_coupling(h1, h2);
    case GwInit::kIdentityIfSquare:
      if (h1.size() == h2.size() && (h1 - h2).cwiseAbs().maxCoeff() <= 1e-15) {
        return h1.asDiagonal().toDenseMatrix();
      }
      return product_coupling(h1, h2);
    case GwInit::kWarm: {
      if (!opts.warm) throw InputDomainError("warm init requested without a coupling");
      const Matrix& w = *opts.warm;
      if (w.rows() != h1.size() || w.cols() != h2.size()) {
        throw InputDomainError("warm coupling shape does not match the histograms");
      }
      if ((w.array() < 0.0).any() || !w.allFinite()) {
        throw InputDomainError("warm coupling must be nonnegative and finite");
      }
      return w;
    }
  }
  return product_coupling(h1, h2);
}

double frob(const Matrix& x, const Matrix& y) { return (x.array() * y.array()).sum(); }

// <constC, T> with constC[i,j] = (A1^2 h1)[i] + (A2^2 h2)[j] is constant on
// C(h1, h2); it is kept so the tracked objective equals gw_cost.
struct Linearization {
  Vector c1;  // (A1 .* A1) h1
  Vector c2;  // (A2 .* A2) h2
  double constant(const Matrix& t) const {
    return c1.dot(t.rowwise().sum()) + c2.dot(t.colwise().sum().transpose());
  }
};

// Projects a positive matrix onto C(h1, h2): scale rows and columns down to
// their targets, then add the missing mass as a rank-one correction.
void round_to_marginals(Matrix& t, const Vector& h1, const Vector& h2) {
  Vector rows = t.rowwise().sum();
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    if (rows[i] > h1[i]) t.row(i) *= h1[i] / rows[i];
  }
  Vector cols = t.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    if (cols[j] > h2[j]) t.col(j) *= h2[j] / cols[j];
  }
  const Vector err_r = (h1 - t.rowwise().sum()).cwiseMax(0.0);
  const Vector err_c = (h2 - t.colwise().sum().transpose()).cwiseMax(0.0);
  const double mass = err_r.sum();
  if (mass > 0.0) t.noalias() += err_r * err_c.transpose() / mass;
}

double log_sum_exp(const double* v, Eigen::Index n, Eigen::Index stride) {
  double mx = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) mx = std::max(mx, v[k * stride]);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) s += std::exp(v[k * stride] - mx);
  return mx + std::log(s);
}

// Sinkhorn scaling of the kernel exp(log_kernel) onto C(h1, h2). Works in
// the exponential domain and falls back to log-domain updates if scaling
// factors under- or overflow.
Matrix sinkhorn(const Matrix& log_kernel, const Vector& h1, const Vector& h2, int iters) {
  const Eigen::Index n1 = log_kernel.rows();
  const Eigen::Index n2 = log_kernel.cols();

  Vector row_max = log_kernel.rowwise().maxCoeff();
  if (!row_max.allFinite()) throw NumericalError("proximal step: kernel row has no support");
  Matrix kernel = (log_kernel.colwise() - row_max).array().exp().matrix();
  Vector u = Vector::Ones(n1);
  Vector v = Vector::Ones(n2);
  bool ok = true;
  for (int it = 0; it < iters && ok; ++it) {
    const Vector ktu = kernel.transpose() * u;
    v = h2.cwiseQuotient(ktu);
    const Vector kv = kernel * v;
    u = h1.cwiseQuotient(kv);
    ok = u.allFinite() && v.allFinite() && (ktu.array() > 0.0).all() && (kv.array() > 0.0).all();
  }
  if (ok) {
    Matrix t = u.asDiagonal() * kernel * v.asDiagonal();
    if (t.allFinite()) return t;
  }

  // Log-domain fallback.
  Vector f = Vector::Zero(n1);
  Vector g = Vector::Zero(n2);
  const Vector log_h1 = h1.array().log();
  const Vector log_h2 = h2.array().log();
  Matrix work(n1, n2);
  for (int it = 0; it < iters; ++it) {
    work = log_kernel.colwise() + f;
    for (Eigen::Index j = 0; j < n2; ++j) {
      g[j] = log_h2[j] - log_sum_exp(work.col(j).data(), n1, 1);
    }
    work = log_kernel.rowwise() + g.transpose();
    for (Eigen::Index i = 0; i < n1; ++i) {
      f[i] = log_h1[i] - log_sum_exp(work.data() + i, n2, n1);
    }
  }
  Matrix t = ((log_kernel.colwise() + f).rowwise() + g.transpose()).array().exp().matrix();
  if (!t.allFinite()) {
    throw NumericalError("proximal step: Sinkhorn scaling diverged (epsilon too small?)");
  }
  return t;
}

}  // namespace

GwSolver parse_gw_solver(const std::string& text) {
  if (text == "cg") return GwSolver::kConditionalGradient;
  if (text == "pg") return GwSolver::kProximalGradient;
  throw InputDomainError("solver must be cg or pg, got '" + text + "'");
}

std::string to_string(GwSolver solver) {
  return solver == GwSolver::kConditionalGradient ? "cg" : "pg";
}

GwInit parse_gw_init(const std::string& text) {
  if (text == "product") return GwInit::kProduct;
  if (text == "identity") return GwInit::kIdentityIfSquare;
  if (text == "warm") return GwInit::kWarm;
  throw InputDomainError("init must be product, identity or warm");
}

std::string to_string(GwInit init) {
  switch (init) {
    case GwInit::kProduct:
      return "product";
    case GwInit::kIdentityIfSquare:
      return "identity";
    case GwInit::kWarm:
      return "warm";
  }
  return "product";
}

void GwSolverOptions::validate() const {
  if (max_outer_iters < 1) throw InputDomainError("max_outer_iters must be positive");
  if (pg_inner_iters < 1) throw InputDomainError("pg_inner_iters must be positive");
  if (!(pg_epsilon > 0.0)) throw InputDomainError("pg_epsilon must be positive");
  if (!(tol >= 0.0)) throw InputDomainError("tol must be nonnegative");
}

Vector uniform_hist(int n) {
  if (n < 1) throw InputDomainError("histogram size must be positive");
  return Vector::Constant(n, 1.0 / n);
}

Matrix product_coupling(const Vector& h1, const Vector& h2) { return h1 * h2.transpose(); }

double gw_cost(const Matrix& a1, const Matrix& a2, const Matrix& t) {
  check_square(a1, "A1");
  check_square(a2, "A2");
  if (t.rows() != a1.rows() || t.cols() != a2.rows()) {
    throw InputDomainError("coupling shape does not match the two matrices");
  }
  const Vector r = t.rowwise().sum();
  const Vector c = t.colwise().sum().transpose();
  const double self1 = r.dot(a1.cwiseAbs2() * r);
  const double self2 = c.dot(a2.cwiseAbs2() * c);
  const Matrix at = a1 * t;
  const double cross = frob(at * a2.transpose(), t);
  return self1 + self2 - 2.0 * cross;
}

Matrix gw_grad_first(const Matrix& a1, const Matrix& a2, const Matrix& t) {
  check_square(a1, "A1");
  check_square(a2, "A2");
  if (t.rows() != a1.rows() || t.cols() != a2.rows()) {
    throw InputDomainError("coupling shape does not match the two matrices");
  }
  const Vector r = t.rowwise().sum();
  const Matrix tat = t * a2 * t.transpose();
  return 2.0 * (a1.cwiseProduct(r * r.transpose()) - tat);
}

double marginal_error(const Matrix& t, const Vector& h1, const Vector& h2) {
  const double er = (t.rowwise().sum() - h1).cwiseAbs().maxCoeff();
  const double ec = (t.colwise().sum().transpose() - h2).cwiseAbs().maxCoeff();
  return std::max(er, ec);
}

namespace {

GwResult cg_impl(const Matrix& a1, const Matrix& a2, const Vector& h1, const Vector& h2,
                 const GwSolverOptions& opts) {
  const bool symmetric = is_symmetric(a1) && is_symmetric(a2);
  const Linearization lin{a1.cwiseAbs2() * h1, a2.cwiseAbs2() * h2};
  const Matrix a2t = a2.transpose();
  const Matrix a1t = a1.transpose();

  GwResult res;
  Matrix t = initial_coupling(h1, h2, opts);
  Matrix at = a1 * t * a2t;             // A1 T A2^T
  Matrix at_t;                          // A1^T T A2 (asymmetric inputs only)
  if (!symmetric) at_t = a1t * t * a2;
  double f = lin.constant(t) - 2.0 * frob(at, t);
  res.history.push_back(f);

  Matrix grad(t.rows(), t.cols());
  for (int it = 0; it < opts.max_outer_iters; ++it) {
    // Linear part of the gradient; the constC part is constant on C(h1, h2).
    if (symmetric) {
      grad = -4.0 * at;
    } else {
      grad = -2.0 * (at + at_t);
    }
    const Matrix direction = emd(h1, h2, grad).plan - t;
    const Matrix ad = a1 * direction * a2t;
    const double quad = -2.0 * frob(ad, direction);
    double lin_term = -2.0 * (frob(at, direction) + frob(ad, t));
    Matrix ad_t;
    if (!symmetric) {
      ad_t = a1t * direction * a2;
      lin_term = -2.0 * (frob(at, direction) + frob(ad_t, t));
    }
    double gamma;
    if (quad > 0.0) {
      gamma = std::clamp(-lin_term / (2.0 * quad), 0.0, 1.0);
    } else {
      gamma = (quad + lin_term < 0.0) ? 1.0 : 0.0;
    }
    res.iterations = it + 1;
    if (gamma <= 0.0) {
      res.converged = true;
      res.last_relative_decrease = 0.0;
      break;
    }
    t.noalias() += gamma * direction;
    at.noalias() += gamma * ad;
    if (!symmetric) at_t.noalias() += gamma * ad_t;
    const double f_new = lin.constant(t) - 2.0 * frob(at, t);
    const double decrease = f - f_new;
    res.history.push_back(f_new);
    res.last_relative_decrease = decrease / std::max(std::abs(f_new), 1e-300);
    f = f_new;
    if (std::abs(decrease) <= 1e-15 || std::abs(res.last_relative_decrease) < opts.tol) {
      res.converged = true;
      break;
    }
  }
  res.coupling = std::move(t);
  res.cost = std::max(0.0, gw_cost(a1, a2, res.coupling));
  return res;
}

GwResult pg_impl(const Matrix& a1, const Matrix& a2, const Vector& h1, const Vector& h2,
                 const GwSolverOptions& opts) {
  const bool symmetric = is_symmetric(a1) && is_symmetric(a2);
  const Matrix a2t = a2.transpose();
  const Matrix a1t = a1.transpose();

  GwResult res;
  Matrix t = initial_coupling(h1, h2, opts);
  double f = gw_cost(a1, a2, t);
  res.history.push_back(f);
  Matrix best = t;
  double best_f = f;

  Matrix log_kernel(t.rows(), t.cols());
  for (int it = 0; it < opts.max_outer_iters; ++it) {
    Matrix grad = a1 * t * a2t;
    if (symmetric) {
      grad *= -4.0;
    } else {
      grad = -2.0 * (grad + a1t * t * a2);
    }
    log_kernel = t.array().log().matrix() - grad / opts.pg_epsilon;
    t = sinkhorn(log_kernel, h1, h2, opts.pg_inner_iters);
    round_to_marginals(t, h1, h2);
    const double f_new = gw_cost(a1, a2, t);
    if (!std::isfinite(f_new)) throw NumericalError("proximal gradient produced a non-finite objective");
    res.iterations = it + 1;
    res.history.push_back(f_new);
    res.last_relative_decrease = (f - f_new) / std::max(std::abs(f_new), 1e-300);
    if (f_new < best_f) {
      best_f = f_new;
      best = t;
    }
    const bool small = std::abs(f - f_new) <= 1e-15 || std::abs(res.last_relative_decrease) < opts.tol;
    f = f_new;
    if (small) {
      res.converged = true;
      break;
    }
  }
  res.coupling = std::move(best);
  res.cost = std::max(0.0, best_f);
  return res;
}

// Ties in the linear subproblems are broken by arc order, so solving (a2, a1)
// can land in a different local optimum than (a1, a2). Both solvers always
// work on a canonical ordering of the pair and transpose back.
bool lexicographically_less(const Matrix& x, const Matrix& y) {
  return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
}

bool swap_arguments(const Matrix& a1, const Matrix& a2, const Vector& h1, const Vector& h2) {
  if (a1.rows() != a2.rows()) return a1.rows() > a2.rows();
  if (lexicographically_less(a2, a1)) return true;
  if (lexicographically_less(a1, a2)) return false;
  return std::lexicographical_compare(h2.data(), h2.data() + h2.size(), h1.data(), h1.data() + h1.size());
}

template <typename Impl>
GwResult solve_canonical(Impl impl, const Matrix& a1, const Matrix& a2, const Vector& h1,
                         const Vector& h2, const GwSolverOptions& opts) {
  check_problem(a1, a2, h1, h2);
  opts.validate();
  if (!swap_arguments(a1, a2, h1, h2)) return impl(a1, a2, h1, h2, opts);
  GwSolverOptions swapped = opts;
  if (opts.init == GwInit::kWarm && opts.warm) swapped.warm = opts.warm->transpose();
  GwResult res = impl(a2, a1, h2, h1, swapped);
  res.coupling.transposeInPlace();
  return res;
}

}  // namespace

GwResult solve_cg(const Matrix& a1, const Matrix& a2, const Vector& h1, const Vector& h2,
                  const GwSolverOptions& opts) {
  return solve_canonical(cg_impl, a1, a2, h1, h2, opts);
}

GwResult solve_pg(const Matrix& a1, const Matrix& a2, const Vector& h1, const Vector& h2,
                  const GwSolverOptions& opts) {
  return solve_canonical(pg_impl, a1, a2, h1, h2, opts);
}

GwResult solve_gw(GwSolver solver, const Matrix& a1, const Matrix& a2, const Vector& h1,
                  const Vector& h2, const GwSolverOptions& opts) {
  return solver == GwSolver::kConditionalGradient ? solve_cg(a1, a2, h1, h2, opts)
                                                  : solve_pg(a1, a2, h1, h2, opts);
}

}  // namespace ignr
