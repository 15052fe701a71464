#pragma once

// Independent reference computations used only by the tests. Nothing here
// shares code with the library paths it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "ignr/tensor.hpp"
#include "ignr/types.hpp"

namespace ignr::oracle {

// Quadruple loop straight from the definition of the GW objective.
inline double gw_cost_quadruple(const Matrix& a1, const Matrix& a2, const Matrix& t) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < a1.rows(); ++i) {
    for (Eigen::Index k = 0; k < a1.rows(); ++k) {
      for (Eigen::Index j = 0; j < a2.rows(); ++j) {
        for (Eigen::Index l = 0; l < a2.rows(); ++l) {
          const double d = a1(i, k) - a2(j, l);
          total += d * d * t(i, j) * t(k, l);
        }
      }
    }
  }
  return total;
}

inline Matrix random_symmetric(int n, std::mt19937_64& rng, bool binary, bool zero_diag = true) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (i == j && zero_diag) continue;
      const double v = binary ? (unif(rng) < 0.5 ? 1.0 : 0.0) : unif(rng);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

inline std::vector<int> random_permutation(int n, std::mt19937_64& rng) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// P with P(i, perm[i]) = 1.
inline Matrix permutation_matrix(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  Matrix p = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) p(i, perm[i]) = 1.0;
  return p;
}

// Random feasible coupling: mixture of the product coupling and a few
// permutation couplings (square uniform case) or a Sinkhorn-balanced random
// positive matrix (general case).
inline Matrix random_coupling(const Vector& h1, const Vector& h2, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  Matrix k(h1.size(), h2.size());
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) k(i, j) = unif(rng);
  }
  for (int it = 0; it < 5000; ++it) {
    const Vector r = k.rowwise().sum();
    for (Eigen::Index i = 0; i < k.rows(); ++i) k.row(i) *= h1[i] / r[i];
    const Vector c = k.colwise().sum().transpose();
    for (Eigen::Index j = 0; j < k.cols(); ++j) k.col(j) *= h2[j] / c[j];
  }
  return k;
}

// Exact transport by enumerating all bases of the transportation polytope
// (spanning trees of the complete bipartite graph). Only for tiny problems.
inline double emd_by_enumeration(const Vector& a, const Vector& b, const Matrix& cost) {
  const int n1 = static_cast<int>(a.size());
  const int n2 = static_cast<int>(b.size());
  const int arcs = n1 * n2;
  const int basis = n1 + n2 - 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(arcs), 0);
  std::fill(pick.end() - basis, pick.end(), 1);
  do {
    std::vector<int> chosen;
    for (int e = 0; e < arcs; ++e) {
      if (pick[e]) chosen.push_back(e);
    }
    // Peel leaves: a node touching exactly one remaining arc fixes its flow.
    std::vector<double> supply(static_cast<std::size_t>(n1 + n2));
    for (int i = 0; i < n1; ++i) supply[i] = a[i];
    for (int j = 0; j < n2; ++j) supply[n1 + j] = b[j];
    std::vector<bool> used(chosen.size(), false);
    double total = 0.0;
    bool feasible = true;
    for (std::size_t done = 0; done < chosen.size() && feasible;) {
      bool progressed = false;
      for (int node = 0; node < n1 + n2 && feasible; ++node) {
        int count = 0;
        std::size_t which = 0;
        for (std::size_t c = 0; c < chosen.size(); ++c) {
          if (used[c]) continue;
          const int i = chosen[c] / n2;
          const int j = n1 + chosen[c] % n2;
          if (i == node || j == node) {
            ++count;
            which = c;
          }
        }
        if (count != 1) continue;
        const int i = chosen[which] / n2;
        const int j = chosen[which] % n2;
        const double f = supply[node];
        if (f < -1e-12) {
          feasible = false;
          break;
        }
        supply[i] -= f;
        supply[n1 + j] -= f;
        total += f * cost(i, j);
        used[which] = true;
        ++done;
        progressed = true;
      }
      if (!progressed) feasible = false;  // contains a cycle
    }
    if (feasible) {
      for (double s : supply) {
        if (std::abs(s) > 1e-9) feasible = false;
      }
    }
    if (feasible) best = std::min(best, total);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

// Central differences of a scalar function of a flat parameter vector.
template <typename F>
std::vector<double> central_differences(F&& f, std::vector<double> x, double step) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double saved = x[k];
    x[k] = saved + step;
    const double up = f(x);
    x[k] = saved - step;
    const double down = f(x);
    x[k] = saved;
    g[k] = (up - down) / (2.0 * step);
  }
  return g;
}

// Central differences over every scalar of a parameter list; f reads the
// parameters through the same references.
template <typename F>
std::vector<double> central_differences(const ParamList& refs, F&& f, double step) {
  std::vector<double> g;
  for (const auto& r : refs) {
    for (Eigen::Index k = 0; k < r.size(); ++k) {
      double& x = r.data()[k];
      const double saved = x;
      x = saved + step;
      const double up = f();
      x = saved - step;
      const double down = f();
      x = saved;
      g.push_back((up - down) / (2.0 * step));
    }
  }
  return g;
}

// Fraction of entries where |a - b| <= rtol * max(|a|, |b|, floor).
inline double fraction_matching(const std::vector<double>& a, const std::vector<double>& b, double rtol,
                                double floor) {
  if (a.size() != b.size() || a.empty()) return 0.0;
  std::size_t ok = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double scale = std::max({std::abs(a[k]), std::abs(b[k]), floor});
    if (std::abs(a[k] - b[k]) <= rtol * scale) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(a.size());
}

}  // namespace ignr::oracle
