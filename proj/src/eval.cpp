#include "ignr/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "ignr/error.hpp"
#include "ignr/tensor.hpp"

namespace ignr {

namespace {

void check_same_resolution(const GraphonGrid& a, const GraphonGrid& b) {
  if (a.resolution() != b.resolution()) {
    throw InputDomainError("grid resolutions differ (" + std::to_string(a.resolution()) + " vs " +
                           std::to_string(b.resolution()) + ")");
  }
  if (a.resolution() < 1) throw InputDomainError("grids must be nonempty");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double graphon_error_gw(const GraphonGrid& estimate, const GraphonGrid& truth, GwSolver solver,
                        const GwSolverOptions& opts) {
  check_same_resolution(estimate, truth);
  const Vector h = uniform_hist(estimate.resolution());
  if (opts.init == GwInit::kWarm) return solve_gw(solver, estimate.values, truth.values, h, h, opts).cost;
  GwSolverOptions o = opts;
  o.init = GwInit::kIdentityIfSquare;
  const double aligned = solve_gw(solver, estimate.values, truth.values, h, h, o).cost;
  o.init = GwInit::kProduct;
  const double restart = solve_gw(solver, estimate.values, truth.values, h, h, o).cost;
  return std::min(aligned, restart);
}

Vector degree_function(const GraphonGrid& grid) { return grid.values.rowwise().mean(); }

GraphonGrid sort_by_degree(const GraphonGrid& grid) {
  const Vector d = degree_function(grid);
  std::vector<int> order(static_cast<std::size_t>(d.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });
  const int r = grid.resolution();
  GraphonGrid out{Matrix(r, r)};
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) out.values(i, j) = grid.values(order[i], order[j]);
  }
  return out;
}

double graphon_error_mse_sorted(const GraphonGrid& estimate, const GraphonGrid& truth) {
  check_same_resolution(estimate, truth);
  const Matrix diff = sort_by_degree(estimate).values - sort_by_degree(truth).values;
  return diff.array().square().mean() * kMseScale;
}

GraphonGrid upsample_linear(const GraphonGrid& grid, int r) {
  const int k = grid.resolution();
  if (k < 1) throw InputDomainError("cannot upsample an empty grid");
  if (r < k) throw InputDomainError("target resolution must be at least the grid resolution");
  std::vector<int> lo(r), hi(r);
  std::vector<double> w(r);
  for (int t = 0; t < r; ++t) {
    const double u = std::clamp((t + 0.5) * k / r - 0.5, 0.0, static_cast<double>(k - 1));
    lo[t] = static_cast<int>(std::floor(u));
    hi[t] = std::min(lo[t] + 1, k - 1);
    w[t] = u - lo[t];
  }
  GraphonGrid out{Matrix(r, r)};
  const Matrix& g = grid.values;
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      const double top = (1.0 - w[b]) * g(lo[a], lo[b]) + w[b] * g(lo[a], hi[b]);
      const double bottom = (1.0 - w[b]) * g(hi[a], lo[b]) + w[b] * g(hi[a], hi[b]);
      out.values(a, b) = (1.0 - w[a]) * top + w[a] * bottom;
    }
  }
  return out;
}

GraphonGrid estimate_grid(const Model& model, const Vector& z, int r) {
  if (r < 1) throw InputDomainError("resolution must be positive");
  if (model.config.objective == Objective::kDiscrete) {
    const GraphonGrid native{model.decode(z, r)};
    if (native.resolution() > r) throw InputDomainError("resolution is below the decoder's native resolution");
    return upsample_linear(native, r);
  }
  return GraphonGrid{model.decode(z, r)};
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

void EvalReport::finalize() {
  mean = mean_of(errors);
  stddev = stddev_of(errors);
}

EvalReport evaluate_single(const Model& model, const GraphonSpec& spec, const EvalOptions& opts) {
  if (model.has_encoder()) throw InputDomainError("single-graphon evaluation needs an unconditional model");
  const auto t0 = std::chrono::steady_clock::now();
  const GraphonGrid est = estimate_grid(model, Vector(), opts.resolution);
  const GraphonGrid truth = sample_grid(spec, opts.resolution);
  EvalReport rep;
  rep.resolution = opts.resolution;
  rep.errors.push_back(graphon_error_gw(est, truth, opts.solver, opts.gw));
  if (opts.mse_sorted) rep.mse_sorted.push_back(graphon_error_mse_sorted(est, truth));
  rep.seconds.push_back(seconds_since(t0));
  rep.total_seconds = rep.seconds.back();
  rep.finalize();
  return rep;
}

EvalReport evaluate_family(const Model& model, const Dataset& test, Family family, const EvalOptions& opts) {
  if (test.size() == 0) throw InputDomainError("test set is empty");
  if (!model.has_encoder()) throw InputDomainError("family evaluation needs a model with an encoder");
  if (!test.has_alpha()) throw InputDomainError("test graphs need alpha labels");
  const auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(test.size());
  EvalReport rep;
  rep.resolution = opts.resolution;
  rep.errors.assign(n, 0.0);
  rep.seconds.assign(n, 0.0);
  if (opts.mse_sorted) rep.mse_sorted.assign(n, 0.0);
  parallel_for(n, resolve_jobs(opts.jobs), [&](int i) {
    const auto t1 = std::chrono::steady_clock::now();
    const GraphonGrid est = estimate_grid(model, model.encode(test.graphs[i]), opts.resolution);
    const GraphonGrid truth = sample_grid(family_member(family, *test.labels[i].alpha), opts.resolution);
    rep.errors[i] = graphon_error_gw(est, truth, opts.solver, opts.gw);
    if (opts.mse_sorted) rep.mse_sorted[i] = graphon_error_mse_sorted(est, truth);
    rep.seconds[i] = seconds_since(t1);
  });
  rep.total_seconds = seconds_since(t0);
  rep.finalize();
  return rep;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InputDomainError("spearman inputs differ in length");
  if (a.size() < 2) throw InputDomainError("spearman needs at least two points");
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  const double ma = mean_of(ra);
  const double mb = mean_of(rb);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

Vector first_principal_direction(const std::vector<Vector>& codes) {
  if (codes.empty()) throw InputDomainError("no codes");
  const Eigen::Index d = codes.front().size();
  Matrix x(static_cast<Eigen::Index>(codes.size()), d);
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (codes[i].size() != d) throw InputDomainError("codes differ in dimension");
    x.row(static_cast<Eigen::Index>(i)) = codes[i].transpose();
  }
  x.rowwise() -= x.colwise().mean();
  const Matrix cov = x.transpose() * x / static_cast<double>(codes.size());
  Rng rng(0x706361);
  Vector v(d);
  for (Eigen::Index k = 0; k < d; ++k) v[k] = rng.uniform(-1.0, 1.0);
  v.normalize();
  for (int it = 0; it < 10000; ++it) {
    Vector next = cov * v;
    const double norm = next.norm();
    if (norm == 0.0) return v;
    next /= norm;
    const double change = std::min((next - v).norm(), (next + v).norm());
    v = next;
    if (change < 1e-13) break;
  }
  return v;
}

double latent_alpha_correlation(const std::vector<Vector>& codes, const std::vector<double>& alphas) {
  if (codes.size() != alphas.size()) throw InputDomainError("one alpha per code is required");
  const Vector dir = first_principal_direction(codes);
  std::vector<double> proj(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) proj[i] = codes[i].dot(dir);
  return std::abs(spearman(proj, alphas));
}

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("IGNR_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ignr
