#include "ignr/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ignr/error.hpp"

namespace ignr {

namespace {

// Uncapacitated transportation network: supply nodes 0..n1-1, demand nodes
// n1..n1+n2-1, complete bipartite arcs, and one artificial root connected to
// every node. The spanning tree is kept in parent/thread form so that every
// pivot costs time proportional to the size of the affected subtree.
class NetworkSimplex {
 public:
  NetworkSimplex(const Vector& a, const Vector& b, const Matrix& cost)
      : n1_(static_cast<int>(a.size())),
        n2_(static_cast<int>(b.size())),
        node_num_(n1_ + n2_),
        arc_num_(n1_ * n2_),
        all_arc_num_(arc_num_ + node_num_),
        root_(node_num_) {
    source_.resize(all_arc_num_);
    target_.resize(all_arc_num_);
    cost_.resize(all_arc_num_);
    flow_.assign(all_arc_num_, 0.0);
    state_.assign(all_arc_num_, kStateLower);

    double min_cost = std::numeric_limits<double>::infinity();
    double max_cost = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n1_; ++i) {
      for (int j = 0; j < n2_; ++j) {
        min_cost = std::min(min_cost, cost(i, j));
        max_cost = std::max(max_cost, cost(i, j));
      }
    }
    // Shifting every arc by a constant leaves the optimal plan unchanged
    // because the total mass is fixed.
    for (int i = 0; i < n1_; ++i) {
      for (int j = 0; j < n2_; ++j) {
        const int e = i * n2_ + j;
        source_[e] = i;
        target_[e] = n1_ + j;
        cost_[e] = cost(i, j) - min_cost;
      }
    }
    const double span = max_cost - min_cost;
    eps_ = 1e-13 * std::max(1.0, span);
    art_cost_ = (span + 1.0) * node_num_;

    const int nodes = node_num_ + 1;
    supply_.assign(nodes, 0.0);
    pi_.assign(nodes, 0.0);
    parent_.assign(nodes, -1);
    pred_.assign(nodes, -1);
    thread_.assign(nodes, 0);
    rev_thread_.assign(nodes, 0);
    succ_num_.assign(nodes, 0);
    last_succ_.assign(nodes, 0);
    pred_dir_.assign(nodes, kDirUp);

    double sum = 0.0;
    for (int i = 0; i < n1_; ++i) {
      supply_[i] = a[i];
      sum += a[i];
    }
    for (int j = 0; j < n2_; ++j) {
      supply_[n1_ + j] = -b[j];
      sum -= b[j];
    }
    supply_[root_] = -sum;

    parent_[root_] = -1;
    pred_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = node_num_ + 1;
    last_succ_[root_] = root_ - 1;
    for (int u = 0, e = arc_num_; u != node_num_; ++u, ++e) {
      parent_[u] = root_;
      pred_[u] = e;
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      state_[e] = kStateTree;
      if (supply_[u] >= 0) {
        pred_dir_[u] = kDirUp;
        pi_[u] = 0.0;
        source_[e] = u;
        target_[e] = root_;
        flow_[e] = supply_[u];
        cost_[e] = 0.0;
      } else {
        pred_dir_[u] = kDirDown;
        pi_[u] = art_cost_;
        source_[e] = root_;
        target_[e] = u;
        flow_[e] = -supply_[u];
        cost_[e] = art_cost_;
      }
    }

    block_size_ = std::max(10, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(arc_num_)))));
  }

  long run(long max_pivots) {
    long pivots = 0;
    while (find_entering_arc()) {
      if (++pivots > max_pivots) {
        throw NumericalError("network simplex exceeded its pivot budget");
      }
      find_join_node();
      const bool change = find_leaving_arc();
      change_flow(change);
      if (change) {
        update_tree_structure();
        update_potential();
      }
    }
    return pivots;
  }

  Matrix plan() const {
    Matrix p(n1_, n2_);
    for (int i = 0; i < n1_; ++i) {
      for (int j = 0; j < n2_; ++j) p(i, j) = std::max(flow_[i * n2_ + j], 0.0);
    }
    return p;
  }

  double artificial_flow() const {
    double total = 0.0;
    for (int e = arc_num_; e < all_arc_num_; ++e) total += flow_[e];
    return total;
  }

 private:
  static constexpr int kStateLower = 1;
  static constexpr int kStateTree = 0;
  static constexpr int kDirUp = 1;
  static constexpr int kDirDown = -1;

  double reduced(int e) const { return cost_[e] + pi_[source_[e]] - pi_[target_[e]]; }

  bool find_entering_arc() {
    double min = -eps_;
    int cnt = block_size_;
    int e = next_arc_;
    bool found = false;
    for (; e != arc_num_; ++e) {
      const double c = state_[e] * reduced(e);
      if (c < min) {
        min = c;
        in_arc_ = e;
        found = true;
      }
      if (--cnt == 0) {
        if (found) {
          next_arc_ = e + 1 == arc_num_ ? 0 : e + 1;
          return true;
        }
        cnt = block_size_;
      }
    }
    for (e = 0; e != next_arc_; ++e) {
      const double c = state_[e] * reduced(e);
      if (c < min) {
        min = c;
        in_arc_ = e;
        found = true;
      }
      if (--cnt == 0) {
        if (found) {
          next_arc_ = e + 1;
          return true;
        }
        cnt = block_size_;
      }
    }
    if (!found) return false;
    next_arc_ = e == arc_num_ ? 0 : e;
    return true;
  }

  void find_join_node() {
    int u = source_[in_arc_];
    int v = target_[in_arc_];
    while (u != v) {
      if (succ_num_[u] < succ_num_[v]) {
        u = parent_[u];
      } else {
        v = parent_[v];
      }
    }
    join_ = u;
  }

  bool find_leaving_arc() {
    // Entering arcs are always at their lower bound (no upper capacities).
    first_ = source_[in_arc_];
    second_ = target_[in_arc_];
    delta_ = std::numeric_limits<double>::infinity();
    int result = 0;
    for (int u = first_; u != join_; u = parent_[u]) {
      if (pred_dir_[u] == kDirUp) {
        const double d = flow_[pred_[u]];
        if (d < delta_) {
          delta_ = d;
          u_out_ = u;
          result = 1;
        }
      }
    }
    for (int u = second_; u != join_; u = parent_[u]) {
      if (pred_dir_[u] == kDirDown) {
        const double d = flow_[pred_[u]];
        if (d <= delta_) {
          delta_ = d;
          u_out_ = u;
          result = 2;
        }
      }
    }
    if (result == 0) {
      throw NumericalError("network simplex: unbounded cycle (negative-cost loop)");
    }
    // Roundoff can leave a tree flow a hair below zero.
    delta_ = std::max(delta_, 0.0);
    if (result == 1) {
      u_in_ = first_;
      v_in_ = second_;
    } else {
      u_in_ = second_;
      v_in_ = first_;
    }
    return true;
  }

  void change_flow(bool change) {
    if (delta_ > 0) {
      const double val = delta_;
      flow_[in_arc_] += val;
      for (int u = source_[in_arc_]; u != join_; u = parent_[u]) {
        flow_[pred_[u]] -= pred_dir_[u] * val;
      }
      for (int u = target_[in_arc_]; u != join_; u = parent_[u]) {
        flow_[pred_[u]] += pred_dir_[u] * val;
      }
    }
    if (change) {
      state_[in_arc_] = kStateTree;
      const int out = pred_[u_out_];
      flow_[out] = 0.0;
      state_[out] = kStateLower;
    }
  }

  void update_tree_structure() {
    const int old_rev_thread = rev_thread_[u_out_];
    const int old_succ_num = succ_num_[u_out_];
    const int old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];

    if (u_in_ == u_out_) {
      parent_[u_in_] = v_in_;
      pred_[u_in_] = in_arc_;
      pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kDirUp : kDirDown;

      if (thread_[v_in_] != u_out_) {
        int after = thread_[old_last_succ];
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
        after = thread_[v_in_];
        thread_[v_in_] = u_out_;
        rev_thread_[u_out_] = v_in_;
        thread_[old_last_succ] = after;
        rev_thread_[after] = old_last_succ;
      }
    } else {
      const int thread_continue =
          old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];

      int stem = u_in_;
      int par_stem = v_in_;
      int last = last_succ_[u_in_];
      int after = thread_[last];
      thread_[v_in_] = u_in_;
      dirty_revs_.clear();
      dirty_revs_.push_back(v_in_);
      while (stem != u_out_) {
        const int next_stem = parent_[stem];
        thread_[last] = next_stem;
        dirty_revs_.push_back(last);

        const int before = rev_thread_[stem];
        thread_[before] = after;
        rev_thread_[after] = before;

        parent_[stem] = par_stem;
        par_stem = stem;
        stem = next_stem;

        last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
        after = thread_[last];
      }
      parent_[u_out_] = par_stem;
      thread_[last] = thread_continue;
      rev_thread_[thread_continue] = last;
      last_succ_[u_out_] = last;

      if (old_rev_thread != v_in_) {
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
      }

      for (int u : dirty_revs_) rev_thread_[thread_[u]] = u;

      int tmp_sc = 0;
      const int tmp_ls = last_succ_[u_out_];
      for (int u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
        pred_[u] = pred_[p];
        pred_dir_[u] = -pred_dir_[p];
        tmp_sc += succ_num_[u] - succ_num_[p];
        succ_num_[u] = tmp_sc;
        last_succ_[p] = tmp_ls;
      }
      pred_[u_in_] = in_arc_;
      pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kDirUp : kDirDown;
      succ_num_[u_in_] = old_succ_num;
    }

    const int up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
    const int last_succ_out = last_succ_[u_out_];
    for (int u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u]) {
      last_succ_[u] = last_succ_out;
    }

    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u]) {
        last_succ_[u] = old_rev_thread;
      }
    } else if (last_succ_out != old_last_succ) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u]) {
        last_succ_[u] = last_succ_out;
      }
    }

    for (int u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (int u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  void update_potential() {
    const double sigma = pi_[v_in_] - pi_[u_in_] - pred_dir_[u_in_] * cost_[in_arc_];
    const int end = thread_[last_succ_[u_in_]];
    for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  int n1_, n2_, node_num_, arc_num_, all_arc_num_, root_;
  double eps_ = 0.0;
  double art_cost_ = 0.0;
  int block_size_ = 10;
  int next_arc_ = 0;

  std::vector<int> source_, target_;
  std::vector<double> cost_, flow_;
  std::vector<int> state_;

  std::vector<double> supply_, pi_;
  std::vector<int> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_, pred_dir_;
  std::vector<int> dirty_revs_;

  int in_arc_ = -1, join_ = -1, u_in_ = -1, v_in_ = -1, u_out_ = -1, v_out_ = -1;
  int first_ = -1, second_ = -1;
  double delta_ = 0.0;
};

}  // namespace

EmdResult emd(const Vector& a, const Vector& b, const Matrix& cost, long max_pivots) {
  if (a.size() == 0 || b.size() == 0) throw InputDomainError("emd: empty histogram");
  if (cost.rows() != a.size() || cost.cols() != b.size()) {
    throw InputDomainError("emd: cost matrix shape does not match histograms");
  }
  if ((a.array() <= 0.0).any() || (b.array() <= 0.0).any()) {
    throw InputDomainError("emd: histograms must be strictly positive");
  }
  if (!cost.allFinite()) throw InputDomainError("emd: cost matrix has non-finite entries");
  const double sa = a.sum();
  const double sb = b.sum();
  if (std::abs(sa - sb) > 1e-9 * std::max(sa, sb)) {
    throw InputDomainError("emd: histograms must carry equal mass");
  }
  if (max_pivots <= 0) {
    max_pivots = 100L * (a.size() + b.size()) * (a.size() + b.size()) + 100000L;
  }

  NetworkSimplex ns(a, b, cost);
  EmdResult result;
  result.pivots = ns.run(max_pivots);
  if (ns.artificial_flow() > 1e-9 * std::max(1.0, sa)) {
    throw NumericalError("emd: solution still routes mass through artificial arcs");
  }
  result.plan = ns.plan();
  result.cost = (result.plan.array() * cost.array()).sum();
  return result;
}

}  // namespace ignr
