#include "ignr/siren.hpp"

#include <cmath>

#include "ignr/error.hpp"
#include "ignr/fastmath.hpp"

namespace ignr {

SirenParams SirenParams::zeros(const std::vector<int>& widths, double omega0) {
  if (widths.empty()) throw InputDomainError("siren needs at least one hidden layer");
  SirenParams p;
  p.omega0 = omega0;
  int in = 2;
  for (int w : widths) {
    if (w < 1) throw InputDomainError("hidden widths must be positive");
    p.layers.push_back(DenseLayer::zeros(in, w));
    in = w;
  }
  p.out = DenseLayer::zeros(in, 1);
  return p;
}

std::vector<int> SirenParams::widths() const {
  std::vector<int> w;
  for (const auto& l : layers) w.push_back(static_cast<int>(l.out()));
  return w;
}

ParamList SirenParams::refs(const std::string& prefix) {
  ParamList r;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].append_refs(r, prefix + ".layers." + std::to_string(i));
  }
  out.append_refs(r, prefix + ".out");
  return r;
}

long SirenParams::weight_count() const {
  long n = out.w.size();
  for (const auto& l : layers) n += l.w.size();
  return n;
}

void SirenParams::set_zero() {
  for (auto& l : layers) l.set_zero();
  out.set_zero();
}

SirenParams siren_init(const std::vector<int>& widths, std::uint64_t seed, double omega0) {
  SirenParams p = SirenParams::zeros(widths, omega0);
  Rng rng(seed);
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    auto& l = p.layers[i];
    const double fan_in = static_cast<double>(l.in());
    const double bound = i == 0 ? 1.0 / fan_in : std::sqrt(6.0 / fan_in);
    fill_uniform(l.w, bound, rng);
    fill_uniform(l.b, 1.0 / std::sqrt(fan_in), rng);
  }
  const double fan_in = static_cast<double>(p.out.in());
  fill_uniform(p.out.w, std::sqrt(6.0 / fan_in) / omega0, rng);
  fill_uniform(p.out.b, 1.0 / std::sqrt(fan_in), rng);
  return p;
}

Vector siren_forward(const SirenParams& p, const Matrix& coords, SirenTrace* trace) {
  if (coords.rows() != 2) throw InputDomainError("coordinates must be a 2 x P matrix");
  const Eigen::Index n = coords.cols();
  SirenTrace local;
  SirenTrace& t = trace ? *trace : local;
  t.coords = coords;
  t.h.resize(p.layers.size());
  t.dh.resize(p.layers.size());

  const Matrix* prev = &coords;
  Matrix pre;
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    const auto& l = p.layers[i];
    pre.noalias() = l.w * *prev;
    pre.colwise() += l.b;
    if (i == 0) pre *= p.omega0;
    t.h[i].resize(l.out(), n);
    t.dh[i].resize(l.out(), n);
    sincos_array(pre.data(), t.h[i].data(), t.dh[i].data(), pre.size());
    prev = &t.h[i];
  }
  t.out = (p.out.w * *prev).transpose();
  t.out.array() += p.out.b[0];
  for (Eigen::Index k = 0; k < n; ++k) t.out[k] = sigmoid(t.out[k]);
  return t.out;
}

SirenParams siren_backward(const SirenParams& p, const SirenTrace& t, const Vector& upstream) {
  if (upstream.size() != t.out.size()) throw InputDomainError("upstream length must equal coordinate count");
  SirenParams g = SirenParams::zeros(p.widths(), p.omega0);
  const Eigen::Index n = t.out.size();
  const std::size_t depth = p.layers.size();

  Vector dpre_out = upstream.cwiseProduct(t.out.cwiseProduct((1.0 - t.out.array()).matrix()));
  g.out.w.noalias() = dpre_out.transpose() * t.h[depth - 1].transpose();
  g.out.b[0] = dpre_out.sum();

  Matrix delta = p.out.w.transpose() * dpre_out.transpose();  // dL/dh_L
  for (std::size_t i = depth; i-- > 0;) {
    delta.array() *= t.dh[i].array();
    if (i == 0) delta *= p.omega0;
    const Matrix& input = i == 0 ? t.coords : t.h[i - 1];
    g.layers[i].w.noalias() = delta * input.transpose();
    g.layers[i].b = delta.rowwise().sum();
    if (i > 0) {
      Matrix next(p.layers[i].in(), n);
      next.noalias() = p.layers[i].w.transpose() * delta;
      delta.swap(next);
    }
  }
  return g;
}

SirenParams siren_backward(const SirenParams& p, const Matrix& coords, const Vector& upstream) {
  SirenTrace t;
  siren_forward(p, coords, &t);
  return siren_backward(p, t, upstream);
}

Matrix grid_coords(int n) {
  if (n < 1) throw InputDomainError("grid size must be positive");
  Matrix c(2, static_cast<Eigen::Index>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      c(0, static_cast<Eigen::Index>(a) * n + b) = static_cast<double>(a) / n;
      c(1, static_cast<Eigen::Index>(a) * n + b) = static_cast<double>(b) / n;
    }
  }
  return c;
}

Matrix siren_grid(const SirenParams& p, int n) {
  const Vector v = siren_forward(p, grid_coords(n));
  return Eigen::Map<const RowMatrix>(v.data(), n, n);
}

}  // namespace ignr
