#include "ignr/discrete_decoder.hpp"

#include <cmath>

#include "ignr/error.hpp"
#include "ignr/fastmath.hpp"

namespace ignr {

DiscreteDecoderParams DiscreteDecoderParams::zeros(int latent_dim, const std::vector<int>& widths,
                                                   int resolution) {
  if (latent_dim < 1) throw InputDomainError("latent dimension must be positive");
  if (resolution < 2) throw InputDomainError("decoder resolution must be at least 2");
  DiscreteDecoderParams p;
  p.resolution = resolution;
  int in = latent_dim;
  for (int w : widths) {
    if (w < 1) throw InputDomainError("hidden widths must be positive");
    p.hidden.push_back(DenseLayer::zeros(in, w));
    in = w;
  }
  p.out = DenseLayer::zeros(in, static_cast<Eigen::Index>(resolution) * (resolution - 1) / 2);
  return p;
}

std::vector<int> DiscreteDecoderParams::widths() const {
  std::vector<int> w;
  for (const auto& l : hidden) w.push_back(static_cast<int>(l.out()));
  return w;
}

ParamList DiscreteDecoderParams::refs(const std::string& prefix) {
  ParamList r;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    hidden[i].append_refs(r, prefix + ".hidden." + std::to_string(i));
  }
  out.append_refs(r, prefix + ".out");
  return r;
}

long DiscreteDecoderParams::weight_count() const {
  long n = out.w.size();
  for (const auto& l : hidden) n += l.w.size();
  return n;
}

void DiscreteDecoderParams::set_zero() {
  for (auto& l : hidden) l.set_zero();
  out.set_zero();
}

DiscreteDecoderParams discrete_init(int latent_dim, const std::vector<int>& widths, int resolution,
                                    std::uint64_t seed) {
  DiscreteDecoderParams p = DiscreteDecoderParams::zeros(latent_dim, widths, resolution);
  Rng rng(seed ^ 0x6469736372657465ULL);
  for (auto& l : p.hidden) fill_uniform(l.w, std::sqrt(6.0 / static_cast<double>(l.in())), rng);
  fill_uniform(p.out.w, std::sqrt(3.0 / static_cast<double>(p.out.in())), rng);
  return p;
}

Matrix discrete_decode(const DiscreteDecoderParams& p, const Vector& z, DiscreteTrace* trace) {
  if (z.size() != p.latent_dim()) throw InputDomainError("latent code has the wrong dimension");
  DiscreteTrace local;
  DiscreteTrace& t = trace ? *trace : local;
  t.z = z;
  t.pre.resize(p.hidden.size());
  Vector x = z;
  for (std::size_t i = 0; i < p.hidden.size(); ++i) {
    t.pre[i] = p.hidden[i].w * x + p.hidden[i].b;
    x = t.pre[i].cwiseMax(0.0);
  }
  t.out = p.out.w * x + p.out.b;
  for (Eigen::Index k = 0; k < t.out.size(); ++k) t.out[k] = sigmoid(t.out[k]);

  const int k = p.resolution;
  Matrix grid = Matrix::Zero(k, k);
  Eigen::Index cell = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      grid(i, j) = grid(j, i) = t.out[cell++];
    }
  }
  return grid;
}

DiscreteGrad discrete_backward(const DiscreteDecoderParams& p, const DiscreteTrace& t, const Matrix& upstream) {
  const int k = p.resolution;
  if (upstream.rows() != k || upstream.cols() != k) throw InputDomainError("upstream grid has the wrong shape");
  DiscreteGrad g{DiscreteDecoderParams::zeros(p.latent_dim(), p.widths(), k), Vector::Zero(p.latent_dim())};
  Vector dout(t.out.size());
  Eigen::Index cell = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const double v = t.out[cell];
      dout[cell] = (upstream(i, j) + upstream(j, i)) * v * (1.0 - v);
      ++cell;
    }
  }
  const std::size_t depth = p.hidden.size();
  const Vector last = depth == 0 ? t.z : Vector(t.pre[depth - 1].cwiseMax(0.0));
  g.params.out.w = dout * last.transpose();
  g.params.out.b = dout;
  Vector delta = p.out.w.transpose() * dout;
  for (std::size_t i = depth; i-- > 0;) {
    delta = (t.pre[i].array() > 0.0).select(delta, 0.0);
    const Vector input = i == 0 ? t.z : Vector(t.pre[i - 1].cwiseMax(0.0));
    g.params.hidden[i].w = delta * input.transpose();
    g.params.hidden[i].b = delta;
    delta = p.hidden[i].w.transpose() * delta;
  }
  g.dz = delta;
  return g;
}

}  // namespace ignr
