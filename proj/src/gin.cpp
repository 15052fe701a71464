#include "ignr/gin.hpp"

#include <cmath>

#include "ignr/error.hpp"

namespace ignr {

GinParams GinParams::zeros(int latent_dim, int width, int depth) {
  if (latent_dim < 1) throw InputDomainError("latent dimension must be positive");
  if (width < 1 || depth < 1) throw InputDomainError("encoder width and depth must be positive");
  GinParams p;
  int in = 1;
  for (int i = 0; i < depth; ++i) {
    p.layers.push_back(GinLayer{DenseLayer::zeros(in, width), DenseLayer::zeros(width, width), Vector::Zero(1)});
    in = width;
  }
  p.readout = DenseLayer::zeros(in, latent_dim);
  return p;
}

ParamList GinParams::refs(const std::string& prefix) {
  ParamList r;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string base = prefix + ".layers." + std::to_string(i);
    layers[i].lin1.append_refs(r, base + ".lin1");
    layers[i].lin2.append_refs(r, base + ".lin2");
    r.push_back(ParamRef{base + ".eps", nullptr, &layers[i].eps});
  }
  readout.append_refs(r, prefix + ".readout");
  return r;
}

void GinParams::set_zero() {
  for (auto& l : layers) {
    l.lin1.set_zero();
    l.lin2.set_zero();
    l.eps.setZero();
  }
  readout.set_zero();
}

GinParams gin_init(int latent_dim, std::uint64_t seed, int width, int depth) {
  GinParams p = GinParams::zeros(latent_dim, width, depth);
  Rng rng(seed ^ 0x67696e656e636f64ULL);
  auto he = [&](DenseLayer& l) { fill_uniform(l.w, std::sqrt(6.0 / static_cast<double>(l.in())), rng); };
  for (auto& l : p.layers) {
    he(l.lin1);
    he(l.lin2);
  }
  fill_uniform(p.readout.w, std::sqrt(3.0 / static_cast<double>(p.readout.in())), rng);
  return p;
}

Matrix node_features(const Graph& g, NodeFeature feature) {
  const int n = g.n();
  if (feature == NodeFeature::kConstant) return Matrix::Ones(1, n);
  return (g.adj.colwise().sum() / static_cast<double>(n)).eval();
}

Vector gin_encode(const GinParams& p, const Graph& g, GinTrace* trace) {
  if (g.n() < 1) throw InputDomainError("cannot encode an empty graph");
  GinTrace local;
  GinTrace& t = trace ? *trace : local;
  const std::size_t depth = p.layers.size();
  t.adj = g.adj / static_cast<double>(g.n());
  t.x.assign(depth + 1, Matrix());
  t.agg.resize(depth);
  t.pre1.resize(depth);
  t.pre2.resize(depth);
  t.x[0] = node_features(g, p.feature);
  for (std::size_t i = 0; i < depth; ++i) {
    const GinLayer& l = p.layers[i];
    t.agg[i] = (1.0 + l.eps[0]) * t.x[i] + t.x[i] * t.adj;
    t.pre1[i] = l.lin1.w * t.agg[i];
    t.pre1[i].colwise() += l.lin1.b;
    t.pre2[i] = l.lin2.w * t.pre1[i].cwiseMax(0.0);
    t.pre2[i].colwise() += l.lin2.b;
    t.x[i + 1] = t.pre2[i].cwiseMax(0.0);
  }
  t.pooled = t.x[depth].rowwise().mean();
  return p.readout.w * t.pooled + p.readout.b;
}

GinParams gin_backward(const GinParams& p, const GinTrace& t, const Vector& dz) {
  if (dz.size() != p.latent_dim()) throw InputDomainError("latent gradient has the wrong dimension");
  const std::size_t depth = p.layers.size();
  GinParams g = GinParams::zeros(p.latent_dim(), static_cast<int>(p.readout.in()), static_cast<int>(depth));
  g.feature = p.feature;
  g.readout.w = dz * t.pooled.transpose();
  g.readout.b = dz;
  const Eigen::Index n = t.adj.rows();
  const Vector dpooled = p.readout.w.transpose() * dz;
  Matrix dx = (dpooled / static_cast<double>(n)).replicate(1, n);
  for (std::size_t i = depth; i-- > 0;) {
    const GinLayer& l = p.layers[i];
    GinLayer& gl = g.layers[i];
    const Matrix dpre2 = (t.pre2[i].array() > 0.0).select(dx, 0.0);
    const Matrix hidden = t.pre1[i].cwiseMax(0.0);
    gl.lin2.w.noalias() = dpre2 * hidden.transpose();
    gl.lin2.b = dpre2.rowwise().sum();
    const Matrix dhidden = l.lin2.w.transpose() * dpre2;
    const Matrix dpre1 = (t.pre1[i].array() > 0.0).select(dhidden, 0.0);
    gl.lin1.w.noalias() = dpre1 * t.agg[i].transpose();
    gl.lin1.b = dpre1.rowwise().sum();
    const Matrix dagg = l.lin1.w.transpose() * dpre1;
    gl.eps[0] = (dagg.array() * t.x[i].array()).sum();
    if (i > 0) dx = (1.0 + l.eps[0]) * dagg + dagg * t.adj.transpose();
  }
  return g;
}

}  // namespace ignr
