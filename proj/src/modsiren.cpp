#include "ignr/modsiren.hpp"

#include <cmath>

#include "ignr/error.hpp"
#include "ignr/fastmath.hpp"

namespace ignr {

ModSirenParams ModSirenParams::zeros(const std::vector<int>& widths, int latent_dim, double omega0) {
  if (latent_dim < 1) throw InputDomainError("latent dimension must be positive");
  ModSirenParams p;
  p.synthesis = SirenParams::zeros(widths, omega0);
  p.latent_dim = latent_dim;
  int in = 0;
  for (int w : widths) {
    p.modulation.push_back(DenseLayer::zeros(in + latent_dim, w));
    in = w;
  }
  return p;
}

ParamList ModSirenParams::refs(const std::string& prefix) {
  ParamList r = synthesis.refs(prefix + ".synthesis");
  for (std::size_t i = 0; i < modulation.size(); ++i) {
    modulation[i].append_refs(r, prefix + ".modulation." + std::to_string(i));
  }
  return r;
}

long ModSirenParams::weight_count() const {
  long n = synthesis.weight_count();
  for (const auto& l : modulation) n += l.w.size();
  return n;
}

void ModSirenParams::set_zero() {
  synthesis.set_zero();
  for (auto& l : modulation) l.set_zero();
}

ModSirenParams modsiren_init(const std::vector<int>& widths, int latent_dim, std::uint64_t seed,
                             double omega0) {
  ModSirenParams p = ModSirenParams::zeros(widths, latent_dim, omega0);
  p.synthesis = siren_init(widths, seed, omega0);
  Rng rng(seed ^ 0x6d6f64756c617465ULL);
  for (auto& l : p.modulation) {
    fill_uniform(l.w, std::sqrt(6.0 / static_cast<double>(l.in())), rng);
    l.b.setOnes();
  }
  return p;
}

Vector modsiren_forward(const ModSirenParams& p, const Vector& z, const Matrix& coords,
                        ModSirenTrace* trace) {
  if (z.size() != p.latent_dim) {
    throw InputDomainError("latent code has dimension " + std::to_string(z.size()) + ", expected " +
                           std::to_string(p.latent_dim));
  }
  if (coords.rows() != 2) throw InputDomainError("coordinates must be a 2 x P matrix");
  ModSirenTrace local;
  ModSirenTrace& t = trace ? *trace : local;
  const std::size_t depth = p.modulation.size();
  const Eigen::Index n = coords.cols();
  t.z = z;
  t.coords = coords;
  t.gate_pre.resize(depth);
  t.gate.resize(depth);
  t.s.resize(depth);
  t.c.resize(depth);
  t.h.resize(depth);

  for (std::size_t i = 0; i < depth; ++i) {
    const auto& m = p.modulation[i];
    Vector input(m.in());
    if (i == 0) {
      input = z;
    } else {
      input << t.gate[i - 1], z;
    }
    t.gate_pre[i] = m.w * input + m.b;
    t.gate[i] = t.gate_pre[i].cwiseMax(0.0);
  }

  const SirenParams& syn = p.synthesis;
  const Matrix* prev = &coords;
  Matrix pre;
  for (std::size_t i = 0; i < depth; ++i) {
    const auto& l = syn.layers[i];
    pre.noalias() = l.w * *prev;
    pre.colwise() += l.b;
    if (i == 0) pre *= syn.omega0;
    t.s[i].resize(l.out(), n);
    t.c[i].resize(l.out(), n);
    sincos_array(pre.data(), t.s[i].data(), t.c[i].data(), pre.size());
    t.h[i] = t.gate[i].asDiagonal() * t.s[i];
    prev = &t.h[i];
  }
  t.out = (syn.out.w * *prev).transpose();
  t.out.array() += syn.out.b[0];
  for (Eigen::Index k = 0; k < n; ++k) t.out[k] = sigmoid(t.out[k]);
  return t.out;
}

ModSirenGrad modsiren_backward(const ModSirenParams& p, const ModSirenTrace& t, const Vector& upstream) {
  if (upstream.size() != t.out.size()) throw InputDomainError("upstream length must equal coordinate count");
  const std::size_t depth = p.modulation.size();
  const Eigen::Index n = t.out.size();
  const SirenParams& syn = p.synthesis;
  ModSirenGrad g{ModSirenParams::zeros(syn.widths(), p.latent_dim, syn.omega0), Vector::Zero(p.latent_dim)};
  SirenParams& gs = g.params.synthesis;

  const Vector dpre_out = upstream.cwiseProduct(t.out.cwiseProduct((1.0 - t.out.array()).matrix()));
  gs.out.w.noalias() = dpre_out.transpose() * t.h[depth - 1].transpose();
  gs.out.b[0] = dpre_out.sum();

  std::vector<Vector> dgate(depth);
  Matrix delta = syn.out.w.transpose() * dpre_out.transpose();  // dL/dh_i
  for (std::size_t i = depth; i-- > 0;) {
    dgate[i] = delta.cwiseProduct(t.s[i]).rowwise().sum();
    delta = t.gate[i].asDiagonal() * delta;
    delta.array() *= t.c[i].array();
    if (i == 0) delta *= syn.omega0;
    const Matrix& input = i == 0 ? t.coords : t.h[i - 1];
    gs.layers[i].w.noalias() = delta * input.transpose();
    gs.layers[i].b = delta.rowwise().sum();
    if (i > 0) {
      Matrix next(syn.layers[i].in(), n);
      next.noalias() = syn.layers[i].w.transpose() * delta;
      delta.swap(next);
    }
  }

  for (std::size_t i = depth; i-- > 0;) {
    const auto& m = p.modulation[i];
    const Vector dpre = (t.gate_pre[i].array() > 0.0).select(dgate[i], 0.0);
    Vector input(m.in());
    if (i == 0) {
      input = t.z;
    } else {
      input << t.gate[i - 1], t.z;
    }
    g.params.modulation[i].w.noalias() = dpre * input.transpose();
    g.params.modulation[i].b = dpre;
    const Vector dinput = m.w.transpose() * dpre;
    if (i == 0) {
      g.dz += dinput;
    } else {
      const Eigen::Index prev = t.gate[i - 1].size();
      dgate[i - 1] += dinput.head(prev);
      g.dz += dinput.tail(p.latent_dim);
    }
  }
  return g;
}

ModSirenGrad modsiren_backward(const ModSirenParams& p, const Vector& z, const Matrix& coords,
                               const Vector& upstream) {
  ModSirenTrace t;
  modsiren_forward(p, z, coords, &t);
  return modsiren_backward(p, t, upstream);
}

Matrix modsiren_grid(const ModSirenParams& p, const Vector& z, int n) {
  const Vector v = modsiren_forward(p, z, grid_coords(n));
  return Eigen::Map<const RowMatrix>(v.data(), n, n);
}

}  // namespace ignr
