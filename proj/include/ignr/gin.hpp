#pragma once

#include <cstdint>
#include <vector>

#include "ignr/graphon.hpp"
#include "ignr/tensor.hpp"

namespace ignr {

enum class NodeFeature { kDegree, kConstant };

// Graph isomorphism network encoder. Each layer updates node states with
//   x_v' = MLP((1 + eps) x_v + (1/n) sum_{u ~ v} x_u),  MLP = Linear-ReLU-Linear-ReLU
// (the neighbor sum is taken through the step-function operator A/n so codes
// keep the same scale across graph sizes and densities)
// then node states are mean-pooled and mapped linearly to the latent code.
struct GinLayer {
  DenseLayer lin1;
  DenseLayer lin2;
  Vector eps;  // single learnable scalar
};

struct GinParams {
  std::vector<GinLayer> layers;
  DenseLayer readout;
  NodeFeature feature = NodeFeature::kDegree;

  static GinParams zeros(int latent_dim, int width = 32, int depth = 3);
  int latent_dim() const { return static_cast<int>(readout.out()); }
  ParamList refs(const std::string& prefix = "gin");
  void set_zero();
};

/// He-uniform ReLU layers, LeCun-uniform readout, zero biases, eps = 0.
GinParams gin_init(int latent_dim, std::uint64_t seed, int width = 32, int depth = 3);

/// 1 x n input features: degree(v)/n, or all ones.
Matrix node_features(const Graph& g, NodeFeature feature);

struct GinTrace {
  Matrix adj;                // A / n
  std::vector<Matrix> x;     // layer inputs (x[0] = features), width x n
  std::vector<Matrix> agg;   // (1 + eps) x + x adj
  std::vector<Matrix> pre1;
  std::vector<Matrix> pre2;
  Vector pooled;
};

Vector gin_encode(const GinParams& p, const Graph& g, GinTrace* trace = nullptr);
GinParams gin_backward(const GinParams& p, const GinTrace& trace, const Vector& dz);

}  // namespace ignr
