#pragma once

#include <cstdint>
#include <vector>

#include "ignr/tensor.hpp"

namespace ignr {

// Baseline decoder: ReLU MLP from the latent code to the K(K-1)/2 strictly
// upper-triangular cells of a K x K grid (sigmoid outputs). The grid is the
// mirrored triangle with a zero diagonal.
struct DiscreteDecoderParams {
  std::vector<DenseLayer> hidden;
  DenseLayer out;
  int resolution = 0;

  static DiscreteDecoderParams zeros(int latent_dim, const std::vector<int>& widths, int resolution);
  int latent_dim() const { return static_cast<int>(hidden.empty() ? out.in() : hidden.front().in()); }
  std::vector<int> widths() const;
  ParamList refs(const std::string& prefix = "decoder");
  long weight_count() const;
  void set_zero();
};

DiscreteDecoderParams discrete_init(int latent_dim, const std::vector<int>& widths, int resolution,
                                    std::uint64_t seed);

struct DiscreteTrace {
  Vector z;
  std::vector<Vector> pre;  // hidden pre-activations
  Vector out;               // K(K-1)/2 cell values
};

Matrix discrete_decode(const DiscreteDecoderParams& p, const Vector& z, DiscreteTrace* trace = nullptr);

struct DiscreteGrad {
  DiscreteDecoderParams params;
  Vector dz;
};

/// upstream is dL/dgrid (K x K).
DiscreteGrad discrete_backward(const DiscreteDecoderParams& p, const DiscreteTrace& trace,
                               const Matrix& upstream);

}  // namespace ignr
