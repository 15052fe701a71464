#pragma once

#include <cstdint>
#include <vector>

#include "ignr/siren.hpp"

namespace ignr {

// Latent-conditioned sine network. A ReLU modulation net maps z to gates
//   a_1 = ReLU(W'_1 z + b'_1),  a_i = ReLU(W'_i [a_{i-1}; z] + b'_i)
// that scale the synthesis activations element-wise:
//   h_i = a_i .* sin(W_i h_{i-1} + b_i)   (omega0 on the first layer)
struct ModSirenParams {
  SirenParams synthesis;
  std::vector<DenseLayer> modulation;
  int latent_dim = 0;

  static ModSirenParams zeros(const std::vector<int>& widths, int latent_dim, double omega0 = 30.0);
  ParamList refs(const std::string& prefix = "modsiren");
  long weight_count() const;
  void set_zero();
};

inline const std::vector<int> kDefaultModSirenWidths{48, 36, 24};

/// Synthesis as siren_init; modulation He-uniform weights with biases 1 so
/// every gate starts open.
ModSirenParams modsiren_init(const std::vector<int>& widths, int latent_dim, std::uint64_t seed,
                             double omega0 = 30.0);

struct ModSirenTrace {
  Vector z;
  std::vector<Vector> gate_pre;  // modulation pre-activations
  std::vector<Vector> gate;      // a_i
  Matrix coords;
  std::vector<Matrix> s;         // sin(pre_i)
  std::vector<Matrix> c;         // cos(pre_i)
  std::vector<Matrix> h;         // a_i .* s_i
  Vector out;
};

Vector modsiren_forward(const ModSirenParams& p, const Vector& z, const Matrix& coords,
                        ModSirenTrace* trace = nullptr);

struct ModSirenGrad {
  ModSirenParams params;
  Vector dz;
};

ModSirenGrad modsiren_backward(const ModSirenParams& p, const ModSirenTrace& trace, const Vector& upstream);
ModSirenGrad modsiren_backward(const ModSirenParams& p, const Vector& z, const Matrix& coords,
                               const Vector& upstream);

Matrix modsiren_grid(const ModSirenParams& p, const Vector& z, int n);

}  // namespace ignr
