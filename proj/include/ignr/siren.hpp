#pragma once

#include <cstdint>
#include <vector>

#include "ignr/tensor.hpp"

namespace ignr {

// Sine-activated coordinate network W(x, y) -> (0, 1):
//   h_1 = sin(omega0 (W_1 h_0 + b_1)),  h_0 = (x, y)
//   h_i = sin(W_i h_{i-1} + b_i)
//   out = sigmoid(W_{L+1} h_L + b_{L+1})
struct SirenParams {
  std::vector<DenseLayer> layers;
  DenseLayer out;
  double omega0 = 30.0;

  static SirenParams zeros(const std::vector<int>& widths, double omega0 = 30.0);
  std::vector<int> widths() const;
  ParamList refs(const std::string& prefix = "siren");
  /// Weight-matrix entries only (biases excluded).
  long weight_count() const;
  void set_zero();
};

inline const std::vector<int> kDefaultSirenWidths{20, 20, 20};

/// First layer U(-1/2, 1/2) (fan-in 2). Later sine layers carry omega0 in
/// their weights, U(+-sqrt(6/fan_in)), keeping pre-activations near unit
/// variance. Output layer U(+-sqrt(6/fan_in)/omega0). Biases U(+-1/sqrt(fan_in)).
SirenParams siren_init(const std::vector<int>& widths, std::uint64_t seed, double omega0 = 30.0);

struct SirenTrace {
  Matrix coords;             // 2 x P
  std::vector<Matrix> h;     // sin of each hidden pre-activation, l_i x P
  std::vector<Matrix> dh;    // matching cos values
  Vector out;                // P
};

/// coords is 2 x P (one coordinate pair per column).
Vector siren_forward(const SirenParams& p, const Matrix& coords, SirenTrace* trace = nullptr);

/// Gradient of sum_k upstream[k] * out[k] with respect to every tensor.
SirenParams siren_backward(const SirenParams& p, const SirenTrace& trace, const Vector& upstream);
SirenParams siren_backward(const SirenParams& p, const Matrix& coords, const Vector& upstream);

/// The N x N grid {(x_p, x_q)}, x_p = p/N, as 2 x N^2 columns in row-major
/// (p, q) order.
Matrix grid_coords(int n);

/// Evaluate on grid_coords(n) and reshape to N x N.
Matrix siren_grid(const SirenParams& p, int n);

}  // namespace ignr
