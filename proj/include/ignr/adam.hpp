#pragma once

#include <vector>

#include "ignr/tensor.hpp"

namespace ignr {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Holds one moment pair per parameter tensor;
// step() must be given gradients in the same order and shapes as the
// parameters passed to the constructor.
class Adam {
 public:
  Adam(ParamList params, AdamOptions opts = {});

  void step(const ParamList& grads);
  long steps() const { return steps_; }
  const AdamOptions& options() const { return opts_; }

 private:
  ParamList params_;
  AdamOptions opts_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  long steps_ = 0;
};

}  // namespace ignr
