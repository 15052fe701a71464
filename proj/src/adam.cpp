#include "ignr/adam.hpp"

#include <cmath>

#include "ignr/error.hpp"

namespace ignr {

Adam::Adam(ParamList params, AdamOptions opts) : params_(std::move(params)), opts_(opts) {
  if (!(opts_.lr >= 0.0)) throw InputDomainError("learning rate must be nonnegative");
  for (const auto& p : params_) {
    m_.emplace_back(static_cast<std::size_t>(p.size()), 0.0);
    v_.emplace_back(static_cast<std::size_t>(p.size()), 0.0);
  }
}

void Adam::step(const ParamList& grads) {
  if (grads.size() != params_.size()) throw InputDomainError("gradient list does not match parameters");
  for (std::size_t t = 0; t < grads.size(); ++t) {
    if (grads[t].size() != params_[t].size()) {
      throw InputDomainError("gradient shape mismatch for " + params_[t].name);
    }
  }
  ++steps_;
  const double c1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(steps_));
  for (std::size_t t = 0; t < grads.size(); ++t) {
    double* p = params_[t].data();
    const double* g = grads[t].data();
    auto& m = m_[t];
    auto& v = v_[t];
    for (std::size_t k = 0; k < m.size(); ++k) {
      m[k] = opts_.beta1 * m[k] + (1.0 - opts_.beta1) * g[k];
      v[k] = opts_.beta2 * v[k] + (1.0 - opts_.beta2) * g[k] * g[k];
      const double mhat = m[k] / c1;
      const double vhat = v[k] / c2;
      p[k] -= opts_.lr * mhat / (std::sqrt(vhat) + opts_.eps);
    }
  }
}

}  // namespace ignr
