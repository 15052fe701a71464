#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ignr/types.hpp"

namespace ignr {

// Named, mutable view of one parameter tensor. Matrices are viewed in Eigen's
// storage order; checkpoints convert to row-major themselves.
struct ParamRef {
  std::string name;
  Matrix* matrix = nullptr;
  Vector* vector = nullptr;

  double* data() const { return matrix ? matrix->data() : vector->data(); }
  Eigen::Index size() const { return matrix ? matrix->size() : vector->size(); }
  std::vector<Eigen::Index> shape() const;
};

using ParamList = std::vector<ParamRef>;

/// y = W x + b applied column-wise.
struct DenseLayer {
  Matrix w;
  Vector b;

  static DenseLayer zeros(Eigen::Index in, Eigen::Index out);
  Eigen::Index in() const { return w.cols(); }
  Eigen::Index out() const { return w.rows(); }
  void append_refs(ParamList& refs, const std::string& prefix);
  void set_zero();
};

Eigen::Index total_size(const ParamList& refs);
std::vector<double> flatten(const ParamList& refs);
void unflatten(const ParamList& refs, const std::vector<double>& flat);

// Reproducible uniform draws: 53 random bits from mt19937_64, independent of
// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

void fill_uniform(Matrix& m, double bound, Rng& rng);
void fill_uniform(Vector& v, double bound, Rng& rng);

}  // namespace ignr
