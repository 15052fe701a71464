#include "ignr/tensor.hpp"

#include "ignr/error.hpp"

namespace ignr {

std::vector<Eigen::Index> ParamRef::shape() const {
  if (matrix) return {matrix->rows(), matrix->cols()};
  return {vector->size()};
}

DenseLayer DenseLayer::zeros(Eigen::Index in, Eigen::Index out) {
  return DenseLayer{Matrix::Zero(out, in), Vector::Zero(out)};
}

void DenseLayer::append_refs(ParamList& refs, const std::string& prefix) {
  refs.push_back(ParamRef{prefix + ".W", &w, nullptr});
  refs.push_back(ParamRef{prefix + ".b", nullptr, &b});
}

void DenseLayer::set_zero() {
  w.setZero();
  b.setZero();
}

Eigen::Index total_size(const ParamList& refs) {
  Eigen::Index n = 0;
  for (const auto& r : refs) n += r.size();
  return n;
}

std::vector<double> flatten(const ParamList& refs) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(total_size(refs)));
  for (const auto& r : refs) flat.insert(flat.end(), r.data(), r.data() + r.size());
  return flat;
}

void unflatten(const ParamList& refs, const std::vector<double>& flat) {
  if (static_cast<Eigen::Index>(flat.size()) != total_size(refs)) {
    throw InputDomainError("flat parameter vector has the wrong length");
  }
  std::size_t k = 0;
  for (const auto& r : refs) {
    std::copy(flat.begin() + k, flat.begin() + k + r.size(), r.data());
    k += r.size();
  }
}

void fill_uniform(Matrix& m, double bound, Rng& rng) {
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = rng.uniform(-bound, bound);
}

void fill_uniform(Vector& v, double bound, Rng& rng) {
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = rng.uniform(-bound, bound);
}

}  // namespace ignr
