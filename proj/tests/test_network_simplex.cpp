#include <doctest.h>

#include <random>

#include "ignr/error.hpp"
#include "ignr/network_simplex.hpp"
#include "oracles.hpp"

using namespace ignr;

namespace {

Vector random_hist(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  Vector h(n);
  for (int i = 0; i < n; ++i) h[i] = unif(rng);
  return h / h.sum();
}

Matrix random_cost(int n1, int n2, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 2.0);
  Matrix c(n1, n2);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) c(i, j) = unif(rng);
  }
  return c;
}

}  // namespace

TEST_CASE("emd matches basis enumeration on small random problems") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int n1 = 1 + trial % 3;
    const int n2 = 1 + (trial / 3) % 4;
    const Vector a = random_hist(n1, rng);
    const Vector b = random_hist(n2, rng);
    const Matrix c = random_cost(n1, n2, rng);
    const EmdResult r = emd(a, b, c);
    CHECK(r.cost == doctest::Approx(oracle::emd_by_enumeration(a, b, c)).epsilon(1e-10));
    CHECK((r.plan.rowwise().sum() - a).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((r.plan.colwise().sum().transpose() - b).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.plan.minCoeff() >= 0.0);
  }
}

TEST_CASE("emd with uniform square marginals solves the assignment problem") {
  std::mt19937_64 rng(5);
  const int n = 6;
  const Vector h = Vector::Constant(n, 1.0 / n);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix c = random_cost(n, n, rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += c(i, perm[i]) / n;
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(emd(h, h, c).cost == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("emd handles larger degenerate problems") {
  std::mt19937_64 rng(9);
  const int n1 = 120;
  const int n2 = 75;
  const Vector a = Vector::Constant(n1, 1.0 / n1);
  const Vector b = Vector::Constant(n2, 1.0 / n2);
  // Integer-valued costs create many ties.
  Matrix c(n1, n2);
  std::uniform_int_distribution<int> d(0, 3);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) c(i, j) = d(rng);
  }
  const EmdResult r = emd(a, b, c);
  CHECK((r.plan.rowwise().sum() - a).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r.plan.colwise().sum().transpose() - b).cwiseAbs().maxCoeff() < 1e-12);
  // No plan can beat the per-row minimum bound, and the zero-cost cells
  // here are dense enough that the optimum is 0.
  CHECK(r.cost == doctest::Approx(0.0).epsilon(1e-12));

  // Random feasible plans never do better.
  const Matrix dense = random_cost(n1, n2, rng);
  const EmdResult opt = emd(a, b, dense);
  for (int k = 0; k < 5; ++k) {
    const Matrix t = oracle::random_coupling(a, b, rng);
    CHECK(opt.cost <= (t.array() * dense.array()).sum() + 1e-12);
  }
}

TEST_CASE("emd rejects malformed input") {
  const Vector a = Vector::Constant(2, 0.5);
  const Vector b = Vector::Constant(3, 1.0 / 3.0);
  CHECK_THROWS_AS(emd(a, b, Matrix::Zero(3, 2)), InputDomainError);
  Vector zero = a;
  zero[0] = 0.0;
  zero[1] = 1.0;
  CHECK_THROWS_AS(emd(zero, b, Matrix::Zero(2, 3)), InputDomainError);
  CHECK_THROWS_AS(emd(a, Vector::Constant(3, 0.5), Matrix::Zero(2, 3)), InputDomainError);
}
