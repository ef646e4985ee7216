#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "krawpoly/krawtchouk_bi.hpp"
#include "krawpoly/krawtchouk_uni.hpp"
#include "krawpoly/math_util.hpp"
#include "krawpoly/rotations.hpp"

namespace krawpoly {

/// Gauss-Hermite rule for the weight e^{-x^2}, exact on polynomials of
/// degree <= 2 * order - 1. Nodes are eigenvalues of the Jacobi matrix
/// with off-diagonal sqrt(k/2); weights come from the first eigenvector
/// components.
struct GaussHermiteRule {
  int order;
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline const GaussHermiteRule& gauss_hermite(int order) {
  if (order < 1 || order > 32)
    throw std::invalid_argument("gauss_hermite: order must be in 1..32");
  static std::map<int, GaussHermiteRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double off = std::sqrt(k / 2.0);
    J(k, k - 1) = off;
    J(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(J);
  GaussHermiteRule rule;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  for (int k = 0; k < order; ++k) {
    rule.nodes[k] = solver.eigenvalues()(k);
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights[k] = sqrt_pi * v0 * v0;
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

/// Residual of the three-mode Hermite expansion at one point x: the
/// rotated product sqrt(1/(N! m! n! (N-m-n)!)) H_m(x~1) H_n(x~2)
/// H_{N-m-n}(x~3) with x~ = R^T x, against the weighted Hermite sum over
/// i + k <= N with coefficients from the P table.
inline double hermite_expansion_residual(const KrawtchoukFamily& fam, int m,
                                         int n,
                                         const std::array<double, 3>& x) {
  const auto& R = fam.rotation();
  const int N = fam.level();
  if (m < 0 || n < 0 || m + n > N)
    throw std::invalid_argument("hermite_expansion_residual: bad degrees");
  std::array<double, 3> xt{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) xt[a] += R(b + 1, a + 1) * x[b];
  const double lhs =
      std::exp(-0.5 * (log_factorial(N) + log_factorial(m) +
                       log_factorial(n) + log_factorial(N - m - n))) *
      hermite(m, xt[0]) * hermite(n, xt[1]) * hermite(N - m - n, xt[2]);
  double rhs = 0.0;
  for (const auto& var : fam.basis()) {
    const int i = var.n[0], k = var.n[1];
    rhs += ipow(R(1, 3), i) * ipow(R(2, 3), k) * ipow(R(3, 3), N - i - k) /
           (factorial(i) * factorial(k) * factorial(N - i - k)) *
           fam.P(m, n, i, k) * hermite(i, x[0]) * hermite(k, x[1]) *
           hermite(N - i - k, x[2]);
  }
  return lhs - rhs;
}

struct IntegralResult {
  double value;
  bool order_sufficient;  // order >= N + 1 per axis makes the rule exact
};

/// P_{m,n}(i,k;N) from the triple Hermite integral, evaluated by
/// tensor-product Gauss-Hermite quadrature of the given order per axis.
inline IntegralResult P_via_integral(const RotationMatrix& R, int N, int m,
                                     int n, int i, int k, int order) {
  require_generic(R, {{1, 3}, {2, 3}, {3, 3}});
  if (m < 0 || n < 0 || m + n > N || i < 0 || k < 0 || i + k > N)
    throw std::invalid_argument("P_via_integral: index out of range");
  const GaussHermiteRule& rule = gauss_hermite(order);
  double integral = 0.0;
  for (int a = 0; a < rule.order; ++a)
    for (int b = 0; b < rule.order; ++b)
      for (int c = 0; c < rule.order; ++c) {
        const std::array<double, 3> x{rule.nodes[a], rule.nodes[b],
                                      rule.nodes[c]};
        std::array<double, 3> xt{};
        for (int r = 0; r < 3; ++r)
          for (int s = 0; s < 3; ++s) xt[r] += R(s + 1, r + 1) * x[s];
        integral += rule.weights[a] * rule.weights[b] * rule.weights[c] *
                    hermite(m, xt[0]) * hermite(n, xt[1]) *
                    hermite(N - m - n, xt[2]) * hermite(i, x[0]) *
                    hermite(k, x[1]) * hermite(N - i - k, x[2]);
      }
  const double prefactor =
      ipow(R(1, 3), -i) * ipow(R(2, 3), -k) * ipow(R(3, 3), i + k - N) /
      (std::pow(2.0, N) * std::pow(std::numbers::pi, 1.5)) *
      std::exp(-0.5 * (log_factorial(N) + log_factorial(m) +
                       log_factorial(n) + log_factorial(N - m - n)));
  return {prefactor * integral, order >= N + 1};
}

}  // namespace krawpoly
