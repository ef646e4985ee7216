#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "krawpoly/math_util.hpp"

namespace krawpoly {

struct UniKrawtchoukParams {
  double p;
  int J;

  UniKrawtchoukParams(double p_, int J_) : p(p_), J(J_) {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("UniKrawtchoukParams: need 0 < p < 1");
    if (J < 0) throw std::invalid_argument("UniKrawtchoukParams: need J >= 0");
  }
};

/// k_n(x; p; J) = (-J)_n 2F1(-n, -x; -J; 1/p), the sum truncating at k = n.
/// Terms are accumulated with a multiplicative update so no factorial is
/// ever formed.
inline double kraw(int n, double x, const UniKrawtchoukParams& params) {
  if (n < 0) throw std::domain_error("kraw: degree must be >= 0");
  if (n > params.J)
    throw std::domain_error("kraw: degree exceeds J, (-J)_k vanishes");
  double sum = 1.0;
  double term = 1.0;
  for (int k = 0; k < n; ++k) {
    // term_{k+1} / term_k
    term *= (-n + k) * (-x + k) /
            ((k + 1.0) * (-params.J + k) * params.p);
    sum += term;
  }
  return pochhammer(-params.J, n) * sum;
}

/// monic variant q_n(x) = p^n k_n(x; p; J)
inline double monic_kraw(int n, double x, const UniKrawtchoukParams& params) {
  return ipow(params.p, n) * kraw(n, x, params);
}

/// Physicists' Hermite polynomial H_n(x), weight e^{-x^2}
inline double hermite(int n, double x) {
  if (n < 0) throw std::domain_error("hermite: degree must be >= 0");
  double hm1 = 0.0;
  double h = 1.0;
  for (int k = 0; k < n; ++k) {
    const double hp1 = 2.0 * x * h - 2.0 * k * hm1;
    hm1 = h;
    h = hp1;
  }
  return h;
}

namespace detail {

// <bra| U |ket> when R is a signed permutation of the three modes:
// a_j^dag maps to s_j a_{sigma(j)}^dag, so the element is a product of
// signs times a delta on the permuted occupations.
inline double signed_permutation_element(const std::array<std::array<int, 3>, 3>& R,
                                         const std::array<int, 3>& bra,
                                         const std::array<int, 3>& ket) {
  std::array<int, 3> permuted{};
  double sign = 1.0;
  for (int j = 0; j < 3; ++j) {
    int row = -1;
    for (int r = 0; r < 3; ++r)
      if (R[r][j] != 0) row = r;
    permuted[row] = ket[j];
    if (R[row][j] < 0 && ket[j] % 2 == 1) sign = -sign;
  }
  return permuted == bra ? sign : 0.0;
}

// snapped rotation by q * pi/2 in the plane (a, b) (0-based), entries in
// {-1, 0, 1}; sigma is the sign of the sin entry at (a, b)
inline std::array<std::array<int, 3>, 3> quarter_turn(int a, int b, int q,
                                                      int sigma) {
  std::array<std::array<int, 3>, 3> R{};
  for (int j = 0; j < 3; ++j) R[j][j] = 1;
  static constexpr int cosq[4] = {1, 0, -1, 0};
  static constexpr int sinq[4] = {0, 1, 0, -1};
  const int c = cosq[((q % 4) + 4) % 4];
  const int s = sinq[((q % 4) + 4) % 4];
  R[a][a] = c;
  R[b][b] = c;
  R[a][b] = sigma * s;
  R[b][a] = -sigma * s;
  return R;
}

inline bool degenerate_angle(double angle) {
  return std::min(std::abs(std::sin(angle)), std::abs(std::cos(angle))) < 1e-8;
}

}  // namespace detail

/// <i,k| U_(yz)(theta) |m,n> at level N, closed form in a univariate
/// Krawtchouk polynomial with p = sin^2(theta) and J = N - i. Angles at a
/// multiple of pi/2 are dispatched to the exact signed-permutation limit.
inline double plane_matrix_element_yz(double theta, int N, int i, int k, int m,
                                      int n) {
  if (i < 0 || k < 0 || i + k > N || m < 0 || n < 0 || m + n > N)
    throw std::invalid_argument("plane_matrix_element_yz: index out of level");
  if (detail::degenerate_angle(theta)) {
    const int q = static_cast<int>(std::llround(theta / (std::numbers::pi / 2)));
    return detail::signed_permutation_element(
        detail::quarter_turn(1, 2, q, +1), {i, k, N - i - k},
        {m, n, N - m - n});
  }
  if (i != m) return 0.0;
  const int J = N - i;
  // (-1)^n / (i - N)_n combined exactly: equals (J - n)! / J!
  const double radicand =
      std::exp(log_factorial(J - n) - log_factorial(k) - log_factorial(n) -
               log_factorial(J - k));
  const double c = std::cos(theta);
  const double t = std::tan(theta);
  return std::sqrt(radicand) * ipow(c, J) * ipow(t, k + n) *
         kraw(n, k, UniKrawtchoukParams(std::sin(theta) * std::sin(theta), J));
}

/// <i,k| U_(xz)(chi) |m,n> at level N, p = sin^2(chi), J = N - n
inline double plane_matrix_element_xz(double chi, int N, int i, int k, int m,
                                      int n) {
  if (i < 0 || k < 0 || i + k > N || m < 0 || n < 0 || m + n > N)
    throw std::invalid_argument("plane_matrix_element_xz: index out of level");
  if (detail::degenerate_angle(chi)) {
    const int q = static_cast<int>(std::llround(chi / (std::numbers::pi / 2)));
    return detail::signed_permutation_element(
        detail::quarter_turn(0, 2, q, -1), {i, k, N - i - k},
        {m, n, N - m - n});
  }
  if (k != n) return 0.0;
  const int J = N - n;
  const double radicand =
      std::exp(log_factorial(J - m) - log_factorial(i) - log_factorial(m) -
               log_factorial(J - i));
  const double sign = ((i + m) % 2 == 0) ? 1.0 : -1.0;
  const double c = std::cos(chi);
  const double t = std::tan(chi);
  return sign * std::sqrt(radicand) * ipow(c, J) * ipow(t, i + m) *
         kraw(m, i, UniKrawtchoukParams(std::sin(chi) * std::sin(chi), J));
}

}  // namespace krawpoly
