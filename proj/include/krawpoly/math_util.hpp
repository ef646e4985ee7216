#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace krawpoly {

inline double log_factorial(int n) {
  assert(n >= 0);
  return std::lgamma(static_cast<double>(n) + 1.0);
}

inline double factorial(int n) { return std::exp(log_factorial(n)); }

/// binomial(n, k) as a double, exact for the sizes used here
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r *= static_cast<double>(n - k + j) / j;
  return std::round(r);
}

/// N! / (i! k! (N-i-k)!)
inline double trinomial(int N, int i, int k) {
  if (i < 0 || k < 0 || i + k > N) return 0.0;
  return std::exp(log_factorial(N) - log_factorial(i) - log_factorial(k) -
                  log_factorial(N - i - k));
}

/// Pochhammer symbol (a)_k = a(a+1)...(a+k-1), (a)_0 = 1.
/// Negative integer a gives an exact product of small integers.
inline double pochhammer(double a, int k) {
  assert(k >= 0);
  double r = 1.0;
  for (int j = 0; j < k; ++j) r *= a + j;
  return r;
}

/// x^n for integer n allowing negative exponents
inline double ipow(double x, int n) {
  if (n < 0) return 1.0 / ipow(x, -n);
  double r = 1.0;
  double b = x;
  for (int e = n; e > 0; e >>= 1) {
    if (e & 1) r *= b;
    b *= b;
  }
  return r;
}

}  // namespace krawpoly
