#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace krawpoly {

/// Records which rotation entries fall below the genericity threshold.
/// Several evaluation routes divide by specific entries of R; when one of
/// those entries vanishes the route is undefined and the caller must fall
/// back to the oracle.
struct GenericityReport {
  double threshold = 1e-10;
  // flagged (row, col) pairs, 1-based
  std::vector<std::pair<int, int>> vanishing;

  bool any() const { return !vanishing.empty(); }

  std::string describe() const {
    if (vanishing.empty()) return "generic";
    std::string s = "vanishing entries:";
    for (auto [r, c] : vanishing)
      s += " R" + std::to_string(r) + std::to_string(c);
    return s;
  }
};

class GenericityError : public std::runtime_error {
 public:
  explicit GenericityError(GenericityReport rep)
      : std::runtime_error("non-generic rotation: " + rep.describe()),
        rep_(std::move(rep)) {}
  const GenericityReport& report() const { return rep_; }

 private:
  GenericityReport rep_;
};

/// Thrown by the real logarithm when the rotation has an eigenvalue at -1
/// (rotation by pi in some invariant plane). The caller must supply a
/// generator directly or factor the rotation into plane rotations.
class NonPrincipalRotation : public std::runtime_error {
 public:
  NonPrincipalRotation()
      : std::runtime_error(
            "non-principal rotation: eigenvalue -1, real log undefined") {}
};

/// Thrown by the p-parametrization conversions when a denominator vanishes,
/// e.g. p2 for rotations with R12 = 0 (the Tratnik degeneracy).
class SingularParametrization : public std::runtime_error {
 public:
  explicit SingularParametrization(std::string denominator)
      : std::runtime_error("singular parametrization: " + denominator),
        denominator_(std::move(denominator)) {}
  const std::string& denominator() const { return denominator_; }

 private:
  std::string denominator_;
};

}  // namespace krawpoly
