#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "krawpoly/math_util.hpp"

namespace krawpoly {

/// Occupation multi-index of the level-N eigenspace of the (d+1)-mode
/// oscillator. Only the first d occupations are stored; mode d+1 carries
/// N - sum(n) implicitly.
struct LevelIndex {
  int d = 0;
  int N = 0;
  std::vector<int> n;  // size d, each >= 0, sum <= N

  int sum() const {
    int s = 0;
    for (int v : n) s += v;
    return s;
  }
  /// occupation of the implicit last mode
  int last() const { return N - sum(); }

  /// full occupation vector of length d+1
  std::vector<int> occupations() const {
    std::vector<int> occ = n;
    occ.push_back(last());
    return occ;
  }

  bool valid() const {
    if (static_cast<int>(n.size()) != d) return false;
    int s = 0;
    for (int v : n) {
      if (v < 0) return false;
      s += v;
    }
    return s <= N;
  }

  friend bool operator==(const LevelIndex& a, const LevelIndex& b) {
    return a.d == b.d && a.N == b.N && a.n == b.n;
  }
};

/// Ordered enumeration of the energy-N eigenspace in d+1 modes.
/// Order is graded lexicographic on (n_1, ..., n_d): ascending total
/// occupation of the first d modes, lexicographic within a grade.
class LevelBasis {
 public:
  LevelBasis(int d, int N) : d_(d), N_(N) {
    if (d < 1) throw std::invalid_argument("LevelBasis: d must be >= 1");
    if (N < 0) throw std::invalid_argument("LevelBasis: N must be >= 0");
    std::vector<int> cur(d, 0);
    for (int grade = 0; grade <= N; ++grade) emit(cur, 0, grade);
    for (int r = 0; r < static_cast<int>(states_.size()); ++r)
      rank_[states_[r].n] = r;
  }

  static long long dimension(int d, int N) {
    if (d < 1) throw std::invalid_argument("dimension: d must be >= 1");
    if (N < 0) throw std::invalid_argument("dimension: N must be >= 0");
    return static_cast<long long>(binomial(N + d, d));
  }

  int d() const { return d_; }
  int N() const { return N_; }
  int size() const { return static_cast<int>(states_.size()); }

  const LevelIndex& at(int rank) const {
    if (rank < 0 || rank >= size())
      throw std::invalid_argument("LevelBasis: rank out of range");
    return states_[rank];
  }

  int rank(const LevelIndex& idx) const {
    if (idx.d != d_ || idx.N != N_ || !idx.valid())
      throw std::invalid_argument("LevelBasis: index not in this basis");
    return rank_.at(idx.n);
  }

  int rank(const std::vector<int>& n) const {
    auto it = rank_.find(n);
    if (it == rank_.end())
      throw std::invalid_argument("LevelBasis: index not in this basis");
    return it->second;
  }

  auto begin() const { return states_.begin(); }
  auto end() const { return states_.end(); }

 private:
  // lexicographic fill of all n with the given remaining grade
  void emit(std::vector<int>& cur, int pos, int remaining) {
    if (pos == d_ - 1) {
      cur[pos] = remaining;
      states_.push_back(LevelIndex{d_, N_, cur});
      cur[pos] = 0;
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      cur[pos] = v;
      emit(cur, pos + 1, remaining - v);
    }
    cur[pos] = 0;
  }

  int d_;
  int N_;
  std::vector<LevelIndex> states_;
  std::map<std::vector<int>, int> rank_;
};

inline long long dimension(int d, int N) { return LevelBasis::dimension(d, N); }

}  // namespace krawpoly
