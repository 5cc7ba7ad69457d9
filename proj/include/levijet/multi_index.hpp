#ifndef LEVIJET_MULTI_INDEX_HPP
#define LEVIJET_MULTI_INDEX_HPP

#include <cstdint>
#include <numeric>
#include <vector>

namespace levijet {

/// Dense exponent vector of a monomial; the number of variables stays small
/// (at most about a dozen), so dense storage wins over any packed encoding.
using Mono = std::vector<std::int32_t>;

inline int total_degree(const Mono& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

/// Graded lexicographic order: total degree first, then lexicographic on the
/// exponent vector. Degree-major ordering makes per-degree ranges contiguous
/// in any sorted container, which truncation and norms rely on.
struct GradedLex {
  bool operator()(const Mono& a, const Mono& b) const {
    const int da = total_degree(a);
    const int db = total_degree(b);
    if (da != db) return da < db;
    return a < b;
  }
};

inline Mono mono_unit(int n_vars) { return Mono(n_vars, 0); }

inline Mono mono_variable(int n_vars, int i) {
  Mono e(n_vars, 0);
  e[i] = 1;
  return e;
}

inline Mono mono_mul(const Mono& a, const Mono& b) {
  Mono r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

/// All monomials in n_vars variables of exact total degree, in lexicographic
/// order (deterministic basis enumeration).
std::vector<Mono> monomials_of_degree(int n_vars, int degree);

/// Strictly increasing index tuples (combinations) of size q from {0..m-1},
/// in lexicographic order. Used as the alternating-form index basis.
std::vector<std::vector<int>> combinations(int m, int q);

/// Rank of a sorted combination within combinations(m, q) order.
int combination_rank(int m, const std::vector<int>& tuple);

/// Inserts value into the sorted tuple; returns the sign of the permutation
/// that sorts (value, tuple...) and the sorted result, or sign 0 when value
/// already occurs.
struct InsertResult {
  int sign = 0;
  std::vector<int> tuple;
};
InsertResult insert_sorted(int value, const std::vector<int>& tuple);

}  // namespace levijet

#endif
