#include "levijet/multi_index.hpp"

#include <stdexcept>

namespace levijet {

static void enumerate_monos(int n_vars, int degree, int pos, Mono& cur,
                            std::vector<Mono>& out) {
  if (pos == n_vars - 1) {
    cur[pos] = degree;
    out.push_back(cur);
    return;
  }
  for (int d = degree; d >= 0; --d) {
    cur[pos] = d;
    enumerate_monos(n_vars, degree - d, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

std::vector<Mono> monomials_of_degree(int n_vars, int degree) {
  if (n_vars <= 0) throw std::invalid_argument("monomials_of_degree: n_vars");
  std::vector<Mono> out;
  Mono cur(n_vars, 0);
  enumerate_monos(n_vars, degree, 0, cur, out);
  return out;
}

std::vector<std::vector<int>> combinations(int m, int q) {
  std::vector<std::vector<int>> out;
  if (q < 0 || q > m) return out;
  std::vector<int> idx(q);
  for (int i = 0; i < q; ++i) idx[i] = i;
  if (q == 0) {
    out.push_back({});
    return out;
  }
  while (true) {
    out.push_back(idx);
    int i = q - 1;
    while (i >= 0 && idx[i] == m - q + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < q; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

int combination_rank(int m, const std::vector<int>& tuple) {
  // Lexicographic rank via counting combinations that precede the tuple.
  auto choose = [](int a, int b) -> long {
    if (b < 0 || b > a) return 0;
    long r = 1;
    for (int i = 0; i < b; ++i) r = r * (a - i) / (i + 1);
    return r;
  };
  const int q = static_cast<int>(tuple.size());
  long rank = 0;
  int prev = -1;
  for (int i = 0; i < q; ++i) {
    for (int v = prev + 1; v < tuple[i]; ++v)
      rank += choose(m - 1 - v, q - 1 - i);
    prev = tuple[i];
  }
  return static_cast<int>(rank);
}

InsertResult insert_sorted(int value, const std::vector<int>& tuple) {
  InsertResult res;
  res.tuple.reserve(tuple.size() + 1);
  int sign = 1;
  bool placed = false;
  for (int t : tuple) {
    if (t == value) return InsertResult{};
    if (!placed && t > value) {
      res.tuple.push_back(value);
      placed = true;
    }
    if (!placed) sign = -sign;
    res.tuple.push_back(t);
  }
  if (!placed) res.tuple.push_back(value);
  res.sign = sign;
  return res;
}

}  // namespace levijet
