#include "dlab/lattice.hpp"

#include <stdexcept>
#include <utility>

namespace dlab {

size_t integer_rank(const IntMatrix& rows) {
  if (rows.empty()) return 0;
  size_t cols = rows.front().size();
  std::vector<std::vector<Rational>> a;
  for (const auto& r : rows) {
    if (r.size() != cols) throw std::invalid_argument("ragged integer matrix");
    std::vector<Rational> row;
    for (const auto& x : r) row.emplace_back(x);
    a.push_back(std::move(row));
  }
  size_t rank = 0;
  for (size_t c = 0; c < cols && rank < a.size(); ++c) {
    size_t p = rank;
    while (p < a.size() && a[p][c] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[rank]);
    for (size_t i = rank + 1; i < a.size(); ++i) {
      if (a[i][c] == 0) continue;
      Rational f = a[i][c] / a[rank][c];
      for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[rank][j];
    }
    ++rank;
  }
  return rank;
}

namespace {

// Index of the nonzero entry of smallest modulus in the trailing block.
bool find_pivot(const IntMatrix& a, size_t t, size_t& pi, size_t& pj) {
  bool found = false;
  Integer best;
  for (size_t i = t; i < a.size(); ++i) {
    for (size_t j = t; j < a[i].size(); ++j) {
      if (a[i][j] == 0) continue;
      Integer m = abs(a[i][j]);
      if (!found || m < best) {
        best = m;
        pi = i;
        pj = j;
        found = true;
      }
    }
  }
  return found;
}

}  // namespace

std::vector<Integer> elementary_divisors(IntMatrix a) {
  size_t rows = a.size();
  size_t cols = rows ? a.front().size() : 0;
  for (const auto& r : a) {
    if (r.size() != cols) throw std::invalid_argument("ragged integer matrix");
  }
  std::vector<Integer> diag;
  for (size_t t = 0; t < std::min(rows, cols); ++t) {
    size_t pi = 0, pj = 0;
    if (!find_pivot(a, t, pi, pj)) break;
    for (;;) {
      std::swap(a[t], a[pi]);
      for (auto& r : a) std::swap(r[t], r[pj]);
      bool clean = true;
      for (size_t i = t + 1; i < rows; ++i) {
        if (a[i][t] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), a[i][t].get_mpz_t(), a[t][t].get_mpz_t());
        for (size_t j = t; j < cols; ++j) a[i][j] -= q * a[t][j];
        if (a[i][t] != 0) clean = false;
      }
      for (size_t j = t + 1; j < cols; ++j) {
        if (a[t][j] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), a[t][j].get_mpz_t(), a[t][t].get_mpz_t());
        for (size_t i = t; i < rows; ++i) a[i][j] -= q * a[i][t];
        if (a[t][j] != 0) clean = false;
      }
      if (clean) {
        // The pivot must divide the whole trailing block.
        bool divides = true;
        for (size_t i = t + 1; i < rows && divides; ++i) {
          for (size_t j = t + 1; j < cols; ++j) {
            if (!mpz_divisible_p(a[i][j].get_mpz_t(), a[t][t].get_mpz_t())) {
              for (size_t k = t; k < cols; ++k) a[t][k] += a[i][k];
              divides = false;
              break;
            }
          }
        }
        if (divides) break;
      }
      find_pivot(a, t, pi, pj);
    }
    diag.push_back(abs(a[t][t]));
  }
  return diag;
}

void normalize_sign_last_positive(IntVector& v) {
  for (auto it = v.rbegin(); it != v.rend(); ++it) {
    if (*it == 0) continue;
    if (*it < 0) {
      for (auto& x : v) x = -x;
    }
    return;
  }
}

}  // namespace dlab
