#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "dlab/bestapprox.hpp"

namespace dlab::detail {

using i128 = __int128;

inline constexpr size_t kMaxDim = 8;

// Fixed-point image of Ω: |Ω_ij·D − P_ij| <= err (err = 0 for exact rationals).
struct KernelSetup {
  size_t m = 0;
  size_t n = 0;
  bool exact = false;
  i128 D = 1;
  i128 err = 0;
  std::vector<i128> P;  // row-major m×n, reduced mod D into [0, D)
};

// Only for Max/Max problems with m, n <= kMaxDim; radius bounds max |b̂_j|.
std::optional<KernelSetup> make_setup(const ApproxProblem& problem, int64_t radius);

struct Contender {
  std::array<int64_t, kMaxDim> b{};
  i128 q = 0;  // max_i dist(row_i, Z) in units of 1/D, approximate
  i128 e = 0;  // |true·D − q| <= e
};

// Canonical b̂ (last nonzero entry positive) with max |b̂_j| = h. Without a
// threshold keeps every point whose lower bound reaches the shell minimum;
// with one keeps points whose lower bound is <= threshold.
std::vector<Contender> scan_shell(const KernelSetup& setup, int64_t h, std::optional<i128> threshold);

// Number of canonical points in shells 1..h.
long double canonical_points(size_t n, long double h);

Rational to_rational(i128 v);

}  // namespace dlab::detail
