#pragma once

// Reference implementations for tests. They share no code with dlab_core:
// plain int64/__int128 arithmetic, or GMP/MPFR called directly.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <vector>

namespace oracle {

struct Frac {
  int64_t num = 0;
  int64_t den = 1;
};

using Matrix = std::vector<std::vector<Frac>>;  // m rows, n columns

struct Record {
  std::vector<int64_t> b_hat;
  std::vector<int64_t> b_tilde;
  int64_t height = 0;
  // quality = q_num / q_den, not reduced
  int64_t q_num = 0;
  int64_t q_den = 1;
};

// Best approximations of a rational matrix under max norms by scanning the
// whole cube [-cap, cap]^n. Ties: last nonzero entry of b_hat positive, then
// lexicographically smallest (b_hat, b_tilde); b_tilde rounds halves down.
std::vector<Record> brute_force_records(const Matrix& omega, int64_t cap);

// ψ(t) from oracle records as an exact fraction; nullopt below the first record.
std::optional<mpq_class> psi_at(const std::vector<Record>& records, int64_t t);

// Random rational in [-1, 1] with denominator <= max_den, from a local LCG.
class Lcg {
 public:
  explicit Lcg(uint64_t seed) : state_(seed * 6364136223846793005ULL + 1442695040888963407ULL) {}
  uint64_t next();
  int64_t uniform(int64_t lo, int64_t hi);  // inclusive
  Frac fraction(int64_t max_den);

 private:
  uint64_t state_;
};

Matrix random_matrix(Lcg& rng, size_t m, size_t n, int64_t max_den);

// Continued fraction of (a + b√d) with rational a, b and non-square d > 0.
struct Convergent {
  mpz_class p;
  mpz_class q;
};
std::vector<Convergent> quadratic_convergents(const mpq_class& a, const mpq_class& b, const mpz_class& d,
                                              const mpz_class& max_q);

// |q·x - p| for x = a + b√d, evaluated with MPFR at `prec` bits, as a double.
double quadratic_distance(const mpq_class& a, const mpq_class& b, const mpz_class& d, const mpz_class& q,
                          const mpz_class& p, long prec = 256);

// Elementary divisors of a 2x3 integer matrix via gcd of entries and of 2x2 minors.
std::vector<mpz_class> elementary_divisors_2x3(const std::vector<mpz_class>& r1, const std::vector<mpz_class>& r2);

// log(2^a 3^b 5^c 7^d) with MPFR, rounded to nearest double.
double log_prime_power(long a2, long a3, long a5, long a7);

// (n-3)/(8(n-2)^{3/2}) · √π · Γ(n-1/2)/Γ(n) with MPFR's gamma, as a double.
double cn_gamma(long n);

}  // namespace oracle
