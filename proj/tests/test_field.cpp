#include <cmath>
#include <vector>

#include "doctest.h"
#include "qsep/field.hpp"

using namespace qsep;

TEST_CASE("field arithmetic examples at p = 131071") {
  PrimeField f(131071);
  CHECK(f.add(3, 2) == 5);
  CHECK(f.inv(2) == 65536);
  CHECK(f.mul(2, 65536) == 1);
  CHECK(f.mul(65535, 2) == 131070);
  CHECK(f.neg(1) == 131070);
  CHECK(f.sub(0, 1) == 131070);
  CHECK_THROWS_AS(f.inv(0), DivisionByZero);
}

TEST_CASE("field rejects bad moduli") {
  CHECK_THROWS_AS(PrimeField(0), ParamError);
  CHECK_THROWS_AS(PrimeField(1), ParamError);
  CHECK_THROWS_AS(PrimeField(2), ParamError);
  CHECK_THROWS_AS(PrimeField(9), ParamError);
  CHECK_THROWS_AS(PrimeField(1u << 31), ParamError);
  CHECK_NOTHROW(PrimeField(3));
  CHECK_NOTHROW(PrimeField(2147483647));  // 2^31 - 1, Mersenne
}

TEST_CASE("ring axioms on random triples") {
  for (uint32_t p : {131071u, 97u, 2147483647u}) {
    PrimeField f(p);
    SeededRng rng(42);
    for (int it = 0; it < 10000; ++it) {
      uint32_t a = rng.uniform(f), b = rng.uniform(f), c = rng.uniform(f);
      CHECK(f.add(a, b) == f.add(b, a));
      CHECK(f.mul(a, b) == f.mul(b, a));
      CHECK(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)));
      CHECK(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
      CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
      CHECK(f.add(a, f.neg(a)) == 0);
      CHECK(f.sub(a, b) == f.add(a, f.neg(b)));
      if (a != 0) CHECK(f.mul(a, f.inv(a)) == 1);
      CHECK(f.add(a, b) < p);
      CHECK(f.mul(a, b) < p);
    }
  }
}

TEST_CASE("rng determinism and splitting") {
  PrimeField f(131071);
  SeededRng a(12345), b(12345);
  for (int i = 0; i < 1000; ++i) CHECK(a.uniform(f) == b.uniform(f));
  SeededRng c = a.split(7);
  CHECK(c.seed() == (12345ull ^ 7ull));
}

TEST_CASE("rng uniformity: chi-squared on 1e6 draws not rejected") {
  PrimeField f(131071);
  SeededRng rng(2024);
  const int draws = 1000000;
  std::vector<uint32_t> counts(f.p(), 0);
  for (int i = 0; i < draws; ++i) ++counts[rng.uniform(f)];
  double expected = double(draws) / f.p();
  double chi2 = 0;
  for (uint32_t c : counts) {
    double d = double(c) - expected;
    chi2 += d * d / expected;
  }
  // k - 1 degrees of freedom; normal approximation of the chi-squared tail
  // at alpha = 0.001 (one-sided z = 3.09).
  double dof = double(f.p() - 1);
  double cutoff = dof + 3.09 * std::sqrt(2.0 * dof);
  CHECK(chi2 < cutoff);
}

TEST_CASE("primality checker on known values") {
  CHECK(is_prime(2));
  CHECK(is_prime(3));
  CHECK(is_prime(131071));
  CHECK(is_prime(2147483647));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(131073));
  // Strong pseudoprimes to small base sets must still be rejected.
  CHECK_FALSE(is_prime(3215031751u));
  CHECK_FALSE(is_prime(25326001u));
}
