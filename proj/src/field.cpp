#include "qsep/field.hpp"

#include <limits>

namespace qsep {

namespace {

uint64_t pow_mod_u64(uint64_t base, uint64_t exp, uint64_t mod) {
  // mod < 2^32 here, so 128-bit intermediates are not needed.
  uint64_t r = 1;
  base %= mod;
  while (exp) {
    if (exp & 1) r = (r * base) % mod;
    base = (base * base) % mod;
    exp >>= 1;
  }
  return r;
}

bool miller_rabin(uint32_t n, uint32_t a) {
  uint32_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  uint64_t x = pow_mod_u64(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = (x * x) % n;
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace

bool is_prime(uint32_t n) {
  if (n < 2) return false;
  for (uint32_t q : {2u, 3u, 5u, 7u, 11u}) {
    if (n == q) return true;
    if (n % q == 0) return false;
  }
  // Bases {2,3,5,7,11} are a deterministic witness set below
  // 2'152'302'898'747, which covers every 32-bit input.
  for (uint32_t a : {2u, 3u, 5u, 7u, 11u}) {
    if (!miller_rabin(n, a)) return false;
  }
  return true;
}

PrimeField::PrimeField(uint32_t p) : PrimeField(p, 0) {
  if (p < 3 || p >= (1u << 31) || (p & 1) == 0 || !is_prime(p))
    throw ParamError("modulus must be an odd prime below 2^31, got " +
                     std::to_string(p));
}

uint64_t PrimeField::compute_budget(uint32_t p) {
  uint64_t sq = uint64_t(p - 1) * (p - 1);
  if (sq == 0) return std::numeric_limits<uint64_t>::max();
  return std::numeric_limits<uint64_t>::max() / sq;
}

uint32_t PrimeField::inv(uint32_t a) const {
  if (a == 0) throw DivisionByZero("inverse of zero");
  // Extended Euclid on (a, p); p prime so gcd is 1.
  int64_t t = 0, new_t = 1;
  int64_t r = p_, new_r = a;
  while (new_r != 0) {
    int64_t q = r / new_r;
    int64_t tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (t < 0) t += p_;
  return uint32_t(t);
}

uint64_t SeededRng::next_u64() {
  // splitmix64: tiny, full-period, identical everywhere.
  uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t SeededRng::uniform_below(uint64_t bound) {
  if (bound == 0) throw ParamError("uniform_below(0)");
  uint64_t limit = std::numeric_limits<uint64_t>::max() -
                   (std::numeric_limits<uint64_t>::max() % bound + 1) % bound;
  for (;;) {
    uint64_t x = next_u64();
    if (x <= limit) return x % bound;
  }
}

uint32_t SeededRng::uniform(const PrimeField& f) {
  return uint32_t(uniform_below(f.p()));
}

uint32_t SeededRng::uniform_nonzero(const PrimeField& f) {
  return uint32_t(uniform_below(f.p() - 1)) + 1;
}

}  // namespace qsep
