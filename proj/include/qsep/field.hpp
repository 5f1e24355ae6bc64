#pragma once

#include <cstdint>

#include "qsep/errors.hpp"

namespace qsep {

/// Deterministic primality check, exact for all 32-bit inputs.
bool is_prime(uint32_t n);

/// Arithmetic in Z/pZ for an odd prime p < 2^31.
///
/// Residues are canonical: every value handed out lies in [0, p), and
/// equality of elements is integer equality.  Products of two reduced
/// residues fit in 64 bits, so all operations are exact.
class PrimeField {
 public:
  explicit PrimeField(uint32_t p);

  uint32_t p() const { return p_; }

  /// Number of (p-1)^2 addends a uint64 accumulator can take before it
  /// must be reduced.  Always >= 4.
  uint64_t acc_budget() const { return budget_; }

  uint32_t add(uint32_t a, uint32_t b) const {
    uint32_t s = a + b;  // a, b < p < 2^31: no overflow
    return s >= p_ ? s - p_ : s;
  }
  uint32_t sub(uint32_t a, uint32_t b) const {
    return a >= b ? a - b : a + p_ - b;
  }
  uint32_t neg(uint32_t a) const { return a == 0 ? 0 : p_ - a; }
  uint32_t mul(uint32_t a, uint32_t b) const {
    // Barrett reduction with mu = floor(2^64 / p): for x < 2^62 the
    // quotient estimate is off by at most one, so a single correction
    // restores the canonical residue.
    uint64_t x = uint64_t(a) * b;
    uint64_t q = uint64_t((unsigned __int128)(x)*barrett_ >> 64);
    uint64_t r = x - q * p_;
    if (r >= p_) r -= p_;
    return uint32_t(r);
  }
  /// Modular inverse by extended Euclid; throws DivisionByZero on 0.
  uint32_t inv(uint32_t a) const;

  uint32_t reduce64(uint64_t x) const { return uint32_t(x % p_); }

  bool operator==(const PrimeField& o) const { return p_ == o.p_; }
  bool operator!=(const PrimeField& o) const { return p_ != o.p_; }

  /// Skips the primality check; for internal defaults and deserialization
  /// paths that validate separately.
  static PrimeField unchecked(uint32_t p) { return PrimeField(p, 0); }

 private:
  PrimeField(uint32_t p, int) : p_(p) {
    budget_ = compute_budget(p);
    barrett_ = p > 1 ? ~uint64_t(0) / p : 0;  // floor(2^64 / p) for p not
                                              // a power of two
  }
  static uint64_t compute_budget(uint32_t p);

  uint32_t p_;
  uint64_t budget_;
  uint64_t barrett_;
};

/// Deterministic stream of uniform field elements.
///
/// The same seed yields the identical stream on every platform.  A stream
/// is single-owner; parallel callers derive independent streams with
/// split(id), which XORs the stream id into the seed.
class SeededRng {
 public:
  explicit SeededRng(uint64_t seed) : seed_(seed), state_(seed) {}

  uint64_t next_u64();

  /// Uniform over all of [0, p).
  uint32_t uniform(const PrimeField& f);
  /// Uniform over [1, p).
  uint32_t uniform_nonzero(const PrimeField& f);
  /// Uniform over [0, bound).
  uint64_t uniform_below(uint64_t bound);

  SeededRng split(uint64_t stream_id) const {
    return SeededRng(seed_ ^ stream_id);
  }
  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  uint64_t state_;
};

/// Default modulus: the Mersenne prime 2^17 - 1.
inline constexpr uint32_t kDefaultPrime = 131071;

}  // namespace qsep
