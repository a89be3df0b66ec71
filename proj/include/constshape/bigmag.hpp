#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace constshape {

// Iterated-exponential float for strictly positive magnitudes far beyond
// double range: value(0, t) = t, value(k, t) = 10^value(k-1, t).
// Normalized so that level > 0 implies the represented value overflows a
// double. Addition at level >= 1 is absorbing in the smaller operand beyond
// representable correction terms, which matches outward-rounded bound
// reporting.
struct LogTower {
  int level = 0;
  double top = 0;

  static LogTower from_double(double v);
  LogTower log10_tower() const;   // log10 of this value
  LogTower exp10_tower() const;   // 10^this
  LogTower add(const LogTower& o) const;
  LogTower mul(const LogTower& o) const;
  LogTower pow(const LogTower& exponent) const;  // this^exponent, this > 1
  int compare(const LogTower& o) const;
  bool finite() const;
  std::string str() const;

 private:
  LogTower normalized() const;
};

// A positive number carried exactly as a big integer while it stays at or
// under one million decimal digits, and as a LogTower beyond that. All
// roundings are outward (values only ever grow), so reported bounds stay
// sound upper bounds.
class Magnitude {
 public:
  Magnitude() = default;
  static Magnitude from_int(long v);
  static Magnitude from_mpz(const mpz_class& v);
  static Magnitude from_double(double v);  // approx-only unless integral

  bool is_exact() const { return exact_.has_value(); }
  const mpz_class& exact() const { return *exact_; }
  const LogTower& approx() const { return approx_; }

  Magnitude add(const Magnitude& o) const;
  Magnitude mul(const Magnitude& o) const;
  Magnitude pow(const Magnitude& exponent) const;
  Magnitude ceil() const;  // snaps a level-0 approx to an exact integer
  Magnitude log10_mag() const;
  int compare(const Magnitude& o) const;

  std::size_t exact_digits() const;
  std::string str() const;

 private:
  std::optional<mpz_class> exact_;  // present only when integral and small enough
  LogTower approx_;
  static constexpr std::size_t kMaxExactDigits = 1'000'000;
  void drop_exact_if_large();
};

}  // namespace constshape
