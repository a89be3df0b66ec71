#include "constshape/bigmag.hpp"

#include <cmath>
#include <sstream>

#include "constshape/errors.hpp"

namespace constshape {

namespace {
constexpr double kLevelCap = 300.0;  // level-0 values stay below 10^300

double mpz_log10(const mpz_class& v) {
  signed long exp2 = 0;
  double m = mpz_get_d_2exp(&exp2, v.get_mpz_t());
  return std::log10(m) + static_cast<double>(exp2) * std::log10(2.0);
}
}  // namespace

LogTower LogTower::normalized() const {
  LogTower t = *this;
  while (t.level > 0 && t.top <= kLevelCap) {
    t.top = std::pow(10.0, t.top);
    --t.level;
  }
  while (t.level == 0 && t.top >= std::pow(10.0, kLevelCap)) {
    t.top = std::log10(t.top);
    ++t.level;
  }
  return t;
}

LogTower LogTower::from_double(double v) {
  if (!(v > 0) || std::isinf(v) || std::isnan(v))
    fail(ErrorCode::Internal, "LogTower requires a positive finite seed");
  LogTower t;
  t.level = 0;
  t.top = v;
  return t.normalized();
}

LogTower LogTower::log10_tower() const {
  LogTower t = normalized();
  if (t.level == 0) {
    // Clamp at a tiny positive value: factors below 1 round up to 1 in the
    // tower regime, which keeps reported upper bounds sound.
    return from_double(std::max(std::log10(t.top), 1e-300));
  }
  LogTower r;
  r.level = t.level - 1;
  r.top = t.top;
  return r.normalized();
}

LogTower LogTower::exp10_tower() const {
  LogTower t = normalized();
  LogTower r;
  r.level = t.level + 1;
  r.top = t.top;
  return r.normalized();
}

LogTower LogTower::add(const LogTower& o) const {
  LogTower a = normalized(), b = o.normalized();
  if (a.level == 0 && b.level == 0) {
    double s = a.top + b.top;
    if (std::isinf(s)) {
      LogTower r;
      r.level = 1;
      r.top = std::max(std::log10(a.top), std::log10(b.top)) + std::log10(2.0);
      return r.normalized();
    }
    return from_double(s);
  }
  // The larger operand absorbs the smaller; outward rounding keeps soundness.
  const LogTower& big = (a.compare(b) >= 0) ? a : b;
  if (big.level == 1) {
    const LogTower& small = (a.compare(b) >= 0) ? b : a;
    double small_log = (small.level == 0) ? std::log10(small.top) : small.top;
    double delta = big.top - small_log;
    if (delta < 300) {
      LogTower r;
      r.level = 1;
      r.top = big.top + std::log10(1.0 + std::pow(10.0, -delta));
      return r.normalized();
    }
  }
  return big;
}

LogTower LogTower::mul(const LogTower& o) const {
  LogTower a = normalized(), b = o.normalized();
  if (a.level == 0 && b.level == 0) {
    double p = a.top * b.top;
    if (!std::isinf(p)) return from_double(p);
  }
  return a.log10_tower().add(b.log10_tower()).exp10_tower();
}

LogTower LogTower::pow(const LogTower& exponent) const {
  LogTower a = normalized(), b = exponent.normalized();
  if (a.level == 0 && b.level == 0) {
    double p = std::pow(a.top, b.top);
    if (p > 0 && std::isfinite(p)) return from_double(p);
  }
  return log10_tower().mul(exponent).exp10_tower();
}

int LogTower::compare(const LogTower& o) const {
  LogTower a = normalized(), b = o.normalized();
  if (a.level != b.level) return a.level < b.level ? -1 : 1;
  if (a.top == b.top) return 0;
  return a.top < b.top ? -1 : 1;
}

bool LogTower::finite() const { return std::isfinite(top); }

std::string LogTower::str() const {
  LogTower t = normalized();
  std::ostringstream os;
  os.precision(6);
  if (t.level == 0) {
    os << t.top;
    return os.str();
  }
  for (int i = 0; i < t.level; ++i) os << "10^";
  os << '(' << t.top << ')';
  return os.str();
}

void Magnitude::drop_exact_if_large() {
  if (exact_ && mpz_sizeinbase(exact_->get_mpz_t(), 10) > kMaxExactDigits) exact_.reset();
}

Magnitude Magnitude::from_int(long v) { return from_mpz(mpz_class(v)); }

Magnitude Magnitude::from_mpz(const mpz_class& v) {
  if (v <= 0) fail(ErrorCode::Internal, "Magnitude must be positive");
  Magnitude m;
  m.exact_ = v;
  double lg = mpz_log10(v);
  m.approx_ = lg < 290 ? LogTower::from_double(std::pow(10.0, lg))
                       : LogTower::from_double(lg).exp10_tower();
  m.drop_exact_if_large();
  return m;
}

Magnitude Magnitude::from_double(double v) {
  Magnitude m;
  m.approx_ = LogTower::from_double(v);
  if (v < 9e15 && std::floor(v) == v) m.exact_ = mpz_class(v);
  return m;
}

Magnitude Magnitude::add(const Magnitude& o) const {
  Magnitude r;
  if (exact_ && o.exact_) r.exact_ = *exact_ + *o.exact_;
  r.approx_ = approx_.add(o.approx_);
  r.drop_exact_if_large();
  return r;
}

Magnitude Magnitude::mul(const Magnitude& o) const {
  Magnitude r;
  if (exact_ && o.exact_ &&
      mpz_sizeinbase(exact_->get_mpz_t(), 10) + mpz_sizeinbase(o.exact_->get_mpz_t(), 10) <
          kMaxExactDigits + 2)
    r.exact_ = *exact_ * *o.exact_;
  r.approx_ = approx_.mul(o.approx_);
  r.drop_exact_if_large();
  return r;
}

Magnitude Magnitude::pow(const Magnitude& exponent) const {
  Magnitude r;
  if (exact_ && exponent.exact_ && exponent.exact_->fits_ulong_p()) {
    unsigned long e = exponent.exact_->get_ui();
    double digits = mpz_log10(*exact_) * static_cast<double>(e);
    if (digits < static_cast<double>(kMaxExactDigits)) {
      mpz_class out;
      mpz_pow_ui(out.get_mpz_t(), exact_->get_mpz_t(), e);
      r.exact_ = out;
    }
  }
  r.approx_ = approx_.pow(exponent.approx_);
  r.drop_exact_if_large();
  return r;
}

Magnitude Magnitude::ceil() const {
  if (exact_) return *this;
  LogTower t = approx_;
  if (t.level == 0 && t.top < 9e15) {
    return from_mpz(mpz_class(std::ceil(t.top)));
  }
  if (t.level == 0) {
    // Integral-valued double beyond 2^53: the conversion is exact.
    mpz_class v;
    mpz_set_d(v.get_mpz_t(), std::ceil(t.top));
    return from_mpz(v + 1);  // outward: the double itself was rounded
  }
  return *this;
}

Magnitude Magnitude::log10_mag() const {
  Magnitude r;
  r.approx_ = approx_.log10_tower();
  return r;
}

int Magnitude::compare(const Magnitude& o) const {
  if (exact_ && o.exact_) return cmp(*exact_, *o.exact_);
  return approx_.compare(o.approx_);
}

std::size_t Magnitude::exact_digits() const {
  return exact_ ? mpz_sizeinbase(exact_->get_mpz_t(), 10) : 0;
}

std::string Magnitude::str() const {
  if (exact_) {
    std::size_t digits = exact_digits();
    if (digits <= 40) return exact_->get_str();
    std::ostringstream os;
    os << "~" << approx_.str() << " (exact, " << digits << " digits)";
    return os.str();
  }
  return approx_.str();
}

}  // namespace constshape
