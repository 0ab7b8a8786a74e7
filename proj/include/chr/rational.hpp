#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace chr {

// Exact rational scalar. Invariant: always stored reduced with a positive
// denominator (mpq canonical form). Serialized as "num/den".
class BigRational {
 public:
  BigRational() : v_(0) {}
  BigRational(long n) : v_(n) {}          // NOLINT: implicit by design
  BigRational(long n, long d);
  explicit BigRational(const mpq_class& q) : v_(q) { v_.canonicalize(); }

  // Parses "num", "num/den" or "-num/den". Throws std::invalid_argument on
  // malformed input or zero denominator.
  static BigRational parse(const std::string& s);

  const mpq_class& raw() const { return v_; }
  mpz_class num() const { return v_.get_num(); }
  mpz_class den() const { return v_.get_den(); }

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  std::string str() const;
  double to_double() const { return v_.get_d(); }

  BigRational operator-() const { return BigRational(mpq_class(-v_)); }
  BigRational& operator+=(const BigRational& o) { v_ += o.v_; return *this; }
  BigRational& operator-=(const BigRational& o) { v_ -= o.v_; return *this; }
  BigRational& operator*=(const BigRational& o) { v_ *= o.v_; return *this; }
  BigRational& operator/=(const BigRational& o);

  friend BigRational operator+(BigRational a, const BigRational& b) { return a += b; }
  friend BigRational operator-(BigRational a, const BigRational& b) { return a -= b; }
  friend BigRational operator*(BigRational a, const BigRational& b) { return a *= b; }
  friend BigRational operator/(BigRational a, const BigRational& b) { return a /= b; }

  friend bool operator==(const BigRational& a, const BigRational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const BigRational& a, const BigRational& b) { return a.v_ != b.v_; }
  friend bool operator<(const BigRational& a, const BigRational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const BigRational& a, const BigRational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const BigRational& a, const BigRational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const BigRational& a, const BigRational& b) { return a.v_ >= b.v_; }

  BigRational inverse() const;
  BigRational abs() const { return BigRational(mpq_class(::abs(v_))); }

 private:
  mpq_class v_;
};

std::ostream& operator<<(std::ostream& os, const BigRational& q);

// Best rational approximation of x with denominator <= max_den, found by
// walking the continued fraction expansion. max_den must be >= 1.
BigRational rational_reconstruct(double x, std::int64_t max_den);

}  // namespace chr
