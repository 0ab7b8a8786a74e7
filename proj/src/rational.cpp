#include "chr/rational.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace chr {

BigRational::BigRational(long n, long d) {
  if (d == 0) throw std::invalid_argument("BigRational: zero denominator");
  v_ = mpq_class(n, d);
  v_.canonicalize();
}

BigRational BigRational::parse(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("BigRational: empty string");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      mpz_class n(s);
      return BigRational(mpq_class(n));
    }
    mpz_class n(s.substr(0, slash));
    mpz_class d(s.substr(slash + 1));
    if (d == 0) throw std::invalid_argument("BigRational: zero denominator");
    mpq_class q(n, d);
    q.canonicalize();
    return BigRational(q);
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("BigRational: malformed literal '" + s + "'");
  }
}

std::string BigRational::str() const {
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

BigRational& BigRational::operator/=(const BigRational& o) {
  if (o.is_zero()) throw std::domain_error("BigRational: division by zero");
  v_ /= o.v_;
  return *this;
}

BigRational BigRational::inverse() const {
  if (is_zero()) throw std::domain_error("BigRational: inverse of zero");
  return BigRational(mpq_class(1) / v_);
}

std::ostream& operator<<(std::ostream& os, const BigRational& q) {
  return os << q.str();
}

BigRational rational_reconstruct(double x, std::int64_t max_den) {
  if (max_den < 1) throw std::invalid_argument("rational_reconstruct: max_den < 1");
  if (!std::isfinite(x)) throw std::domain_error("rational_reconstruct: non-finite input");
  bool neg = x < 0;
  double a = neg ? -x : x;
  mpq_class target(a);  // exact binary value of the double
  mpz_class bound(max_den);

  // Continued fraction of |x| with convergents h/k; h2/k2 trails by two.
  mpz_class h1 = 1, k1 = 0, h2 = 0, k2 = 1;
  mpq_class rest = target;
  mpq_class best;
  bool have = false;
  for (int it = 0; it < 128; ++it) {
    mpz_class ai = rest.get_num() / rest.get_den();  // floor (rest >= 0)
    mpz_class knew = ai * k1 + k2;
    if (knew > bound && k1 != 0) {
      // largest admissible partial quotient; keep semiconvergent if closer
      mpz_class amax = (bound - k2) / k1;
      if (amax >= 1) {
        mpq_class semi(amax * h1 + h2, amax * k1 + k2);
        semi.canonicalize();
        mpq_class conv(h1, k1);
        conv.canonicalize();
        if (abs(semi - target) < abs(conv - target)) { best = semi; have = true; }
      }
      break;
    }
    mpz_class hnew = ai * h1 + h2;
    h2 = h1; k2 = k1; h1 = hnew; k1 = knew;
    best = mpq_class(h1, k1);
    best.canonicalize();
    have = true;
    mpq_class frac = rest - mpq_class(ai);
    if (frac == 0) break;
    rest = mpq_class(1) / frac;
  }
  if (!have) return BigRational();
  if (neg) best = -best;
  return BigRational(best);
}

}  // namespace chr
