#include "chr/finitefield.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace chr {

// ---------------------------------------------------------------- fp scalars

namespace fp {

std::uint64_t add(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  std::uint64_t s = a + b;
  return s >= p ? s - p : s;
}

std::uint64_t sub(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return a >= b ? a - b : a + p - b;
}

std::uint64_t mul(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

std::uint64_t pow(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mul(r, a, p);
    a = mul(a, a, p);
    e >>= 1;
  }
  return r;
}

std::uint64_t inv(std::uint64_t a, std::uint64_t p) {
  a %= p;
  if (a == 0) throw std::domain_error("fp::inv of zero");
  return pow(a, p - 2, p);
}

// deterministic Miller-Rabin, valid for all n < 3.3e24
bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n == q) return true;
    if (n % q == 0) return false;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) { d >>= 1; ++s; }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = pow(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mul(x, x, n);
      if (x == n - 1) { composite = false; break; }
    }
    if (composite) return false;
  }
  return true;
}

}  // namespace fp

// ---------------------------------------------------------------- FqContext

mpz_class FqContext::order() const {
  mpz_class q;
  mpz_ui_pow_ui(q.get_mpz_t(), p, static_cast<unsigned long>(d));
  return q;
}

std::string FqContext::modulus_str() const {
  std::ostringstream os;
  bool first = true;
  for (int i = d; i >= 0; --i) {
    std::uint64_t c = modulus[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    if (!first) os << "+";
    first = false;
    if (i == 0 || c != 1) os << c;
    if (i > 0) {
      if (c != 1) os << "*";
      os << "x";
      if (i > 1) os << "^" << i;
    }
  }
  if (first) os << "0";
  return os.str();
}

// ---------------------------------------------------------------- FqElement

FqElement::FqElement(const FqContext* ctx, std::uint64_t scalar) : ctx_(ctx) {
  if (!ctx_) throw std::invalid_argument("FqElement: null context");
  dim_ = ctx_->d;
  if (dim_ > kInline) v_.assign(static_cast<std::size_t>(dim_), 0);
  data()[0] = scalar % ctx_->p;
}

FqElement::FqElement(const FqContext* ctx, std::vector<std::uint64_t> coeffs) : ctx_(ctx) {
  if (!ctx_) throw std::invalid_argument("FqElement: null context");
  dim_ = ctx_->d;
  if (dim_ > kInline) v_.assign(static_cast<std::size_t>(dim_), 0);
  std::uint64_t* out = data();
  std::size_t n = std::min(coeffs.size(), static_cast<std::size_t>(dim_));
  for (std::size_t i = 0; i < n; ++i) out[i] = coeffs[i] % ctx_->p;
}

std::vector<std::uint64_t> FqElement::coeffs() const {
  return std::vector<std::uint64_t>(data(), data() + dim_);
}

bool FqElement::is_zero() const {
  if (!ctx_) return true;
  const std::uint64_t* c = data();
  for (int i = 0; i < dim_; ++i)
    if (c[i] != 0) return false;
  return true;
}

bool FqElement::is_scalar() const {
  if (!ctx_) return true;
  const std::uint64_t* c = data();
  for (int i = 1; i < dim_; ++i)
    if (c[i] != 0) return false;
  return true;
}

std::string FqElement::str() const {
  if (is_zero()) return "0";
  if (is_scalar()) return std::to_string(rep(0));
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < dim_; ++i) {
    if (i) os << ",";
    os << rep(i);
  }
  os << "]";
  return os.str();
}

namespace {

const FqContext* common_ctx(const FqElement& a, const FqElement& b) {
  const FqContext* ca = a.ctx();
  const FqContext* cb = b.ctx();
  if (ca && cb && ca != cb) throw std::logic_error("FqElement: mixed contexts");
  return ca ? ca : cb;
}

}  // namespace

FqElement FqElement::operator-() const {
  if (!ctx_) return FqElement();
  FqElement r(*this);
  std::uint64_t* c = r.data();
  for (int i = 0; i < r.dim_; ++i) c[i] = c[i] == 0 ? 0 : ctx_->p - c[i];
  return r;
}

FqElement operator+(const FqElement& a, const FqElement& b) {
  const FqContext* ctx = common_ctx(a, b);
  if (!ctx) return FqElement();
  if (!a.ctx_) return b;
  if (!b.ctx_) return a;
  FqElement r(a);
  std::uint64_t* c = r.data();
  const std::uint64_t* cb = b.data();
  for (int i = 0; i < r.dim_; ++i) c[i] = fp::add(c[i], cb[i], ctx->p);
  return r;
}

FqElement operator-(const FqElement& a, const FqElement& b) {
  const FqContext* ctx = common_ctx(a, b);
  if (!ctx) return FqElement();
  if (!b.ctx_) return a;
  if (!a.ctx_) return -b;
  FqElement r(a);
  std::uint64_t* c = r.data();
  const std::uint64_t* cb = b.data();
  for (int i = 0; i < r.dim_; ++i) c[i] = fp::sub(c[i], cb[i], ctx->p);
  return r;
}

FqElement operator*(const FqElement& a, const FqElement& b) {
  const FqContext* ctx = common_ctx(a, b);
  if (!ctx || !a.ctx_ || !b.ctx_) return FqElement();
  const std::uint64_t p = ctx->p;
  const std::size_t d = static_cast<std::size_t>(ctx->d);
  const std::uint64_t* ca = a.data();
  const std::uint64_t* cb = b.data();
  std::uint64_t small[2 * FqElement::kInline - 1];
  std::vector<std::uint64_t> big;
  std::uint64_t* prod;
  if (d <= FqElement::kInline) {
    prod = small;
    std::fill(prod, prod + 2 * d - 1, 0);
  } else {
    big.assign(2 * d - 1, 0);
    prod = big.data();
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (ca[i] == 0) continue;
    for (std::size_t j = 0; j < d; ++j)
      if (cb[j] != 0) prod[i + j] = fp::add(prod[i + j], fp::mul(ca[i], cb[j], p), p);
  }
  // reduce modulo the monic context modulus
  for (std::size_t k = 2 * d - 1; k-- > d;) {
    std::uint64_t top = prod[k];
    if (top == 0) continue;
    prod[k] = 0;
    for (std::size_t j = 0; j < d; ++j)
      prod[k - d + j] = fp::sub(prod[k - d + j], fp::mul(top, ctx->modulus[j], p), p);
  }
  FqElement r = FqElement::zero(ctx);
  std::uint64_t* out = r.data();
  for (std::size_t i = 0; i < d; ++i) out[i] = prod[i];
  return r;
}

bool operator==(const FqElement& a, const FqElement& b) {
  if (!a.ctx_ || !b.ctx_) return a.is_zero() && b.is_zero();
  if (a.ctx_ != b.ctx_) throw std::logic_error("FqElement: mixed contexts");
  const std::uint64_t* ca = a.data();
  const std::uint64_t* cb = b.data();
  for (int i = 0; i < a.dim_; ++i)
    if (ca[i] != cb[i]) return false;
  return true;
}

FqElement FqElement::pow(const mpz_class& e) const {
  if (!ctx_) {
    if (e == 0) throw std::domain_error("FqElement: 0^0 without context");
    return FqElement();
  }
  if (e < 0) return inverse().pow(-e);
  if (mpz_fits_ulong_p(e.get_mpz_t())) return pow(static_cast<std::uint64_t>(e.get_ui()));
  FqElement r = FqElement::one(ctx_);
  FqElement base(*this);
  std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (std::size_t i = bits; i-- > 0;) {
    r = r * r;
    if (mpz_tstbit(e.get_mpz_t(), i)) r = r * base;
  }
  return r;
}

FqElement FqElement::pow(std::uint64_t e) const {
  if (!ctx_) {
    if (e == 0) throw std::domain_error("FqElement: 0^0 without context");
    return FqElement();
  }
  FqElement r = FqElement::one(ctx_);
  FqElement base(*this);
  while (e) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return r;
}

FqElement FqElement::frobenius_inverse() const {
  if (!ctx_ || ctx_->d == 1) return *this;
  // p^(d-1) overflows u64 only past the degrees this library builds, but stay exact
  if (static_cast<double>(ctx_->d - 1) * std::log2(static_cast<double>(ctx_->p)) < 62.0) {
    std::uint64_t e = 1;
    for (int i = 1; i < ctx_->d; ++i) e *= ctx_->p;
    return pow(e);
  }
  mpz_class e;
  mpz_ui_pow_ui(e.get_mpz_t(), ctx_->p, static_cast<unsigned long>(ctx_->d - 1));
  return pow(e);
}

FqElement FqElement::inverse() const {
  if (is_zero()) throw std::domain_error("FqElement: inverse of zero");
  if (ctx_->d == 1) return FqElement(ctx_, fp::inv(rep(0), ctx_->p));
  // extended Euclid on the coefficient polynomial and the context modulus
  const std::uint64_t p = ctx_->p;
  auto deg = [](const std::vector<std::uint64_t>& v) {
    for (std::size_t i = v.size(); i-- > 0;)
      if (v[i] != 0) return static_cast<int>(i);
    return -1;
  };
  std::vector<std::uint64_t> r0 = ctx_->modulus;
  std::vector<std::uint64_t> r1(data(), data() + dim_);
  r1.resize(r0.size(), 0);
  std::vector<std::uint64_t> t0(r0.size(), 0), t1(r0.size(), 0);
  t1[0] = 1;
  while (deg(r1) >= 0) {
    int d0 = deg(r0), d1 = deg(r1);
    if (d0 < d1) { std::swap(r0, r1); std::swap(t0, t1); continue; }
    std::uint64_t q = fp::mul(r0[static_cast<std::size_t>(d0)],
                              fp::inv(r1[static_cast<std::size_t>(d1)], p), p);
    int shift = d0 - d1;
    for (int i = 0; i <= d1; ++i) {
      r0[static_cast<std::size_t>(i + shift)] =
          fp::sub(r0[static_cast<std::size_t>(i + shift)], fp::mul(q, r1[static_cast<std::size_t>(i)], p), p);
    }
    for (std::size_t i = 0; i + static_cast<std::size_t>(shift) < t0.size(); ++i) {
      t0[i + static_cast<std::size_t>(shift)] =
          fp::sub(t0[i + static_cast<std::size_t>(shift)], fp::mul(q, t1[i], p), p);
    }
    if (deg(r0) < deg(r1)) { std::swap(r0, r1); std::swap(t0, t1); }
  }
  int dg = deg(r0);
  if (dg != 0) throw std::logic_error("FqElement::inverse: modulus not irreducible");
  std::uint64_t scale = fp::inv(r0[0], p);
  std::vector<std::uint64_t> out(static_cast<std::size_t>(ctx_->d), 0);
  for (std::size_t i = 0; i < out.size() && i < t0.size(); ++i) out[i] = fp::mul(t0[i], scale, p);
  return FqElement(ctx_, std::move(out));
}

int FqElement::compare(const FqElement& a, const FqElement& b) {
  bool za = a.is_zero(), zb = b.is_zero();
  if (za && zb) return 0;
  if (za) return -1;
  if (zb) return 1;
  // both typed here
  const std::uint64_t* ca = a.data();
  const std::uint64_t* cb = b.data();
  for (int i = a.dim_; i-- > 0;) {
    if (ca[i] != cb[i]) return ca[i] < cb[i] ? -1 : 1;
  }
  return 0;
}

FqElement fq_random(const FqContext* ctx, std::mt19937_64& rng) {
  std::vector<std::uint64_t> c(static_cast<std::size_t>(ctx->d));
  for (auto& x : c) x = rng() % ctx->p;
  return FqElement(ctx, std::move(c));
}

// ---------------------------------------------------------------- FqPoly

namespace {
const FqElement kZeroElement{};
}

FqPoly::FqPoly(const FqContext* ctx, std::vector<FqElement> coeffs)
    : ctx_(ctx), c_(std::move(coeffs)) {
  strip();
}

void FqPoly::strip() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

FqPoly FqPoly::x(const FqContext* ctx) {
  return FqPoly(ctx, {FqElement::zero(ctx), FqElement::one(ctx)});
}

FqPoly FqPoly::constant(const FqContext* ctx, const FqElement& c) {
  return FqPoly(ctx, {c});
}

const FqElement& FqPoly::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(c_.size())) return kZeroElement;
  return c_[static_cast<std::size_t>(i)];
}

FqElement FqPoly::lc() const {
  if (c_.empty()) throw std::domain_error("FqPoly::lc of zero");
  return c_.back();
}

bool FqPoly::is_monic() const {
  return !c_.empty() && c_.back() == FqElement::one(ctx_);
}

FqPoly FqPoly::monic() const {
  if (c_.empty()) throw std::domain_error("FqPoly::monic of zero");
  return scaled(c_.back().inverse());
}

FqPoly operator+(const FqPoly& a, const FqPoly& b) {
  const FqContext* ctx = a.ctx_ ? a.ctx_ : b.ctx_;
  std::vector<FqElement> c(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = (i < a.c_.size() ? a.c_[i] : FqElement()) + (i < b.c_.size() ? b.c_[i] : FqElement());
  }
  return FqPoly(ctx, std::move(c));
}

FqPoly operator-(const FqPoly& a, const FqPoly& b) {
  const FqContext* ctx = a.ctx_ ? a.ctx_ : b.ctx_;
  std::vector<FqElement> c(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = (i < a.c_.size() ? a.c_[i] : FqElement()) - (i < b.c_.size() ? b.c_[i] : FqElement());
  }
  return FqPoly(ctx, std::move(c));
}

FqPoly FqPoly::operator-() const {
  FqPoly r(*this);
  for (auto& c : r.c_) c = -c;
  return r;
}

FqPoly operator*(const FqPoly& a, const FqPoly& b) {
  const FqContext* ctx = a.ctx_ ? a.ctx_ : b.ctx_;
  if (a.c_.empty() || b.c_.empty()) return FqPoly(ctx);
  std::vector<FqElement> c(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] = c[i + j] + a.c_[i] * b.c_[j];
  }
  return FqPoly(ctx, std::move(c));
}

FqPoly FqPoly::scaled(const FqElement& k) const {
  FqPoly r(ctx_);
  if (k.is_zero()) return r;
  r.c_ = c_;
  for (auto& c : r.c_) c = c * k;
  r.strip();
  return r;
}

FqPoly FqPoly::shifted(int k) const {
  if (k == 0 || c_.empty()) return *this;
  FqPoly r(ctx_);
  r.c_.assign(static_cast<std::size_t>(k), FqElement());
  r.c_.insert(r.c_.end(), c_.begin(), c_.end());
  return r;
}

std::pair<FqPoly, FqPoly> FqPoly::divmod(const FqPoly& a, const FqPoly& b) {
  if (b.is_zero()) throw std::domain_error("FqPoly::divmod by zero");
  const FqContext* ctx = b.ctx_;
  FqPoly rem(a);
  FqPoly quot(ctx);
  int db = b.degree();
  if (rem.degree() < db) return {quot, rem};
  quot.c_.assign(static_cast<std::size_t>(rem.degree() - db) + 1, FqElement());
  FqElement inv_lc = b.lc().inverse();
  while (rem.degree() >= db) {
    int k = rem.degree() - db;
    FqElement f = rem.c_.back() * inv_lc;
    quot.c_[static_cast<std::size_t>(k)] = f;
    for (int i = 0; i <= db; ++i) {
      std::size_t idx = static_cast<std::size_t>(i + k);
      rem.c_[idx] = rem.c_[idx] - f * b.coeff(i);
    }
    rem.strip();
    if (rem.is_zero()) break;
  }
  quot.strip();
  return {quot, rem};
}

FqPoly FqPoly::gcd(FqPoly a, FqPoly b) {
  while (!b.is_zero()) {
    FqPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  return a.monic();
}

std::array<FqPoly, 3> FqPoly::xgcd(const FqPoly& a, const FqPoly& b) {
  const FqContext* ctx = a.ctx_ ? a.ctx_ : b.ctx_;
  FqPoly r0 = a, r1 = b;
  FqPoly s0 = FqPoly::constant(ctx, FqElement::one(ctx)), s1(ctx);
  FqPoly t0(ctx), t1 = FqPoly::constant(ctx, FqElement::one(ctx));
  while (!r1.is_zero()) {
    auto [q, r] = divmod(r0, r1);
    FqPoly s2 = s0 - q * s1;
    FqPoly t2 = t0 - q * t1;
    r0 = std::move(r1); r1 = std::move(r);
    s0 = std::move(s1); s1 = std::move(s2);
    t0 = std::move(t1); t1 = std::move(t2);
  }
  if (r0.is_zero()) return {r0, s0, t0};
  FqElement scale = r0.lc().inverse();
  return {r0.scaled(scale), s0.scaled(scale), t0.scaled(scale)};
}

FqPoly FqPoly::derivative() const {
  if (c_.size() <= 1) return FqPoly(ctx_);
  std::vector<FqElement> c(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) {
    std::uint64_t k = i % ctx_->p;
    c[i - 1] = c_[i] * FqElement(ctx_, k);
  }
  return FqPoly(ctx_, std::move(c));
}

FqElement FqPoly::eval(const FqElement& at) const {
  FqElement acc;
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * at + c_[i];
  return acc;
}

FqPoly FqPoly::powmod(const FqPoly& base, const mpz_class& e, const FqPoly& mod) {
  const FqContext* ctx = mod.ctx_;
  if (e < 0) throw std::invalid_argument("FqPoly::powmod negative exponent");
  FqPoly r = FqPoly::constant(ctx, FqElement::one(ctx));
  r = divmod(r, mod).second;
  if (e == 0) return r;
  FqPoly b = divmod(base, mod).second;
  std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (std::size_t i = bits; i-- > 0;) {
    r = divmod(r * r, mod).second;
    if (mpz_tstbit(e.get_mpz_t(), i)) r = divmod(r * b, mod).second;
  }
  return r;
}

std::string FqPoly::str(const std::string& var) const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = c_.size(); i-- > 0;) {
    if (c_[i].is_zero()) continue;
    if (!first) os << "+";
    first = false;
    bool unit_coeff = c_[i] == FqElement::one(ctx_);
    if (i == 0 || !unit_coeff) os << c_[i].str();
    if (i > 0) {
      if (!unit_coeff) os << "*";
      os << var;
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

int FqPoly::compare(const FqPoly& a, const FqPoly& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
  for (std::size_t i = a.c_.size(); i-- > 0;) {
    int c = FqElement::compare(a.c_[i], b.c_[i]);
    if (c != 0) return c;
  }
  return 0;
}

// ---------------------------------------------------------------- fq_build

FqContext fq_build(std::uint64_t p, int d, std::uint64_t seed) {
  if (!fp::is_prime(p)) throw std::invalid_argument("fq_build: p is not prime");
  if (p >= (1ull << 40)) throw std::invalid_argument("fq_build: p >= 2^40");
  if (d < 1 || d > 64) throw std::invalid_argument("fq_build: d out of range");
  FqContext ctx;
  ctx.p = p;
  ctx.d = d;
  ctx.seed = seed;
  if (d == 1) {
    ctx.modulus = {0, 1};  // F_p[x]/(x)
    return ctx;
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<std::uint64_t> m(static_cast<std::size_t>(d) + 1);
    m[static_cast<std::size_t>(d)] = 1;
    for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i)] = rng() % p;
    if (m[0] == 0) m[0] = 1 + rng() % (p - 1);  // constant term 0 is never irreducible here
    FqContext trial = ctx;
    trial.modulus = m;
    // certify irreducibility over F_p via the d=1 embedding
    FqContext base;
    base.p = p;
    base.d = 1;
    base.modulus = {0, 1};
    std::vector<FqElement> cand;
    cand.reserve(m.size());
    for (std::uint64_t c : m) cand.emplace_back(&base, c);
    if (uni_is_irreducible(FqPoly(&base, std::move(cand)))) {
      ctx.modulus = std::move(m);
      return ctx;
    }
  }
  throw std::runtime_error("fq_build: no irreducible modulus found (search exhausted)");
}

// ---------------------------------------------------------------- uni factor

namespace {

// p-th root of f when f' == 0, i.e. f(x) = g(x^p); valid in F_{p^d}
FqPoly pth_root(const FqPoly& f) {
  const FqContext* ctx = f.ctx();
  std::uint64_t p = ctx->p;
  std::vector<FqElement> out;
  for (int i = 0; i <= f.degree(); i += static_cast<int>(p)) {
    out.push_back(f.coeff(i).frobenius_inverse());
  }
  return FqPoly(ctx, std::move(out));
}

void squarefree_split(const FqPoly& f, int mult, std::vector<std::pair<FqPoly, int>>& out) {
  const FqContext* ctx = f.ctx();
  if (f.degree() <= 0) return;
  FqPoly df = f.derivative();
  if (df.is_zero()) {
    squarefree_split(pth_root(f), mult * static_cast<int>(ctx->p), out);
    return;
  }
  FqPoly c = FqPoly::gcd(f, df);
  FqPoly w = FqPoly::divmod(f, c).first;
  int i = 1;
  while (w.degree() > 0) {
    FqPoly y = FqPoly::gcd(w, c);
    FqPoly z = FqPoly::divmod(w, y).first;
    if (z.degree() > 0) out.emplace_back(z.monic(), i * mult);
    w = std::move(y);
    c = FqPoly::divmod(c, w).first;
    ++i;
  }
  if (c.degree() > 0) squarefree_split(pth_root(c), mult * static_cast<int>(ctx->p), out);
}

// equal-degree splitting of a squarefree product of irreducibles of degree e
void edf(const FqPoly& f, int e, std::mt19937_64& rng, std::vector<FqPoly>& out) {
  const FqContext* ctx = f.ctx();
  int n = f.degree();
  if (n == e) {
    out.push_back(f.monic());
    return;
  }
  mpz_class q = ctx->order();
  for (;;) {
    // random probe of degree < n
    std::vector<FqElement> rc(static_cast<std::size_t>(n));
    for (auto& c : rc) c = fq_random(ctx, rng);
    FqPoly a(ctx, std::move(rc));
    if (a.degree() < 1) continue;
    FqPoly g = FqPoly::gcd(a, f);
    if (g.degree() > 0 && g.degree() < n) {
      edf(g, e, rng, out);
      edf(FqPoly::divmod(f, g).first, e, rng, out);
      return;
    }
    FqPoly b(ctx);
    if (ctx->p == 2) {
      // trace over F_2: sum of a^(2^j) for j < d*e
      FqPoly t = FqPoly::divmod(a, f).second;
      FqPoly acc = t;
      long reps = static_cast<long>(ctx->d) * e;
      for (long j = 1; j < reps; ++j) {
        t = FqPoly::divmod(t * t, f).second;
        acc = acc + t;
      }
      b = acc;
    } else {
      mpz_class qe;
      mpz_pow_ui(qe.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(e));
      mpz_class half = (qe - 1) / 2;
      b = FqPoly::powmod(a, half, f) - FqPoly::constant(ctx, FqElement::one(ctx));
    }
    g = FqPoly::gcd(b, f);
    if (g.degree() > 0 && g.degree() < n) {
      edf(g, e, rng, out);
      edf(FqPoly::divmod(f, g).first, e, rng, out);
      return;
    }
  }
}

}  // namespace

UniFactorization uni_factor(const FqPoly& f, std::uint64_t seed) {
  if (f.is_zero()) throw std::domain_error("uni_factor: zero polynomial");
  const FqContext* ctx = f.ctx();
  UniFactorization out;
  out.unit = f.lc();
  if (f.degree() == 0) return out;
  std::mt19937_64 rng(seed ^ 0xd1b54a32d192ed03ull);
  FqPoly fm = f.monic();

  std::vector<std::pair<FqPoly, int>> sqf;
  squarefree_split(fm, 1, sqf);

  mpz_class q = ctx->order();
  for (const auto& [part, mult] : sqf) {
    // distinct-degree on the squarefree part
    FqPoly rest = part;
    FqPoly h = FqPoly::divmod(FqPoly::x(ctx), rest).second;
    int e = 0;
    while (rest.degree() > 0) {
      ++e;
      if (2 * e > rest.degree()) {
        out.factors.emplace_back(rest.monic(), mult);
        break;
      }
      h = FqPoly::powmod(h, q, rest);
      FqPoly g = FqPoly::gcd(h - FqPoly::x(ctx), rest);
      if (g.degree() > 0) {
        std::vector<FqPoly> irr;
        edf(g, e, rng, irr);
        for (auto& pf : irr) out.factors.emplace_back(std::move(pf), mult);
        rest = FqPoly::divmod(rest, g).first;
        h = FqPoly::divmod(h, rest).second;
      }
    }
  }
  std::sort(out.factors.begin(), out.factors.end(),
            [](const auto& a, const auto& b) { return FqPoly::compare(a.first, b.first) < 0; });
  return out;
}

bool uni_is_irreducible(const FqPoly& f) {
  if (f.degree() <= 0) return false;
  if (f.degree() == 1) return true;
  const FqContext* ctx = f.ctx();
  FqPoly fm = f.monic();
  int n = fm.degree();
  mpz_class q = ctx->order();
  // h_j = x^(q^j) mod f computed incrementally
  FqPoly h = FqPoly::divmod(FqPoly::x(ctx), fm).second;
  std::vector<int> proper_exponents;
  for (int r = 2; r <= n; ++r)
    if (n % r == 0 && [](int v) {  // r prime?
          for (int k = 2; k * k <= v; ++k)
            if (v % k == 0) return false;
          return true;
        }(r))
      proper_exponents.push_back(n / r);
  for (int j = 1; j <= n; ++j) {
    h = FqPoly::powmod(h, q, fm);
    if (std::find(proper_exponents.begin(), proper_exponents.end(), j) != proper_exponents.end()) {
      FqPoly g = FqPoly::gcd(h - FqPoly::x(ctx), fm);
      if (g.degree() != 0) return false;
    }
    if (j == n) {
      FqPoly diff = h - FqPoly::divmod(FqPoly::x(ctx), fm).second;
      if (!diff.is_zero()) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- reduce_mod

MultiPoly<FqElement> reduce_mod(const MultiPoly<BigRational>& f, const FqContext* ctx) {
  MultiPoly<FqElement> out(f.vars(), f.order());
  mpz_class p(static_cast<unsigned long>(ctx->p));
  for (const auto& [m, c] : f.terms()) {
    mpz_class num = c.num() % p;
    mpz_class den = c.den() % p;
    if (den == 0) throw std::domain_error("reduce_mod: denominator divisible by p");
    if (num < 0) num += p;
    std::uint64_t n = num.get_ui();
    std::uint64_t d = den.get_ui();
    out.add_term(m, FqElement(ctx, fp::mul(n, fp::inv(d, ctx->p), ctx->p)));
  }
  return out;
}

}  // namespace chr
