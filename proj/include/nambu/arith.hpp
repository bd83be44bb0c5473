// arith.hpp
// Exact arithmetic kernel: arbitrary-precision integers (int64 fast path,
// GMP big path), rationals in lowest terms, and Gaussian rationals.
#pragma once

#include <gmp.h>

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <complex>

namespace nambu {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Signed integer with exact semantics for any magnitude.  Values that fit
// in int64 stay inline; anything larger spills into an mpz.
class Integer {
 public:
  Integer() : small_(0), big_(nullptr) {}
  Integer(long long v) : small_(v), big_(nullptr) {}  // NOLINT: implicit by design
  Integer(long v) : small_(v), big_(nullptr) {}        // NOLINT
  Integer(int v) : small_(v), big_(nullptr) {}

  Integer(const Integer& o) : small_(o.small_), big_(nullptr) {
    if (o.big_) big_ = new_mpz_copy(*o.big_);
  }
  Integer(Integer&& o) noexcept : small_(o.small_), big_(o.big_) { o.big_ = nullptr; }
  Integer& operator=(const Integer& o) {
    if (this != &o) {
      clear_big();
      small_ = o.small_;
      if (o.big_) big_ = new_mpz_copy(*o.big_);
    }
    return *this;
  }
  Integer& operator=(Integer&& o) noexcept {
    if (this != &o) {
      clear_big();
      small_ = o.small_;
      big_ = o.big_;
      o.big_ = nullptr;
    }
    return *this;
  }
  ~Integer() { clear_big(); }

  bool is_small() const { return big_ == nullptr; }
  bool is_zero() const { return big_ ? mpz_sgn(*big_) == 0 : small_ == 0; }
  bool is_one() const { return big_ ? mpz_cmp_si(*big_, 1) == 0 : small_ == 1; }
  int sign() const { return big_ ? mpz_sgn(*big_) : (small_ > 0) - (small_ < 0); }

  friend Integer operator+(const Integer& a, const Integer& b) {
    if (a.is_small() && b.is_small()) {
      long long r;
      if (!__builtin_saddll_overflow(a.small_, b.small_, &r)) return Integer(r);
    }
    return big_op(a, b, mpz_add);
  }
  friend Integer operator-(const Integer& a, const Integer& b) {
    if (a.is_small() && b.is_small()) {
      long long r;
      if (!__builtin_ssubll_overflow(a.small_, b.small_, &r)) return Integer(r);
    }
    return big_op(a, b, mpz_sub);
  }
  friend Integer operator*(const Integer& a, const Integer& b) {
    if (a.is_small() && b.is_small()) {
      long long r;
      if (!__builtin_smulll_overflow(a.small_, b.small_, &r)) return Integer(r);
    }
    return big_op(a, b, mpz_mul);
  }
  Integer operator-() const {
    if (is_small() && small_ != std::numeric_limits<long long>::min()) return Integer(-small_);
    Integer r = promote();
    mpz_neg(*r.big_, *r.big_);
    r.demote();
    return r;
  }

  // Exact division (caller guarantees divisibility).
  friend Integer div_exact(const Integer& a, const Integer& b) {
    if (a.is_small() && b.is_small() && b.small_ != 0 &&
        !(a.small_ == std::numeric_limits<long long>::min() && b.small_ == -1))
      return Integer(a.small_ / b.small_);
    return big_op(a, b, mpz_divexact);
  }

  friend Integer gcd(const Integer& a, const Integer& b) {
    if (a.is_small() && b.is_small() &&
        a.small_ != std::numeric_limits<long long>::min() &&
        b.small_ != std::numeric_limits<long long>::min()) {
      unsigned long long x = a.small_ < 0 ? -(unsigned long long)a.small_ : a.small_;
      unsigned long long y = b.small_ < 0 ? -(unsigned long long)b.small_ : b.small_;
      unsigned long long g = std::gcd(x, y);
      if (g <= (unsigned long long)std::numeric_limits<long long>::max())
        return Integer((long long)g);
    }
    return big_op(a, b, mpz_gcd);
  }

  friend bool operator==(const Integer& a, const Integer& b) { return cmp(a, b) == 0; }
  friend bool operator!=(const Integer& a, const Integer& b) { return cmp(a, b) != 0; }
  friend bool operator<(const Integer& a, const Integer& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const Integer& a, const Integer& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const Integer& a, const Integer& b) { return cmp(a, b) > 0; }

  Integer pow(unsigned long e) const {
    Integer r(1), base(*this);
    while (e) {
      if (e & 1) r = r * base;
      base = base * base;
      e >>= 1;
    }
    return r;
  }

  // Exact n-th root, if the value is a perfect n-th power.
  std::optional<Integer> nth_root_exact(unsigned long n) const {
    if (n == 0) return std::nullopt;
    if (sign() < 0 && n % 2 == 0) return std::nullopt;
    Integer p = promote();
    mpz_t root;
    mpz_init(root);
    int exact = mpz_root(root, *p.big_, n);
    std::optional<Integer> out;
    if (exact) {
      Integer r;
      r.big_ = new mpz_t[1];
      mpz_init_set(*r.big_, root);
      r.demote();
      out = r;
    }
    mpz_clear(root);
    return out;
  }

  // Exact square root, if the value is a perfect square.
  std::optional<Integer> sqrt_exact() const {
    if (sign() < 0) return std::nullopt;
    Integer p = promote();
    mpz_t root, rem;
    mpz_init(root);
    mpz_init(rem);
    mpz_sqrtrem(root, rem, *p.big_);
    std::optional<Integer> out;
    if (mpz_sgn(rem) == 0) {
      Integer r;
      r.big_ = new mpz_t[1];
      mpz_init_set(*r.big_, root);
      r.demote();
      out = r;
    }
    mpz_clear(root);
    mpz_clear(rem);
    return out;
  }

  std::string to_string() const {
    if (is_small()) return std::to_string(small_);
    char* s = mpz_get_str(nullptr, 10, *big_);
    std::string out(s);
    std::free(s);
    return out;
  }

  static Integer from_string(const std::string& s) {
    Integer r;
    r.big_ = new mpz_t[1];
    if (mpz_init_set_str(*r.big_, s.c_str(), 10) != 0) {
      mpz_clear(*r.big_);
      delete[] r.big_;
      throw Error("bad integer literal: " + s);
    }
    r.demote();
    return r;
  }

  double to_double() const { return big_ ? mpz_get_d(*big_) : (double)small_; }

  long long to_long() const {
    if (!is_small()) throw Error("integer too large for machine word: " + to_string());
    return small_;
  }

  uint64_t hash64() const {
    uint64_t h;
    if (is_small()) {
      h = (uint64_t)small_;
    } else {
      h = mpz_fdiv_ui(*big_, 0xFFFFFFFFFFFFFFC5ull);
      h ^= (uint64_t)mpz_size(*big_) << 56;
      if (mpz_sgn(*big_) < 0) h = ~h;
    }
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    h *= 0xc4ceb9fe1a85ec53ull;
    h ^= h >> 33;
    return h;
  }

 private:
  long long small_;
  mpz_t* big_;

  static mpz_t* new_mpz_copy(const mpz_t src) {
    mpz_t* p = new mpz_t[1];
    mpz_init_set(*p, src);
    return p;
  }
  void clear_big() {
    if (big_) {
      mpz_clear(*big_);
      delete[] big_;
      big_ = nullptr;
    }
  }
  Integer promote() const {
    Integer r;
    r.big_ = new mpz_t[1];
    if (big_)
      mpz_init_set(*r.big_, *big_);
    else
      mpz_init_set_si(*r.big_, small_);
    return r;
  }
  void demote() {
    if (big_ && mpz_fits_slong_p(*big_)) {
      small_ = mpz_get_si(*big_);
      clear_big();
    }
  }
  template <typename F>
  static Integer big_op(const Integer& a, const Integer& b, F f) {
    Integer pa = a.promote(), pb = b.promote(), r;
    r.big_ = new mpz_t[1];
    mpz_init(*r.big_);
    f(*r.big_, *pa.big_, *pb.big_);
    r.demote();
    return r;
  }
  static int cmp(const Integer& a, const Integer& b) {
    if (a.is_small() && b.is_small())
      return (a.small_ > b.small_) - (a.small_ < b.small_);
    Integer pa = a.promote(), pb = b.promote();
    return mpz_cmp(*pa.big_, *pb.big_);
  }
};

// Rational number in lowest terms with positive denominator.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT
  Rational(long n) : num_(n), den_(1) {}        // NOLINT
  Rational(int n) : num_(n), den_(1) {}         // NOLINT
  Rational(Integer n, Integer d) : num_(std::move(n)), den_(std::move(d)) { reduce(); }

  const Integer& num() const { return num_; }
  const Integer& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }
  bool is_integer() const { return den_.is_one(); }
  int sign() const { return num_.sign(); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw Error("rational division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }

  Rational pow(long e) const {
    if (e >= 0) {
      return Rational(num_.pow((unsigned long)e), den_.pow((unsigned long)e));
    }
    if (is_zero()) throw Error("zero raised to a negative power");
    return Rational(den_.pow((unsigned long)(-e)), num_.pow((unsigned long)(-e)));
  }

  std::optional<Rational> sqrt_exact() const {
    if (sign() < 0) return std::nullopt;
    auto n = num_.sqrt_exact();
    auto d = den_.sqrt_exact();
    if (!n || !d) return std::nullopt;
    return Rational(*n, *d);
  }

  std::optional<Rational> nth_root_exact(unsigned long e) const {
    auto n = num_.nth_root_exact(e);
    auto d = den_.nth_root_exact(e);
    if (!n || !d) return std::nullopt;
    return Rational(*n, *d);
  }

  double to_double() const { return num_.to_double() / den_.to_double(); }

  std::string to_string() const {
    if (den_.is_one()) return num_.to_string();
    return num_.to_string() + "/" + den_.to_string();
  }

  uint64_t hash64() const { return num_.hash64() * 0x9e3779b97f4a7c15ull + den_.hash64(); }

  static Rational from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(Integer::from_string(s), Integer(1));
    return Rational(Integer::from_string(s.substr(0, slash)),
                    Integer::from_string(s.substr(slash + 1)));
  }

 private:
  Integer num_, den_;
  void reduce() {
    if (den_.is_zero()) throw Error("rational with zero denominator");
    if (num_.is_zero()) {
      den_ = Integer(1);
      return;
    }
    Integer g = gcd(num_, den_);
    num_ = div_exact(num_, g);
    den_ = div_exact(den_, g);
    if (den_.sign() < 0) {
      num_ = -num_;
      den_ = -den_;
    }
  }
};

// Element of Q(i): re + im*i with exact rational parts.
class Gaussian {
 public:
  Gaussian() = default;
  Gaussian(Rational re) : re_(std::move(re)) {}  // NOLINT
  Gaussian(long long n) : re_(n) {}              // NOLINT
  Gaussian(long n) : re_(n) {}                   // NOLINT
  Gaussian(int n) : re_(n) {}                    // NOLINT
  Gaussian(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  static Gaussian i() { return Gaussian(Rational(0), Rational(1)); }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }
  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
  bool is_one() const { return re_.is_one() && im_.is_zero(); }
  bool is_real() const { return im_.is_zero(); }

  friend Gaussian operator+(const Gaussian& a, const Gaussian& b) {
    return Gaussian(a.re_ + b.re_, a.im_ + b.im_);
  }
  friend Gaussian operator-(const Gaussian& a, const Gaussian& b) {
    return Gaussian(a.re_ - b.re_, a.im_ - b.im_);
  }
  friend Gaussian operator*(const Gaussian& a, const Gaussian& b) {
    return Gaussian(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
  }
  friend Gaussian operator/(const Gaussian& a, const Gaussian& b) {
    if (b.is_zero()) throw Error("gaussian division by zero");
    Rational n = b.re_ * b.re_ + b.im_ * b.im_;
    return Gaussian((a.re_ * b.re_ + a.im_ * b.im_) / n, (a.im_ * b.re_ - a.re_ * b.im_) / n);
  }
  Gaussian operator-() const { return Gaussian(-re_, -im_); }
  friend bool operator==(const Gaussian& a, const Gaussian& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const Gaussian& a, const Gaussian& b) { return !(a == b); }

  Gaussian pow(long e) const {
    if (e < 0) return Gaussian(1) / pow(-e);
    Gaussian r(1), base(*this);
    unsigned long k = (unsigned long)e;
    while (k) {
      if (k & 1) r = r * base;
      base = base * base;
      k >>= 1;
    }
    return r;
  }

  // Square roots inside Q(i), when they exist.
  std::optional<Gaussian> sqrt_exact() const {
    if (im_.is_zero()) {
      if (re_.sign() >= 0) {
        if (auto r = re_.sqrt_exact()) return Gaussian(*r, Rational(0));
        return std::nullopt;
      }
      if (auto r = (-re_).sqrt_exact()) return Gaussian(Rational(0), *r);
      return std::nullopt;
    }
    // (x+yi)^2 = re + im*i: x^2 = (re + |.|)/2, y = im/(2x).
    Rational norm = re_ * re_ + im_ * im_;
    auto r = norm.sqrt_exact();
    if (!r) return std::nullopt;
    Rational x2 = (re_ + *r) / Rational(2);
    auto x = x2.sqrt_exact();
    if (!x || x->is_zero()) return std::nullopt;
    Rational y = im_ / (Rational(2) * *x);
    return Gaussian(*x, y);
  }

  std::complex<double> to_complex() const { return {re_.to_double(), im_.to_double()}; }

  // All e-th roots of this value that lie in Q(i).  The Boolean is true when
  // the list is complete over the algebraic closure (exactly e roots found),
  // which makes a case split on the root sound.
  std::pair<std::vector<Gaussian>, bool> nth_roots(unsigned long e) const {
    std::vector<Gaussian> roots;
    collect_roots(*this, e, roots);
    // dedupe
    std::vector<Gaussian> out;
    for (const auto& r : roots) {
      bool dup = false;
      for (const auto& o : out)
        if (o == r) dup = true;
      if (!dup) out.push_back(r);
    }
    bool complete = (is_zero() && !out.empty()) || out.size() == e;
    return {out, complete};
  }

 private:
  static void collect_roots(const Gaussian& g, unsigned long e, std::vector<Gaussian>& out) {
    if (e == 1) {
      out.push_back(g);
      return;
    }
    if (e % 2 == 0) {
      auto s = g.sqrt_exact();
      if (!s) return;
      collect_roots(*s, e / 2, out);
      collect_roots(-*s, e / 2, out);
      return;
    }
    // odd order: rational values only
    if (!g.im_.is_zero()) return;
    bool neg = g.re_.sign() < 0;
    Rational mag = neg ? -g.re_ : g.re_;
    if (auto r = mag.nth_root_exact(e)) out.push_back(Gaussian(neg ? -*r : *r, Rational(0)));
  }

 public:

  uint64_t hash64() const { return re_.hash64() * 0x2545f4914f6cdd1dull + im_.hash64(); }

  // Plain form, e.g. "3", "-1/2", "i", "2*i", "(1-2*i)".
  std::string to_string() const {
    if (im_.is_zero()) return re_.to_string();
    std::string imag = im_.is_one() ? "i" : (im_ == Rational(-1) ? "-i" : im_.to_string() + "*i");
    if (re_.is_zero()) return imag;
    std::string out = "(" + re_.to_string();
    if (im_.sign() > 0) out += "+";
    out += imag;
    out += ")";
    return out;
  }

 private:
  Rational re_, im_;
};

}  // namespace nambu
