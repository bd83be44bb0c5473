// scalar.hpp
// The exact coefficient ring: finite sums of monomials
//   gaussian * prod(sym^form)
// where each exponent is an integer-linear form in index symbols.  Constant
// forms are ordinary (Laurent) powers; q and other "unit" symbols carry
// genuinely symbolic exponents such as q^(k+m+n).  Zero test is an empty
// term map, which is sound and complete for this ring.
#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nambu/arith.hpp"

namespace nambu {

using json = nlohmann::ordered_json;

enum class SymbolKind : uint8_t {
  Param = 0,  // z, lambda1, beta2, ...: free scalar parameters
  Index = 1,  // k, m, n, u, v, ...: range over the integers
  Unit = 2,   // q and other formally invertible exponential bases
};

struct Symbol {
  SymbolKind kind;
  std::string name;

  static Symbol param(std::string n) { return {SymbolKind::Param, std::move(n)}; }
  static Symbol index(std::string n) { return {SymbolKind::Index, std::move(n)}; }
  static Symbol unit(std::string n) { return {SymbolKind::Unit, std::move(n)}; }

  friend bool operator<(const Symbol& a, const Symbol& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.name < b.name;
  }
  friend bool operator==(const Symbol& a, const Symbol& b) {
    return a.kind == b.kind && a.name == b.name;
  }
  friend bool operator!=(const Symbol& a, const Symbol& b) { return !(a == b); }
};

inline const char* kind_name(SymbolKind k) {
  switch (k) {
    case SymbolKind::Param: return "param";
    case SymbolKind::Index: return "index";
    case SymbolKind::Unit: return "unit";
  }
  return "?";
}

// constant + sum of integer*index-symbol; no zero entries stored.
struct IndexLinearForm {
  long constant = 0;
  std::map<std::string, long> coeffs;

  IndexLinearForm() = default;
  IndexLinearForm(long c) : constant(c) {}  // NOLINT
  static IndexLinearForm var(const std::string& name, long c = 1) {
    IndexLinearForm f;
    if (c != 0) f.coeffs[name] = c;
    return f;
  }

  bool is_zero() const { return constant == 0 && coeffs.empty(); }
  bool is_constant() const { return coeffs.empty(); }

  void prune() {
    for (auto it = coeffs.begin(); it != coeffs.end();)
      it = it->second == 0 ? coeffs.erase(it) : std::next(it);
  }

  friend IndexLinearForm operator+(const IndexLinearForm& a, const IndexLinearForm& b) {
    IndexLinearForm r = a;
    r.constant += b.constant;
    for (const auto& [s, c] : b.coeffs) {
      long v = (r.coeffs.count(s) ? r.coeffs[s] : 0) + c;
      if (v == 0)
        r.coeffs.erase(s);
      else
        r.coeffs[s] = v;
    }
    return r;
  }
  friend IndexLinearForm operator-(const IndexLinearForm& a, const IndexLinearForm& b) {
    return a + (b * -1);
  }
  friend IndexLinearForm operator*(const IndexLinearForm& a, long s) {
    IndexLinearForm r;
    if (s == 0) return r;
    r.constant = a.constant * s;
    for (const auto& [n, c] : a.coeffs) r.coeffs[n] = c * s;
    return r;
  }
  IndexLinearForm operator-() const { return *this * -1; }

  friend bool operator==(const IndexLinearForm& a, const IndexLinearForm& b) {
    return a.constant == b.constant && a.coeffs == b.coeffs;
  }
  friend bool operator!=(const IndexLinearForm& a, const IndexLinearForm& b) { return !(a == b); }
  friend bool operator<(const IndexLinearForm& a, const IndexLinearForm& b) {
    if (a.constant != b.constant) return a.constant < b.constant;
    return a.coeffs < b.coeffs;
  }

  // Fold integer bindings of index symbols into the constant.
  IndexLinearForm substitute(const std::map<std::string, long>& index_bindings) const {
    IndexLinearForm r;
    r.constant = constant;
    for (const auto& [s, c] : coeffs) {
      auto it = index_bindings.find(s);
      if (it != index_bindings.end())
        r.constant += c * it->second;
      else
        r.coeffs[s] = c;
    }
    return r;
  }

  long eval(const std::map<std::string, long>& index_bindings) const {
    IndexLinearForm f = substitute(index_bindings);
    if (!f.is_constant()) {
      throw Error("unbound index symbol '" + f.coeffs.begin()->first + "' in exponent");
    }
    return f.constant;
  }

  std::string to_string() const {
    if (is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [s, c] : coeffs) {
      if (c < 0) {
        out << "-";
      } else if (!first) {
        out << "+";
      }
      long a = c < 0 ? -c : c;
      if (a != 1) out << a << "*";
      out << s;
      first = false;
    }
    if (constant != 0) {
      if (!first && constant > 0) out << "+";
      out << constant;
    }
    return out.str();
  }
};

// Product of sym^form factors.  All symbols are formally invertible within a
// monomial (Laurent exponents); invertibility of the *values* is only checked
// at substitution time.
struct Monomial {
  std::map<Symbol, IndexLinearForm> powers;

  bool is_one() const { return powers.empty(); }

  void normalize() {
    for (auto it = powers.begin(); it != powers.end();) {
      it->second.prune();
      if (it->second.is_zero())
        it = powers.erase(it);
      else
        ++it;
    }
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r = a;
    for (const auto& [s, f] : b.powers) {
      auto it = r.powers.find(s);
      if (it == r.powers.end()) {
        r.powers[s] = f;
      } else {
        it->second = it->second + f;
        if (it->second.is_zero()) r.powers.erase(it);
      }
    }
    return r;
  }

  Monomial inverse() const {
    Monomial r;
    for (const auto& [s, f] : powers) r.powers[s] = -f;
    return r;
  }

  Monomial pow(long e) const {
    Monomial r;
    if (e == 0) return r;
    for (const auto& [s, f] : powers) r.powers[s] = f * e;
    return r;
  }

  bool contains(const Symbol& s) const { return powers.count(s) != 0; }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.powers == b.powers; }
  friend bool operator<(const Monomial& a, const Monomial& b) { return a.powers < b.powers; }
};

struct Bindings {
  std::map<std::string, long> index;           // index symbol -> integer
  std::map<std::string, class Scalar> values;  // param/unit symbol -> scalar value
};

struct NumericBindings {
  std::map<std::string, long> index;
  std::map<std::string, std::complex<double>> values;
};

class Scalar {
 public:
  Scalar() = default;
  Scalar(long long n) { init_const(Gaussian(n)); }  // NOLINT
  Scalar(int n) { init_const(Gaussian(n)); }        // NOLINT
  Scalar(const Rational& r) { init_const(Gaussian(r)); }
  Scalar(const Gaussian& g) { init_const(g); }  // NOLINT

  static Scalar zero() { return Scalar(); }
  static Scalar one() { return Scalar(1); }
  static Scalar i() { return Scalar(Gaussian::i()); }
  static Scalar sym(const Symbol& s, long e = 1) {
    Scalar r;
    if (e == 0) return one();
    Monomial m;
    m.powers[s] = IndexLinearForm(e);
    r.terms_[m] = Gaussian(1);
    return r;
  }
  // base^form, e.g. q^(k+m+n)
  static Scalar expo(const Symbol& base, const IndexLinearForm& f) {
    IndexLinearForm ff = f;
    ff.prune();
    if (ff.is_zero()) return one();
    Scalar r;
    Monomial m;
    m.powers[base] = ff;
    r.terms_[m] = Gaussian(1);
    return r;
  }
  // Linear form as a polynomial in its index symbols.
  static Scalar from_form(const IndexLinearForm& f) {
    Scalar r = Scalar(Gaussian((long long)f.constant));
    for (const auto& [name, c] : f.coeffs) r = r + Scalar((long long)c) * sym(Symbol::index(name));
    return r;
  }
  static Scalar term(const Monomial& m, const Gaussian& c) {
    Scalar r;
    if (!c.is_zero()) {
      Monomial mm = m;
      mm.normalize();
      r.terms_[mm] = c;
    }
    return r;
  }

  const std::map<Monomial, Gaussian>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
  }
  // Defined only when is_constant().
  Gaussian constant_value() const {
    if (terms_.empty()) return Gaussian(0);
    if (!is_constant()) throw Error("scalar is not constant: " + to_string());
    return terms_.begin()->second;
  }
  bool is_monomial() const { return terms_.size() == 1; }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    Scalar r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) {
    Scalar r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
    return r;
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    Scalar r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }
  Scalar operator-() const {
    Scalar r;
    for (const auto& [m, c] : terms_) r.terms_[m] = -c;
    return r;
  }
  friend bool operator==(const Scalar& a, const Scalar& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }
  friend bool operator<(const Scalar& a, const Scalar& b) {
    auto ia = a.terms_.begin(), ib = b.terms_.begin();
    for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
      if (ia->first < ib->first) return true;
      if (ib->first < ia->first) return false;
      // same monomial: order by coefficient string (rarely reached)
      std::string sa = ia->second.to_string(), sb = ib->second.to_string();
      if (sa != sb) return sa < sb;
    }
    return ia == a.terms_.end() && ib != b.terms_.end();
  }

  // Multiplicative inverse of a single-term scalar.
  Scalar inverse() const {
    if (terms_.size() != 1) throw Error("cannot invert non-monomial scalar: " + to_string());
    const auto& [m, c] = *terms_.begin();
    return term(m.inverse(), Gaussian(1) / c);
  }

  Scalar pow(long e) const {
    if (e == 0) return one();
    if (e < 0) return inverse().pow(-e);
    Scalar r = one(), base = *this;
    unsigned long k = (unsigned long)e;
    while (k) {
      if (k & 1) r = r * base;
      base = base * base;
      k >>= 1;
    }
    return r;
  }

  std::vector<Symbol> free_symbols() const {
    std::map<Symbol, bool> seen;
    for (const auto& [m, c] : terms_) {
      (void)c;
      for (const auto& [s, f] : m.powers) {
        seen[s] = true;
        for (const auto& [iname, ic] : f.coeffs) {
          (void)ic;
          seen[Symbol::index(iname)] = true;
        }
      }
    }
    std::vector<Symbol> out;
    for (const auto& [s, b] : seen) {
      (void)b;
      out.push_back(s);
    }
    return out;
  }

  bool mentions(const Symbol& s) const {
    for (const auto& [m, c] : terms_) {
      (void)c;
      if (m.powers.count(s)) return true;
      if (s.kind == SymbolKind::Index)
        for (const auto& [sy, f] : m.powers)
          if (f.coeffs.count(s.name)) return true;
    }
    return false;
  }

  // Exact substitution; a ring homomorphism on its domain.  Index symbols
  // take integer values, param/unit symbols take scalar values.  Binding a
  // unit symbol (q) to zero is rejected.  Binding a base with a symbolic
  // exponent is only possible for the value 1 or a plain symbol.
  Scalar substitute(const Bindings& b) const {
    Scalar out;
    for (const auto& [mono, coeff] : terms_) {
      Scalar acc = Scalar(coeff);
      Monomial keep;
      for (const auto& [s, f0] : mono.powers) {
        IndexLinearForm f = f0.substitute(b.index);
        if (f.is_zero()) continue;
        if (s.kind == SymbolKind::Index) {
          auto it = b.index.find(s.name);
          if (it == b.index.end()) {
            keep.powers[s] = keep.powers.count(s) ? keep.powers[s] + f : f;
            continue;
          }
          if (!f.is_constant())
            throw Error("index symbol '" + s.name + "' with non-constant exponent");
          long v = it->second;
          if (v == 0 && f.constant < 0) throw Error("zero raised to a negative power");
          acc = acc * Scalar(Gaussian(Rational(v)).pow(f.constant));
          continue;
        }
        auto it = b.values.find(s.name);
        if (it == b.values.end()) {
          keep.powers[s] = keep.powers.count(s) ? keep.powers[s] + f : f;
          continue;
        }
        const Scalar& val = it->second;
        if (s.kind == SymbolKind::Unit && val.is_zero())
          throw Error("unit symbol '" + s.name + "' bound to 0");
        if (f.is_constant()) {
          acc = acc * val.pow(f.constant);
          continue;
        }
        // symbolic exponent
        if (val == one()) continue;
        if (val.terms_.size() == 1 && val.terms_.begin()->second.is_one() &&
            val.terms_.begin()->first.powers.size() == 1) {
          const auto& [ns, nf] = *val.terms_.begin()->first.powers.begin();
          if (nf == IndexLinearForm(1)) {
            keep.powers[ns] = keep.powers.count(ns) ? keep.powers[ns] + f : f;
            continue;
          }
        }
        throw Error("cannot bind '" + s.name + "' (symbolic exponent) to value " +
                    val.to_string());
      }
      keep.normalize();
      out = out + acc * term(keep, Gaussian(1));
    }
    return out;
  }

  std::complex<double> evaluate(const NumericBindings& b) const {
    std::complex<double> total = 0.0;
    for (const auto& [mono, coeff] : terms_) {
      std::complex<double> t = coeff.to_complex();
      for (const auto& [s, f] : mono.powers) {
        long e = 0;
        if (f.is_constant()) {
          e = f.constant;
        } else {
          IndexLinearForm ff = f.substitute(b.index);
          if (!ff.is_constant())
            throw Error("unbound index symbol '" + ff.coeffs.begin()->first + "'");
          e = ff.constant;
        }
        std::complex<double> base;
        if (s.kind == SymbolKind::Index) {
          auto it = b.index.find(s.name);
          if (it == b.index.end()) throw Error("unbound symbol '" + s.name + "'");
          base = (double)it->second;
        } else {
          auto it = b.values.find(s.name);
          if (it == b.values.end()) throw Error("unbound symbol '" + s.name + "'");
          base = it->second;
        }
        t *= ipow(base, e);
      }
      total += t;
    }
    return total;
  }

  // Canonical text, deterministic given the term order, e.g.
  //   "(-2)*q^(k+m+n)*u*z + 2*q^(k+m+n)*v*z"
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      Gaussian coeff = c;
      bool neg = coeff.is_real() ? coeff.re().sign() < 0
                                 : (coeff.re().is_zero() && coeff.im().sign() < 0);
      if (neg) coeff = -coeff;
      if (first) {
        if (neg) out << "-";
      } else {
        out << (neg ? " - " : " + ");
      }
      first = false;
      std::vector<std::string> factors;
      for (const auto& [s, f] : m.powers) {
        if (f.is_constant()) {
          if (f.constant == 1)
            factors.push_back(s.name);
          else
            factors.push_back(s.name + "^" + std::to_string(f.constant));
        } else {
          factors.push_back(s.name + "^(" + f.to_string() + ")");
        }
      }
      if (factors.empty()) {
        out << coeff.to_string();
      } else {
        if (!coeff.is_one()) out << coeff.to_string() << "*";
        for (size_t i = 0; i < factors.size(); ++i) {
          if (i) out << "*";
          out << factors[i];
        }
      }
    }
    return out.str();
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& [m, c] : terms_) {
      json t;
      t["c"] = {{"re", c.re().to_string()}, {"im", c.im().to_string()}};
      json facs = json::array();
      for (const auto& [s, f] : m.powers) {
        json fac;
        fac["s"] = s.name;
        fac["k"] = kind_name(s.kind);
        fac["e"] = {{"c", f.constant}, {"t", json::object()}};
        for (const auto& [name, cc] : f.coeffs) fac["e"]["t"][name] = cc;
        facs.push_back(fac);
      }
      t["m"] = facs;
      arr.push_back(t);
    }
    return arr;
  }

  static Scalar from_json(const json& arr) {
    Scalar out;
    for (const auto& t : arr) {
      Gaussian c(Rational::from_string(t.at("c").at("re").get<std::string>()),
                 Rational::from_string(t.at("c").at("im").get<std::string>()));
      Monomial m;
      for (const auto& fac : t.at("m")) {
        std::string kname = fac.at("k").get<std::string>();
        SymbolKind kind = kname == "index"  ? SymbolKind::Index
                          : kname == "unit" ? SymbolKind::Unit
                                            : SymbolKind::Param;
        Symbol s{kind, fac.at("s").get<std::string>()};
        IndexLinearForm f(fac.at("e").at("c").get<long>());
        for (auto it = fac.at("e").at("t").begin(); it != fac.at("e").at("t").end(); ++it)
          f.coeffs[it.key()] = it.value().get<long>();
        m.powers[s] = f;
      }
      m.normalize();
      out.add_term(m, c);
    }
    return out;
  }

  static Scalar parse(const std::string& text);

  static std::complex<double> ipow(std::complex<double> b, long e) {
    if (e < 0) return 1.0 / ipow(b, -e);
    std::complex<double> r = 1.0;
    while (e) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }

 private:
  std::map<Monomial, Gaussian> terms_;

  void init_const(const Gaussian& g) {
    if (!g.is_zero()) terms_[Monomial{}] = g;
  }
  void add_term(const Monomial& m, const Gaussian& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_[m] = c;
    } else {
      it->second = it->second + c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }
};

namespace detail {

// Default name->kind convention used by the text parser: q, q0..q9 and rho
// are unit symbols, the usual index letters (and numbered variants) are
// indices, everything else is a parameter.  "i" is the imaginary unit.
inline Symbol default_symbol(const std::string& name) {
  if (name == "q" || name == "rho" || (name.size() == 2 && name[0] == 'q' && isdigit(name[1])))
    return Symbol::unit(name);
  static const std::string idx = "kmnuvw";
  if (!name.empty() && idx.find(name[0]) != std::string::npos &&
      (name.size() == 1 ||
       std::all_of(name.begin() + 1, name.end(), [](char c) { return isdigit(c); })))
    return Symbol::index(name);
  return Symbol::param(name);
}

class ScalarParser {
 public:
  explicit ScalarParser(const std::string& s) : s_(s) {}

  Scalar parse() {
    Scalar r = expr();
    skip_ws();
    if (pos_ != s_.size()) throw Error("trailing input in scalar literal: '" + s_ + "'");
    return r;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && isspace((unsigned char)s_[pos_])) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  Scalar expr() {
    bool neg = false;
    skip_ws();
    if (eat('-'))
      neg = true;
    else
      eat('+');
    Scalar r = product();
    if (neg) r = -r;
    while (true) {
      skip_ws();
      if (eat('+')) {
        r = r + product();
      } else if (eat('-')) {
        r = r - product();
      } else {
        break;
      }
    }
    return r;
  }

  Scalar product() {
    Scalar r = factor();
    while (true) {
      skip_ws();
      if (eat('*')) {
        r = r * factor();
      } else if (eat('/')) {
        Scalar d = factor();
        r = r * d.inverse();
      } else {
        break;
      }
    }
    return r;
  }

  Scalar factor() {
    Scalar base = atom();
    skip_ws();
    if (eat('^')) {
      // exponent: integer, or parenthesized expression
      skip_ws();
      bool paren = peek() == '(';
      Scalar e = paren ? (eat('('), parse_exponent_group()) : atom_integer();
      if (e.is_constant()) {
        Gaussian g = e.constant_value();
        if (!g.is_real() || !g.re().is_integer())
          throw Error("non-integer exponent in scalar literal");
        return base.pow(g.re().num().to_long());
      }
      // symbolic exponent: base must be a bare symbol, exponent a linear form
      IndexLinearForm f = to_form(e);
      if (base.terms().size() != 1 || !base.terms().begin()->second.is_one() ||
          base.terms().begin()->first.powers.size() != 1 ||
          base.terms().begin()->first.powers.begin()->second != IndexLinearForm(1))
        throw Error("symbolic exponent requires a plain symbol base");
      return Scalar::expo(base.terms().begin()->first.powers.begin()->first, f);
    }
    return base;
  }

  Scalar parse_exponent_group() {
    Scalar e = expr();
    if (!eat(')')) throw Error("expected ')' in exponent");
    return e;
  }

  Scalar atom_integer() {
    skip_ws();
    bool neg = eat('-');
    std::string digits;
    while (pos_ < s_.size() && isdigit((unsigned char)s_[pos_])) digits += s_[pos_++];
    if (digits.empty()) throw Error("expected integer exponent");
    Scalar v(Rational(Integer::from_string(digits), Integer(1)));
    return neg ? -v : v;
  }

  Scalar atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw Error("unexpected end of scalar literal");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Scalar r = expr();
      if (!eat(')')) throw Error("expected ')'");
      return r;
    }
    if (isdigit((unsigned char)c)) {
      std::string digits;
      while (pos_ < s_.size() && isdigit((unsigned char)s_[pos_])) digits += s_[pos_++];
      return Scalar(Rational(Integer::from_string(digits), Integer(1)));
    }
    if (isalpha((unsigned char)c) || c == '_') {
      std::string name;
      while (pos_ < s_.size() &&
             (isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_'))
        name += s_[pos_++];
      if (name == "i") return Scalar::i();
      return Scalar::sym(default_symbol(name));
    }
    throw Error(std::string("unexpected character '") + c + "' in scalar literal");
  }

  static IndexLinearForm to_form(const Scalar& s) {
    IndexLinearForm f;
    for (const auto& [m, c] : s.terms()) {
      if (!c.is_real() || !c.re().is_integer())
        throw Error("exponent form needs integer coefficients");
      long v = c.re().num().to_long();
      if (m.powers.empty()) {
        f.constant += v;
      } else if (m.powers.size() == 1 && m.powers.begin()->first.kind == SymbolKind::Index &&
                 m.powers.begin()->second == IndexLinearForm(1)) {
        f.coeffs[m.powers.begin()->first.name] += v;
        if (f.coeffs[m.powers.begin()->first.name] == 0)
          f.coeffs.erase(m.powers.begin()->first.name);
      } else {
        throw Error("exponent is not a linear form in index symbols");
      }
    }
    return f;
  }
};

}  // namespace detail

inline Scalar Scalar::parse(const std::string& text) {
  return detail::ScalarParser(text).parse();
}

}  // namespace nambu
