// diff_op.hpp
// Normal-ordered differential operators e^{imx} p(D) with D = -i d/dx.
// The product rule
//   (m, p) * (n, r) = (m+n, p(D+n) r(D))
// is the shift law D e^{inx} = e^{inx}(D+n) applied once; everything else
// is plain polynomial algebra over the exact scalar ring.
#pragma once

#include "nambu/verify.hpp"

namespace nambu {

// Polynomial in the formal symbol D with scalar coefficients.
class DPoly {
 public:
  DPoly() = default;
  explicit DPoly(const Scalar& c) {
    if (!c.is_zero()) coeffs_[0] = c;
  }
  static DPoly d(long power = 1, const Scalar& c = Scalar::one()) {
    DPoly p;
    if (!c.is_zero()) p.coeffs_[power] = c;
    return p;
  }

  const std::map<long, Scalar>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  long degree() const { return coeffs_.empty() ? -1 : coeffs_.rbegin()->first; }

  void add(long power, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = coeffs_.find(power);
    if (it == coeffs_.end()) {
      coeffs_[power] = c;
    } else {
      it->second = it->second + c;
      if (it->second.is_zero()) coeffs_.erase(it);
    }
  }

  friend DPoly operator+(const DPoly& a, const DPoly& b) {
    DPoly r = a;
    for (const auto& [p, c] : b.coeffs_) r.add(p, c);
    return r;
  }
  friend DPoly operator-(const DPoly& a, const DPoly& b) {
    DPoly r = a;
    for (const auto& [p, c] : b.coeffs_) r.add(p, -c);
    return r;
  }
  friend DPoly operator*(const DPoly& a, const DPoly& b) {
    DPoly r;
    for (const auto& [pa, ca] : a.coeffs_)
      for (const auto& [pb, cb] : b.coeffs_) r.add(pa + pb, ca * cb);
    return r;
  }
  friend DPoly operator*(const Scalar& s, const DPoly& a) {
    DPoly r;
    for (const auto& [p, c] : a.coeffs_) r.add(p, s * c);
    return r;
  }
  friend bool operator==(const DPoly& a, const DPoly& b) { return a.coeffs_ == b.coeffs_; }

  // p(D + shift) via binomial expansion; shift is an index form.
  DPoly shifted(const IndexLinearForm& shift) const {
    if (shift.is_zero()) return *this;
    Scalar s = Scalar::from_form(shift);
    DPoly out;
    for (const auto& [p, c] : coeffs_) {
      // (D + s)^p
      std::vector<Scalar> binom(p + 1);
      Scalar spow = Scalar::one();
      Integer ck(1);
      for (long i = p; i >= 0; --i) {
        // C(p, i) * s^(p-i), walking down from i = p
        binom[i] = Scalar(Rational(ck, Integer(1))) * spow;
        if (i > 0) {
          ck = div_exact(ck * Integer(i), Integer(p - i + 1));
          spow = spow * s;
        }
      }
      for (long i = 0; i <= p; ++i) out.add(i, c * binom[i]);
    }
    return out;
  }

  std::string to_string() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
      if (!first) out << " + ";
      first = false;
      std::string cs = it->second.to_string();
      if (it->first == 0) {
        out << (it->second.terms().size() > 1 ? "(" + cs + ")" : cs);
      } else {
        if (cs != "1") out << (it->second.terms().size() > 1 ? "(" + cs + ")" : cs) << "*";
        out << "D";
        if (it->first != 1) out << "^" << it->first;
      }
    }
    return out.str();
  }

 private:
  std::map<long, Scalar> coeffs_;
};

// Finite sum of modes e^{imx} p_m(D); canonical, no zero polynomials.
class DiffOp {
 public:
  DiffOp() = default;
  DiffOp(const IndexLinearForm& mode, const DPoly& p) { add(mode, p); }

  // E_m = e^{imx}
  static DiffOp exp_op(const IndexLinearForm& m) { return DiffOp(m, DPoly(Scalar::one())); }
  // L_m = e^{imx} (D + lambda m)
  static DiffOp l_op(const IndexLinearForm& m, const Scalar& lambda) {
    DPoly p = DPoly::d(1) + DPoly(lambda * Scalar::from_form(m));
    return DiffOp(m, p);
  }
  // S_m = e^{imx} (D + lambda m)^2
  static DiffOp s_op(const IndexLinearForm& m, const Scalar& lambda) {
    DPoly lin = DPoly::d(1) + DPoly(lambda * Scalar::from_form(m));
    return DiffOp(m, lin * lin);
  }

  const std::map<IndexLinearForm, DPoly>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const IndexLinearForm& mode, const DPoly& p) {
    if (p.is_zero()) return;
    auto it = terms_.find(mode);
    if (it == terms_.end()) {
      terms_[mode] = p;
    } else {
      it->second = it->second + p;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  friend DiffOp operator+(const DiffOp& a, const DiffOp& b) {
    DiffOp r = a;
    for (const auto& [m, p] : b.terms_) r.add(m, p);
    return r;
  }
  friend DiffOp operator-(const DiffOp& a, const DiffOp& b) {
    DiffOp r = a;
    for (const auto& [m, p] : b.terms_) r.add(m, Scalar(-1) * p);
    return r;
  }
  friend DiffOp operator*(const Scalar& s, const DiffOp& a) {
    DiffOp r;
    for (const auto& [m, p] : a.terms_) r.add(m, s * p);
    return r;
  }
  // normal-ordered product
  friend DiffOp operator*(const DiffOp& a, const DiffOp& b) {
    DiffOp r;
    for (const auto& [ma, pa] : a.terms_)
      for (const auto& [mb, pb] : b.terms_) r.add(ma + mb, pa.shifted(mb) * pb);
    return r;
  }
  friend bool operator==(const DiffOp& a, const DiffOp& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const DiffOp& a, const DiffOp& b) { return !(a == b); }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [m, p] : terms_) {
      if (!first) out << " + ";
      first = false;
      out << "e[" << m.to_string() << "]*(" << p.to_string() << ")";
    }
    return out.str();
  }

 private:
  std::map<IndexLinearForm, DPoly> terms_;
};

inline DiffOp commutator(const DiffOp& a, const DiffOp& b) { return a * b - b * a; }

// [x,y,z] = x[y,z] + y[z,x] + z[x,y]
inline DiffOp ternary_commutator(const DiffOp& x, const DiffOp& y, const DiffOp& z) {
  return x * commutator(y, z) + y * commutator(z, x) + z * commutator(x, y);
}

// S_m = L_m E_{-m} L_m, checked with symbolic m and lambda.
inline Report verify_s_identity() {
  Report rep;
  rep.algebra = "larsson-operators";
  rep.mode = "s-identity";
  Scalar lambda = Scalar::sym(Symbol::param("lambda"));
  IndexLinearForm m = IndexLinearForm::var("m");
  DiffOp lhs = DiffOp::l_op(m, lambda) * DiffOp::exp_op(-m) * DiffOp::l_op(m, lambda);
  DiffOp rhs = DiffOp::s_op(m, lambda);
  DiffOp diff = lhs - rhs;
  if (!diff.is_zero()) {
    Violation v;
    v.pattern = "S_m = L_m E_-m L_m";
    v.value = diff.to_string();
    rep.violations.push_back(std::move(v));
    ++rep.violation_count;
  }
  return rep;
}

// The four ternary relations of the E/L realization, fully symbolic:
//   [L_k,L_m,L_n] = (lambda-lambda^2)(k-m)(m-n)(n-k) E_{k+m+n}
//   [L_k,L_m,E_n] = (m-k)(L_{k+m+n} + (1-2 lambda) n E_{k+m+n})
//   [L_k,E_m,E_n] = (m-n) E_{k+m+n}
//   [E_k,E_m,E_n] = 0
inline Report verify_larsson_relations() {
  Report rep;
  rep.algebra = "larsson-operators";
  rep.mode = "ternary-relations";
  Scalar lam = Scalar::sym(Symbol::param("lambda"));
  IndexLinearForm k = IndexLinearForm::var("k"), m = IndexLinearForm::var("m"),
                  n = IndexLinearForm::var("n");
  IndexLinearForm sum = k + m + n;
  auto sf = [](const IndexLinearForm& f) { return Scalar::from_form(f); };
  auto L = [&](const IndexLinearForm& d) { return DiffOp::l_op(d, lam); };
  auto E = [&](const IndexLinearForm& d) { return DiffOp::exp_op(d); };

  struct Case {
    std::string name;
    DiffOp lhs, rhs;
  };
  std::vector<Case> cases;
  cases.push_back({"[L,L,L]", ternary_commutator(L(k), L(m), L(n)),
                   ((lam - lam * lam) * sf(k - m) * sf(m - n) * sf(n - k)) * E(sum)});
  cases.push_back({"[L,L,E]", ternary_commutator(L(k), L(m), E(n)),
                   sf(m - k) * (L(sum) + ((Scalar::one() - Scalar(2) * lam) * sf(n)) * E(sum))});
  cases.push_back({"[L,E,E]", ternary_commutator(L(k), E(m), E(n)), sf(m - n) * E(sum)});
  cases.push_back({"[E,E,E]", ternary_commutator(E(k), E(m), E(n)), DiffOp()});
  for (auto& c : cases) {
    DiffOp diff = c.lhs - c.rhs;
    if (!diff.is_zero()) {
      Violation v;
      v.pattern = c.name;
      v.value = diff.to_string();
      rep.violations.push_back(std::move(v));
      ++rep.violation_count;
    }
  }
  return rep;
}

}  // namespace nambu
