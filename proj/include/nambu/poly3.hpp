// poly3.hpp
// Trivariate polynomials over the Gaussian rationals, the functional
// Jacobian ternary bracket det(d f_i / d x_j), substitution endomorphisms
// f -> f о gamma for unimodular gamma, and sampling-based verification of
// the Nambu and Hom-Nambu identities on this algebra.
#pragma once

#include <array>
#include <random>

#include "nambu/verify.hpp"

namespace nambu {

class Poly3 {
 public:
  using Expo = std::array<int, 3>;

  Poly3() = default;
  Poly3(long long c) {  // NOLINT
    if (c != 0) terms_[{0, 0, 0}] = Gaussian(c);
  }
  explicit Poly3(const Gaussian& c) {
    if (!c.is_zero()) terms_[{0, 0, 0}] = c;
  }
  static Poly3 var(int i, int e = 1) {
    Poly3 p;
    Expo x{0, 0, 0};
    x[i] = e;
    p.terms_[x] = Gaussian(1);
    return p;
  }

  const std::map<Expo, Gaussian>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_one() const {
    return terms_.size() == 1 && terms_.begin()->first == Expo{0, 0, 0} &&
           terms_.begin()->second.is_one();
  }

  void add(const Expo& e, const Gaussian& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_[e] = c;
    } else {
      it->second = it->second + c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  friend Poly3 operator+(const Poly3& a, const Poly3& b) {
    Poly3 r = a;
    for (const auto& [e, c] : b.terms_) r.add(e, c);
    return r;
  }
  friend Poly3 operator-(const Poly3& a, const Poly3& b) {
    Poly3 r = a;
    for (const auto& [e, c] : b.terms_) r.add(e, -c);
    return r;
  }
  friend Poly3 operator*(const Poly3& a, const Poly3& b) {
    Poly3 r;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_)
        r.add({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
    return r;
  }
  Poly3 operator-() const {
    Poly3 r;
    for (const auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
  }
  friend bool operator==(const Poly3& a, const Poly3& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Poly3& a, const Poly3& b) { return !(a == b); }

  Poly3 partial(int i) const {
    Poly3 r;
    for (const auto& [e, c] : terms_) {
      if (e[i] == 0) continue;
      Expo d = e;
      d[i] -= 1;
      r.add(d, Gaussian((long long)e[i]) * c);
    }
    return r;
  }

  Poly3 pow(int e) const {
    Poly3 r(1);
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
  }

  // substitution x_i -> gamma_i
  Poly3 compose(const std::array<Poly3, 3>& gamma) const {
    Poly3 out;
    for (const auto& [e, c] : terms_) {
      Poly3 t{Poly3(c)};
      for (int i = 0; i < 3; ++i)
        if (e[i] != 0) t = t * gamma[i].pow(e[i]);
      out = out + t;
    }
    return out;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      if (!first) out << " + ";
      first = false;
      std::string cs = c.to_string();
      bool any = e[0] || e[1] || e[2];
      if (!any || cs != "1") out << cs << (any ? "*" : "");
      static const char* names[3] = {"x1", "x2", "x3"};
      bool started = false;
      for (int i = 0; i < 3; ++i) {
        if (!e[i]) continue;
        if (started) out << "*";
        started = true;
        out << names[i];
        if (e[i] != 1) out << "^" << e[i];
      }
    }
    return out.str();
  }

 private:
  std::map<Expo, Gaussian> terms_;
};

using Poly3Triple = std::array<Poly3, 3>;

inline Poly3Triple identity_map() {
  return {Poly3::var(0), Poly3::var(1), Poly3::var(2)};
}
// (x1 + x2^2, x2, x3): unit lower-triangular Jacobian
inline Poly3Triple shear_map() {
  return {Poly3::var(0) + Poly3::var(1, 2), Poly3::var(1), Poly3::var(2)};
}

inline Poly3 det3(const std::array<std::array<Poly3, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline std::array<std::array<Poly3, 3>, 3> jacobian_matrix(const Poly3Triple& f) {
  std::array<std::array<Poly3, 3>, 3> m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = f[i].partial(j);
  return m;
}

// det of the matrix of partials: trilinear and totally antisymmetric.
inline Poly3 jacobian_bracket(const Poly3& f1, const Poly3& f2, const Poly3& f3) {
  return det3(jacobian_matrix({f1, f2, f3}));
}

inline Poly3 compose_substitution(const Poly3& f, const Poly3Triple& gamma) {
  return f.compose(gamma);
}

inline bool unimodular_check(const Poly3Triple& gamma) {
  return det3(jacobian_matrix(gamma)).is_one();
}

// The composition-twisted Jacobian algebra: bracket rho_gamma o [.,.,.] with
// twist (rho_gamma, rho_gamma); requires det J(gamma) = 1.
struct TwistedJacobian {
  Poly3Triple gamma;

  explicit TwistedJacobian(Poly3Triple g) : gamma(std::move(g)) {
    if (!unimodular_check(gamma))
      throw Error("gamma is not unimodular: det J(gamma) = " +
                  det3(jacobian_matrix(gamma)).to_string());
  }

  Poly3 rho(const Poly3& f) const { return f.compose(gamma); }
  Poly3 bracket(const Poly3& f1, const Poly3& f2, const Poly3& f3) const {
    return rho(jacobian_bracket(f1, f2, f3));
  }

  Poly3 hfi(const Poly3& x1, const Poly3& x2, const Poly3& x3, const Poly3& x4,
            const Poly3& x5) const {
    return bracket(rho(x1), rho(x2), bracket(x3, x4, x5)) -
           bracket(bracket(x1, x2, x3), rho(x4), rho(x5)) -
           bracket(rho(x3), bracket(x1, x2, x4), rho(x5)) -
           bracket(rho(x3), rho(x4), bracket(x1, x2, x5));
  }
};

inline Poly3 jacobian_fi(const Poly3& x1, const Poly3& x2, const Poly3& x3, const Poly3& x4,
                         const Poly3& x5) {
  auto br = [](const Poly3& a, const Poly3& b, const Poly3& c) {
    return jacobian_bracket(a, b, c);
  };
  return br(x1, x2, br(x3, x4, x5)) - br(br(x1, x2, x3), x4, x5) -
         br(x3, br(x1, x2, x4), x5) - br(x3, x4, br(x1, x2, x5));
}

// deterministic random polynomial: total degree <= deg, integer
// coefficients in [-bound, bound]
inline Poly3 random_poly3(std::mt19937_64& rng, int deg, int bound) {
  std::uniform_int_distribution<int> coeff(-bound, bound);
  Poly3 p;
  for (int a = 0; a <= deg; ++a)
    for (int b = 0; a + b <= deg; ++b)
      for (int c = 0; a + b + c <= deg; ++c) {
        int v = coeff(rng);
        if (v != 0) p.add({a, b, c}, Gaussian((long long)v));
      }
  return p;
}

struct JacobianDemoReport {
  std::string gamma_name;
  size_t samples = 0;
  size_t fi_failures = 0;
  size_t hfi_failures = 0;
  std::string first_failure;
  uint64_t seed = 0;

  bool ok() const { return fi_failures == 0 && hfi_failures == 0; }
  json to_json() const {
    json j;
    j["gamma"] = gamma_name;
    j["samples"] = samples;
    j["seed"] = seed;
    j["fi_failures"] = fi_failures;
    j["hfi_failures"] = hfi_failures;
    j["ok"] = ok();
    if (!first_failure.empty()) j["first_failure"] = first_failure;
    return j;
  }
};

// FI of the plain Jacobian bracket and HFI of the gamma-twisted bracket on
// seeded random quintuples, exactly.
inline JacobianDemoReport jacobian_demo(const std::string& gamma_name, size_t samples, int degree,
                                        int bound, uint64_t seed) {
  Poly3Triple gamma;
  if (gamma_name == "identity") {
    gamma = identity_map();
  } else if (gamma_name == "shear") {
    gamma = shear_map();
  } else {
    throw Error("unknown gamma preset '" + gamma_name + "' (identity, shear)");
  }
  TwistedJacobian tw(gamma);
  JacobianDemoReport rep;
  rep.gamma_name = gamma_name;
  rep.samples = samples;
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  for (size_t s = 0; s < samples; ++s) {
    std::array<Poly3, 5> xs;
    for (auto& x : xs) x = random_poly3(rng, degree, bound);
    Poly3 fi = jacobian_fi(xs[0], xs[1], xs[2], xs[3], xs[4]);
    if (!fi.is_zero()) {
      ++rep.fi_failures;
      if (rep.first_failure.empty())
        rep.first_failure = "FI sample " + std::to_string(s) + ": " + fi.to_string();
    }
    Poly3 hfi = tw.hfi(xs[0], xs[1], xs[2], xs[3], xs[4]);
    if (!hfi.is_zero()) {
      ++rep.hfi_failures;
      if (rep.first_failure.empty())
        rep.first_failure = "HFI sample " + std::to_string(s) + ": " + hfi.to_string();
    }
  }
  return rep;
}

}  // namespace nambu
