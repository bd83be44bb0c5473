// vw_family.hpp
// The concrete ternary algebras: the Curtright-Fairlie-Zachos (ternary
// Virasoro-Witt) algebra with parameter z, its q-deformation, and the
// naive ternary Witt bracket, plus the scaling and beta twisting maps and
// the endomorphism-composition construction.
//
// Each built-in algebra also installs a hand-written numeric rule used by
// the exhaustive window oracle; that path shares no code with the symbolic
// bracket expansion.
#pragma once

#include "nambu/morphisms.hpp"

namespace nambu {

namespace detail {

inline Scalar sf(const IndexLinearForm& f) { return Scalar::from_form(f); }

// base^form for a scalar base: either the base is a plain symbol, or the
// form must be constant.
inline Scalar scalar_pow_form(const Scalar& base, const IndexLinearForm& f) {
  if (f.is_zero()) return Scalar::one();
  if (base.terms().size() == 1 && base.terms().begin()->second.is_one() &&
      base.terms().begin()->first.powers.size() == 1 &&
      base.terms().begin()->first.powers.begin()->second == IndexLinearForm(1)) {
    return Scalar::expo(base.terms().begin()->first.powers.begin()->first, f);
  }
  if (f.is_constant()) return base.pow(f.constant);
  throw Error("cannot raise " + base.to_string() + " to symbolic exponent " + f.to_string());
}

// Resolve a constructor parameter to an exact value under the oracle's
// bindings (works for both symbolic and already-numeric parameters).
inline Gaussian resolve_param(const Scalar& p, const ParamBindings& pb) {
  Bindings b;
  for (const auto& [name, val] : pb.values) b.values[name] = Scalar(val);
  Scalar v = p.substitute(b);
  if (!v.is_constant())
    throw Error("parameter " + p.to_string() + " not fully bound for the window oracle");
  return v.constant_value();
}

struct PowCache {
  Gaussian base;
  long lo, hi;
  std::vector<Gaussian> tab;
  PowCache(const Gaussian& b, long l, long h) : base(b), lo(l), hi(h) {
    tab.reserve(hi - lo + 1);
    for (long e = lo; e <= hi; ++e) tab.push_back(base.pow(e));
  }
  const Gaussian& get(long e) const {
    if (e >= lo && e <= hi) return tab[(size_t)(e - lo)];
    static thread_local Gaussian fallback;
    fallback = base.pow(e);
    return fallback;
  }
};

}  // namespace detail

inline Symbol q_symbol() { return Symbol::unit("q"); }
inline Scalar q_scalar() { return Scalar::sym(q_symbol()); }
inline Scalar z_scalar() { return Scalar::sym(Symbol::param("z")); }

// [Q_k,Q_m,Q_n] = (k-m)(m-n)(k-n) R_{k+m+n}
// [Q_k,Q_m,R_n] = (k-m)(Q_{k+m+n} + z n R_{k+m+n})
// [Q_k,R_m,R_n] = (n-m) R_{k+m+n}
// [R_k,R_m,R_n] = 0
inline Algebra cfz_algebra(const Scalar& z) {
  using detail::sf;
  Algebra a;
  a.name = "cfz";
  a.families = {"Q", "R"};
  for (const Symbol& s : z.free_symbols())
    if (s.kind != SymbolKind::Index) a.parameters.push_back(s.name);
  a.set_rule("Q", "Q", "Q",
             [](const IndexLinearForm& k, const IndexLinearForm& m, const IndexLinearForm& n) {
               Element e;
               e.add(Generator("R", k + m + n), sf(k - m) * sf(m - n) * sf(k - n));
               return e;
             });
  a.set_rule("Q", "Q", "R",
             [z](const IndexLinearForm& k, const IndexLinearForm& m, const IndexLinearForm& n) {
               Element e;
               Scalar c = sf(k - m);
               e.add(Generator("Q", k + m + n), c);
               e.add(Generator("R", k + m + n), c * z * sf(n));
               return e;
             });
  a.set_rule("Q", "R", "R",
             [](const IndexLinearForm& k, const IndexLinearForm& m, const IndexLinearForm& n) {
               Element e;
               e.add(Generator("R", k + m + n), sf(n - m));
               return e;
             });
  a.set_rule("R", "R", "R",
             [](const IndexLinearForm&, const IndexLinearForm&, const IndexLinearForm&) {
               return Element();
             });
  a.numeric_rule_factory = [z](const ParamBindings& pb) -> NumericRuleFn {
    Gaussian zv = detail::resolve_param(z, pb);
    return [zv](const std::array<int, 3>& r, const std::array<long, 3>& d, const Gaussian& s,
                std::vector<NumericTerm>& out) {
      long k = d[0], m = d[1], n = d[2], sum = k + m + n;
      int pat = r[0] * 4 + r[1] * 2 + r[2];  // 0=QQQ, 1=QQR, 3=QRR, 7=RRR
      if (pat == 0) {
        Gaussian c = s * Gaussian((k - m) * (m - n) * (k - n));
        if (!c.is_zero()) out.push_back({1, sum, c});
      } else if (pat == 1) {
        Gaussian c = s * Gaussian(k - m);
        if (c.is_zero()) return;
        out.push_back({0, sum, c});
        Gaussian cz = c * zv * Gaussian(n);
        if (!cz.is_zero()) out.push_back({1, sum, cz});
      } else if (pat == 3) {
        Gaussian c = s * Gaussian(n - m);
        if (!c.is_zero()) out.push_back({1, sum, c});
      }
    };
  };
  return a;
}

// The q-deformation: every CFZ structure constant times q^{k+m+n}.
inline Algebra qvw_algebra(const Scalar& z, const Scalar& q) {
  using detail::scalar_pow_form;
  using detail::sf;
  if (q.is_zero()) throw Error("q = 0 gives the zero ternary algebra and is rejected");
  Algebra a;
  a.name = "qvw";
  a.families = {"Q", "R"};
  for (const Scalar* p : {&z, &q})
    for (const Symbol& s : p->free_symbols())
      if (s.kind != SymbolKind::Index) a.parameters.push_back(s.name);
  a.set_rule("Q", "Q", "Q",
             [q](const IndexLinearForm& k, const IndexLinearForm& m, const IndexLinearForm& n) {
               Element e;
               e.add(Generator("R", k + m + n),
                     scalar_pow_form(q, k + m + n) * sf(k - m) * sf(m - n) * sf(k - n));
               return e;
             });
  a.set_rule("Q", "Q", "R",
             [z, q](const IndexLinearForm& k, const IndexLinearForm& m,
                    const IndexLinearForm& n) {
               Element e;
               Scalar c = scalar_pow_form(q, k + m + n) * sf(k - m);
               e.add(Generator("Q", k + m + n), c);
               e.add(Generator("R", k + m + n), c * z * sf(n));
               return e;
             });
  a.set_rule("Q", "R", "R",
             [q](const IndexLinearForm& k, const IndexLinearForm& m, const IndexLinearForm& n) {
               Element e;
               e.add(Generator("R", k + m + n), scalar_pow_form(q, k + m + n) * sf(n - m));
               return e;
             });
  a.set_rule("R", "R", "R",
             [](const IndexLinearForm&, const IndexLinearForm&, const IndexLinearForm&) {
               return Element();
             });
  a.numeric_rule_factory = [z, q](const ParamBindings& pb) -> NumericRuleFn {
    Gaussian zv = detail::resolve_param(z, pb);
    Gaussian qv = detail::resolve_param(q, pb);
    if (qv.is_zero()) throw Error("q = 0 rejected");
    auto cache = std::make_shared<detail::PowCache>(qv, -96, 96);
    return [zv, cache](const std::array<int, 3>& r, const std::array<long, 3>& d,
                       const Gaussian& s, std::vector<NumericTerm>& out) {
      long k = d[0], m = d[1], n = d[2], sum = k + m + n;
      int pat = r[0] * 4 + r[1] * 2 + r[2];
      if (pat == 7) return;
      Gaussian qs = s * cache->get(sum);
      if (pat == 0) {
        Gaussian c = qs * Gaussian((k - m) * (m - n) * (k - n));
        if (!c.is_zero()) out.push_back({1, sum, c});
      } else if (pat == 1) {
        Gaussian c = qs * Gaussian(k - m);
        if (c.is_zero()) return;
        out.push_back({0, sum, c});
        Gaussian cz = c * zv * Gaussian(n);
        if (!cz.is_zero()) out.push_back({1, sum, cz});
      } else if (pat == 3) {
        Gaussian c = qs * Gaussian(n - m);
        if (!c.is_zero()) out.push_back({1, sum, c});
      }
    };
  };
  return a;
}

// [Q_k,Q_m,Q_n] = (m-k)(n-m)(n-k) Q_{k+m+n}: the would-be ternary Witt
// bracket, which fails the Nambu identity.
inline Algebra naive_witt_algebra() {
  using detail::sf;
  Algebra a;
  a.name = "witt";
  a.families = {"Q"};
  a.set_rule("Q", "Q", "Q",
             [](const IndexLinearForm& k, const IndexLinearForm& m, const IndexLinearForm& n) {
               Element e;
               e.add(Generator("Q", k + m + n), sf(m - k) * sf(n - m) * sf(n - k));
               return e;
             });
  a.numeric_rule_factory = [](const ParamBindings&) -> NumericRuleFn {
    return [](const std::array<int, 3>&, const std::array<long, 3>& d, const Gaussian& s,
              std::vector<NumericTerm>& out) {
      long k = d[0], m = d[1], n = d[2];
      Gaussian c = s * Gaussian((m - k) * (n - m) * (n - k));
      if (!c.is_zero()) out.push_back({0, k + m + n, c});
    };
  };
  return a;
}

// alpha_i(Q_n) = lambda_i q^n Q_n, alpha_i(R_n) = lambda_i q^n R_n
inline TwistPair scaling_twist(const Scalar& lambda1, const Scalar& lambda2,
                               const Symbol& base = q_symbol()) {
  TwistPair t;
  t.name = "scaling";
  for (const std::string& fam : {std::string("Q"), std::string("R")}) {
    t.alpha1.add_rule(fam, LinearMap::Rule(fam, lambda1, base, 1));
    t.alpha2.add_rule(fam, LinearMap::Rule(fam, lambda2, base, 1));
  }
  return t;
}

// alpha_i(Q_n) = beta_i q^n R_n, alpha_i(R_n) = 0; nilpotent of order 2.
inline TwistPair beta_twist(const Scalar& beta1, const Scalar& beta2,
                            const Symbol& base = q_symbol()) {
  TwistPair t;
  t.name = "beta";
  t.alpha1.add_rule("Q", LinearMap::Rule("R", beta1, base, 1));
  t.alpha2.add_rule("Q", LinearMap::Rule("R", beta2, base, 1));
  return t;
}

// The composition construction: rho a verified endomorphism, new bracket
// rho o [.,.,.], twist (rho, rho).
inline std::pair<Algebra, TwistPair> compose_twist(const Algebra& a, const LinearMap& rho) {
  Report hom = is_homomorphism(a, rho);
  if (!hom.ok()) {
    const Violation& v = hom.violations.front();
    throw Error("rho is not an endomorphism of " + a.name + ": pattern (" + v.pattern +
                ") has residual " + v.residual.to_string());
  }
  Algebra out;
  out.name = a.name + "_composed";
  out.families = a.families;
  out.parameters = a.parameters;
  for (const auto& [fam, rules] : rho.rules())
    for (const auto& r : rules) {
      for (const Symbol& s : r.amplitude.free_symbols())
        if (s.kind != SymbolKind::Index) out.parameters.push_back(s.name);
      if (r.base) out.parameters.push_back(r.base->name);
    }
  for (const auto& tri : a.canonical_triples()) {
    RuleFn base = a.rule(tri[0], tri[1], tri[2]);
    out.set_rule(tri[0], tri[1], tri[2],
                 [base, rho](const IndexLinearForm& k, const IndexLinearForm& m,
                             const IndexLinearForm& n) { return rho.apply(base(k, m, n)); });
  }
  auto src = std::make_shared<Algebra>(a);
  out.numeric_rule_factory = [src, rho](const ParamBindings& pb) {
    NumericRuleFn base = src->numeric_rule_factory ? src->numeric_rule_factory(pb)
                                                   : generic_numeric_rule(src, pb);
    NumericMap nmap = bind_map(rho, *src, pb);
    return NumericRuleFn([base, nmap](const std::array<int, 3>& ranks,
                                      const std::array<long, 3>& degs, const Gaussian& scale,
                                      std::vector<NumericTerm>& out_terms) {
      std::vector<NumericTerm> tmp;
      base(ranks, degs, scale, tmp);
      for (const auto& t : tmp)
        for (const auto& [g, c] : nmap.apply({t.family_rank, t.degree}, t.coeff))
          out_terms.push_back({g.rank, g.deg, c});
    });
  };
  TwistPair t{rho, rho, "composition"};
  return {out, t};
}

}  // namespace nambu
