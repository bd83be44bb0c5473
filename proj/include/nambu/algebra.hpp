// algebra.hpp
// Ternary algebras: a set of generator families plus a structure-constant
// rule on canonically ordered family triples, extended skew-symmetrically
// and trilinearly.  Also the FI / HFI residual functionals, the
// left-minus-right sides of the Nambu and Hom-Nambu identities.
#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nambu/element.hpp"
#include "nambu/linear_map.hpp"

namespace nambu {

// Structure constants for one canonically ordered family triple.
using RuleFn =
    std::function<Element(const IndexLinearForm&, const IndexLinearForm&, const IndexLinearForm&)>;

// Numeric structure constants used by the exhaustive window oracle: degrees
// and parameters are already concrete, coefficients are plain Gaussians.
struct NumericTerm {
  int family_rank;
  long degree;
  Gaussian coeff;
};
using NumericRuleFn =
    std::function<void(const std::array<int, 3>& ranks, const std::array<long, 3>& degrees,
                       const Gaussian& scale, std::vector<NumericTerm>&)>;

struct ParamBindings {
  std::map<std::string, Gaussian> values;
};

class Algebra {
 public:
  std::string name;
  std::vector<std::string> families;  // canonical order, e.g. {Q, R}
  std::vector<std::string> parameters;

  // Factory building the numeric oracle rule for given exact parameter
  // values; unset for algebras that only support the generic path.
  std::function<NumericRuleFn(const ParamBindings&)> numeric_rule_factory;

  void set_rule(const std::string& f1, const std::string& f2, const std::string& f3, RuleFn fn) {
    rules_[f1 + "," + f2 + "," + f3] = std::move(fn);
  }

  int rank(const std::string& family) const {
    for (size_t i = 0; i < families.size(); ++i)
      if (families[i] == family) return (int)i;
    throw Error("unknown family '" + family + "' in algebra " + name);
  }

  // Bracket on generators: sort by family rank (stable), apply the sign of
  // the permutation, look up the canonical rule.  Antisymmetry within one
  // family is carried by the coefficient formula itself.
  Element bracket(const Generator& x, const Generator& y, const Generator& z) const {
    struct Slot {
      int rank;
      int pos;
      const Generator* g;
    };
    std::array<Slot, 3> s{Slot{rank(x.family), 0, &x}, Slot{rank(y.family), 1, &y},
                          Slot{rank(z.family), 2, &z}};
    int sign = 1;
    // stable three-element sort by rank, counting transpositions
    auto swap_if = [&](int i, int j) {
      if (s[i].rank > s[j].rank || (s[i].rank == s[j].rank && s[i].pos > s[j].pos)) {
        std::swap(s[i], s[j]);
        sign = -sign;
      }
    };
    swap_if(0, 1);
    swap_if(1, 2);
    swap_if(0, 1);
    std::string key = s[0].g->family + "," + s[1].g->family + "," + s[2].g->family;
    auto it = rules_.find(key);
    if (it == rules_.end()) throw Error("no bracket rule for (" + key + ") in algebra " + name);
    Element r = it->second(s[0].g->degree, s[1].g->degree, s[2].g->degree);
    return sign == 1 ? r : -r;
  }

  Element bracket(const Element& x, const Element& y, const Element& z) const {
    Element out;
    for (const auto& [gx, cx] : x.terms())
      for (const auto& [gy, cy] : y.terms())
        for (const auto& [gz, cz] : z.terms()) out = out + (cx * cy * cz) * bracket(gx, gy, gz);
    return out;
  }

  const RuleFn& rule(const std::string& f1, const std::string& f2, const std::string& f3) const {
    auto it = rules_.find(f1 + "," + f2 + "," + f3);
    if (it == rules_.end())
      throw Error("no bracket rule for (" + f1 + "," + f2 + "," + f3 + ")");
    return it->second;
  }

  // Canonically ordered family triples (i <= j <= l).
  std::vector<std::array<std::string, 3>> canonical_triples() const {
    std::vector<std::array<std::string, 3>> out;
    for (size_t i = 0; i < families.size(); ++i)
      for (size_t j = i; j < families.size(); ++j)
        for (size_t l = j; l < families.size(); ++l)
          out.push_back({families[i], families[j], families[l]});
    return out;
  }

 private:
  std::map<std::string, RuleFn> rules_;
};

// FI(x1..x5) = [x1,x2,[x3,x4,x5]] - [[x1,x2,x3],x4,x5]
//            - [x3,[x1,x2,x4],x5] - [x3,x4,[x1,x2,x5]]
inline Element fi_residual(const Algebra& a, const Element& x1, const Element& x2,
                           const Element& x3, const Element& x4, const Element& x5) {
  return a.bracket(x1, x2, a.bracket(x3, x4, x5)) - a.bracket(a.bracket(x1, x2, x3), x4, x5) -
         a.bracket(x3, a.bracket(x1, x2, x4), x5) - a.bracket(x3, x4, a.bracket(x1, x2, x5));
}

// HFI(x1..x5) = [a1 x1, a2 x2, [x3,x4,x5]] - [[x1,x2,x3], a1 x4, a2 x5]
//             - [a1 x3, [x1,x2,x4], a2 x5] - [a1 x3, a2 x4, [x1,x2,x5]]
inline Element hfi_residual(const Algebra& a, const TwistPair& t, const Element& x1,
                            const Element& x2, const Element& x3, const Element& x4,
                            const Element& x5) {
  const LinearMap& a1 = t.alpha1;
  const LinearMap& a2 = t.alpha2;
  return a.bracket(a1.apply(x1), a2.apply(x2), a.bracket(x3, x4, x5)) -
         a.bracket(a.bracket(x1, x2, x3), a1.apply(x4), a2.apply(x5)) -
         a.bracket(a1.apply(x3), a.bracket(x1, x2, x4), a2.apply(x5)) -
         a.bracket(a1.apply(x3), a2.apply(x4), a.bracket(x1, x2, x5));
}

// Structural equality of two algebras: same families and identical rule
// output on every canonical triple with fresh symbolic degrees.
inline bool algebra_equal(const Algebra& a, const Algebra& b) {
  if (a.families != b.families) return false;
  IndexLinearForm k = IndexLinearForm::var("k"), m = IndexLinearForm::var("m"),
                  n = IndexLinearForm::var("n");
  for (const auto& tri : a.canonical_triples()) {
    if (a.rule(tri[0], tri[1], tri[2])(k, m, n) != b.rule(tri[0], tri[1], tri[2])(k, m, n))
      return false;
  }
  return true;
}

}  // namespace nambu
