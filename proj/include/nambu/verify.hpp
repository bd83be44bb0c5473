// verify.hpp
// Identity verification: symbolic over all family patterns with fresh
// symbolic degrees, and the independent exhaustive window oracle over
// concrete generators with exact numeric coefficients.
#pragma once

#include <cstdlib>
#include <memory>
#include <optional>
#include <thread>

#include "nambu/algebra.hpp"

namespace nambu {

struct Violation {
  std::string pattern;
  Element residual;                  // symbolic mode
  std::optional<json> bindings;      // window mode: concrete tuple
  std::optional<std::string> value;  // window mode: exact residual value
};

struct Report {
  std::string algebra;
  std::string twist = "none";
  std::string mode;
  std::vector<Violation> violations;
  size_t violation_count = 0;  // total found (>= violations.size() if truncated)
  bool truncated = false;

  bool ok() const { return violation_count == 0; }

  json to_json() const {
    json j;
    j["algebra"] = algebra;
    j["twist"] = twist;
    j["mode"] = mode;
    j["ok"] = ok();
    j["violation_count"] = violation_count;
    j["truncated"] = truncated;
    json arr = json::array();
    for (const auto& v : violations) {
      json jv;
      jv["pattern"] = v.pattern;
      if (v.bindings) jv["bindings"] = *v.bindings;
      if (v.value) {
        jv["residual"] = *v.value;
      } else {
        jv["residual"] = v.residual.to_string();
        jv["residual_terms"] = v.residual.to_json();
      }
      arr.push_back(jv);
    }
    j["violations"] = arr;
    return j;
  }
};

inline unsigned worker_count(unsigned requested = 0) {
  if (requested) return requested;
  if (const char* env = std::getenv("NAMBU_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return (unsigned)v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// ---------------------------------------------------------------------------
// Symbolic verification.
// ---------------------------------------------------------------------------

// Family patterns for (x1,x2 | x3,x4,x5).  FI is antisymmetric in slots
// {1,2} and {3,4,5}, so unordered patterns suffice; for HFI with
// alpha1 != alpha2 that symmetry is lost and all ordered patterns are
// enumerated.
inline std::vector<std::array<int, 5>> residual_patterns(size_t nfam, bool ordered) {
  std::vector<std::array<int, 5>> out;
  int f = (int)nfam;
  for (int a = 0; a < f; ++a)
    for (int b = ordered ? 0 : a; b < f; ++b)
      for (int c = 0; c < f; ++c)
        for (int d = ordered ? 0 : c; d < f; ++d)
          for (int e = ordered ? 0 : d; e < f; ++e) {
            if (!ordered && (d < c || e < d)) continue;
            out.push_back({a, b, c, d, e});
          }
  return out;
}

inline std::string pattern_string(const Algebra& alg, const std::array<int, 5>& p) {
  return alg.families[p[0]] + "," + alg.families[p[1]] + "|" + alg.families[p[2]] + "," +
         alg.families[p[3]] + "," + alg.families[p[4]];
}

inline Report verify_identity_symbolic(const Algebra& alg,
                                       const std::optional<TwistPair>& twist = std::nullopt) {
  Report rep;
  rep.algebra = alg.name;
  rep.mode = "symbolic";
  if (twist) rep.twist = twist->name;
  bool ordered = twist && !twist->symmetric();
  static const char* slot_names[5] = {"u", "v", "k", "m", "n"};
  for (const auto& p : residual_patterns(alg.families.size(), ordered)) {
    std::array<Element, 5> xs;
    for (int i = 0; i < 5; ++i)
      xs[i] = Element(Generator(alg.families[p[i]], IndexLinearForm::var(slot_names[i])));
    Element r = twist ? hfi_residual(alg, *twist, xs[0], xs[1], xs[2], xs[3], xs[4])
                      : fi_residual(alg, xs[0], xs[1], xs[2], xs[3], xs[4]);
    if (!r.is_zero()) {
      rep.violations.push_back({pattern_string(alg, p), r, std::nullopt, std::nullopt});
      ++rep.violation_count;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Exhaustive numeric window oracle.
// ---------------------------------------------------------------------------

struct NumericGen {
  int rank;
  long deg;
  friend bool operator<(const NumericGen& a, const NumericGen& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.deg < b.deg;
  }
  friend bool operator==(const NumericGen& a, const NumericGen& b) {
    return a.rank == b.rank && a.deg == b.deg;
  }
};

using NumericElem = std::vector<std::pair<NumericGen, Gaussian>>;  // sorted, merged

inline void num_add(NumericElem& e, const NumericGen& g, const Gaussian& c) {
  if (c.is_zero()) return;
  auto it = std::lower_bound(e.begin(), e.end(), g,
                             [](const auto& p, const NumericGen& gg) { return p.first < gg; });
  if (it != e.end() && it->first == g) {
    it->second = it->second + c;
    if (it->second.is_zero()) e.erase(it);
  } else {
    e.insert(it, {g, c});
  }
}

// Numeric form of a generator-wise linear map with parameters bound.
struct NumericMap {
  struct Entry {
    int target_rank;
    Gaussian amp;
    Gaussian base;  // base value, used if shift != 0
    long shift;
  };
  std::vector<std::vector<Entry>> per_family;

  NumericElem apply(const NumericGen& g, const Gaussian& c) const {
    NumericElem out;
    if (g.rank < (int)per_family.size()) {
      for (const auto& e : per_family[g.rank]) {
        Gaussian v = c * e.amp;
        if (e.shift != 0) v = v * e.base.pow(e.shift * g.deg);
        num_add(out, {e.target_rank, g.deg}, v);
      }
    }
    return out;
  }
  NumericElem apply(const NumericElem& x) const {
    NumericElem out;
    for (const auto& [g, c] : x)
      for (const auto& [gg, cc] : apply(g, c)) num_add(out, gg, cc);
    return out;
  }
};

inline NumericMap bind_map(const LinearMap& f, const Algebra& alg, const ParamBindings& pb) {
  NumericMap out;
  out.per_family.resize(alg.families.size());
  Bindings b;
  for (const auto& [name, val] : pb.values) b.values[name] = Scalar(val);
  for (const auto& [fam, rules] : f.rules()) {
    int r = alg.rank(fam);
    for (const auto& rule : rules) {
      Scalar amp = rule.amplitude.substitute(b);
      if (!amp.is_constant())
        throw Error("map amplitude not fully bound: " + amp.to_string());
      Gaussian base(0);
      if (rule.shift != 0) {
        auto it = pb.values.find(rule.base->name);
        if (it == pb.values.end()) throw Error("no binding for base '" + rule.base->name + "'");
        if (it->second.is_zero()) throw Error("base '" + rule.base->name + "' bound to 0");
        base = it->second;
      }
      out.per_family[r].push_back(
          {alg.rank(rule.target), amp.constant_value(), base, rule.shift});
    }
  }
  return out;
}

// Fallback numeric rule that routes through the symbolic rule at constant
// degrees and substitutes the parameter bindings.  Built-in algebras install
// independent hand-written numeric rules instead.
inline NumericRuleFn generic_numeric_rule(std::shared_ptr<const Algebra> alg,
                                          const ParamBindings& pb) {
  Bindings b;
  for (const auto& [name, val] : pb.values) b.values[name] = Scalar(val);
  return [a = std::move(alg), b](const std::array<int, 3>& ranks,
                                 const std::array<long, 3>& degs, const Gaussian& scale,
                                 std::vector<NumericTerm>& out) {
    Element e = a->rule(a->families[ranks[0]], a->families[ranks[1]],
                        a->families[ranks[2]])(IndexLinearForm(degs[0]), IndexLinearForm(degs[1]),
                                               IndexLinearForm(degs[2]));
    for (const auto& [g, c] : e.terms()) {
      Scalar v = c.substitute(b);
      if (!v.is_constant()) throw Error("unbound parameter in numeric rule: " + v.to_string());
      if (!g.degree.is_constant()) throw Error("numeric rule produced symbolic degree");
      Gaussian gc = v.constant_value() * scale;
      if (!gc.is_zero()) out.push_back({a->rank(g.family), g.degree.constant, gc});
    }
  };
}

class NumericEngine {
 public:
  NumericEngine(const Algebra& alg, const ParamBindings& pb) : alg_(alg) {
    rule_ = alg.numeric_rule_factory
                ? alg.numeric_rule_factory(pb)
                : generic_numeric_rule(std::make_shared<Algebra>(alg), pb);
  }

  NumericElem bracket(const NumericGen& x, const NumericGen& y, const NumericGen& z,
                      const Gaussian& scale) const {
    std::array<NumericGen, 3> g{x, y, z};
    int sign = 1;
    auto swap_if = [&](int i, int j) {
      if (g[i].rank > g[j].rank) {
        std::swap(g[i], g[j]);
        sign = -sign;
      }
    };
    swap_if(0, 1);
    swap_if(1, 2);
    swap_if(0, 1);
    std::vector<NumericTerm> terms;
    rule_({g[0].rank, g[1].rank, g[2].rank}, {g[0].deg, g[1].deg, g[2].deg},
          sign == 1 ? scale : -scale, terms);
    NumericElem out;
    for (const auto& t : terms) num_add(out, {t.family_rank, t.degree}, t.coeff);
    return out;
  }

  NumericElem bracket(const NumericElem& x, const NumericElem& y, const NumericElem& z) const {
    NumericElem out;
    for (const auto& [gx, cx] : x)
      for (const auto& [gy, cy] : y)
        for (const auto& [gz, cz] : z)
          for (const auto& [g, c] : bracket(gx, gy, gz, cx * cy * cz)) num_add(out, g, c);
    return out;
  }

  NumericElem fi(const NumericElem& x1, const NumericElem& x2, const NumericElem& x3,
                 const NumericElem& x4, const NumericElem& x5) const {
    NumericElem r = bracket(x1, x2, bracket(x3, x4, x5));
    auto sub = [&](const NumericElem& t) {
      for (const auto& [g, c] : t) num_add(r, g, -c);
    };
    sub(bracket(bracket(x1, x2, x3), x4, x5));
    sub(bracket(x3, bracket(x1, x2, x4), x5));
    sub(bracket(x3, x4, bracket(x1, x2, x5)));
    return r;
  }

  NumericElem hfi(const NumericMap& a1, const NumericMap& a2, const NumericElem& x1,
                  const NumericElem& x2, const NumericElem& x3, const NumericElem& x4,
                  const NumericElem& x5) const {
    NumericElem r = bracket(a1.apply(x1), a2.apply(x2), bracket(x3, x4, x5));
    auto sub = [&](const NumericElem& t) {
      for (const auto& [g, c] : t) num_add(r, g, -c);
    };
    sub(bracket(bracket(x1, x2, x3), a1.apply(x4), a2.apply(x5)));
    sub(bracket(a1.apply(x3), bracket(x1, x2, x4), a2.apply(x5)));
    sub(bracket(a1.apply(x3), a2.apply(x4), bracket(x1, x2, x5)));
    return r;
  }

  std::string render(const NumericElem& e) const {
    if (e.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [g, c] : e) {
      if (!first) out << " + ";
      first = false;
      out << c.to_string() << "*" << alg_.families[g.rank] << "[" << g.deg << "]";
    }
    return out.str();
  }

 private:
  const Algebra& alg_;
  NumericRuleFn rule_;
};

struct Window {
  long lo = 0, hi = 0;
  long size() const { return hi - lo + 1; }
};

inline std::string pattern_of(const Algebra& alg, const std::array<NumericGen, 5>& t) {
  return alg.families[t[0].rank] + "," + alg.families[t[1].rank] + "|" + alg.families[t[2].rank] +
         "," + alg.families[t[3].rank] + "," + alg.families[t[4].rank];
}

// Evaluates the FI / HFI residual on every 5-tuple of concrete generators
// with degrees in the window; exact arithmetic throughout.
inline Report brute_force_window(const Algebra& alg, const std::optional<TwistPair>& twist,
                                 const Window& w, const ParamBindings& pb,
                                 size_t max_witnesses = SIZE_MAX, unsigned threads = 0) {
  Report rep;
  rep.algebra = alg.name;
  rep.mode = "window";
  if (twist) rep.twist = twist->name;

  NumericEngine eng(alg, pb);
  std::optional<std::pair<NumericMap, NumericMap>> tmaps;
  if (twist)
    tmaps = std::make_pair(bind_map(twist->alpha1, alg, pb), bind_map(twist->alpha2, alg, pb));

  std::vector<NumericGen> gens;
  for (size_t f = 0; f < alg.families.size(); ++f)
    for (long d = w.lo; d <= w.hi; ++d) gens.push_back({(int)f, d});
  size_t ng = gens.size();
  size_t total = ng * ng * ng * ng * ng;

  unsigned nt = worker_count(threads);
  if ((size_t)nt > total) nt = (unsigned)total;
  if (nt == 0) nt = 1;

  struct Hit {
    size_t idx;
    std::array<NumericGen, 5> tuple;
    std::string value;
  };
  std::vector<std::vector<Hit>> found(nt);
  std::vector<size_t> counts(nt, 0);
  std::vector<std::thread> pool;
  size_t chunk = (total + nt - 1) / nt;
  for (unsigned t = 0; t < nt; ++t) {
    size_t begin = t * chunk, end = std::min(total, begin + chunk);
    pool.emplace_back([&, t, begin, end]() {
      for (size_t idx = begin; idx < end; ++idx) {
        size_t rem = idx;
        std::array<NumericGen, 5> tup;
        for (int s = 4; s >= 0; --s) {
          tup[s] = gens[rem % ng];
          rem /= ng;
        }
        std::array<NumericElem, 5> xs;
        for (int s = 0; s < 5; ++s) xs[s] = NumericElem{{tup[s], Gaussian(1)}};
        NumericElem r = tmaps ? eng.hfi(tmaps->first, tmaps->second, xs[0], xs[1], xs[2], xs[3],
                                        xs[4])
                              : eng.fi(xs[0], xs[1], xs[2], xs[3], xs[4]);
        if (!r.empty()) {
          ++counts[t];
          found[t].push_back({idx, tup, eng.render(r)});
        }
      }
    });
  }
  for (auto& th : pool) th.join();

  for (unsigned t = 0; t < nt; ++t) rep.violation_count += counts[t];
  for (unsigned t = 0; t < nt && rep.violations.size() < max_witnesses; ++t) {
    for (const Hit& h : found[t]) {
      if (rep.violations.size() >= max_witnesses) break;
      json b;
      static const char* slot_names[5] = {"x1", "x2", "x3", "x4", "x5"};
      for (int s = 0; s < 5; ++s)
        b[slot_names[s]] =
            alg.families[h.tuple[s].rank] + "[" + std::to_string(h.tuple[s].deg) + "]";
      Violation v;
      v.pattern = pattern_of(alg, h.tuple);
      v.bindings = b;
      v.value = h.value;
      rep.violations.push_back(std::move(v));
    }
  }
  rep.truncated = rep.violations.size() < rep.violation_count;
  return rep;
}

}  // namespace nambu
