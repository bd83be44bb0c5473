// morphisms.hpp
// Homomorphism checking, finite-window constraint generation under the
// geometric coefficient ansatz, the zero/nonzero case-tree solver, twist
// classification, and untwisting of invertible twists.
//
// Coefficient sequences such as a1_n are handled with the support hypothesis
// "identically zero or nowhere zero": the case tree splits each sequence,
// and within nonzero branches the shift equations force the geometric shape
// amp * base^(s*n), which is how solutions are presented.
#pragma once

#include <memory>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "nambu/verify.hpp"

namespace nambu {

// ---------------------------------------------------------------------------
// is_homomorphism: f([x,y,z]) = [f x, f y, f z] over all family patterns
// with symbolic degrees.  Both sides are totally antisymmetric, so sorted
// triples suffice.
// ---------------------------------------------------------------------------
inline Report is_homomorphism(const Algebra& alg, const LinearMap& f) {
  Report rep;
  rep.algebra = alg.name;
  rep.mode = "endomorphism";
  static const char* deg_names[3] = {"k", "m", "n"};
  size_t nf = alg.families.size();
  for (size_t i = 0; i < nf; ++i)
    for (size_t j = i; j < nf; ++j)
      for (size_t l = j; l < nf; ++l) {
        std::array<Element, 3> xs;
        std::array<std::string, 3> fams{alg.families[i], alg.families[j], alg.families[l]};
        for (int s = 0; s < 3; ++s)
          xs[s] = Element(Generator(fams[s], IndexLinearForm::var(deg_names[s])));
        Element lhs = f.apply(alg.bracket(xs[0], xs[1], xs[2]));
        Element rhs = alg.bracket(f.apply(xs[0]), f.apply(xs[1]), f.apply(xs[2]));
        Element r = lhs - rhs;
        if (!r.is_zero()) {
          rep.violations.push_back(
              {fams[0] + "," + fams[1] + "," + fams[2], r, std::nullopt, std::nullopt});
          ++rep.violation_count;
        }
      }
  return rep;
}

// ---------------------------------------------------------------------------
// Geometric ansatz: one entry per (map slot, source family, target family),
// either an unknown coefficient sequence or a fixed monomial rule.
// ---------------------------------------------------------------------------
struct AnsatzEntry {
  int map_slot = 0;  // 0 = f or alpha1, 1 = alpha2
  std::string source, target;
  std::string seq;                  // sequence label for unknowns ("a1", ...)
  std::optional<Scalar> amplitude;  // set = fixed entry amp * base^(shift*n)
  std::optional<Symbol> base;
  long shift = 0;
};

struct GeometricAnsatz {
  std::vector<AnsatzEntry> entries;

  // f(Q_n) = a_n Q_n, f(R_n) = b_n R_n
  static GeometricAnsatz endo_diagonal() {
    GeometricAnsatz g;
    g.entries.push_back({0, "Q", "Q", "a", std::nullopt, std::nullopt, 0});
    g.entries.push_back({0, "R", "R", "b", std::nullopt, std::nullopt, 0});
    return g;
  }
  // f(Q_n) = a_n Q_n, f(R_n) = b_n Q_n
  static GeometricAnsatz endo_cross() {
    GeometricAnsatz g;
    g.entries.push_back({0, "Q", "Q", "a", std::nullopt, std::nullopt, 0});
    g.entries.push_back({0, "R", "Q", "b", std::nullopt, std::nullopt, 0});
    return g;
  }
  // alpha_i(Q_n) = a^i_n Q_n + b^i_n R_n, alpha_i(R_n) = c^i_n Q_n + d^i_n R_n
  static GeometricAnsatz twist_full() {
    GeometricAnsatz g;
    for (int i = 0; i < 2; ++i) {
      std::string s = std::to_string(i + 1);
      g.entries.push_back({i, "Q", "Q", "a" + s, std::nullopt, std::nullopt, 0});
      g.entries.push_back({i, "Q", "R", "b" + s, std::nullopt, std::nullopt, 0});
      g.entries.push_back({i, "R", "Q", "c" + s, std::nullopt, std::nullopt, 0});
      g.entries.push_back({i, "R", "R", "d" + s, std::nullopt, std::nullopt, 0});
    }
    return g;
  }
};

// ---------------------------------------------------------------------------
// Solver-internal compact polynomials: Gaussian coefficients, an integer
// q-exponent, and interned symbols (unknown sequence values plus the
// algebra's parameters).
// ---------------------------------------------------------------------------
namespace solver_detail {

struct SymInfo {
  std::string name;
  bool is_unknown = false;   // per-index sequence value
  bool invertible = false;   // formal unit (non-q exponential bases)
  bool solver_var = false;   // amplitude/base introduced by the case tree
  std::string seq;           // owning sequence, if any
  long idx = 0;              // for per-index unknowns
};

struct SMono {
  long qexp = 0;
  std::vector<std::pair<int, int>> syms;  // (id, exponent), sorted, exp != 0

  bool is_one() const { return qexp == 0 && syms.empty(); }
  friend bool operator==(const SMono& a, const SMono& b) {
    return a.qexp == b.qexp && a.syms == b.syms;
  }
  friend bool operator<(const SMono& a, const SMono& b) {
    if (a.syms != b.syms) return a.syms < b.syms;
    return a.qexp < b.qexp;
  }
};

inline SMono mono_mul(const SMono& a, const SMono& b) {
  SMono r;
  r.qexp = a.qexp + b.qexp;
  r.syms.reserve(a.syms.size() + b.syms.size());
  size_t i = 0, j = 0;
  while (i < a.syms.size() || j < b.syms.size()) {
    if (j == b.syms.size() || (i < a.syms.size() && a.syms[i].first < b.syms[j].first)) {
      r.syms.push_back(a.syms[i++]);
    } else if (i == a.syms.size() || b.syms[j].first < a.syms[i].first) {
      r.syms.push_back(b.syms[j++]);
    } else {
      int e = a.syms[i].second + b.syms[j].second;
      if (e != 0) r.syms.push_back({a.syms[i].first, e});
      ++i;
      ++j;
    }
  }
  return r;
}

inline SMono mono_pow(const SMono& a, long e) {
  SMono r;
  if (e == 0) return r;
  r.qexp = a.qexp * e;
  for (auto [id, ex] : a.syms) r.syms.push_back({id, (int)(ex * e)});
  return r;
}

struct SPoly {
  std::vector<std::pair<SMono, Gaussian>> t;  // sorted by monomial, merged

  bool is_zero() const { return t.empty(); }
  bool is_constant() const { return t.empty() || (t.size() == 1 && t[0].first.is_one()); }
  friend bool operator==(const SPoly& a, const SPoly& b) { return a.t == b.t; }
};

inline void spoly_add_term(SPoly& p, const SMono& m, const Gaussian& c) {
  if (c.is_zero()) return;
  auto it = std::lower_bound(p.t.begin(), p.t.end(), m,
                             [](const auto& a, const SMono& mm) { return a.first < mm; });
  if (it != p.t.end() && it->first == m) {
    it->second = it->second + c;
    if (it->second.is_zero()) p.t.erase(it);
  } else {
    p.t.insert(it, {m, c});
  }
}

inline SPoly spoly_const(const Gaussian& c) {
  SPoly p;
  spoly_add_term(p, SMono{}, c);
  return p;
}
inline SPoly spoly_sym(int id) {
  SPoly p;
  SMono m;
  m.syms.push_back({id, 1});
  spoly_add_term(p, m, Gaussian(1));
  return p;
}
inline SPoly spoly_add(const SPoly& a, const SPoly& b) {
  SPoly r = a;
  for (const auto& [m, c] : b.t) spoly_add_term(r, m, c);
  return r;
}
inline SPoly spoly_sub(const SPoly& a, const SPoly& b) {
  SPoly r = a;
  for (const auto& [m, c] : b.t) spoly_add_term(r, m, -c);
  return r;
}
inline SPoly spoly_mul(const SPoly& a, const SPoly& b) {
  SPoly r;
  if (a.t.size() == 1 && b.t.size() == 1) {
    Gaussian c = a.t[0].second * b.t[0].second;
    if (!c.is_zero()) r.t.push_back({mono_mul(a.t[0].first, b.t[0].first), std::move(c)});
    return r;
  }
  for (const auto& [ma, ca] : a.t)
    for (const auto& [mb, cb] : b.t) spoly_add_term(r, mono_mul(ma, mb), ca * cb);
  return r;
}
inline SPoly spoly_neg(const SPoly& a) {
  SPoly r = a;
  for (auto& [m, c] : r.t) c = -c;
  return r;
}
inline SPoly spoly_pow(const SPoly& a, long e) {
  if (e == 0) return spoly_const(Gaussian(1));
  if (e < 0) {
    if (a.t.size() != 1) throw Error("cannot invert non-monomial polynomial");
    SPoly r;
    spoly_add_term(r, mono_pow(a.t[0].first, e), Gaussian(1) / a.t[0].second.pow(-e));
    return r;
  }
  SPoly r = spoly_const(Gaussian(1));
  for (long i = 0; i < e; ++i) r = spoly_mul(r, a);
  return r;
}

inline bool mono_contains(const SMono& m, int id) {
  for (auto [s, e] : m.syms)
    if (s == id) return e != 0;
  return false;
}

inline SPoly spoly_subst(const SPoly& p, int id, const SPoly& value) {
  SPoly out;
  for (const auto& [m, c] : p.t) {
    long e = 0;
    SMono rest;
    rest.qexp = m.qexp;
    for (auto [s, ex] : m.syms) {
      if (s == id)
        e = ex;
      else
        rest.syms.push_back({s, ex});
    }
    if (e == 0) {
      spoly_add_term(out, m, c);
      continue;
    }
    SPoly factor = spoly_pow(value, e);
    for (const auto& [fm, fc] : factor.t) spoly_add_term(out, mono_mul(rest, fm), c * fc);
  }
  return out;
}

struct Ctx {
  std::vector<SymInfo> syms;
  std::map<std::string, int> by_name;
  std::map<std::string, std::vector<std::pair<long, int>>> seq_syms;  // seq -> (idx, id)

  int intern_param(const std::string& name, bool invertible = false, bool solver_var = false,
                   const std::string& seq = "") {
    auto it = by_name.find(name);
    if (it != by_name.end()) return it->second;
    int id = (int)syms.size();
    syms.push_back({name, false, invertible, solver_var, seq, 0});
    by_name[name] = id;
    return id;
  }
  int intern_unknown(const std::string& seq, long idx) {
    std::string name = seq + "_" + (idx < 0 ? "m" + std::to_string(-idx) : std::to_string(idx));
    auto it = by_name.find(name);
    if (it != by_name.end()) return it->second;
    int id = (int)syms.size();
    syms.push_back({name, true, false, false, seq, idx});
    by_name[name] = id;
    seq_syms[seq].push_back({idx, id});
    return id;
  }
};

// Scalar -> solver polynomial.  Degrees are concrete here, so every
// exponent form is constant; q maps to the dedicated q-exponent.
inline SPoly from_scalar(Ctx& ctx, const Scalar& s) {
  SPoly out;
  for (const auto& [mono, coeff] : s.terms()) {
    SMono m;
    for (const auto& [sym, form] : mono.powers) {
      if (!form.is_constant())
        throw Error("constraint coefficient has symbolic exponent: " + s.to_string());
      if (sym.kind == SymbolKind::Index)
        throw Error("constraint coefficient mentions index symbol " + sym.name);
      if (sym.kind == SymbolKind::Unit && sym.name == "q") {
        m.qexp += form.constant;
        continue;
      }
      int id = ctx.intern_param(sym.name, sym.kind == SymbolKind::Unit);
      m.syms.push_back({id, (int)form.constant});
    }
    std::sort(m.syms.begin(), m.syms.end());
    spoly_add_term(out, m, coeff);
  }
  return out;
}

inline Scalar to_scalar(const Ctx& ctx, const SPoly& p,
                        const std::map<int, Scalar>* rename = nullptr) {
  Scalar out;
  for (const auto& [m, c] : p.t) {
    Scalar term = Scalar(c);
    if (m.qexp != 0) term = term * Scalar::expo(Symbol::unit("q"), IndexLinearForm(m.qexp));
    for (auto [id, e] : m.syms) {
      if (rename) {
        auto it = rename->find(id);
        if (it != rename->end()) {
          term = term * it->second.pow(e);
          continue;
        }
      }
      const SymInfo& si = ctx.syms[id];
      Symbol sym = si.invertible ? Symbol::unit(si.name) : Symbol::param(si.name);
      term = term * Scalar::sym(sym, e);
    }
    out = out + term;
  }
  return out;
}

// Canonical form: shift q-exponents so the minimum is zero, make the leading
// coefficient one.  Only exact units are cancelled here.
inline void normalize_eq(Ctx& ctx, SPoly& p) {
  if (p.t.empty()) return;
  long qmin = p.t[0].first.qexp;
  for (const auto& [m, c] : p.t) {
    (void)c;
    qmin = std::min(qmin, m.qexp);
  }
  bool has_units = false;
  for (auto [id, e] : p.t[0].first.syms) {
    (void)e;
    if (ctx.syms[id].invertible) has_units = true;
  }
  // per-symbol minimum exponent of invertible units present in every term
  std::map<int, int> unit_min;
  if (has_units) {
    for (auto [id, e] : p.t[0].first.syms)
      if (ctx.syms[id].invertible) unit_min[id] = e;
    for (const auto& [m, c] : p.t) {
      (void)c;
      for (auto it = unit_min.begin(); it != unit_min.end();) {
        int e = 0;
        for (auto [id, ex] : m.syms)
          if (id == it->first) e = ex;
        if (e == 0)
          it = unit_min.erase(it);
        else {
          it->second = std::min(it->second, e);
          ++it;
        }
      }
    }
  }
  Gaussian lead = p.t[0].second;
  if (qmin == 0 && unit_min.empty() && lead.is_one()) return;
  SPoly out;
  for (auto& [m, c] : p.t) {
    SMono mm;
    mm.qexp = m.qexp - qmin;
    for (auto [id, e] : m.syms) {
      auto it = unit_min.find(id);
      int ee = it != unit_min.end() ? e - it->second : e;
      if (ee != 0) mm.syms.push_back({id, ee});
    }
    spoly_add_term(out, mm, c / lead);
  }
  p = std::move(out);
}

inline std::string spoly_key(const SPoly& p) {
  std::ostringstream out;
  for (const auto& [m, c] : p.t) {
    out << m.qexp << ":";
    for (auto [id, e] : m.syms) out << id << "^" << e << ".";
    out << "|" << c.to_string() << ";";
  }
  return out.str();
}

using Hash128 = std::pair<uint64_t, uint64_t>;

struct Hash128Hasher {
  size_t operator()(const Hash128& h) const { return h.first; }
};

inline Hash128 spoly_hash(const SPoly& p) {
  uint64_t h1 = 0x243f6a8885a308d3ull, h2 = 0x13198a2e03707344ull;
  auto mix = [](uint64_t& h, uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  for (const auto& [m, c] : p.t) {
    mix(h1, (uint64_t)m.qexp);
    mix(h2, (uint64_t)m.qexp * 3);
    for (auto [id, e] : m.syms) {
      mix(h1, ((uint64_t)id << 32) ^ (uint64_t)(int64_t)e);
      mix(h2, ((uint64_t)e << 32) ^ (uint64_t)(int64_t)id);
    }
    uint64_t ch = c.hash64();
    mix(h1, ch);
    mix(h2, ch * 0x100000001b3ull);
  }
  return {h1, h2};
}

}  // namespace solver_detail

// ---------------------------------------------------------------------------
// ConstraintSet: normalized, deduplicated polynomial equations over the
// per-index unknowns of an ansatz, generated on a finite window.
// ---------------------------------------------------------------------------
class ConstraintSet {
 public:
  std::shared_ptr<solver_detail::Ctx> ctx = std::make_shared<solver_detail::Ctx>();
  std::vector<solver_detail::SPoly> eqs;
  GeometricAnsatz ansatz;
  std::vector<std::string> seq_order;  // case-split order
  std::set<int> used;                  // unknown ids that occur in some equation

  size_t size() const { return eqs.size(); }

  std::vector<Scalar> equations() const {
    std::vector<Scalar> out;
    out.reserve(eqs.size());
    for (const auto& e : eqs) out.push_back(solver_detail::to_scalar(*ctx, e));
    return out;
  }

  void add_equation(const solver_detail::SPoly& raw) {
    solver_detail::SPoly p = raw;
    solver_detail::normalize_eq(*ctx, p);
    if (p.is_zero()) return;
    if (seen_.insert(solver_detail::spoly_hash(p)).second) {
      for (const auto& [m, c] : p.t) {
        (void)c;
        for (auto [id, e] : m.syms) {
          (void)e;
          used.insert(id);
        }
      }
      eqs.push_back(std::move(p));
    }
  }

  // Substitute a geometric assignment seq -> amplitude * base^(shift*n) into
  // every equation; returns the equations that do not vanish.
  std::vector<Scalar> unsatisfied_by(
      const std::map<std::string, std::tuple<Scalar, std::optional<Symbol>, long>>& assign)
      const {
    using namespace solver_detail;
    std::map<int, Scalar> values;
    for (const auto& [seq, ids] : ctx->seq_syms) {
      auto it = assign.find(seq);
      if (it == assign.end()) continue;
      const auto& [amp, base, shift] = it->second;
      for (auto [idx, id] : ids) {
        Scalar v = amp;
        if (base && shift != 0) v = v * Scalar::expo(*base, IndexLinearForm(shift * idx));
        values[id] = v;
      }
    }
    std::vector<Scalar> bad;
    for (const auto& e : eqs) {
      Scalar s = to_scalar(*ctx, e, &values);
      if (!s.is_zero()) bad.push_back(s);
    }
    return bad;
  }

 private:
  std::unordered_set<solver_detail::Hash128, solver_detail::Hash128Hasher> seen_;
};

// ---------------------------------------------------------------------------
// Constraint generation.
// ---------------------------------------------------------------------------
namespace solver_detail {

struct SGen {
  int rank;
  long deg;
  friend bool operator<(const SGen& a, const SGen& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.deg < b.deg;
  }
  friend bool operator==(const SGen& a, const SGen& b) {
    return a.rank == b.rank && a.deg == b.deg;
  }
};
using SElem = std::vector<std::pair<SGen, SPoly>>;

inline void selem_add(SElem& e, const SGen& g, const SPoly& p) {
  if (p.is_zero()) return;
  auto it = std::lower_bound(e.begin(), e.end(), g,
                             [](const auto& a, const SGen& gg) { return a.first < gg; });
  if (it != e.end() && it->first == g) {
    it->second = spoly_add(it->second, p);
    if (it->second.is_zero()) e.erase(it);
  } else {
    e.insert(it, {g, p});
  }
}

// Window bracket engine with a cache of structure constants at concrete
// degrees (coefficients stay symbolic in the parameters).
class GenEngine {
 public:
  GenEngine(const Algebra& alg, Ctx& ctx) : alg_(alg), ctx_(ctx) {}

  SElem bracket_gen(SGen x, SGen y, SGen z, const SPoly& scale) {
    int sign = 1;
    if (x.rank > y.rank) {
      std::swap(x, y);
      sign = -sign;
    }
    if (y.rank > z.rank) {
      std::swap(y, z);
      sign = -sign;
    }
    if (x.rank > y.rank) {
      std::swap(x, y);
      sign = -sign;
    }
    uint64_t key = pack(x, y, z);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      Element e = alg_.rule(alg_.families[x.rank], alg_.families[y.rank],
                            alg_.families[z.rank])(IndexLinearForm(x.deg), IndexLinearForm(y.deg),
                                                   IndexLinearForm(z.deg));
      SElem se;
      for (const auto& [g, c] : e.terms()) {
        if (!g.degree.is_constant()) throw Error("window bracket produced symbolic degree");
        selem_add(se, {alg_.rank(g.family), g.degree.constant}, from_scalar(ctx_, c));
      }
      it = cache_.emplace(key, std::move(se)).first;
    }
    SElem out;
    for (const auto& [g, p] : it->second) {
      SPoly q = spoly_mul(p, scale);
      if (sign < 0) q = spoly_neg(q);
      selem_add(out, g, q);
    }
    return out;
  }

  SElem bracket(const SElem& a, const SElem& b, const SElem& c) {
    SElem out;
    for (const auto& [ga, pa] : a)
      for (const auto& [gb, pb] : b)
        for (const auto& [gc, pc] : c) {
          SPoly s = spoly_mul(spoly_mul(pa, pb), pc);
          for (const auto& [g, p] : bracket_gen(ga, gb, gc, s)) selem_add(out, g, p);
        }
    return out;
  }

 private:
  const Algebra& alg_;
  Ctx& ctx_;
  std::unordered_map<uint64_t, SElem> cache_;

  static uint64_t pack(const SGen& a, const SGen& b, const SGen& c) {
    auto enc = [](const SGen& g) -> uint64_t {
      return ((uint64_t)(uint8_t)g.rank << 16) | (uint64_t)(uint16_t)(g.deg + 30000);
    };
    return (enc(a) << 42) ^ (enc(b) << 21) ^ enc(c);
  }
};

// Per-map application tables for an ansatz over a window of degrees.
struct AnsatzMaps {
  // maps[slot][rank] -> list of (target rank, seq or fixed coefficient)
  struct Ent {
    int target_rank;
    std::string seq;               // nonempty for unknown entries
    std::optional<Scalar> fixed;   // amplitude for fixed entries
    std::optional<Symbol> base;
    long shift = 0;
  };
  std::array<std::vector<std::vector<Ent>>, 2> maps;

  static AnsatzMaps build(const Algebra& alg, const GeometricAnsatz& g) {
    AnsatzMaps am;
    for (int s = 0; s < 2; ++s) am.maps[s].resize(alg.families.size());
    for (const auto& e : g.entries) {
      Ent ent{alg.rank(e.target), e.amplitude ? "" : e.seq, e.amplitude, e.base, e.shift};
      am.maps[e.map_slot][alg.rank(e.source)].push_back(ent);
    }
    return am;
  }

  SElem apply(Ctx& ctx, int slot, const SGen& gen) const {
    SElem out;
    for (const auto& ent : maps[slot][gen.rank]) {
      SPoly coeff;
      if (!ent.seq.empty()) {
        coeff = spoly_sym(ctx.intern_unknown(ent.seq, gen.deg));
      } else {
        Scalar c = *ent.fixed;
        if (ent.base && ent.shift != 0)
          c = c * Scalar::expo(*ent.base, IndexLinearForm(ent.shift * gen.deg));
        coeff = from_scalar(ctx, c);
      }
      selem_add(out, {ent.target_rank, gen.deg}, coeff);
    }
    return out;
  }
};

}  // namespace solver_detail

// Instantiates f([x,y,z]) = [f x, f y, f z] on all index triples in the
// window under the ansatz (map slot 0).
inline ConstraintSet endo_constraints(const Algebra& alg, const GeometricAnsatz& ansatz,
                                      const Window& w) {
  using namespace solver_detail;
  if (w.size() < 5) throw Error("constraint window must span at least 5 degrees");
  ConstraintSet cs;
  cs.ansatz = ansatz;
  for (const auto& e : ansatz.entries)
    if (!e.amplitude &&
        std::find(cs.seq_order.begin(), cs.seq_order.end(), e.seq) == cs.seq_order.end())
      cs.seq_order.push_back(e.seq);
  GenEngine eng(alg, *cs.ctx);
  AnsatzMaps am = AnsatzMaps::build(alg, ansatz);

  size_t nf = alg.families.size();
  for (size_t i = 0; i < nf; ++i)
    for (size_t j = i; j < nf; ++j)
      for (size_t l = j; l < nf; ++l)
        for (long k = w.lo; k <= w.hi; ++k)
          for (long m = w.lo; m <= w.hi; ++m)
            for (long n = w.lo; n <= w.hi; ++n) {
              SGen x{(int)i, k}, y{(int)j, m}, z{(int)l, n};
              SElem fx = am.apply(*cs.ctx, 0, x), fy = am.apply(*cs.ctx, 0, y),
                    fz = am.apply(*cs.ctx, 0, z);
              SElem lhs;
              for (const auto& [g, p] :
                   eng.bracket_gen(x, y, z, spoly_const(Gaussian(1)))) {
                // f applied to the bracket value
                for (const auto& [gg, pp] : am.apply(*cs.ctx, 0, g))
                  selem_add(lhs, gg, spoly_mul(pp, p));
              }
              SElem rhs = eng.bracket(fx, fy, fz);
              for (const auto& [g, p] : rhs) selem_add(lhs, g, spoly_neg(p));
              for (const auto& [g, p] : lhs) {
                (void)g;
                cs.add_equation(p);
              }
            }
  return cs;
}

namespace solver_detail {

// Read-only table of structure constants over a degree range, so the window
// sweep can run lock-free across threads.
class BracketTable {
 public:
  BracketTable(const Algebra& alg, Ctx& ctx, long dlo, long dhi)
      : nf_(alg.families.size()), dlo_(dlo), span_((size_t)(dhi - dlo + 1)) {
    slots_.resize(nf_ * nf_ * nf_ * span_ * span_ * span_);
    for (size_t i = 0; i < nf_; ++i)
      for (size_t j = i; j < nf_; ++j)
        for (size_t l = j; l < nf_; ++l) {
          const RuleFn& rule = alg.rule(alg.families[i], alg.families[j], alg.families[l]);
          for (long d1 = dlo; d1 <= dhi; ++d1)
            for (long d2 = dlo; d2 <= dhi; ++d2)
              for (long d3 = dlo; d3 <= dhi; ++d3) {
                Element e = rule(IndexLinearForm(d1), IndexLinearForm(d2), IndexLinearForm(d3));
                SElem se;
                for (const auto& [g, c] : e.terms()) {
                  if (!g.degree.is_constant())
                    throw Error("window bracket produced symbolic degree");
                  selem_add(se, {alg.rank(g.family), g.degree.constant}, from_scalar(ctx, c));
                }
                slots_[index(i, j, l, d1, d2, d3)] = std::move(se);
              }
        }
  }

  // bracket of single generators (sorted by rank with sign handled here)
  void bracket_gen(SGen x, SGen y, SGen z, const SPoly& scale, SElem& out) const {
    int sign = 1;
    if (x.rank > y.rank) {
      std::swap(x, y);
      sign = -sign;
    }
    if (y.rank > z.rank) {
      std::swap(y, z);
      sign = -sign;
    }
    if (x.rank > y.rank) {
      std::swap(x, y);
      sign = -sign;
    }
    const SElem& se = slots_[index(x.rank, y.rank, z.rank, x.deg, y.deg, z.deg)];
    for (const auto& [g, p] : se) {
      SPoly q = spoly_mul(p, scale);
      if (sign < 0) q = spoly_neg(q);
      selem_add(out, g, q);
    }
  }

  SElem bracket(const SElem& a, const SElem& b, const SElem& c) const {
    SElem out;
    for (const auto& [ga, pa] : a)
      for (const auto& [gb, pb] : b)
        for (const auto& [gc, pc] : c)
          bracket_gen(ga, gb, gc, spoly_mul(spoly_mul(pa, pb), pc), out);
    return out;
  }

 private:
  size_t nf_;
  long dlo_;
  size_t span_;
  std::vector<SElem> slots_;

  size_t index(size_t r1, size_t r2, size_t r3, long d1, long d2, long d3) const {
    size_t o1 = (size_t)(d1 - dlo_), o2 = (size_t)(d2 - dlo_), o3 = (size_t)(d3 - dlo_);
    return ((((r1 * nf_ + r2) * nf_ + r3) * span_ + o1) * span_ + o2) * span_ + o3;
  }
};

}  // namespace solver_detail

// Instantiates HFI(x1..x5) = 0 on all ordered family patterns and all index
// tuples in the window, with both twist maps drawn from the ansatz.
inline ConstraintSet hfi_constraints(const Algebra& alg, const GeometricAnsatz& ansatz,
                                     const Window& w, unsigned threads = 0) {
  using namespace solver_detail;
  if (w.size() < 5) throw Error("constraint window must span at least 5 degrees");
  ConstraintSet cs;
  cs.ansatz = ansatz;
  for (const auto& e : ansatz.entries)
    if (!e.amplitude &&
        std::find(cs.seq_order.begin(), cs.seq_order.end(), e.seq) == cs.seq_order.end())
      cs.seq_order.push_back(e.seq);
  Ctx& ctx = *cs.ctx;
  // intern all unknowns up front so the sweep never mutates the context
  for (const auto& e : ansatz.entries)
    if (!e.amplitude)
      for (long d = w.lo; d <= w.hi; ++d) ctx.intern_unknown(e.seq, d);
  AnsatzMaps am = AnsatzMaps::build(alg, ansatz);

  size_t nf = alg.families.size();
  std::vector<SGen> gens;
  for (size_t f = 0; f < nf; ++f)
    for (long d = w.lo; d <= w.hi; ++d) gens.push_back({(int)f, d});
  size_t ng = gens.size();

  std::vector<SElem> tw0(ng), tw1(ng), single(ng);
  for (size_t i = 0; i < ng; ++i) {
    tw0[i] = am.apply(ctx, 0, gens[i]);
    tw1[i] = am.apply(ctx, 1, gens[i]);
    single[i] = SElem{{gens[i], spoly_const(Gaussian(1))}};
  }

  BracketTable tab(alg, ctx, 3 * std::min(w.lo, 0L), 3 * std::max(w.hi, 0L));
  // all brackets of generator triples
  std::vector<SElem> btab(ng * ng * ng);
  for (size_t i = 0; i < ng; ++i)
    for (size_t j = 0; j < ng; ++j)
      for (size_t k = 0; k < ng; ++k) {
        SElem e;
        tab.bracket_gen(gens[i], gens[j], gens[k], spoly_const(Gaussian(1)), e);
        btab[(i * ng + j) * ng + k] = std::move(e);
      }

  // Allocation-bound work; extra threads mostly contend on the allocator,
  // so the sweep defaults to one worker unless explicitly overridden.
  unsigned nt = threads ? worker_count(threads) : 1;
  size_t npairs = ng * ng;
  if ((size_t)nt > npairs) nt = (unsigned)npairs;
  if (nt == 0) nt = 1;
  struct Local {
    std::vector<SPoly> eqs;
    std::unordered_set<Hash128, Hash128Hasher> seen;
  };
  std::vector<Local> locals(nt);
  auto run_chunk = [&](unsigned t, size_t begin, size_t end) {
    Local& loc = locals[t];
    for (size_t pair = begin; pair < end; ++pair) {
      size_t i1 = pair / ng, i2 = pair % ng;
      for (size_t i3 = 0; i3 < ng; ++i3)
        for (size_t i4 = 0; i4 < ng; ++i4)
          for (size_t i5 = 0; i5 < ng; ++i5) {
            SElem r = tab.bracket(tw0[i1], tw1[i2], btab[(i3 * ng + i4) * ng + i5]);
            auto sub = [&](const SElem& e) {
              for (const auto& [g, p] : e) selem_add(r, g, spoly_neg(p));
            };
            sub(tab.bracket(btab[(i1 * ng + i2) * ng + i3], tw0[i4], tw1[i5]));
            sub(tab.bracket(tw0[i3], btab[(i1 * ng + i2) * ng + i4], tw1[i5]));
            sub(tab.bracket(tw0[i3], tw1[i4], btab[(i1 * ng + i2) * ng + i5]));
            for (auto& [g, p] : r) {
              (void)g;
              normalize_eq(ctx, p);
              if (p.is_zero()) continue;
              if (loc.seen.insert(spoly_hash(p)).second) loc.eqs.push_back(std::move(p));
            }
          }
    }
  };
  if (nt == 1) {
    run_chunk(0, 0, npairs);
  } else {
    std::vector<std::thread> pool;
    size_t chunk = (npairs + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t)
      pool.emplace_back(run_chunk, t, t * chunk, std::min(npairs, (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }
  for (unsigned t = 0; t < nt; ++t)
    for (auto& p : locals[t].eqs) cs.add_equation(p);
  return cs;
}

// ---------------------------------------------------------------------------
// Solution families and the case-tree solver.
// ---------------------------------------------------------------------------
struct SolutionEntry {
  int map_slot = 0;
  std::string source, target, seq;
  Scalar amplitude;            // presentation amplitude (nonzero branch)
  std::optional<Symbol> base;  // geometric base, if shift != 0
  long shift = 0;
};

struct SolutionFamily {
  std::string branch;  // case-tree path, e.g. "a1=0 > a2=0 > b1!=0"
  std::vector<SolutionEntry> entries;
  std::vector<std::pair<Scalar, Scalar>> conditions;  // (raw, reduced)
  std::vector<Scalar> leftover;                       // unresolved equations
  bool geometric = true;
  bool verified = false;

  bool unconditional() const { return conditions.empty() && leftover.empty(); }

  json to_json() const {
    json j;
    j["branch"] = branch;
    json ents = json::array();
    for (const auto& e : entries) {
      json je;
      je["map"] = e.map_slot == 0 ? "alpha1" : "alpha2";
      je["source"] = e.source;
      je["target"] = e.target;
      je["amplitude"] = e.amplitude.to_string();
      je["shift"] = e.shift;
      if (e.base) je["base"] = e.base->name;
      ents.push_back(je);
    }
    j["entries"] = ents;
    json conds = json::array();
    for (const auto& [raw, red] : conditions) {
      conds.push_back({{"raw", raw.to_string() + " = 0"}, {"reduced", red.to_string() + " = 0"}});
    }
    j["conditions"] = conds;
    if (!leftover.empty()) {
      json lo = json::array();
      for (const auto& e : leftover) lo.push_back(e.to_string() + " = 0");
      j["leftover"] = lo;
    }
    j["geometric"] = geometric;
    j["verified"] = verified;
    return j;
  }

  // Twist maps induced by the family (amplitudes may contain the family's
  // free parameters).
  TwistPair twist_pair() const {
    TwistPair t;
    t.name = "classified";
    for (const auto& e : entries) {
      LinearMap& m = e.map_slot == 0 ? t.alpha1 : t.alpha2;
      m.add_rule(e.source, LinearMap::Rule(e.target, e.amplitude, e.base, e.shift));
    }
    return t;
  }
  LinearMap single_map() const {
    LinearMap m;
    for (const auto& e : entries)
      m.add_rule(e.source, LinearMap::Rule(e.target, e.amplitude, e.base, e.shift));
    return m;
  }
};

namespace solver_detail {

enum class SeqState { Undecided, Zero, NonZero };

struct Branch {
  std::vector<SPoly> eqs;  // small equations that drive the elimination
  // Large equations are shared and immutable; they are substituted and
  // inspected only when a branch bottoms out.
  std::shared_ptr<const std::vector<SPoly>> passive;
  std::map<std::string, SeqState> seq;
  std::map<int, SPoly> elim;  // unknown id -> single-term value (or zero)
  std::set<int> nonzero_params;  // amplitude symbols of nonzero sequences
  std::map<std::string, std::pair<int, int>> geom;  // seq -> (amp id, base id)
  std::vector<std::string> path;
  std::vector<SPoly> conditions;  // collected during the walk (params only)
};

class Solver {
 public:
  Solver(const ConstraintSet& cs, std::map<std::string, std::string> amp_names,
         std::string fresh_base)
      : ctx_(*cs.ctx), cs_(cs), amp_names_(std::move(amp_names)),
        fresh_base_(std::move(fresh_base)) {
    for (const auto& e : cs.eqs) {
      for (const auto& [m, c] : e.t) {
        (void)c;
        if (m.qexp != 0) q_in_use_ = true;
      }
    }
  }

  std::vector<SolutionFamily> run() {
    Branch root;
    auto passive = std::make_shared<std::vector<SPoly>>();
    for (const auto& e : cs_.eqs) {
      if (e.t.size() <= 3)
        root.eqs.push_back(e);
      else
        passive->push_back(e);
    }
    root.passive = passive;
    for (const auto& s : cs_.seq_order) root.seq[s] = SeqState::Undecided;
    std::vector<SolutionFamily> out;
    solve(root, out, 0);
    return out;
  }

 private:
  Ctx& ctx_;
  const ConstraintSet& cs_;
  std::map<std::string, std::string> amp_names_;
  std::string fresh_base_;
  bool q_in_use_ = false;
  static constexpr int kMaxDepth = 64;

  std::string fresh_base_name(int& counter) const {
    std::string stem = fresh_base_.empty() ? "r" : fresh_base_;
    while (true) {
      std::string name = counter == 0 ? stem : stem + std::to_string(counter);
      ++counter;
      if (name == "q" && q_in_use_) continue;
      if (ctx_.by_name.count(name)) continue;
      return name;
    }
  }

  bool nonzero_sym(const Branch& b, int id) const {
    const SymInfo& si = ctx_.syms[id];
    if (si.invertible) return true;
    if (b.nonzero_params.count(id)) return true;
    if (!si.is_unknown) return false;
    auto it = b.seq.find(si.seq);
    return it != b.seq.end() && it->second == SeqState::NonZero;
  }

  // per-index unknowns of a sequence that actually occur in the system
  std::vector<std::pair<long, int>> used_ids(const std::string& seq) const {
    std::vector<std::pair<long, int>> out;
    auto it = ctx_.seq_syms.find(seq);
    if (it == ctx_.seq_syms.end()) return out;
    for (auto [idx, id] : it->second)
      if (cs_.used.count(id)) out.push_back({idx, id});
    return out;
  }

  // Remove factors that cannot vanish in this branch.
  SPoly cancel_nonzero(const Branch& b, const SPoly& p) const {
    if (p.t.empty()) return p;
    std::map<int, int> mins;
    bool first = true;
    for (const auto& [m, c] : p.t) {
      (void)c;
      std::map<int, int> cur;
      for (auto [id, e] : m.syms)
        if (nonzero_sym(b, id)) cur[id] = e;
      if (first) {
        mins = cur;
        first = false;
      } else {
        for (auto it = mins.begin(); it != mins.end();) {
          auto f = cur.find(it->first);
          if (f == cur.end())
            it = mins.erase(it);
          else {
            it->second = std::min(it->second, f->second);
            ++it;
          }
        }
      }
    }
    if (mins.empty()) return p;
    SPoly out;
    for (const auto& [m, c] : p.t) {
      SMono mm;
      mm.qexp = m.qexp;
      for (auto [id, e] : m.syms) {
        auto it = mins.find(id);
        int ee = it != mins.end() ? e - it->second : e;
        if (ee != 0) mm.syms.push_back({id, ee});
      }
      spoly_add_term(out, mm, c);
    }
    return out;
  }

  // Record an elimination in the branch's closed substitution map; equation
  // updates are driven by the caller's dirty tracking.
  void record_elim(Branch& b, int id, const SPoly& value) {
    SPoly v = value;
    for (const auto& [eid, ev] : b.elim) v = spoly_subst(v, eid, ev);
    b.elim[id] = v;
    for (auto& [eid, ev] : b.elim) ev = spoly_subst(ev, id, v);
  }

  // Single-pass substitution of the branch's eliminations.  Relies on the
  // elimination map being closed and every value being a single term (or
  // zero), which record_elim maintains.
  SPoly subst_elims(const Branch& b, const SPoly& p) const {
    bool touched = false;
    for (const auto& [m, c] : p.t) {
      (void)c;
      for (auto [id, e] : m.syms) {
        (void)e;
        if (b.elim.count(id)) {
          touched = true;
          break;
        }
      }
      if (touched) break;
    }
    if (!touched) return p;
    SPoly out;
    for (const auto& [m, c] : p.t) {
      SMono kept;
      kept.qexp = m.qexp;
      SMono extra;
      Gaussian coeff = c;
      bool dead_term = false;
      for (auto [id, e] : m.syms) {
        auto it = b.elim.find(id);
        if (it == b.elim.end()) {
          kept.syms.push_back({id, e});  // stays sorted: m.syms is sorted
          continue;
        }
        const SPoly& v = it->second;
        if (v.is_zero()) {
          if (e < 0) throw Error("substituting zero into a negative power");
          dead_term = true;
          break;
        }
        if (v.t.size() != 1) {  // not expected, but stay correct
          SPoly out2 = p;
          for (const auto& [eid, ev] : b.elim) out2 = spoly_subst(out2, eid, ev);
          return out2;
        }
        const auto& [vm, vc] = v.t[0];
        extra = mono_mul(extra, mono_pow(vm, e));
        coeff = coeff * vc.pow(e);
      }
      if (!dead_term) spoly_add_term(out, mono_mul(kept, extra), coeff);
    }
    return out;
  }

  template <typename MarkFn>
  void zero_sequence(Branch& b, const std::string& seq, MarkFn mark) {
    b.seq[seq] = SeqState::Zero;
    auto it = ctx_.seq_syms.find(seq);
    if (it == ctx_.seq_syms.end()) return;
    for (auto [idx, id] : it->second) {
      (void)idx;
      if (!b.elim.count(id)) {
        record_elim(b, id, SPoly{});
        mark(id);
      }
    }
  }

  // Nowhere-zero branch: the support hypothesis plus the shift equations
  // force the geometric shape, so substitute seq_j = amp * base^j with a
  // fresh nonzero amplitude and a fresh invertible base.
  void nonzero_sequence(Branch& b, const std::string& seq) {
    b.seq[seq] = SeqState::NonZero;
    int amp = ctx_.intern_param(seq + "#amp", false, true, seq);
    int base = ctx_.intern_param(seq + "#base", true, true, seq);
    b.nonzero_params.insert(amp);
    b.geom[seq] = {amp, base};
    auto it = ctx_.seq_syms.find(seq);
    if (it == ctx_.seq_syms.end()) return;
    for (auto [idx, id] : it->second) {
      if (b.elim.count(id)) continue;
      SPoly v;
      SMono m;
      m.syms.push_back({amp, 1});
      if (idx != 0) m.syms.push_back({base, (int)idx});
      std::sort(m.syms.begin(), m.syms.end());
      spoly_add_term(v, m, Gaussian(1));
      record_elim(b, id, v);
    }
  }

  // Simplify to a fixed point: resubstitute equations touched by new
  // eliminations, then harvest zero-forcing, condition extraction, and
  // binomial eliminations.  Returns false if the branch is inconsistent.
  bool simplify(Branch& b) {
    std::vector<SPoly> eqs = std::move(b.eqs);
    b.eqs.clear();
    size_t n = eqs.size();
    std::vector<char> dead(n, 0), dirty(n, 1);
    std::unordered_set<Hash128, Hash128Hasher> keys;
    std::map<int, std::vector<size_t>> occ;
    auto index_eq = [&](size_t i) {
      std::set<int> ids;
      for (const auto& [m, c] : eqs[i].t) {
        (void)c;
        for (auto [id, e] : m.syms) {
          (void)e;
          ids.insert(id);
        }
      }
      for (int id : ids) occ[id].push_back(i);
    };
    auto mark = [&](int id) {
      auto it = occ.find(id);
      if (it == occ.end()) return;
      for (size_t idx : it->second)
        if (!dead[idx]) dirty[idx] = 1;
    };

    bool actions = true;
    while (actions) {
      actions = false;
      // resubstitution pass
      for (size_t i = 0; i < n; ++i) {
        if (dead[i] || !dirty[i]) continue;
        dirty[i] = 0;
        SPoly p = subst_elims(b, eqs[i]);
        normalize_eq(ctx_, p);
        if (p.is_zero()) {
          dead[i] = 1;
          continue;
        }
        if (p.is_constant()) return false;  // contradiction
        if (!keys.insert(spoly_hash(p)).second) {
          dead[i] = 1;
          continue;
        }
        eqs[i] = std::move(p);
        index_eq(i);
      }
      // analysis pass over clean small equations
      for (size_t i = 0; i < n; ++i) {
        if (dead[i] || dirty[i]) continue;
        if (eqs[i].t.size() > 2) continue;
        SPoly e = cancel_nonzero(b, eqs[i]);
        normalize_eq(ctx_, e);
        if (e.is_zero()) {
          dead[i] = 1;
          actions = true;
          continue;
        }
        if (e.is_constant()) return false;

        if (e.t.size() == 1) {
          const SMono& m = e.t[0].first;
          std::vector<int> unknown_candidates, param_candidates;
          for (auto [id, ex] : m.syms) {
            (void)ex;
            if (nonzero_sym(b, id)) continue;
            if (ctx_.syms[id].is_unknown)
              unknown_candidates.push_back(id);
            else
              param_candidates.push_back(id);
          }
          if (unknown_candidates.empty() && param_candidates.empty()) return false;
          if (unknown_candidates.size() == 1 && param_candidates.empty()) {
            const SymInfo& si = ctx_.syms[unknown_candidates[0]];
            b.path.push_back(si.seq + "=0 (forced)");
            zero_sequence(b, si.seq, mark);
            dead[i] = 1;
            actions = true;
            continue;
          }
          if (unknown_candidates.empty() && param_candidates.size() == 1) {
            b.conditions.push_back(spoly_sym(param_candidates[0]));
            dead[i] = 1;
            actions = true;
            continue;
          }
          continue;  // genuine disjunction: wait for the case split
        }

        // binomial: c1*M1 + c2*M2 = 0
        const SMono &m1 = e.t[0].first, &m2 = e.t[1].first;
        bool shared_vanishing = false;
        for (auto [id, ex1] : m1.syms) {
          if (nonzero_sym(b, id)) continue;
          for (auto [id2, ex2] : m2.syms)
            if (id2 == id && ((ex1 > 0 && ex2 > 0) || (ex1 < 0 && ex2 < 0)))
              shared_vanishing = true;
        }
        if (shared_vanishing) continue;  // factorable disjunction, needs a split

        bool done = false;
        for (int side = 0; side < 2 && !done; ++side) {
          const SMono& mine = side == 0 ? m1 : m2;
          const SMono& other = side == 0 ? m2 : m1;
          const Gaussian& cm = side == 0 ? e.t[0].second : e.t[1].second;
          const Gaussian& co = side == 0 ? e.t[1].second : e.t[0].second;
          for (auto [id, ex] : mine.syms) {
            const SymInfo& si = ctx_.syms[id];
            if (ex != 1 || b.elim.count(id)) continue;
            if (!si.is_unknown && !si.solver_var) continue;  // never solve for z, q, ...
            bool cofactor_ok = true;
            for (auto [oid, oex] : mine.syms) {
              (void)oex;
              if (oid != id && !nonzero_sym(b, oid)) cofactor_ok = false;
            }
            if (!cofactor_ok) continue;
            // amplitudes and bases must stay nonzero, so their value has to
            // be provably nonzero; per-index unknowns may take any value
            if (si.solver_var) {
              bool rhs_nonzero = true;
              for (auto [oid, oex] : other.syms) {
                (void)oex;
                if (!nonzero_sym(b, oid)) rhs_nonzero = false;
              }
              if (!rhs_nonzero) continue;
            }
            // id = -(co/cm) * other / (mine without id)
            SMono rest;
            rest.qexp = -mine.qexp;
            for (auto [oid, oex] : mine.syms)
              if (oid != id) rest.syms.push_back({oid, -oex});
            SPoly value;
            spoly_add_term(value, mono_mul(other, rest), -(co / cm));
            record_elim(b, id, value);
            mark(id);
            dead[i] = 1;
            actions = true;
            done = true;
            break;
          }
        }
      }
    }
    for (size_t i = 0; i < n; ++i)
      if (!dead[i]) b.eqs.push_back(std::move(eqs[i]));
    return true;
  }

  void solve(Branch b, std::vector<SolutionFamily>& out, int depth) {
    if (depth > kMaxDepth) throw Error("case tree too deep");
    if (!simplify(b)) return;  // inconsistent branch
    // case split on the first undecided sequence that still occurs
    for (const auto& sname : cs_.seq_order) {
      if (b.seq[sname] != SeqState::Undecided) continue;
      bool occurs = false;
      for (const auto& e : b.eqs) {
        for (const auto& [m, c] : e.t) {
          (void)c;
          for (auto [id, ex] : m.syms) {
            (void)ex;
            if (ctx_.syms[id].is_unknown && ctx_.syms[id].seq == sname) occurs = true;
          }
        }
      }
      if (!occurs) continue;
      Branch zero = b;
      zero.path.push_back(sname + "=0");
      zero_sequence(zero, sname, [](int) {});
      solve(std::move(zero), out, depth + 1);
      Branch nz = b;
      nz.path.push_back(sname + "!=0");
      nonzero_sequence(nz, sname);
      solve(std::move(nz), out, depth + 1);
      return;
    }
    finalize(std::move(b), out);
  }

  static long ext_gcd(long a, long b, long& x, long& y) {
    if (b == 0) {
      x = 1;
      y = 0;
      return a;
    }
    long x1, y1;
    long g = ext_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
  }

  // Amplitude symbols may acquire finite multiplicative order (e.g. c^4 = 1).
  // Rewrite all exponents modulo that order so eliminated values take their
  // canonical geometric shape, and keep one defining condition per symbol.
  void reduce_torsion(Branch& b, std::vector<SPoly>& leftovers) {
    std::map<int, std::pair<long, Gaussian>> torsion;  // id -> (order, value of id^order)
    for (const auto& c : b.conditions) {
      SPoly r = cancel_nonzero(b, c);
      normalize_eq(ctx_, r);
      if (r.t.size() != 2) continue;
      int sym_term = r.t[0].first.is_one() ? 1 : 0;
      int const_term = 1 - sym_term;
      const SMono& ms = r.t[sym_term].first;
      if (ms.qexp != 0 || ms.syms.size() != 1 || !r.t[const_term].first.is_one()) continue;
      int id = ms.syms[0].first;
      long e = ms.syms[0].second;
      const SymInfo& si = ctx_.syms[id];
      if (e <= 0 || !si.solver_var || si.invertible) continue;
      Gaussian gamma = -(r.t[const_term].second) / r.t[sym_term].second;
      if (gamma.is_zero()) continue;
      auto it = torsion.find(id);
      if (it == torsion.end()) {
        torsion[id] = {e, gamma};
      } else {
        long x, y;
        long g = ext_gcd(it->second.first, e, x, y);
        torsion[id] = {g, it->second.second.pow(x) * gamma.pow(y)};
      }
    }
    if (torsion.empty()) return;
    auto rewrite = [&](SPoly& p) {
      SPoly np;
      for (const auto& [m, c] : p.t) {
        SMono mm;
        mm.qexp = m.qexp;
        Gaussian cc = c;
        for (auto [id, e] : m.syms) {
          auto it = torsion.find(id);
          if (it == torsion.end() || it->second.first <= 0) {
            mm.syms.push_back({id, e});
            continue;
          }
          long g = it->second.first;
          long r = ((e % g) + g) % g;
          long t = (e - r) / g;
          if (t != 0) cc = cc * it->second.second.pow(t);
          if (r != 0) mm.syms.push_back({id, (int)r});
        }
        std::sort(mm.syms.begin(), mm.syms.end());
        spoly_add_term(np, mm, cc);
      }
      p = std::move(np);
    };
    for (auto& [id, v] : b.elim) {
      (void)id;
      rewrite(v);
    }
    for (auto& e : b.eqs) rewrite(e);
    for (auto& c : b.conditions) rewrite(c);
    for (auto& l : leftovers) rewrite(l);
    for (const auto& [id, tg] : torsion) {
      SPoly cond = spoly_pow(spoly_sym(id), tg.first);
      spoly_add_term(cond, SMono{}, -tg.second);
      b.conditions.push_back(cond);
    }
  }

  void finalize(Branch b, std::vector<SolutionFamily>& out) {
    // The large equations join now: substitute the branch's eliminations and
    // either promote newly small actionable ones back into the solve loop or
    // keep them for the condition/leftover analysis below.
    if (b.passive && !b.passive->empty()) {
      std::vector<SPoly> promote, keep;
      for (const auto& e0 : *b.passive) {
        SPoly p = subst_elims(b, e0);
        normalize_eq(ctx_, p);
        if (p.is_zero()) continue;
        if (p.is_constant()) return;  // contradiction
        bool actionable = false;
        for (const auto& [m, c] : p.t) {
          (void)c;
          for (auto [id, ex] : m.syms) {
            (void)ex;
            if (ctx_.syms[id].is_unknown || ctx_.syms[id].solver_var) actionable = true;
          }
        }
        if (p.t.size() <= 3 && actionable)
          promote.push_back(std::move(p));
        else
          keep.push_back(std::move(p));
      }
      if (!promote.empty()) {
        Branch bb = b;
        bb.passive = std::make_shared<std::vector<SPoly>>(std::move(keep));
        for (auto& p : promote) bb.eqs.push_back(std::move(p));
        solve(std::move(bb), out, 0);
        return;
      }
      for (auto& p : keep) b.eqs.push_back(std::move(p));
      b.passive.reset();
    }

    for (auto& c : b.conditions) c = subst_elims(b, c);
    // Residual equations: conditions when parameter-only, leftovers otherwise.
    std::vector<SPoly> leftovers;
    for (auto& e : b.eqs) {
      SPoly r = cancel_nonzero(b, e);
      normalize_eq(ctx_, r);
      if (r.is_zero()) continue;
      bool has_unknown = false;
      for (const auto& [m, c] : r.t) {
        (void)c;
        for (auto [id, ex] : m.syms) {
          (void)ex;
          if (ctx_.syms[id].is_unknown) has_unknown = true;
        }
      }
      // single-term equation in one undecided unknown: the support
      // hypothesis zeroes the whole sequence
      if (has_unknown && r.t.size() == 1) {
        std::vector<int> unk;
        for (auto [id, ex] : r.t[0].first.syms) {
          (void)ex;
          if (ctx_.syms[id].is_unknown && !nonzero_sym(b, id)) unk.push_back(id);
        }
        if (unk.size() == 1) {
          // re-run the main loop after zeroing
          Branch bb = b;
          bb.path.push_back(ctx_.syms[unk[0]].seq + "=0 (forced)");
          zero_sequence(bb, ctx_.syms[unk[0]].seq, [](int) {});
          solve(std::move(bb), out, 0);
          return;
        }
      }
      if (has_unknown)
        leftovers.push_back(r);
      else
        b.conditions.push_back(e);  // keep amplitude factors in the raw form
    }

    reduce_torsion(b, leftovers);

    // A base symbol that was never pinned by any equation is redundant: it
    // occurs with one fixed exponent inside eliminated values only, so the
    // product with its amplitude is a single free parameter.  Pin it to the
    // q-power that makes the pivot amplitude bare.
    for (const auto& [sname, ab] : b.geom) {
      int bs = ab.second;
      if (b.elim.count(bs)) continue;
      bool leaked = false;
      for (const auto& e : b.eqs)
        for (const auto& [m, c] : e.t) {
          (void)c;
          if (mono_contains(m, bs)) leaked = true;
        }
      for (const auto& e : b.conditions)
        for (const auto& [m, c] : e.t) {
          (void)c;
          if (mono_contains(m, bs)) leaked = true;
        }
      for (const auto& e : leftovers)
        for (const auto& [m, c] : e.t) {
          (void)c;
          if (mono_contains(m, bs)) leaked = true;
        }
      if (leaked) continue;
      // occurrences across eliminated values must share one exponent
      long k = 0;
      bool uniform = true;
      for (const auto& [id, v] : b.elim) {
        (void)id;
        for (const auto& [m, c] : v.t) {
          (void)c;
          for (auto [sid, e] : m.syms)
            if (sid == bs) {
              if (k == 0)
                k = e;
              else if (e != k)
                uniform = false;
            }
        }
      }
      if (!uniform || k == 0) continue;
      // choose the power of q that makes the owning sequence's value at
      // index 0 a bare amplitude
      long pivot_qexp = 0;
      bool have_pivot = false;
      for (auto [idx, id] : ctx_.seq_syms[sname]) {
        if (idx != 0 || !b.elim.count(id)) continue;
        const SPoly& v = b.elim.at(id);
        if (v.t.size() == 1 && mono_contains(v.t[0].first, bs)) {
          pivot_qexp = v.t[0].first.qexp;
          have_pivot = true;
        }
      }
      long c = (have_pivot && pivot_qexp % k == 0) ? -pivot_qexp / k : 0;
      SPoly val;
      SMono m;
      m.qexp = c;
      spoly_add_term(val, m, Gaussian(1));
      record_elim(b, bs, val);
    }

    SolutionFamily fam;
    for (const auto& p : b.path) {
      if (!fam.branch.empty()) fam.branch += " > ";
      fam.branch += p;
    }
    if (fam.branch.empty()) fam.branch = "(no splits)";

    // Present each sequence as amplitude * ratio^j: split nonzero sequences
    // carry their own amplitude/base symbols; undecided sequences are read
    // off their eliminated per-index values.
    std::map<int, Scalar> rename;
    struct Pres {
      bool zero = true;
      SPoly amp;      // single term
      SMono ratio;    // single monomial with coefficient below
      Gaussian ratio_coeff = Gaussian(1);
      long pivot = 0;
      bool ok = true;
    };
    std::map<std::string, Pres> pres;

    for (const auto& sname : cs_.seq_order) {
      auto state = b.seq.count(sname) ? b.seq[sname] : SeqState::Undecided;
      Pres p;
      if (state == SeqState::Zero || used_ids(sname).empty()) {
        pres[sname] = p;
        continue;
      }
      // inspect the eliminated values (for nonzero sequences these always
      // exist, ending in the sequence's own amplitude/base symbols)
      std::map<long, SPoly> vals;
      bool any_nonzero = false, all_nonzero = true;
      for (auto [idx, id] : used_ids(sname)) {
        SPoly v = b.elim.count(id) ? b.elim[id] : spoly_sym(id);
        vals[idx] = v;
        if (v.is_zero())
          all_nonzero = false;
        else
          any_nonzero = true;
      }
      if (!any_nonzero) {
        pres[sname] = p;  // everything collapsed to zero
        continue;
      }
      if (!all_nonzero) {
        fam.geometric = false;  // mixed support; should not happen
        pres[sname] = p;
        continue;
      }
      p.zero = false;
      long pivot = vals.count(0) ? 0 : vals.begin()->first;
      p.pivot = pivot;
      SPoly v0 = vals[pivot];
      if (v0.t.size() != 1) {
        fam.geometric = false;
        p.ok = false;
        pres[sname] = p;
        continue;
      }
      p.amp = v0;
      bool have_ratio = false;
      for (auto it = vals.begin(); it != vals.end(); ++it) {
        auto jt = std::next(it);
        if (jt == vals.end()) break;
        if (jt->first != it->first + 1) continue;
        if (it->second.t.size() != 1 || jt->second.t.size() != 1) {
          p.ok = false;
          break;
        }
        SMono r = mono_mul(jt->second.t[0].first, mono_pow(it->second.t[0].first, -1));
        Gaussian rc = jt->second.t[0].second / it->second.t[0].second;
        if (!have_ratio) {
          p.ratio = r;
          p.ratio_coeff = rc;
          have_ratio = true;
        } else if (!(p.ratio == r) || p.ratio_coeff != rc) {
          p.ok = false;
          break;
        }
      }
      if (!have_ratio && vals.size() > 1) p.ok = false;
      if (p.ok) {
        for (const auto& [j, v] : vals) {
          SMono expect = mono_mul(p.amp.t[0].first, mono_pow(p.ratio, j - pivot));
          Gaussian ec = p.amp.t[0].second * p.ratio_coeff.pow(j - pivot);
          if (v.t.size() != 1 || !(v.t[0].first == expect) || v.t[0].second != ec) {
            p.ok = false;
            break;
          }
        }
      }
      if (!p.ok) {
        fam.geometric = false;
        if (std::getenv("NAMBU_SOLVER_TRACE")) {
          std::ostringstream dbg;
          dbg << "[solver] non-geometric sequence " << sname << ":";
          for (const auto& [j, v] : vals)
            dbg << " [" << j << "]=" << to_scalar(ctx_, v).to_string();
          fprintf(stderr, "%s\n", dbg.str().c_str());
        }
      }
      pres[sname] = p;
    }

    // Canonical names: amplitudes get the caller's names, free bases become
    // fresh formal units (shared when sequences share a base symbol).
    int fresh_count = 0;
    auto amp_name_for = [&](const std::string& seq) {
      auto it = amp_names_.find(seq);
      return it != amp_names_.end() ? it->second : seq + "0";
    };
    for (const auto& sname : cs_.seq_order) {
      const Pres& p = pres[sname];
      if (p.zero || !p.ok) continue;
      for (auto [id, ex] : p.amp.t[0].first.syms) {
        (void)ex;
        const SymInfo& si = ctx_.syms[id];
        if (rename.count(id)) continue;
        if (si.solver_var && !si.invertible) {
          rename[id] = Scalar::sym(Symbol::param(amp_name_for(si.seq)));
        } else if (si.is_unknown) {
          std::string nm = (si.idx == pres.count(si.seq) ? pres[si.seq].pivot : 0) == si.idx &&
                                   amp_names_.count(si.seq)
                               ? amp_names_.at(si.seq)
                               : si.name;
          rename[id] = Scalar::sym(Symbol::param(nm));
        }
      }
    }
    // resolve per-sequence base and shift
    std::map<std::string, std::pair<std::optional<Symbol>, long>> seq_base;
    for (const auto& sname : cs_.seq_order) {
      Pres& p = pres[sname];
      if (p.zero || !p.ok) continue;
      bool multi = used_ids(sname).size() > 1 || b.seq[sname] == SeqState::NonZero;
      if (!multi || (p.ratio.is_one() && p.ratio_coeff.is_one())) {
        seq_base[sname] = {std::nullopt, 0};
        continue;
      }
      if (p.ratio.syms.empty() && p.ratio_coeff.is_one()) {
        seq_base[sname] = {Symbol::unit("q"), p.ratio.qexp};
        continue;
      }
      if (p.ratio.syms.size() == 1 && p.ratio.syms[0].second == 1 && p.ratio.qexp == 0 &&
          p.ratio_coeff.is_one()) {
        int id = p.ratio.syms[0].first;
        if (!rename.count(id)) rename[id] = Scalar::sym(Symbol::unit(fresh_base_name(fresh_count)));
        // base symbol is whatever the rename produced
        const Scalar& rs = rename[id];
        if (rs.terms().size() == 1 && rs.terms().begin()->first.powers.size() == 1) {
          seq_base[sname] = {rs.terms().begin()->first.powers.begin()->first, 1};
          continue;
        }
      }
      p.ok = false;  // ratio too complicated to present
      fam.geometric = false;
      seq_base[sname] = {std::nullopt, 0};
    }

    // Solution entries from the ansatz structure.
    for (const auto& ent : cs_.ansatz.entries) {
      if (ent.amplitude) {
        fam.entries.push_back(
            {ent.map_slot, ent.source, ent.target, ent.seq, *ent.amplitude, ent.base, ent.shift});
        continue;
      }
      const Pres& p = pres[ent.seq];
      if (p.zero) continue;
      if (!p.ok) {
        fam.entries.push_back({ent.map_slot, ent.source, ent.target, ent.seq,
                               Scalar::sym(Symbol::param(ent.seq + "_nongeometric")),
                               std::nullopt, 0});
        continue;
      }
      Scalar amp = to_scalar(ctx_, p.amp, &rename);
      auto [base, shift] = seq_base[ent.seq];
      if (p.pivot != 0 && base && shift != 0)
        amp = amp * Scalar::expo(*base, IndexLinearForm(-shift * p.pivot));
      fam.entries.push_back({ent.map_slot, ent.source, ent.target, ent.seq, amp, base, shift});
    }

    // Conditions: raw (content-normalized) and reduced (nonzero amplitudes
    // cancelled).  The rename map may encode relations that make a condition
    // vanish, so filtering happens after conversion.
    std::set<std::string> cond_seen;
    for (const auto& c : b.conditions) {
      SPoly raw = c;
      normalize_eq(ctx_, raw);
      if (raw.is_zero()) continue;
      SPoly red = cancel_nonzero(b, raw);
      normalize_eq(ctx_, red);
      if (red.is_constant() && !red.is_zero()) return;  // impossible branch
      if (red.is_zero()) continue;
      Scalar raw_s = to_scalar(ctx_, raw, &rename);
      Scalar red_s = to_scalar(ctx_, red, &rename);
      if (red_s.is_zero()) continue;
      if (red_s.is_constant()) return;  // impossible branch
      if (!cond_seen.insert(red_s.to_string()).second) continue;
      fam.conditions.push_back({raw_s, red_s});
    }
    for (const auto& l : leftovers) {
      Scalar ls = to_scalar(ctx_, l, &rename);
      if (!ls.is_zero()) fam.leftover.push_back(ls);
    }

    split_roots(std::move(fam), out);
  }

  // Conditions that pin a single presentation parameter to finitely many
  // Gaussian-rational values (e.g. c^4 = 1) are split into explicit root
  // families, but only when the Q(i)-roots exhaust all roots over the
  // algebraic closure.  Parameter conditions such as z^2+4 = 0 stay symbolic.
  void split_roots(SolutionFamily fam, std::vector<SolutionFamily>& out) {
    for (size_t ci = 0; ci < fam.conditions.size(); ++ci) {
      const Scalar& red = fam.conditions[ci].second;
      auto syms = red.free_symbols();
      if (syms.size() != 1) continue;
      const Symbol& s = syms[0];
      bool is_amp = false;
      for (const auto& e : fam.entries)
        if (e.amplitude.mentions(s)) is_amp = true;
      if (!is_amp) continue;

      std::vector<Gaussian> roots;
      bool splittable = false;
      // binomial c_e*s^e + c_0 = 0
      if (red.terms().size() <= 2) {
        Gaussian ce(0), c0(0);
        long deg = 0;
        bool binom = true;
        for (const auto& [m, c] : red.terms()) {
          if (m.powers.empty()) {
            c0 = c;
          } else if (m.powers.size() == 1 && m.powers.begin()->first == s &&
                     m.powers.begin()->second.is_constant() &&
                     m.powers.begin()->second.constant > 0) {
            deg = m.powers.begin()->second.constant;
            ce = c;
          } else {
            binom = false;
          }
        }
        if (binom && deg > 0 && !ce.is_zero()) {
          auto [rs, complete] = (-c0 / ce).nth_roots((unsigned long)deg);
          if (complete) {
            roots = rs;
            splittable = true;
          }
        }
      }
      if (!splittable) {
        // general quadratic c2*s^2 + c1*s + c0 with Q(i) roots
        Gaussian c2(0), c1(0), c0(0);
        bool quad = true;
        for (const auto& [m, c] : red.terms()) {
          if (m.powers.empty()) {
            c0 = c;
          } else if (m.powers.size() == 1 && m.powers.begin()->first == s &&
                     m.powers.begin()->second.is_constant()) {
            long e = m.powers.begin()->second.constant;
            if (e == 1)
              c1 = c;
            else if (e == 2)
              c2 = c;
            else
              quad = false;
          } else {
            quad = false;
          }
        }
        if (quad && (!c1.is_zero() || !c2.is_zero())) {
          if (c2.is_zero()) {
            roots.push_back(-c0 / c1);
            splittable = true;
          } else if (auto sq = (c1 * c1 - Gaussian(4) * c2 * c0).sqrt_exact()) {
            roots.push_back((-c1 + *sq) / (Gaussian(2) * c2));
            if (!sq->is_zero()) roots.push_back((-c1 - *sq) / (Gaussian(2) * c2));
            splittable = true;
          }
        }
      }
      if (!splittable) continue;

      size_t spawned = 0;
      for (const Gaussian& root : roots) {
        if (root.is_zero()) {
          // a zero root is incompatible with any presentation that divided
          // by this symbol
          bool undefined = false;
          for (const auto& e : fam.entries)
            for (const auto& [m, c] : e.amplitude.terms()) {
              (void)c;
              auto it = m.powers.find(s);
              if (it != m.powers.end() && it->second.is_constant() && it->second.constant < 0)
                undefined = true;
            }
          if (undefined) continue;
        }
        ++spawned;
        SolutionFamily f2 = fam;
        f2.conditions.erase(f2.conditions.begin() + ci);
        f2.branch += " > " + s.name + "=" + root.to_string();
        Bindings bind;
        bind.values[s.name] = Scalar(root);
        for (auto& e : f2.entries) e.amplitude = e.amplitude.substitute(bind);
        std::vector<std::pair<Scalar, Scalar>> conds;
        std::set<std::string> cseen;
        for (auto& [raw, r] : f2.conditions) {
          Scalar nraw = raw.substitute(bind), nred = r.substitute(bind);
          if (nred.is_zero()) continue;
          if (!cseen.insert(nred.to_string()).second) continue;
          conds.push_back({nraw, nred});
        }
        f2.conditions = std::move(conds);
        // a root that contradicts a constant condition kills the branch
        bool dead = false;
        for (const auto& [raw, r] : f2.conditions) {
          (void)raw;
          if (r.is_constant() && !r.is_zero()) dead = true;
        }
        if (dead) continue;
        // drop entries whose amplitude collapsed to zero
        std::vector<SolutionEntry> keep;
        for (auto& e : f2.entries)
          if (!e.amplitude.is_zero()) keep.push_back(e);
        f2.entries = std::move(keep);
        split_roots(std::move(f2), out);
      }
      if (spawned > 0) return;
      // every root clashed with the presentation: keep the condition symbolic
    }
    out.push_back(std::move(fam));
  }
};

}  // namespace solver_detail

struct SolveOptions {
  std::map<std::string, std::string> amplitude_names;
  std::string fresh_base = "q";
};

inline std::vector<SolutionFamily> solve_geometric(const ConstraintSet& cs,
                                                   const SolveOptions& opt = {}) {
  solver_detail::Solver s(cs, opt.amplitude_names, opt.fresh_base);
  std::vector<SolutionFamily> fams = s.run();
  // subsume families that are another family with some free amplitudes set
  // to zero (including the trivial all-zero family)
  auto subsumes = [](const SolutionFamily& big, const SolutionFamily& small) {
    if (!small.conditions.empty() || !small.leftover.empty()) return false;
    if (!big.conditions.empty() || !big.leftover.empty()) return false;
    if (small.entries.size() >= big.entries.size()) return false;
    for (const auto& es : small.entries) {
      bool found = false;
      for (const auto& eb : big.entries) {
        if (eb.map_slot == es.map_slot && eb.source == es.source && eb.target == es.target &&
            eb.shift == es.shift && eb.amplitude.is_monomial() &&
            !eb.amplitude.free_symbols().empty())
          found = true;
      }
      if (!found) return false;
    }
    // every big entry must carry a free amplitude, so that zeroing it is a
    // genuine specialization
    for (const auto& eb : big.entries)
      if (eb.amplitude.free_symbols().empty()) return false;
    return true;
  };
  std::vector<SolutionFamily> kept;
  for (size_t i = 0; i < fams.size(); ++i) {
    bool drop = false;
    for (size_t j = 0; j < fams.size() && !drop; ++j)
      if (i != j && subsumes(fams[j], fams[i])) drop = true;
    if (!drop) kept.push_back(fams[i]);
  }
  // dedupe structurally identical families from different branches
  std::vector<SolutionFamily> unique;
  for (auto& f : kept) {
    bool dup = false;
    for (const auto& g : unique) {
      if (f.entries.size() != g.entries.size() || f.conditions.size() != g.conditions.size())
        continue;
      bool same = true;
      for (size_t i = 0; i < f.entries.size(); ++i) {
        const auto &a = f.entries[i], &b = g.entries[i];
        if (a.map_slot != b.map_slot || a.source != b.source || a.target != b.target ||
            a.shift != b.shift || !(a.amplitude == b.amplitude))
          same = false;
      }
      for (size_t i = 0; same && i < f.conditions.size(); ++i)
        if (!(f.conditions[i].second == g.conditions[i].second)) same = false;
      if (same) dup = true;
    }
    if (!dup) unique.push_back(std::move(f));
  }
  return unique;
}

// ---------------------------------------------------------------------------
// classify_twists: all Hom-Nambu-Lie twisting maps of the 2x2 generator-wise
// shape, via windowed HFI constraints + the case-tree solver, each family
// re-verified symbolically.
// ---------------------------------------------------------------------------
struct ClassifyResult {
  std::vector<SolutionFamily> families;     // unconditional, hold for all parameters
  std::vector<SolutionFamily> conditional;  // valid only on a parameter subvariety
  std::vector<SolutionFamily> degenerate;   // alpha1 = 0 or alpha2 = 0: every term of
                                            // the Hom-Nambu identity vanishes, so these
                                            // hold vacuously for any other map

  json to_json() const {
    json j;
    json f = json::array();
    for (const auto& x : families) f.push_back(x.to_json());
    j["families"] = f;
    json c = json::array();
    for (const auto& x : conditional) c.push_back(x.to_json());
    j["conditional"] = c;
    json d = json::array();
    for (const auto& x : degenerate) d.push_back(x.to_json());
    j["degenerate"] = d;
    return j;
  }
};

inline bool verify_conditional(const Algebra& alg, const SolutionFamily& f);

// Substitute exact values for algebra parameters, wrapping the rules.
inline Algebra algebra_substitute(const Algebra& a, const Bindings& b) {
  Algebra out;
  out.name = a.name + "@bound";
  out.families = a.families;
  for (const auto& p : a.parameters)
    if (!b.values.count(p)) out.parameters.push_back(p);
  for (const auto& tri : a.canonical_triples()) {
    RuleFn base = a.rule(tri[0], tri[1], tri[2]);
    out.set_rule(tri[0], tri[1], tri[2],
                 [base, b](const IndexLinearForm& k, const IndexLinearForm& m,
                           const IndexLinearForm& n) {
                   return base(k, m, n).map_coeffs(
                       [&](const Scalar& c) { return c.substitute(b); });
                 });
  }
  if (a.numeric_rule_factory) {
    auto factory = a.numeric_rule_factory;
    out.numeric_rule_factory = [factory, b](const ParamBindings& pb) {
      ParamBindings merged = pb;
      for (const auto& [name, val] : b.values)
        merged.values[name] = val.constant_value();
      return factory(merged);
    };
  }
  return out;
}

inline ClassifyResult classify_twists(const Algebra& alg, const Window& w,
                                      unsigned threads = 0) {
  ConstraintSet cs = hfi_constraints(alg, GeometricAnsatz::twist_full(), w, threads);
  SolveOptions opt;
  opt.amplitude_names = {{"a1", "lambda1"}, {"a2", "lambda2"}, {"b1", "beta1"},
                         {"b2", "beta2"},   {"c1", "gamma1"},  {"c2", "gamma2"},
                         {"d1", "delta1"},  {"d2", "delta2"}};
  std::vector<SolutionFamily> fams = solve_geometric(cs, opt);
  ClassifyResult out;
  for (auto& f : fams) {
    // pairs with a vanishing member satisfy the identity vacuously
    bool has1 = false, has2 = false;
    for (const auto& e : f.entries) (e.map_slot == 0 ? has1 : has2) = true;
    if (!has1 || !has2) {
      out.degenerate.push_back(std::move(f));
      continue;
    }
    if (!f.unconditional()) {
      // verify on the parameter subvariety when the reduced condition pins a
      // single parameter to Gaussian-rational points
      f.verified = verify_conditional(alg, f);
      out.conditional.push_back(std::move(f));
      continue;
    }
    Report rep = verify_identity_symbolic(alg, f.twist_pair());
    f.verified = rep.ok();
    out.families.push_back(std::move(f));
  }
  return out;
}

inline bool verify_conditional(const Algebra& alg, const SolutionFamily& f) {
  if (f.conditions.size() != 1 || !f.leftover.empty()) return false;
  const Scalar& red = f.conditions[0].second;
  auto syms = red.free_symbols();
  if (syms.size() != 1 || syms[0].kind != SymbolKind::Param) return false;
  const Symbol& s = syms[0];
  Gaussian c2(0), c1(0), c0(0);
  for (const auto& [m, c] : red.terms()) {
    if (m.powers.empty())
      c0 = c;
    else if (m.powers.size() == 1 && m.powers.begin()->second == IndexLinearForm(1))
      c1 = c;
    else if (m.powers.size() == 1 && m.powers.begin()->second == IndexLinearForm(2))
      c2 = c;
    else
      return false;
  }
  std::vector<Gaussian> roots;
  if (c2.is_zero()) {
    if (c1.is_zero()) return false;
    roots.push_back(-c0 / c1);
  } else {
    Gaussian disc = c1 * c1 - Gaussian(4) * c2 * c0;
    auto sq = disc.sqrt_exact();
    if (!sq) return false;
    roots.push_back((-c1 + *sq) / (Gaussian(2) * c2));
    if (!sq->is_zero()) roots.push_back((-c1 - *sq) / (Gaussian(2) * c2));
  }
  for (const Gaussian& root : roots) {
    Bindings b;
    b.values[s.name] = Scalar(root);
    Algebra bound = algebra_substitute(alg, b);
    if (!verify_identity_symbolic(bound, f.twist_pair()).ok()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// untwist: alpha^{-1} o [.] for an invertible twisting automorphism.
// ---------------------------------------------------------------------------
inline Algebra untwist(const Algebra& alg, const TwistPair& t) {
  if (!t.symmetric()) throw Error("untwist requires alpha1 == alpha2");
  const LinearMap& alpha = t.alpha1;
  auto inv = alpha.inverse(alg.families);
  if (!inv) {
    if (alpha.is_nilpotent_order2())
      throw Error("twisting map is nilpotent (alpha∘alpha = 0) and thus non-invertible; "
                  "the twist cannot be undone by an inverse map");
    throw Error("twisting map is not an invertible generator-wise map");
  }
  Report hom = is_homomorphism(alg, alpha);
  if (!hom.ok())
    throw Error("twisting map is not an algebra endomorphism; witness pattern (" +
                hom.violations[0].pattern + "), residual " +
                hom.violations[0].residual.to_string());
  Algebra out;
  out.name = alg.name + "_untwisted";
  out.families = alg.families;
  out.parameters = alg.parameters;
  LinearMap nu = *inv;
  for (const auto& tri : alg.canonical_triples()) {
    RuleFn base = alg.rule(tri[0], tri[1], tri[2]);
    out.set_rule(tri[0], tri[1], tri[2],
                 [base, nu](const IndexLinearForm& k, const IndexLinearForm& m,
                            const IndexLinearForm& n) { return nu.apply(base(k, m, n)); });
  }
  auto src = std::make_shared<Algebra>(alg);
  out.numeric_rule_factory = [src, nu](const ParamBindings& pb) {
    NumericRuleFn base = src->numeric_rule_factory ? src->numeric_rule_factory(pb)
                                                   : generic_numeric_rule(src, pb);
    NumericMap nmap = bind_map(nu, *src, pb);
    return [base, nmap](const std::array<int, 3>& ranks, const std::array<long, 3>& degs,
                        const Gaussian& scale, std::vector<NumericTerm>& out_terms) {
      std::vector<NumericTerm> tmp;
      base(ranks, degs, scale, tmp);
      for (const auto& t : tmp)
        for (const auto& [g, c] : nmap.apply({t.family_rank, t.degree}, t.coeff))
          out_terms.push_back({g.rank, g.deg, c});
    };
  };
  return out;
}

}  // namespace nambu
