#include <doctest.h>

#include "nambu/vw_family.hpp"

using namespace nambu;

namespace {
Scalar two_i() { return Scalar(Gaussian(Rational(0), Rational(2))); }

LinearMap qn_scaling() {
  LinearMap f;
  f.add_rule("Q", LinearMap::Rule("Q", Scalar::one(), q_symbol(), 1));
  f.add_rule("R", LinearMap::Rule("R", Scalar::one(), q_symbol(), 1));
  return f;
}

bool has_qn_family(const std::vector<SolutionFamily>& fams) {
  // a_n = b_n = q^n: both entries amplitude 1, shift 1, same base
  for (const auto& f : fams) {
    if (!f.unconditional() || f.entries.size() != 2) continue;
    bool ok = true;
    for (const auto& e : f.entries) {
      if (!(e.amplitude == Scalar::one()) || e.shift != 1 || !e.base ||
          e.source != e.target)
        ok = false;
    }
    if (ok) return true;
  }
  return false;
}
}  // namespace

TEST_CASE("is_homomorphism") {
  Algebra cfz = cfz_algebra(z_scalar());
  CHECK(is_homomorphism(cfz, qn_scaling()).ok());
  CHECK(is_homomorphism(cfz, LinearMap::identity({"Q", "R"})).ok());

  LinearMap bad;
  bad.add_rule("Q", LinearMap::Rule("Q", Scalar(2)));
  bad.add_rule("R", LinearMap::Rule("R", Scalar::one()));
  Report r = is_homomorphism(cfz, bad);
  CHECK(!r.ok());
  bool qqq = false;
  for (const auto& v : r.violations)
    if (v.pattern == "Q,Q,Q") qqq = true;
  CHECK(qqq);
}

TEST_CASE("endo constraint generation") {
  Algebra cfz = cfz_algebra(z_scalar());
  ConstraintSet cs = endo_constraints(cfz, GeometricAnsatz::endo_diagonal(), {-3, 3});
  CHECK(cs.size() > 0);

  // contains instances of b_{k+m+n} = a_k a_m a_n, e.g. (1,2,3): b_6 = a_1 a_2 a_3
  {
    using namespace solver_detail;
    SPoly probe;
    SMono lhs;
    lhs.syms.push_back({cs.ctx->intern_unknown("b", 6), 1});
    spoly_add_term(probe, lhs, Gaussian(1));
    SMono rhs;
    rhs.syms.push_back({cs.ctx->intern_unknown("a", 1), 1});
    rhs.syms.push_back({cs.ctx->intern_unknown("a", 2), 1});
    rhs.syms.push_back({cs.ctx->intern_unknown("a", 3), 1});
    std::sort(rhs.syms.begin(), rhs.syms.end());
    spoly_add_term(probe, rhs, Gaussian(-1));
    normalize_eq(*cs.ctx, probe);
    bool found = false;
    for (const auto& e : cs.eqs)
      if (e == probe) found = true;
    CHECK(found);
  }

  // the all-zero assignment satisfies everything
  std::map<std::string, std::tuple<Scalar, std::optional<Symbol>, long>> zero_assign;
  zero_assign["a"] = {Scalar::zero(), std::nullopt, 0};
  zero_assign["b"] = {Scalar::zero(), std::nullopt, 0};
  CHECK(cs.unsatisfied_by(zero_assign).empty());

  // a_n = b_n = q^n satisfies everything
  std::map<std::string, std::tuple<Scalar, std::optional<Symbol>, long>> qn;
  qn["a"] = {Scalar::one(), q_symbol(), 1};
  qn["b"] = {Scalar::one(), q_symbol(), 1};
  CHECK(cs.unsatisfied_by(qn).empty());

  // a_n = 2^n-style mismatch does not
  std::map<std::string, std::tuple<Scalar, std::optional<Symbol>, long>> bad;
  bad["a"] = {Scalar(2), q_symbol(), 1};
  bad["b"] = {Scalar::one(), q_symbol(), 1};
  CHECK(!cs.unsatisfied_by(bad).empty());
}

TEST_CASE("solve_geometric on the diagonal endomorphism system") {
  Algebra cfz = cfz_algebra(z_scalar());
  ConstraintSet cs = endo_constraints(cfz, GeometricAnsatz::endo_diagonal(), {-3, 3});
  SolveOptions opt;
  opt.amplitude_names = {{"a", "c"}, {"b", "cb"}};
  opt.fresh_base = "q";
  std::vector<SolutionFamily> fams = solve_geometric(cs, opt);
  CHECK(has_qn_family(fams));
  // every unconditional family re-verifies as an endomorphism
  for (auto& f : fams) {
    if (!f.unconditional()) continue;
    CHECK(is_homomorphism(cfz, f.single_map()).ok());
  }
}

TEST_CASE("the literal cross ansatz f(R_n) = b_n Q_n admits only degenerate maps") {
  Algebra cfz = cfz_algebra(z_scalar());
  ConstraintSet cs = endo_constraints(cfz, GeometricAnsatz::endo_cross(), {-3, 3});
  SolveOptions opt;
  opt.amplitude_names = {{"a", "c"}, {"b", "cb"}};
  std::vector<SolutionFamily> fams = solve_geometric(cs, opt);
  // no family with both sequences present survives
  for (const auto& f : fams) {
    bool has_a = false, has_b = false;
    for (const auto& e : f.entries) {
      if (e.seq == "a") has_a = true;
      if (e.seq == "b") has_b = true;
    }
    CHECK(!(has_a && has_b && f.unconditional()));
  }
}

TEST_CASE("empty constraint set returns the unconstrained ansatz family") {
  ConstraintSet cs;
  cs.ansatz = GeometricAnsatz::endo_diagonal();
  cs.seq_order = {"a", "b"};
  std::vector<SolutionFamily> fams = solve_geometric(cs);
  REQUIRE(fams.size() == 1);
  CHECK(fams[0].unconditional());
}

TEST_CASE("classify_twists on the q-deformed algebra") {
  Algebra qz = qvw_algebra(z_scalar(), q_scalar());
  ClassifyResult sym = classify_twists(qz, {-2, 2});
  REQUIRE(sym.families.size() == 1);
  CHECK(sym.families[0].verified);
  // the unconditional family is the beta twist: Q -> R on both maps, shift 1
  for (const auto& e : sym.families[0].entries) {
    CHECK(e.source == "Q");
    CHECK(e.target == "R");
    CHECK(e.shift == 1);
  }
  REQUIRE(sym.conditional.size() == 1);
  CHECK(sym.conditional[0].verified);
  // its reduced condition is z^2 + 4 = 0 (up to a constant)
  REQUIRE(sym.conditional[0].conditions.size() == 1);
  Scalar red = sym.conditional[0].conditions[0].second;
  Scalar expect = Scalar::sym(Symbol::param("z")).pow(2) + Scalar(4);
  bool proportional = false;
  if (!red.is_zero()) {
    Gaussian lead = red.terms().begin()->second;
    Gaussian lead2 = expect.terms().begin()->second;
    proportional = (Scalar(lead2) * red == Scalar(lead) * expect);
  }
  CHECK(proportional);

  Algebra q2i = qvw_algebra(two_i(), q_scalar());
  ClassifyResult bound = classify_twists(q2i, {-2, 2});
  CHECK(bound.families.size() == 2);  // beta and scaling, both unconditional
  CHECK(bound.conditional.empty());
  for (const auto& f : bound.families) CHECK(f.verified);
}

TEST_CASE("classify_twists on cfz (q = 1): constant beta amplitudes") {
  Algebra cfz = cfz_algebra(z_scalar());
  ClassifyResult res = classify_twists(cfz, {-2, 2});
  REQUIRE(res.families.size() == 1);
  CHECK(res.families[0].verified);
  for (const auto& e : res.families[0].entries) {
    CHECK(e.source == "Q");
    CHECK(e.target == "R");
    CHECK(e.shift == 0);  // b^i_n constant
  }
}

TEST_CASE("window independence of the classification") {
  Algebra qz = qvw_algebra(z_scalar(), q_scalar());
  ClassifyResult small = classify_twists(qz, {-2, 2});
  ClassifyResult large = classify_twists(qz, {-3, 3});
  CHECK(small.families.size() == large.families.size());
  CHECK(small.conditional.size() == large.conditional.size());
  for (size_t i = 0; i < small.families.size(); ++i) {
    REQUIRE(small.families[i].entries.size() == large.families[i].entries.size());
    for (size_t j = 0; j < small.families[i].entries.size(); ++j) {
      const auto &a = small.families[i].entries[j], &b = large.families[i].entries[j];
      CHECK(a.source == b.source);
      CHECK(a.target == b.target);
      CHECK(a.amplitude == b.amplitude);
      CHECK(a.shift == b.shift);
    }
  }
}

TEST_CASE("untwist recovers the plain algebra from the scaling twist") {
  Algebra q2i = qvw_algebra(two_i(), q_scalar());
  TwistPair sc = scaling_twist(Scalar::one(), Scalar::one());
  Algebra undone = untwist(q2i, sc);
  CHECK(algebra_equal(undone, cfz_algebra(two_i())));
  CHECK(verify_identity_symbolic(undone).ok());

  // identity twist leaves the algebra unchanged
  Algebra same = untwist(cfz_algebra(z_scalar()), TwistPair::identity({"Q", "R"}));
  CHECK(algebra_equal(same, cfz_algebra(z_scalar())));

  // the beta twist is nilpotent, hence not untwistable
  TwistPair bt = beta_twist(Scalar::sym(Symbol::param("beta1")),
                            Scalar::sym(Symbol::param("beta1")));
  CHECK_THROWS_WITH_AS(untwist(qvw_algebra(z_scalar(), q_scalar()), bt),
                       doctest::Contains("nilpotent"), Error);
}

TEST_CASE("untwist round-trips the composition construction") {
  for (const Gaussian& root :
       {Gaussian(Rational(0), Rational(2)), Gaussian(Rational(0), Rational(-2))}) {
    Algebra base = cfz_algebra(Scalar(root));
    LinearMap rho = qn_scaling();
    auto [twisted, tp] = compose_twist(base, rho);
    CHECK(verify_identity_symbolic(twisted, tp).ok());
    Algebra back = untwist(twisted, tp);
    CHECK(algebra_equal(back, base));
    CHECK(verify_identity_symbolic(back).ok());
  }
}

TEST_CASE("the inverse of a verified automorphism is itself an endomorphism") {
  Algebra cfz = cfz_algebra(z_scalar());
  LinearMap rho = qn_scaling();
  REQUIRE(is_homomorphism(cfz, rho).ok());
  auto inv = rho.inverse(cfz.families);
  REQUIRE(inv.has_value());
  CHECK(is_homomorphism(cfz, *inv).ok());
  // nu(Q_n) = q^-n Q_n
  Element img = inv->apply(Generator("Q", IndexLinearForm::var("n")));
  CHECK(img == Scalar::expo(q_symbol(), IndexLinearForm::var("n") * -1) *
                   Element(Generator("Q", IndexLinearForm::var("n"))));
}
