#include <doctest.h>

#include <random>

#include "nambu/vw_family.hpp"

using namespace nambu;

namespace {

Scalar two_i() { return Scalar(Gaussian(Rational(0), Rational(2))); }

Element gen(const std::string& fam, long d) { return Element(Generator(fam, d)); }

Gaussian rnd_gauss(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-3, 3);
  return Gaussian(Rational(d(rng)), Rational(d(rng)));
}

// residual evaluated entirely on the numeric oracle path for one tuple
NumericElem numeric_residual(const Algebra& a, const std::optional<TwistPair>& t,
                             const ParamBindings& pb,
                             const std::array<std::pair<std::string, long>, 5>& tuple) {
  NumericEngine eng(a, pb);
  std::array<NumericElem, 5> xs;
  for (int i = 0; i < 5; ++i)
    xs[i] = NumericElem{{{a.rank(tuple[i].first), tuple[i].second}, Gaussian(1)}};
  if (t) {
    NumericMap m1 = bind_map(t->alpha1, a, pb), m2 = bind_map(t->alpha2, a, pb);
    return eng.hfi(m1, m2, xs[0], xs[1], xs[2], xs[3], xs[4]);
  }
  return eng.fi(xs[0], xs[1], xs[2], xs[3], xs[4]);
}

}  // namespace

TEST_CASE("bracket values on generators") {
  Algebra cfz = cfz_algebra(z_scalar());
  CHECK(cfz.bracket(Generator("Q", 1), Generator("Q", 2), Generator("Q", 3)) ==
        Scalar(-2) * gen("R", 6));
  Element e = cfz.bracket(Generator("Q", 2), Generator("Q", 0), Generator("R", 1));
  CHECK(e == Scalar(2) * gen("Q", 3) + Scalar(2) * z_scalar() * gen("R", 3));
  CHECK(cfz.bracket(Generator("Q", 5), Generator("Q", 5), Generator("R", 0)).is_zero());

  Algebra qvw = qvw_algebra(z_scalar(), q_scalar());
  Element qb = qvw.bracket(Generator("Q", 1), Generator("Q", 2), Generator("Q", 3));
  CHECK(qb == (Scalar(-2) * Scalar::expo(q_symbol(), 6)) * gen("R", 6));

  CHECK_THROWS_AS(cfz.bracket(Generator("X", 0), Generator("Q", 0), Generator("R", 0)), Error);
}

TEST_CASE("skew symmetry under all six permutations, random concrete degrees") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> deg(-5, 5);
  std::uniform_int_distribution<int> fam(0, 1);
  for (const Algebra& a : {cfz_algebra(z_scalar()), qvw_algebra(z_scalar(), q_scalar())}) {
    for (int t = 0; t < 200; ++t) {
      std::array<Generator, 3> g;
      for (auto& x : g) x = Generator(a.families[fam(rng)], deg(rng));
      Element base = a.bracket(g[0], g[1], g[2]);
      static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
      static const int signs[6] = {1, -1, -1, 1, 1, -1};
      for (int p = 0; p < 6; ++p) {
        Element perm = a.bracket(g[perms[p][0]], g[perms[p][1]], g[perms[p][2]]);
        CHECK(perm == (signs[p] == 1 ? base : -base));
      }
    }
  }
}

TEST_CASE("trilinearity on random data") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<long> deg(-4, 4);
  Algebra a = cfz_algebra(z_scalar());
  for (int t = 0; t < 50; ++t) {
    Scalar ca(rnd_gauss(rng)), cb(rnd_gauss(rng));
    Element x = gen("Q", deg(rng)), xp = gen("R", deg(rng));
    Element y = gen("Q", deg(rng)), z = gen("R", deg(rng));
    CHECK(a.bracket(ca * x + cb * xp, y, z) ==
          ca * a.bracket(x, y, z) + cb * a.bracket(xp, y, z));
  }
}

TEST_CASE("FI residual basics") {
  Algebra cfz2i = cfz_algebra(two_i());
  // symbolic degrees
  Element qu = Element(Generator("Q", IndexLinearForm::var("u")));
  Element qv = Element(Generator("Q", IndexLinearForm::var("v")));
  Element qk = Element(Generator("Q", IndexLinearForm::var("k")));
  Element qm = Element(Generator("Q", IndexLinearForm::var("m")));
  Element rn = Element(Generator("R", IndexLinearForm::var("n")));
  CHECK(fi_residual(cfz2i, qu, qv, qk, qm, rn).is_zero());

  // x1 = x2 kills every term
  Algebra cfz = cfz_algebra(z_scalar());
  CHECK(fi_residual(cfz, qu, qu, qk, qm, rn).is_zero());

  // symbolic z at concrete degrees: nonzero, vanishing at z = +-2i
  Element r = fi_residual(cfz, gen("Q", 0), gen("Q", 1), gen("Q", 2), gen("Q", 3), gen("R", 4));
  CHECK(!r.is_zero());
  for (const Gaussian& root :
       {Gaussian(Rational(0), Rational(2)), Gaussian(Rational(0), Rational(-2))}) {
    Bindings b;
    b.values["z"] = Scalar(root);
    CHECK(r.map_coeffs([&](const Scalar& c) { return c.substitute(b); }).is_zero());
  }
  // independent check: the numeric oracle agrees at sample z values
  ParamBindings pb1;
  pb1.values["z"] = Gaussian(1);
  CHECK(!numeric_residual(cfz, std::nullopt, pb1,
                          {{{"Q", 0}, {"Q", 1}, {"Q", 2}, {"Q", 3}, {"R", 4}}})
             .empty());
  ParamBindings pb2;
  pb2.values["z"] = Gaussian(Rational(0), Rational(2));
  CHECK(numeric_residual(cfz, std::nullopt, pb2,
                         {{{"Q", 0}, {"Q", 1}, {"Q", 2}, {"Q", 3}, {"R", 4}}})
            .empty());
}

TEST_CASE("HFI with identity twist reduces to FI") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<long> deg(-3, 3);
  Algebra a = cfz_algebra(z_scalar());
  TwistPair id = TwistPair::identity(a.families);
  for (int t = 0; t < 25; ++t) {
    std::array<Element, 5> xs;
    for (auto& x : xs) x = gen(deg(rng) % 2 ? "Q" : "R", deg(rng));
    CHECK(hfi_residual(a, id, xs[0], xs[1], xs[2], xs[3], xs[4]) ==
          fi_residual(a, xs[0], xs[1], xs[2], xs[3], xs[4]));
  }
}

TEST_CASE("HFI vanishes for the scaling twist at z = 2i and the beta twist at symbolic z") {
  Algebra q2i = qvw_algebra(two_i(), q_scalar());
  TwistPair sc = scaling_twist(Scalar::one(), Scalar::one());
  CHECK(verify_identity_symbolic(q2i, sc).ok());

  Algebra qz = qvw_algebra(z_scalar(), q_scalar());
  TwistPair bt = beta_twist(Scalar::sym(Symbol::param("beta1")),
                            Scalar::sym(Symbol::param("beta2")));
  CHECK(verify_identity_symbolic(qz, bt).ok());
}

TEST_CASE("symbolic verification over all family patterns") {
  CHECK(verify_identity_symbolic(cfz_algebra(two_i())).ok());
  CHECK(verify_identity_symbolic(cfz_algebra(Scalar(Gaussian(Rational(0), Rational(-2))))).ok());
  Report sym_z = verify_identity_symbolic(cfz_algebra(z_scalar()));
  CHECK(!sym_z.ok());
  CHECK(sym_z.violation_count > 0);
  // report serialization carries the violating patterns
  json j = sym_z.to_json();
  CHECK(j["violations"].size() == sym_z.violations.size());
}

TEST_CASE("window oracle: exhaustive concrete sweeps") {
  ParamBindings z2i;
  z2i.values["z"] = Gaussian(Rational(0), Rational(2));
  Report clean = brute_force_window(cfz_algebra(z_scalar()), std::nullopt, {-2, 2}, z2i, 10);
  CHECK(clean.ok());

  ParamBindings z1;
  z1.values["z"] = Gaussian(1);
  Report dirty = brute_force_window(cfz_algebra(z_scalar()), std::nullopt, {-1, 1}, z1, 10);
  CHECK(!dirty.ok());
  CHECK(dirty.violations.size() == 10);  // capped
  CHECK(dirty.truncated);
  CHECK(dirty.violation_count > 10);

  ParamBindings qb;
  qb.values["z"] = Gaussian(Rational(0), Rational(2));
  qb.values["q"] = Gaussian(3);
  qb.values["lambda1"] = Gaussian(1);
  qb.values["lambda2"] = Gaussian(1);
  TwistPair sc = scaling_twist(Scalar::sym(Symbol::param("lambda1")),
                               Scalar::sym(Symbol::param("lambda2")));
  Report qclean =
      brute_force_window(qvw_algebra(z_scalar(), q_scalar()), sc, {-2, 2}, qb, 10);
  CHECK(qclean.ok());
}

TEST_CASE("oracle consistency: symbolic residuals match the numeric path exactly") {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<long> deg(-3, 3);
  std::uniform_int_distribution<int> fam(0, 1);
  std::uniform_int_distribution<int> zn(-3, 3);

  Algebra cfz = cfz_algebra(z_scalar());
  Algebra qvw = qvw_algebra(z_scalar(), q_scalar());
  TwistPair bt = beta_twist(Scalar::sym(Symbol::param("beta1")),
                            Scalar::sym(Symbol::param("beta2")));

  for (int t = 0; t < 50; ++t) {
    std::array<std::pair<std::string, long>, 5> tuple;
    std::array<Element, 5> xs;
    for (int i = 0; i < 5; ++i) {
      tuple[i] = {fam(rng) ? "R" : "Q", deg(rng)};
      xs[i] = gen(tuple[i].first, tuple[i].second);
    }
    Gaussian zv(Rational(zn(rng)), Rational(zn(rng)));
    Gaussian qv(Rational(zn(rng) * 2 + 1), Rational(1));  // nonzero
    Gaussian b1v(Rational(zn(rng)), Rational(0));
    Gaussian b2v(Rational(zn(rng)), Rational(1));
    Bindings sb;
    sb.values["z"] = Scalar(zv);
    sb.values["q"] = Scalar(qv);
    sb.values["beta1"] = Scalar(b1v);
    sb.values["beta2"] = Scalar(b2v);
    ParamBindings pb;
    pb.values["z"] = zv;
    pb.values["q"] = qv;
    pb.values["beta1"] = b1v;
    pb.values["beta2"] = b2v;

    bool use_twist = t % 2 == 0;
    const Algebra& a = use_twist ? qvw : cfz;
    Element sym = use_twist ? hfi_residual(a, bt, xs[0], xs[1], xs[2], xs[3], xs[4])
                            : fi_residual(a, xs[0], xs[1], xs[2], xs[3], xs[4]);
    NumericElem num =
        numeric_residual(a, use_twist ? std::optional<TwistPair>(bt) : std::nullopt, pb, tuple);

    // exact agreement generator by generator
    Element sym_bound = sym.map_coeffs([&](const Scalar& c) { return c.substitute(sb); });
    std::map<std::pair<int, long>, Gaussian> num_map;
    for (const auto& [g, c] : num) num_map[{g.rank, g.deg}] = c;
    size_t checked = 0;
    for (const auto& [g, c] : sym_bound.terms()) {
      REQUIRE(g.degree.is_constant());
      auto key = std::make_pair(a.rank(g.family), g.degree.constant);
      REQUIRE(c.is_constant());
      CHECK(num_map.count(key));
      if (num_map.count(key)) CHECK(num_map[key] == c.constant_value());
      ++checked;
    }
    CHECK(checked == num_map.size());
  }
}

TEST_CASE("residuals are multilinear in every slot") {
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<long> deg(-3, 3);
  Algebra a = cfz_algebra(z_scalar());
  TwistPair bt = beta_twist(Scalar::sym(Symbol::param("beta1")),
                            Scalar::sym(Symbol::param("beta2")));
  for (int slot = 0; slot < 5; ++slot) {
    std::array<Element, 5> xs;
    for (auto& x : xs) x = gen(deg(rng) % 2 ? "Q" : "R", deg(rng));
    Scalar ca(rnd_gauss(rng)), cb(rnd_gauss(rng));
    Element u = gen("Q", deg(rng)), v = gen("R", deg(rng));

    auto with = [&](const Element& e, auto f) {
      std::array<Element, 5> ys = xs;
      ys[slot] = e;
      return f(ys);
    };
    auto fi = [&](const std::array<Element, 5>& ys) {
      return fi_residual(a, ys[0], ys[1], ys[2], ys[3], ys[4]);
    };
    auto hfi = [&](const std::array<Element, 5>& ys) {
      return hfi_residual(a, bt, ys[0], ys[1], ys[2], ys[3], ys[4]);
    };
    CHECK(with(ca * u + cb * v, fi) == ca * with(u, fi) + cb * with(v, fi));
    CHECK(with(ca * u + cb * v, hfi) == ca * with(u, hfi) + cb * with(v, hfi));
  }
}
