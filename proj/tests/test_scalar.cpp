#include <doctest.h>

#include <random>

#include "nambu/scalar.hpp"

using namespace nambu;

namespace {

Symbol K() { return Symbol::index("k"); }
Symbol M() { return Symbol::index("m"); }
Symbol Z() { return Symbol::param("z"); }
Symbol Q() { return Symbol::unit("q"); }

Scalar q_to(const IndexLinearForm& f) { return Scalar::expo(Q(), f); }

// random scalar over {z, lambda, k, m, q^forms} with small rational coeffs
Scalar random_scalar(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> terms(0, 3), e(0, 2), qe(-2, 2), c(-4, 4);
  Scalar out;
  int nt = terms(rng);
  for (int t = 0; t <= nt; ++t) {
    Scalar mono(Rational(c(rng), 1 + std::abs(c(rng))));
    if (int ez = e(rng)) mono = mono * Scalar::sym(Z(), ez);
    if (int el = e(rng)) mono = mono * Scalar::sym(Symbol::param("lambda"), el);
    if (int ek = e(rng)) mono = mono * Scalar::sym(K(), ek);
    if (int em = e(rng)) mono = mono * Scalar::sym(M(), em);
    IndexLinearForm f;
    f.constant = qe(rng);
    if (qe(rng) > 0) {
      int ck = qe(rng);
      if (ck != 0) f.coeffs["k"] = ck;
    }
    if (!f.is_zero()) mono = mono * q_to(f);
    out = out + mono;
  }
  return out;
}

NumericBindings random_bindings(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> iv(-4, 4), pv(1, 5);
  NumericBindings b;
  b.index["k"] = iv(rng);
  b.index["m"] = iv(rng);
  b.values["z"] = {(double)iv(rng), (double)iv(rng)};
  b.values["lambda"] = {(double)iv(rng), 0.0};
  b.values["q"] = {(double)pv(rng), (double)pv(rng)};  // nonzero
  return b;
}

}  // namespace

TEST_CASE("additive inverses and cancellation") {
  IndexLinearForm k = IndexLinearForm::var("k"), m = IndexLinearForm::var("m");
  CHECK((q_to(k) + (Scalar(-1) * q_to(k))).is_zero());
  // (z^2) + 4 at z -> 2i
  Scalar expr = Scalar::sym(Z()).pow(2) + Scalar(4);
  Bindings b;
  b.values["z"] = Scalar(Gaussian(Rational(0), Rational(2)));
  CHECK(expr.substitute(b).is_zero());
  // (k-m) + (m-k)
  CHECK((Scalar::from_form(k - m) + Scalar::from_form(m - k)).is_zero());
}

TEST_CASE("multiplication: exponent law, signs, gaussian unit") {
  IndexLinearForm k = IndexLinearForm::var("k"), m = IndexLinearForm::var("m");
  CHECK(q_to(k) * q_to(m) == q_to(k + m));
  Scalar km = Scalar::from_form(k - m), mk = Scalar::from_form(m - k);
  CHECK(km * mk == Scalar(-1) * km * km);
  CHECK(Scalar::i() * Scalar::i() == Scalar(-1));
  // q is invertible: q^l * q^-l = 1
  CHECK(q_to(k) * q_to(-k) == Scalar::one());
}

TEST_CASE("substitution is exact and rejects q = 0") {
  IndexLinearForm k = IndexLinearForm::var("k"), m = IndexLinearForm::var("m");
  Bindings b;
  b.index["k"] = 1;
  b.index["m"] = 2;
  CHECK(q_to(k + m).substitute(b) == q_to(IndexLinearForm(3)));

  // q-deformed structure scalar at q -> 1 loses the q factor
  Scalar s = q_to(k + m) * Scalar::from_form(k - m);
  Bindings b1;
  b1.values["q"] = Scalar::one();
  CHECK(s.substitute(b1) == Scalar::from_form(k - m));

  Scalar zz = Scalar::sym(Z()).pow(2) + Scalar(4);
  Bindings b2;
  b2.values["z"] = Scalar(Gaussian(Rational(0), Rational(-2)));
  CHECK(zz.substitute(b2).is_zero());

  Bindings b3;
  b3.values["q"] = Scalar::zero();
  CHECK_THROWS_AS(q_to(k).substitute(b3), Error);
}

TEST_CASE("numeric evaluation") {
  IndexLinearForm k = IndexLinearForm::var("k");
  NumericBindings b;
  b.index["k"] = 3;
  b.values["q"] = 2.0;
  CHECK(q_to(k).evaluate(b) == std::complex<double>(8.0, 0.0));

  Scalar lam = Scalar::sym(Symbol::param("lambda"));
  Scalar expr = lam - lam * lam;
  NumericBindings b2;
  b2.values["lambda"] = 0.25;
  CHECK(std::abs(expr.evaluate(b2) - std::complex<double>(3.0 / 16.0)) < 1e-15);

  NumericBindings b3;
  b3.values["z"] = {0.0, 2.0};
  CHECK(Scalar::sym(Z()).evaluate(b3) == std::complex<double>(0.0, 2.0));

  CHECK_THROWS_WITH_AS(Scalar::sym(Z()).evaluate(NumericBindings{}), "unbound symbol 'z'",
                       Error);
}

TEST_CASE("ring axioms on random triples, exactly") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 500; ++t) {
    Scalar a = random_scalar(rng), b = random_scalar(rng), c = random_scalar(rng);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * b == b * a);
  }
}

TEST_CASE("zero test matches numeric evaluation on random bindings") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 60; ++t) {
    Scalar a = random_scalar(rng), b = random_scalar(rng);
    Scalar diff = (a + b) * (a - b) - (a * a - b * b);
    CHECK(diff.is_zero());
    Scalar s = a - a;
    CHECK(s.is_zero());
  }
  // probabilistic direction: a structurally nonzero scalar evaluates
  // nonzero somewhere among random bindings
  Scalar nz = Scalar::sym(Z()) * Scalar::sym(K()) + Scalar(1);
  bool saw_nonzero = false;
  for (int t = 0; t < 100; ++t) {
    NumericBindings b = random_bindings(rng);
    if (std::abs(nz.evaluate(b)) > 1e-9) saw_nonzero = true;
  }
  CHECK(saw_nonzero);
}

TEST_CASE("substitution commutes with ring operations") {
  std::mt19937_64 rng(44);
  Bindings b;
  b.index["k"] = 2;
  b.values["z"] = Scalar(Gaussian(Rational(1, 2), Rational(1)));
  for (int t = 0; t < 200; ++t) {
    Scalar x = random_scalar(rng), y = random_scalar(rng);
    CHECK((x + y).substitute(b) == x.substitute(b) + y.substitute(b));
    CHECK((x * y).substitute(b) == x.substitute(b) * y.substitute(b));
  }
}

TEST_CASE("canonical text form round-trips") {
  std::mt19937_64 rng(45);
  for (int t = 0; t < 200; ++t) {
    Scalar a = random_scalar(rng);
    CHECK(Scalar::parse(a.to_string()) == a);
  }
  // a representative display
  IndexLinearForm kmn = IndexLinearForm::var("k") + IndexLinearForm::var("m") +
                        IndexLinearForm::var("n");
  Scalar s = Scalar(-2) * q_to(kmn) *
             (Scalar::sym(Symbol::index("u")) - Scalar::sym(Symbol::index("v"))) *
             Scalar::sym(Z());
  CHECK(Scalar::parse(s.to_string()) == s);
  CHECK(Scalar::parse("(-2)*q^(k+m+n)*(u-v)*z") == s);
}

TEST_CASE("JSON term list round-trips") {
  std::mt19937_64 rng(46);
  for (int t = 0; t < 200; ++t) {
    Scalar a = random_scalar(rng);
    CHECK(Scalar::from_json(a.to_json()) == a);
  }
}

TEST_CASE("deterministic serialization") {
  Scalar a = Scalar::sym(Z()) + q_to(IndexLinearForm::var("k")) * Scalar(Rational(3, 2)) -
             Scalar::i();
  std::string s1 = a.to_string(), s2 = a.to_string();
  CHECK(s1 == s2);
  Scalar b = Scalar::i() * Scalar(-1) + Scalar(Rational(3, 2)) * q_to(IndexLinearForm::var("k")) +
             Scalar::sym(Z());
  CHECK(a.to_string() == b.to_string());  // same value, same canonical text
}
