#include <doctest.h>

#include <random>

#include "nambu/realize.hpp"

using namespace nambu;

namespace {
Scalar lam() { return Scalar::sym(Symbol::param("lambda")); }
IndexLinearForm F(const char* n) { return IndexLinearForm::var(n); }
}  // namespace

TEST_CASE("normal-ordered products") {
  CHECK(DiffOp::exp_op(F("k")) * DiffOp::exp_op(F("m")) == DiffOp::exp_op(F("k") + F("m")));
  CHECK(DiffOp::exp_op(1) * DiffOp::exp_op(2) == DiffOp::exp_op(3));

  // L_m * E_n: mode m+n, polynomial D + n + lambda m
  DiffOp p = DiffOp::l_op(F("m"), lam()) * DiffOp::exp_op(F("n"));
  DPoly expect = DPoly::d(1) + DPoly(Scalar::from_form(F("n")) + lam() * Scalar::from_form(F("m")));
  CHECK(p == DiffOp(F("m") + F("n"), expect));

  // E_0 is the unit
  DiffOp a = DiffOp::l_op(F("k"), lam()) * DiffOp::s_op(F("m"), lam());
  CHECK(a * DiffOp::exp_op(0) == a);
  CHECK(DiffOp::exp_op(0) * a == a);
}

TEST_CASE("product associativity on random operators, exact") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<long> mode(-4, 4);
  std::uniform_int_distribution<int> kind(0, 2);
  auto rnd = [&]() {
    switch (kind(rng)) {
      case 0: return DiffOp::exp_op(mode(rng));
      case 1: return DiffOp::l_op(mode(rng), lam());
      default: return DiffOp::s_op(mode(rng), lam());
    }
  };
  for (int t = 0; t < 200; ++t) {
    DiffOp a = rnd(), b = rnd(), c = rnd();
    CHECK((a * b) * c == a * (b * c));
  }
}

TEST_CASE("binary commutators of the realization") {
  DiffOp lm = DiffOp::l_op(F("m"), lam()), ln = DiffOp::l_op(F("n"), lam());
  CHECK(commutator(lm, ln) == Scalar::from_form(F("n") - F("m")) * DiffOp::l_op(F("m") + F("n"), lam()));
  CHECK(commutator(DiffOp::exp_op(F("m")), DiffOp::exp_op(F("n"))).is_zero());
  CHECK(commutator(lm, DiffOp::exp_op(F("n"))) ==
        Scalar::from_form(F("n")) * DiffOp::exp_op(F("m") + F("n")));
}

TEST_CASE("commutator satisfies the Jacobi identity on random operators") {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<long> mode(-3, 3);
  std::uniform_int_distribution<int> kind(0, 1);
  auto rnd = [&]() {
    return kind(rng) ? DiffOp::l_op(mode(rng), lam()) : DiffOp::exp_op(mode(rng));
  };
  for (int t = 0; t < 100; ++t) {
    DiffOp a = rnd(), b = rnd(), c = rnd();
    DiffOp jac = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) +
                 commutator(c, commutator(a, b));
    CHECK(jac.is_zero());
  }
}

TEST_CASE("ternary commutator is totally antisymmetric, symbolically") {
  DiffOp x = DiffOp::l_op(F("k"), lam()), y = DiffOp::l_op(F("m"), lam()),
         z = DiffOp::exp_op(F("n"));
  DiffOp base = ternary_commutator(x, y, z);
  CHECK(ternary_commutator(y, x, z) == Scalar(-1) * base);
  CHECK(ternary_commutator(x, z, y) == Scalar(-1) * base);
  CHECK(ternary_commutator(z, y, x) == Scalar(-1) * base);
  CHECK(ternary_commutator(y, z, x) == base);
  CHECK(ternary_commutator(z, x, y) == base);
}

TEST_CASE("the four ternary relations hold with fully symbolic degrees and lambda") {
  CHECK(verify_larsson_relations().ok());
  // spot values
  DiffOp lll = ternary_commutator(DiffOp::l_op(F("k"), lam()), DiffOp::l_op(F("m"), lam()),
                                  DiffOp::l_op(F("n"), lam()));
  Scalar c = (lam() - lam() * lam()) * Scalar::from_form(F("k") - F("m")) *
             Scalar::from_form(F("m") - F("n")) * Scalar::from_form(F("n") - F("k"));
  CHECK(lll == c * DiffOp::exp_op(F("k") + F("m") + F("n")));
  CHECK(ternary_commutator(DiffOp::exp_op(F("k")), DiffOp::exp_op(F("m")),
                           DiffOp::exp_op(F("n")))
            .is_zero());
}

TEST_CASE("S_m = L_m E_-m L_m") {
  CHECK(verify_s_identity().ok());
  // m = 0: L_0^2 = S_0
  DiffOp l0 = DiffOp::l_op(0, lam());
  CHECK(l0 * l0 == DiffOp::s_op(0, lam()));
  // lambda -> 0 specialization still holds
  DiffOp lhs = DiffOp::l_op(F("m"), Scalar::zero()) * DiffOp::exp_op(-F("m")) *
               DiffOp::l_op(F("m"), Scalar::zero());
  CHECK(lhs == DiffOp::s_op(F("m"), Scalar::zero()));
}

TEST_CASE("numeric recovery of the brackets") {
  RealizeReport r1 = cfz_recovery_numeric(Rational(1, 4), {-2, 2}, 1e-12);
  CHECK(r1.pass);
  CHECK(r1.max_deviation < 1e-12);
  CHECK(r1.binary_deviation < 1e-12);
  // z = -(1/2)/sqrt(3/16) = -2/sqrt(3)
  CHECK(std::abs(r1.z.real() + 2.0 / std::sqrt(3.0)) < 1e-12);
  CHECK(std::abs(r1.z.imag()) < 1e-12);

  RealizeReport r2 = cfz_recovery_numeric(Rational(1, 2), {-2, 2}, 1e-12);
  CHECK(r2.pass);
  CHECK(std::abs(r2.z) < 1e-12);  // 1 - 2 lambda = 0 forces z = 0

  CHECK_THROWS_AS(cfz_recovery_numeric(Rational(0), {-2, 2}, 1e-12), Error);
  CHECK_THROWS_AS(cfz_recovery_numeric(Rational(1), {-2, 2}, 1e-12), Error);

  // the generic-lambda realization is not Nambu-Lie: the scan sees it
  CHECK(r1.fi_scan_max > 1e-6);
}
