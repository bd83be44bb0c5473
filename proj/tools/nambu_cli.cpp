// nambu_cli.cpp
// Command-line front end: symbolic/window identity verification, twist
// classification, endomorphism solving, untwisting, the operator
// realization check, and the Jacobian-bracket demo.  Reports are JSON
// (deterministic for identical invocations) or plain text.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "nambu/morphisms.hpp"
#include "nambu/poly3.hpp"
#include "nambu/realize.hpp"
#include "nambu/vw_family.hpp"

using namespace nambu;

namespace {

// Parameter literals: integers, fractions a/b, Gaussian literals a+bi
// (e.g. "2i", "-1/2+3i", "1-i"), or a symbol name / "symbolic".
std::optional<Gaussian> parse_gaussian(const std::string& text) {
  size_t pos = 0;
  auto parse_rational = [&](bool& ok) -> Rational {
    size_t start = pos;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
    size_t digits = pos;
    while (pos < text.size() && isdigit((unsigned char)text[pos])) ++pos;
    bool have_digits = pos > digits;
    if (pos < text.size() && text[pos] == '/' && have_digits) {
      ++pos;
      size_t den = pos;
      while (pos < text.size() && isdigit((unsigned char)text[pos])) ++pos;
      if (pos == den) {
        ok = false;
        return Rational(0);
      }
    }
    if (!have_digits) {
      // bare sign before "i" means +-1
      if (pos < text.size() && text[pos] == 'i') {
        ok = true;
        return text[start] == '-' ? Rational(-1) : Rational(1);
      }
      ok = false;
      return Rational(0);
    }
    ok = true;
    return Rational::from_string(text.substr(start, pos - start));
  };

  bool ok = false;
  if (text == "i") return Gaussian(Rational(0), Rational(1));
  if (text == "-i") return Gaussian(Rational(0), Rational(-1));
  Rational first = parse_rational(ok);
  if (!ok) return std::nullopt;
  if (pos == text.size()) return Gaussian(first, Rational(0));
  if (text[pos] == 'i' && pos + 1 == text.size()) return Gaussian(Rational(0), first);
  // a+bi / a-bi
  if (text[pos] != '+' && text[pos] != '-') return std::nullopt;
  Rational second = parse_rational(ok);
  if (!ok || pos >= text.size() || text[pos] != 'i' || pos + 1 != text.size())
    return std::nullopt;
  return Gaussian(first, second);
}

struct ParamValue {
  Scalar symbolic;                // scalar used to build algebras and twists
  std::optional<Gaussian> value;  // exact value, when numeric
};

ParamValue parse_param(const std::string& text, const std::string& default_symbol) {
  if (text.empty() || text == "symbolic")
    return {Scalar::sym(Symbol::param(default_symbol)), std::nullopt};
  if (auto g = parse_gaussian(text)) return {Scalar(*g), g};
  // a named symbol; "q" stays the distinguished unit
  if (std::all_of(text.begin(), text.end(),
                  [](char c) { return isalnum((unsigned char)c) || c == '_'; })) {
    Symbol s = text == "q" ? Symbol::unit("q") : Symbol::param(text);
    return {Scalar::sym(s), std::nullopt};
  }
  throw Error("cannot parse parameter literal '" + text + "'");
}

Window parse_window(const std::string& text) {
  auto dots = text.find("..");
  if (dots == std::string::npos) throw Error("window must be of the form a..b");
  Window w;
  w.lo = std::stol(text.substr(0, dots));
  w.hi = std::stol(text.substr(dots + 2));
  if (w.lo > w.hi) throw Error("window is empty");
  return w;
}

void emit(const json& j, const std::string& out_path, bool text_format) {
  std::string payload;
  if (text_format) {
    std::ostringstream os;
    std::function<void(const json&, int)> walk = [&](const json& node, int indent) {
      std::string pad(indent, ' ');
      if (node.is_object()) {
        for (auto it = node.begin(); it != node.end(); ++it) {
          if (it.value().is_object() || it.value().is_array()) {
            os << pad << it.key() << ":\n";
            walk(it.value(), indent + 2);
          } else {
            os << pad << it.key() << ": " << it.value().dump() << "\n";
          }
        }
      } else if (node.is_array()) {
        size_t i = 0;
        for (const auto& v : node) {
          if (v.is_object() || v.is_array()) {
            os << pad << "- [" << i << "]\n";
            walk(v, indent + 2);
          } else {
            os << pad << "- " << v.dump() << "\n";
          }
          ++i;
        }
      } else {
        os << pad << node.dump() << "\n";
      }
    };
    walk(j, 0);
    payload = os.str();
  } else {
    payload = j.dump(2) + "\n";
  }
  if (out_path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    f << payload;
  }
}

struct AlgebraSpec {
  std::string name = "cfz";
  std::string z_text, q_text;
  ParamValue z, q;

  void resolve() {
    z = parse_param(z_text, "z");
    q = parse_param(q_text.empty() ? "q" : q_text, "q");
  }

  Algebra build_symbolic() const {
    if (name == "cfz") return cfz_algebra(z.symbolic);
    if (name == "qvw") return qvw_algebra(z.symbolic, q.value ? q_scalar() : q.symbolic);
    if (name == "witt") return naive_witt_algebra();
    throw Error("unknown algebra '" + name + "' (cfz, qvw, witt)");
  }
  // window path: symbols in the rules, exact values in the bindings
  std::pair<Algebra, ParamBindings> build_window() const {
    ParamBindings pb;
    Algebra a = name == "cfz"   ? cfz_algebra(z.value ? z_scalar() : z.symbolic)
                : name == "qvw" ? qvw_algebra(z.value ? z_scalar() : z.symbolic, q_scalar())
                : name == "witt"
                    ? naive_witt_algebra()
                    : throw Error("unknown algebra '" + name + "' (cfz, qvw, witt)");
    if (name != "witt") {
      if (!z.value) throw Error("window mode needs a numeric --z");
      pb.values["z"] = *z.value;
    }
    if (name == "qvw") {
      if (!q.value) throw Error("window mode needs a numeric --q");
      if (q.value->is_zero()) throw Error("q = 0 gives the zero ternary algebra");
      pb.values["q"] = *q.value;
    }
    return {a, pb};
  }
};

struct TwistSpec {
  std::string name = "none";
  std::string l1_text, l2_text, b1_text, b2_text;

  std::optional<TwistPair> build(ParamBindings* pb) const {
    if (name == "none") return std::nullopt;
    if (name == "identity") return TwistPair::identity({"Q", "R"});
    auto amp = [&](const std::string& text, const char* def) {
      ParamValue v = parse_param(text, def);
      if (pb && v.value) pb->values[def] = *v.value;
      if (pb && !v.value) throw Error(std::string("window mode needs a numeric --") + def);
      return v.value ? (pb ? Scalar::sym(Symbol::param(def)) : v.symbolic) : v.symbolic;
    };
    if (name == "scaling")
      return scaling_twist(amp(l1_text, "lambda1"), amp(l2_text, "lambda2"));
    if (name == "beta") return beta_twist(amp(b1_text, "beta1"), amp(b2_text, "beta2"));
    throw Error("unknown twist '" + name + "' (none, identity, scaling, beta)");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact symbolic toolkit for ternary Virasoro-Witt and q-Virasoro-Witt algebras"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_path;
  std::string format = "json";
  app.add_option("--out", out_path, "write the report to a file instead of stdout");
  app.add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));

  AlgebraSpec alg;
  TwistSpec twist;
  std::string mode = "symbolic";
  std::string window_text = "-2..2";
  size_t max_witnesses = SIZE_MAX;

  auto add_algebra_flags = [&](CLI::App* cmd) {
    cmd->add_option("--algebra", alg.name, "cfz, qvw or witt");
    cmd->add_option("--z", alg.z_text, "z parameter: exact literal or 'symbolic'");
    cmd->add_option("--q", alg.q_text, "q parameter: exact literal or 'symbolic'");
  };
  auto add_twist_flags = [&](CLI::App* cmd) {
    cmd->add_option("--twist", twist.name, "none, identity, scaling or beta");
    cmd->add_option("--lambda1", twist.l1_text, "scaling twist amplitude 1");
    cmd->add_option("--lambda2", twist.l2_text, "scaling twist amplitude 2");
    cmd->add_option("--beta1", twist.b1_text, "beta twist amplitude 1");
    cmd->add_option("--beta2", twist.b2_text, "beta twist amplitude 2");
  };

  CLI::App* verify = app.add_subcommand("verify", "check the (Hom-)Nambu identity");
  add_algebra_flags(verify);
  add_twist_flags(verify);
  verify->add_option("--mode", mode, "symbolic or window")
      ->check(CLI::IsMember({"symbolic", "window"}));
  verify->add_option("--window", window_text, "degree window a..b for window mode");
  verify->add_option("--max-witnesses", max_witnesses, "cap on reported window witnesses");

  CLI::App* classify = app.add_subcommand("classify", "classify generator-wise twisting maps");
  add_algebra_flags(classify);
  classify->add_option("--window", window_text, "constraint window a..b");

  std::string ansatz_shape = "both";
  CLI::App* solve_endo = app.add_subcommand("solve-endo", "solve the endomorphism equations");
  add_algebra_flags(solve_endo);
  solve_endo->add_option("--window", window_text, "constraint window a..b")
      ->default_val("-3..3");
  solve_endo->add_option("--ansatz", ansatz_shape, "diagonal, cross or both")
      ->check(CLI::IsMember({"diagonal", "cross", "both"}));

  CLI::App* untwist_cmd = app.add_subcommand("untwist", "undo an invertible twist");
  add_algebra_flags(untwist_cmd);
  add_twist_flags(untwist_cmd);

  std::string lambda_text = "1/4";
  double tol = 1e-12;
  CLI::App* realize = app.add_subcommand("realize", "operator realization of the CFZ brackets");
  realize->add_option("--lambda", lambda_text, "rational lambda, not 0 or 1");
  realize->add_option("--window", window_text, "degree window a..b");
  realize->add_option("--tol", tol, "max allowed deviation");

  std::string gamma_name = "shear";
  size_t samples = 200;
  int degree = 2;
  int coeff_bound = 3;
  uint64_t seed = 20120901;
  CLI::App* jac = app.add_subcommand("jacobian-demo", "Jacobian-bracket Nambu identity demo");
  jac->add_option("--gamma", gamma_name, "identity or shear");
  jac->add_option("--samples", samples, "number of random quintuples");
  jac->add_option("--degree", degree, "max polynomial degree");
  jac->add_option("--coeffs", coeff_bound, "coefficient bound");
  jac->add_option("--seed", seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    json report;
    int exit_code = 0;

    if (*verify) {
      alg.resolve();
      if (mode == "symbolic") {
        Algebra a = alg.build_symbolic();
        auto t = twist.build(nullptr);
        Report rep = verify_identity_symbolic(a, t);
        report = rep.to_json();
        exit_code = rep.ok() ? 0 : 1;
      } else {
        auto [a, pb] = alg.build_window();
        auto t = twist.build(&pb);
        Window w = parse_window(window_text);
        Report rep = brute_force_window(a, t, w, pb, max_witnesses);
        report = rep.to_json();
        report["window"] = {{"lo", w.lo}, {"hi", w.hi}};
        exit_code = rep.ok() ? 0 : 1;
      }
    } else if (*classify) {
      alg.resolve();
      Algebra a = alg.build_symbolic();
      Window w = parse_window(window_text);
      ClassifyResult res = classify_twists(a, w);
      report = res.to_json();
      report["algebra"] = a.name;
      report["window"] = {{"lo", w.lo}, {"hi", w.hi}};
    } else if (*solve_endo) {
      alg.resolve();
      Algebra a = alg.build_symbolic();
      Window w = parse_window(window_text);
      report["algebra"] = a.name;
      report["window"] = {{"lo", w.lo}, {"hi", w.hi}};
      SolveOptions opt;
      opt.amplitude_names = {{"a", "c"}, {"b", "cb"}};
      opt.fresh_base = "q";
      auto run_shape = [&](const char* label, const GeometricAnsatz& shape) {
        ConstraintSet cs = endo_constraints(a, shape, w);
        std::vector<SolutionFamily> fams = solve_geometric(cs, opt);
        json jf = json::array();
        for (auto& f : fams) {
          if (f.unconditional()) f.verified = is_homomorphism(a, f.single_map()).ok();
          jf.push_back(f.to_json());
        }
        report[label] = {{"constraints", cs.size()}, {"families", jf}};
      };
      if (ansatz_shape != "cross") run_shape("diagonal", GeometricAnsatz::endo_diagonal());
      if (ansatz_shape != "diagonal") run_shape("cross", GeometricAnsatz::endo_cross());
    } else if (*untwist_cmd) {
      alg.resolve();
      Algebra a = alg.build_symbolic();
      auto t = twist.build(nullptr);
      if (!t) throw Error("untwist needs --twist");
      Algebra undone = untwist(a, *t);
      report["algebra"] = a.name;
      report["twist"] = t->name;
      json rules = json::array();
      IndexLinearForm k = IndexLinearForm::var("k"), m = IndexLinearForm::var("m"),
                      n = IndexLinearForm::var("n");
      for (const auto& tri : undone.canonical_triples()) {
        json r;
        r["triple"] = tri[0] + "," + tri[1] + "," + tri[2];
        r["bracket"] = undone.rule(tri[0], tri[1], tri[2])(k, m, n).to_string();
        rules.push_back(r);
      }
      report["untwisted_brackets"] = rules;
    } else if (*realize) {
      Window w = parse_window(window_text);
      RealizeReport rep = cfz_recovery_numeric(Rational::from_string(lambda_text), w, tol);
      report = rep.to_json();
      exit_code = rep.pass ? 0 : 1;
    } else if (*jac) {
      JacobianDemoReport rep = jacobian_demo(gamma_name, samples, degree, coeff_bound, seed);
      report = rep.to_json();
      exit_code = rep.ok() ? 0 : 1;
    }

    emit(report, out_path, format == "text");
    return exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
