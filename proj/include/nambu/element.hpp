// element.hpp
// Indexed basis symbols (Q_n, R_n, ...) and finite linear combinations.
#pragma once

#include <map>
#include <sstream>
#include <string>

#include "nambu/scalar.hpp"

namespace nambu {

struct Generator {
  std::string family;
  IndexLinearForm degree;

  Generator() = default;
  Generator(std::string f, IndexLinearForm d) : family(std::move(f)), degree(std::move(d)) {}
  Generator(std::string f, long d) : family(std::move(f)), degree(d) {}

  friend bool operator<(const Generator& a, const Generator& b) {
    if (a.family != b.family) return a.family < b.family;
    return a.degree < b.degree;
  }
  friend bool operator==(const Generator& a, const Generator& b) {
    return a.family == b.family && a.degree == b.degree;
  }
  friend bool operator!=(const Generator& a, const Generator& b) { return !(a == b); }

  std::string to_string() const { return family + "[" + degree.to_string() + "]"; }
};

// Finite linear combination of generators with scalar coefficients;
// no zero coefficients are stored.
class Element {
 public:
  Element() = default;
  Element(const Generator& g, const Scalar& c = Scalar::one()) { add(g, c); }

  const std::map<Generator, Scalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const Generator& g, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(g);
    if (it == terms_.end()) {
      terms_[g] = c;
    } else {
      it->second = it->second + c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  friend Element operator+(const Element& a, const Element& b) {
    Element r = a;
    for (const auto& [g, c] : b.terms_) r.add(g, c);
    return r;
  }
  friend Element operator-(const Element& a, const Element& b) {
    Element r = a;
    for (const auto& [g, c] : b.terms_) r.add(g, -c);
    return r;
  }
  friend Element operator*(const Scalar& s, const Element& e) {
    Element r;
    for (const auto& [g, c] : e.terms_) r.add(g, s * c);
    return r;
  }
  Element operator-() const { return Scalar(-1) * *this; }
  friend bool operator==(const Element& a, const Element& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }

  // Apply a map to every coefficient (substitution etc.).
  template <typename F>
  Element map_coeffs(F f) const {
    Element r;
    for (const auto& [g, c] : terms_) r.add(g, f(c));
    return r;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [g, c] : terms_) {
      if (!first) out << " + ";
      first = false;
      std::string cs = c.to_string();
      if (cs == "1") {
        out << g.to_string();
      } else if (c.terms().size() > 1) {
        out << "(" << cs << ")*" << g.to_string();
      } else {
        out << cs << "*" << g.to_string();
      }
    }
    return out.str();
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& [g, c] : terms_) {
      json t;
      t["family"] = g.family;
      t["degree"] = g.degree.to_string();
      t["coeff"] = c.to_string();
      arr.push_back(t);
    }
    return arr;
  }

 private:
  std::map<Generator, Scalar> terms_;
};

}  // namespace nambu
