// linear_map.hpp
// Generator-wise linear maps with monomial coefficient rules
//   X_n  ->  sum_j  amp_j * base_j^(shift_j * n) * Target_j[n]
// which covers every twisting map used here (scaling maps q^n, beta maps
// Q_n -> beta q^n R_n, inverses q^-n, and their compositions).
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nambu/element.hpp"

namespace nambu {

class LinearMap {
 public:
  struct Rule {
    std::string target;          // target family, same degree
    Scalar amplitude;            // scalar free of index symbols
    std::optional<Symbol> base;  // exponential base, if shift != 0
    long shift = 0;              // coefficient gets base^(shift*deg)

    Rule(std::string t, Scalar amp, std::optional<Symbol> b = std::nullopt, long s = 0)
        : target(std::move(t)), amplitude(std::move(amp)), base(std::move(b)), shift(s) {}

    friend bool operator==(const Rule& a, const Rule& b) {
      return a.target == b.target && a.amplitude == b.amplitude && a.base == b.base &&
             a.shift == b.shift;
    }
  };

  LinearMap() = default;

  static LinearMap identity(const std::vector<std::string>& families) {
    LinearMap f;
    for (const auto& fam : families) f.add_rule(fam, Rule(fam, Scalar::one()));
    return f;
  }

  void add_rule(const std::string& source_family, Rule r) {
    if (r.amplitude.is_zero()) return;
    if (r.shift == 0) r.base.reset();
    rules_[source_family].push_back(std::move(r));
  }

  const std::map<std::string, std::vector<Rule>>& rules() const { return rules_; }

  Element apply(const Generator& g) const {
    Element out;
    auto it = rules_.find(g.family);
    if (it == rules_.end()) return out;
    for (const Rule& r : it->second) {
      Scalar c = r.amplitude;
      if (r.shift != 0) c = c * Scalar::expo(*r.base, g.degree * r.shift);
      out.add(Generator(r.target, g.degree), c);
    }
    return out;
  }

  Element apply(const Element& e) const {
    Element out;
    for (const auto& [g, c] : e.terms()) out = out + c * apply(g);
    return out;
  }

  bool is_zero_map() const {
    for (const auto& [fam, rs] : rules_)
      if (!rs.empty()) return false;
    return true;
  }

  friend LinearMap compose(const LinearMap& outer, const LinearMap& inner) {
    LinearMap out;
    for (const auto& [fam, rs] : inner.rules_) {
      for (const Rule& ri : rs) {
        auto it = outer.rules_.find(ri.target);
        if (it == outer.rules_.end()) continue;
        for (const Rule& ro : it->second) {
          Rule r(ro.target, ri.amplitude * ro.amplitude);
          // combine exponential parts: base^(si*n) * base^(so*n)
          if (ri.shift != 0 && ro.shift != 0 && *ri.base != *ro.base)
            throw Error("composition mixes exponential bases " + ri.base->name + " and " +
                        ro.base->name);
          r.shift = ri.shift + ro.shift;
          if (r.shift != 0) r.base = ri.shift != 0 ? ri.base : ro.base;
          out.add_rule(fam, std::move(r));
        }
      }
    }
    out.merge_rules();
    return out;
  }

  // Inverse of an invertible generator-wise map: each family maps to a single
  // family with an invertible monomial amplitude, and the family assignment
  // is a bijection.  Returns nullopt otherwise.
  std::optional<LinearMap> inverse(const std::vector<std::string>& families) const {
    std::map<std::string, int> hit;
    LinearMap out;
    for (const auto& fam : families) {
      auto it = rules_.find(fam);
      if (it == rules_.end() || it->second.size() != 1) return std::nullopt;
      const Rule& r = it->second.front();
      if (r.amplitude.is_zero() || !r.amplitude.is_monomial()) return std::nullopt;
      if (++hit[r.target] > 1) return std::nullopt;
      out.add_rule(r.target, Rule(fam, r.amplitude.inverse(), r.base, -r.shift));
    }
    for (const auto& fam : families)
      if (!hit.count(fam)) return std::nullopt;
    return out;
  }

  bool is_nilpotent_order2() const { return compose(*this, *this).is_zero_map(); }

  friend bool operator==(const LinearMap& a, const LinearMap& b) {
    LinearMap na = a, nb = b;
    na.merge_rules();
    nb.merge_rules();
    return na.rules_ == nb.rules_;
  }
  friend bool operator!=(const LinearMap& a, const LinearMap& b) { return !(a == b); }

  std::string to_string() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [fam, rs] : rules_) {
      for (const Rule& r : rs) {
        if (!first) out << ", ";
        first = false;
        out << fam << "[n] -> ";
        std::string amp = r.amplitude.to_string();
        if (amp != "1") out << (r.amplitude.terms().size() > 1 ? "(" + amp + ")" : amp) << "*";
        if (r.shift != 0) {
          out << r.base->name << "^(";
          if (r.shift != 1) out << r.shift << "*";
          out << "n)*";
        }
        out << r.target << "[n]";
      }
    }
    if (first) out << "0";
    return out.str();
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& [fam, rs] : rules_) {
      for (const Rule& r : rs) {
        json j;
        j["source"] = fam;
        j["target"] = r.target;
        j["amplitude"] = r.amplitude.to_string();
        j["shift"] = r.shift;
        if (r.base) j["base"] = r.base->name;
        arr.push_back(j);
      }
    }
    return arr;
  }

 private:
  std::map<std::string, std::vector<Rule>> rules_;

  void merge_rules() {
    for (auto& [fam, rs] : rules_) {
      std::map<std::pair<std::string, std::pair<std::string, long>>, Scalar> acc;
      for (const Rule& r : rs) {
        auto key = std::make_pair(r.target,
                                  std::make_pair(r.base ? r.base->name : "", r.shift));
        auto it = acc.find(key);
        if (it == acc.end())
          acc[key] = r.amplitude;
        else
          it->second = it->second + r.amplitude;
      }
      std::vector<Rule> merged;
      for (const auto& [key, amp] : acc) {
        if (amp.is_zero()) continue;
        std::optional<Symbol> base;
        if (!key.second.first.empty()) base = Symbol::unit(key.second.first);
        merged.emplace_back(key.first, amp, base, key.second.second);
      }
      rs = std::move(merged);
    }
    for (auto it = rules_.begin(); it != rules_.end();)
      it = it->second.empty() ? rules_.erase(it) : std::next(it);
  }
};

// The pair (alpha1, alpha2) twisting the Nambu identity.
struct TwistPair {
  LinearMap alpha1, alpha2;
  std::string name = "twist";

  static TwistPair identity(const std::vector<std::string>& families) {
    return {LinearMap::identity(families), LinearMap::identity(families), "identity"};
  }
  bool symmetric() const { return alpha1 == alpha2; }
  friend bool operator==(const TwistPair& a, const TwistPair& b) {
    return a.alpha1 == b.alpha1 && a.alpha2 == b.alpha2;
  }
};

}  // namespace nambu
