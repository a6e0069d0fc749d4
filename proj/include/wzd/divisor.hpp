#pragma once

#include "wzd/rational.hpp"

#include <map>
#include <set>
#include <string>
#include <utility>

namespace wzd {

/// Formal finite sum of named prime components with rational coefficients.
/// Zero coefficients are never stored, so structural equality is divisor
/// equality.
class RationalDivisor {
public:
  using Map = std::map<std::string, Rational>;

  RationalDivisor() = default;
  RationalDivisor(std::initializer_list<std::pair<const std::string, Rational>> init) {
    for (const auto& [id, c] : init) add(id, c);
  }

  static RationalDivisor prime(const std::string& id, const Rational& c = 1) {
    RationalDivisor d;
    d.add(id, c);
    return d;
  }

  const Map& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Rational operator[](const std::string& id) const {
    auto it = terms_.find(id);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void set(const std::string& id, const Rational& c) {
    if (c == 0)
      terms_.erase(id);
    else
      terms_[id] = c;
  }

  void add(const std::string& id, const Rational& c) { set(id, (*this)[id] + c); }

  std::set<std::string> support() const {
    std::set<std::string> s;
    for (const auto& [id, c] : terms_) s.insert(id);
    return s;
  }

  bool is_effective() const {
    for (const auto& [id, c] : terms_)
      if (c < 0) return false;
    return true;
  }

  RationalDivisor& operator+=(const RationalDivisor& o) {
    for (const auto& [id, c] : o.terms_) add(id, c);
    return *this;
  }
  RationalDivisor& operator-=(const RationalDivisor& o) {
    for (const auto& [id, c] : o.terms_) add(id, -c);
    return *this;
  }
  RationalDivisor& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [id, c] : terms_) c *= s;
    return *this;
  }

  friend RationalDivisor operator+(RationalDivisor a, const RationalDivisor& b) { return a += b; }
  friend RationalDivisor operator-(RationalDivisor a, const RationalDivisor& b) { return a -= b; }
  friend RationalDivisor operator-(RationalDivisor a) { return a *= Rational(-1); }
  friend RationalDivisor operator*(const Rational& s, RationalDivisor a) { return a *= s; }
  friend bool operator==(const RationalDivisor& a, const RationalDivisor& b) { return a.terms_ == b.terms_; }

  /// Componentwise a <= b.
  friend bool leq(const RationalDivisor& a, const RationalDivisor& b) { return (b - a).is_effective(); }

private:
  Map terms_;
};

inline std::string to_string(const RationalDivisor& d) {
  if (d.empty()) return "0";
  std::string s;
  for (const auto& [id, c] : d.terms()) {
    if (!s.empty()) s += " + ";
    s += to_string(c) + "*" + id;
  }
  return s;
}

/// A divisor whose coefficients lie in [0,1].
class Boundary {
public:
  Boundary() = default;
  explicit Boundary(RationalDivisor d) : divisor_(std::move(d)) {
    for (const auto& [id, c] : divisor_.terms())
      if (c < 0 || c > 1)
        throw PreconditionError("boundary coefficient of " + id + " is " + to_string(c) +
                                ", outside [0,1]");
  }

  const RationalDivisor& divisor() const { return divisor_; }
  Rational operator[](const std::string& id) const { return divisor_[id]; }

  /// Components with coefficient exactly 1.
  std::set<std::string> reduced_part() const {
    std::set<std::string> s;
    for (const auto& [id, c] : divisor_.terms())
      if (c == 1) s.insert(id);
    return s;
  }

  friend bool operator==(const Boundary& a, const Boundary& b) { return a.divisor_ == b.divisor_; }

private:
  RationalDivisor divisor_;
};

/// Replaces every coefficient d by min(d, 1).
inline RationalDivisor truncate_le1(const RationalDivisor& d) {
  RationalDivisor out;
  for (const auto& [id, c] : d.terms()) out.set(id, c < 1 ? c : Rational(1));
  return out;
}

/// Number of components of `pushforward_n` that are not components of the
/// reduced part of `b`.
inline int theta(const Boundary& b, const RationalDivisor& pushforward_n) {
  if (!pushforward_n.is_effective())
    throw PreconditionError("theta: negative part must be effective");
  const auto reduced = b.reduced_part();
  int count = 0;
  for (const auto& [id, c] : pushforward_n.terms())
    if (!reduced.contains(id)) ++count;
  return count;
}

struct AlphaSplit {
  Rational alpha;
  RationalDivisor c;  // new boundary mass, (B + alpha N)^{<=1} = B + c
  RationalDivisor a;  // remainder inside the reduced part, alpha N = c + a
};

/// Smallest t > 0 at which the reduced part of (B + tN)^{<=1} changes, with
/// the induced split alpha N = C + A.
inline AlphaSplit alpha_split(const Boundary& b, const RationalDivisor& n) {
  if (!n.is_effective()) throw PreconditionError("alpha_split: N must be effective");
  if (n.empty()) throw PreconditionError("alpha_split: N must be nonzero");
  const auto reduced = b.reduced_part();
  bool found = false;
  Rational alpha;
  for (const auto& [id, coeff] : n.terms()) {
    if (reduced.contains(id)) continue;
    Rational t = (1 - b[id]) / coeff;
    if (!found || t < alpha) {
      alpha = t;
      found = true;
    }
  }
  if (!found)
    throw PreconditionError("alpha_split: N is supported in the reduced boundary (theta = 0)");

  AlphaSplit out{alpha, {}, {}};
  for (const auto& [id, coeff] : n.terms()) {
    if (reduced.contains(id)) continue;
    Rational scaled = alpha * coeff;
    Rational room = 1 - b[id];
    out.c.set(id, scaled < room ? scaled : room);
  }
  // Off the reduced part alpha*n_i <= 1 - b_i by minimality, so A lives on the reduced part.
  out.a = alpha * n - out.c;
  return out;
}

}  // namespace wzd
