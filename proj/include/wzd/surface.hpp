#pragma once

// Abstract surface intersection lattices: the classical Zariski algorithm,
// exact negative-definiteness, the negativity lemma check, and Mumford-style
// contraction of negative curves.

#include "wzd/divisor.hpp"
#include "wzd/linalg.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wzd {

/// A declared generator of the cone of curves, as a class in the lattice.
struct CurveGenerator {
  std::string name;
  RationalDivisor cls;
};

class SurfaceModel {
public:
  SurfaceModel() = default;
  SurfaceModel(std::vector<std::string> classes, Matrix form, std::vector<CurveGenerator> generators,
               std::set<std::string> prime_curves, std::optional<RationalDivisor> canonical = std::nullopt)
      : classes_(std::move(classes)),
        form_(std::move(form)),
        generators_(std::move(generators)),
        prime_curves_(std::move(prime_curves)),
        canonical_(std::move(canonical)) {
    validate();
  }

  const std::vector<std::string>& classes() const { return classes_; }
  const Matrix& form() const { return form_; }
  const std::vector<CurveGenerator>& generators() const { return generators_; }
  const std::set<std::string>& prime_curves() const { return prime_curves_; }
  const std::optional<RationalDivisor>& canonical() const { return canonical_; }
  bool has_class(const std::string& id) const { return index_.contains(id); }

  std::size_t index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw InputError("unknown class id '" + id + "'");
    return it->second;
  }

  Rational intersect(const RationalDivisor& a, const RationalDivisor& b) const {
    Rational s = 0;
    for (const auto& [ia, ca] : a.terms()) {
      const auto i = index_of(ia);
      for (const auto& [ib, cb] : b.terms()) s += ca * cb * form_[i][index_of(ib)];
    }
    return s;
  }

  Rational self_intersection(const std::string& id) const {
    const auto i = index_of(id);
    return form_[i][i];
  }

  /// Values D.R over the declared generators, in order.
  RationalVector generator_pairings(const RationalDivisor& d) const {
    RationalVector v;
    v.reserve(generators_.size());
    for (const auto& g : generators_) v.push_back(intersect(d, g.cls));
    return v;
  }

  void check_divisor(const RationalDivisor& d) const {
    for (const auto& [id, c] : d.terms()) index_of(id);
  }

  friend bool operator==(const SurfaceModel& a, const SurfaceModel& b) {
    if (a.classes_ != b.classes_ || a.form_ != b.form_ || a.prime_curves_ != b.prime_curves_ ||
        a.canonical_ != b.canonical_ || a.generators_.size() != b.generators_.size())
      return false;
    for (std::size_t i = 0; i < a.generators_.size(); ++i)
      if (a.generators_[i].name != b.generators_[i].name || !(a.generators_[i].cls == b.generators_[i].cls))
        return false;
    return true;
  }

private:
  void validate() {
    index_.clear();
    for (std::size_t i = 0; i < classes_.size(); ++i)
      if (!index_.emplace(classes_[i], i).second) throw InputError("duplicate class id '" + classes_[i] + "'");
    if (form_.size() != classes_.size()) throw InputError("form size does not match classes");
    for (std::size_t i = 0; i < form_.size(); ++i) {
      if (form_[i].size() != classes_.size()) throw InputError("form is not square");
      for (std::size_t j = 0; j < i; ++j)
        if (form_[i][j] != form_[j][i])
          throw InputError("form is not symmetric at (" + classes_[i] + "," + classes_[j] + ")");
    }
    for (const auto& p : prime_curves_) index_of(p);
    for (const auto& g : generators_) check_divisor(g.cls);
    if (canonical_) check_divisor(*canonical_);
    for (const auto& p : prime_curves_) {
      if (self_intersection(p) >= 0) continue;
      const auto cls = RationalDivisor::prime(p);
      bool listed = std::any_of(generators_.begin(), generators_.end(),
                                [&](const CurveGenerator& g) { return g.cls == cls; });
      if (!listed) throw InputError("negative prime curve '" + p + "' is missing from mori_generators");
    }
  }

  std::vector<std::string> classes_;
  std::map<std::string, std::size_t> index_;
  Matrix form_;
  std::vector<CurveGenerator> generators_;
  std::set<std::string> prime_curves_;
  std::optional<RationalDivisor> canonical_;
};

inline Matrix gram_matrix(const std::vector<std::string>& curves, const SurfaceModel& model) {
  Matrix g = make_matrix(curves.size(), curves.size());
  for (std::size_t i = 0; i < curves.size(); ++i)
    for (std::size_t j = 0; j < curves.size(); ++j)
      g[i][j] = model.form()[model.index_of(curves[i])][model.index_of(curves[j])];
  return g;
}

/// Index of the first leading principal minor with the wrong sign, or
/// nullopt when the matrix is negative definite.
inline std::optional<std::size_t> first_definiteness_failure(const Matrix& gram) {
  const auto minors = leading_principal_minors(gram);
  for (std::size_t k = 0; k < minors.size(); ++k) {
    // (-1)^(k+1) det_{k+1} > 0
    const int expected = (k % 2 == 0) ? -1 : 1;
    if (sign(minors[k]) != expected) return k;
  }
  return std::nullopt;
}

inline bool is_negative_definite(const std::vector<std::string>& curves, const SurfaceModel& model) {
  if (curves.empty()) throw PreconditionError("is_negative_definite: empty curve set");
  return !first_definiteness_failure(gram_matrix(curves, model)).has_value();
}

struct ZariskiResult {
  RationalDivisor p;
  RationalDivisor n;
  std::vector<std::string> negative_support;
  RationalVector certificate;  // P.R per declared generator
  std::vector<std::vector<std::string>> support_history;
};

/// Solves N.C_j = D.C_j for N supported on `support` (negative definite).
inline RationalDivisor solve_on_support(const RationalDivisor& d, const std::vector<std::string>& support,
                                        const SurfaceModel& model) {
  const Matrix gram = gram_matrix(support, model);
  RationalVector rhs;
  for (const auto& c : support) rhs.push_back(model.intersect(d, RationalDivisor::prime(c)));
  const auto x = solve(gram, rhs);
  if (!x) throw GeometryError("intersection system on the negative support is singular");
  RationalDivisor n;
  for (std::size_t i = 0; i < support.size(); ++i) n.set(support[i], (*x)[i]);
  return n;
}

/// Zariski decomposition D = P + N against the declared generators. The
/// negative support grows monotonically; all newly violating curves are
/// added together in each round.
inline ZariskiResult zariski_decompose(const RationalDivisor& d, const SurfaceModel& model) {
  model.check_divisor(d);
  ZariskiResult r;
  std::vector<std::string> support;
  RationalDivisor n;
  while (true) {
    std::vector<std::string> violators;
    const RationalDivisor p = d - n;
    for (const auto& cls : model.classes()) {
      if (!model.prime_curves().contains(cls)) continue;
      if (std::find(support.begin(), support.end(), cls) != support.end()) continue;
      if (model.intersect(p, RationalDivisor::prime(cls)) < 0) violators.push_back(cls);
    }
    if (violators.empty()) break;
    support.insert(support.end(), violators.begin(), violators.end());
    std::sort(support.begin(), support.end(),
              [&](const std::string& a, const std::string& b) { return model.index_of(a) < model.index_of(b); });
    r.support_history.push_back(support);
    if (!is_negative_definite(support, model))
      throw GeometryError("negative support is not negative definite; divisor is not pseudo-effective "
                          "or prime curve data is inadequate");
    n = solve_on_support(d, support, model);
  }
  if (!n.is_effective())
    throw GeometryError("negative part is not effective; divisor is not pseudo-effective");
  r.n = n;
  r.p = d - n;
  r.negative_support.clear();
  for (const auto& [id, c] : n.terms()) r.negative_support.push_back(id);
  std::sort(r.negative_support.begin(), r.negative_support.end(),
            [&](const std::string& a, const std::string& b) { return model.index_of(a) < model.index_of(b); });
  r.certificate = model.generator_pairings(r.p);
  for (std::size_t i = 0; i < r.certificate.size(); ++i)
    if (r.certificate[i] < 0)
      throw GeometryError("positive part is not nef against generator '" + model.generators()[i].name + "'");
  return r;
}

struct NegativityReport {
  bool holds = false;
  std::optional<std::string> witness;
  std::string reason;
};

/// Checks the hypotheses of the negativity lemma for G over the exceptional
/// set and, when they hold, its conclusion G >= 0.
inline NegativityReport negativity_check(const RationalDivisor& g, const std::vector<std::string>& exceptional,
                                         const SurfaceModel& model) {
  model.check_divisor(g);
  if (exceptional.empty()) throw PreconditionError("negativity_check: empty exceptional set");
  if (auto k = first_definiteness_failure(gram_matrix(exceptional, model)))
    return {false, exceptional[*k], "exceptional curves are not negative definite"};
  const std::set<std::string> exc(exceptional.begin(), exceptional.end());
  for (const auto& e : exceptional)
    if (model.intersect(g, RationalDivisor::prime(e)) > 0) return {false, e, "G.E > 0"};
  for (const auto& [id, c] : g.terms())
    if (!exc.contains(id) && c < 0) return {false, id, "non-exceptional part is not effective"};
  for (const auto& [id, c] : g.terms())
    if (c < 0) return {false, id, "conclusion G >= 0 fails"};
  return {true, std::nullopt, "G >= 0"};
}

/// Drops the contracted classes.
inline RationalDivisor surface_pushforward(const RationalDivisor& d, const std::set<std::string>& contracted) {
  RationalDivisor out;
  for (const auto& [id, c] : d.terms())
    if (!contracted.contains(id)) out.set(id, c);
  return out;
}

/// Mumford pullback from the contraction of `contracted` (a negative
/// definite set of classes of `source`): the unique lift orthogonal to every
/// contracted class.
inline RationalDivisor surface_pullback(const RationalDivisor& d_target, const std::set<std::string>& contracted,
                                        const SurfaceModel& source) {
  if (contracted.empty()) return d_target;
  std::vector<std::string> curves;
  for (const auto& cls : source.classes())
    if (contracted.contains(cls)) curves.push_back(cls);
  // Find t with (d + sum t_c c).c' = 0 for every contracted c'.
  const RationalDivisor correction = solve_on_support(d_target, curves, source);
  return d_target - correction;
}

struct SurfaceContraction {
  SurfaceModel model;
  std::string contracted;

  RationalDivisor pushforward(const RationalDivisor& d) const { return surface_pushforward(d, {contracted}); }
};

/// Contracts a negative curve: classes are projected orthogonally to C and
/// C is removed.
inline SurfaceContraction contract_curve(const std::string& curve, const SurfaceModel& model) {
  const auto ci = model.index_of(curve);
  const Rational cc = model.form()[ci][ci];
  if (cc >= 0) throw PreconditionError("contract_curve: " + curve + " has nonnegative self-intersection");
  const auto cls = RationalDivisor::prime(curve);
  if (std::none_of(model.generators().begin(), model.generators().end(),
                   [&](const CurveGenerator& g) { return g.cls == cls; }))
    throw PreconditionError("contract_curve: " + curve + " is not a declared generator");

  std::vector<std::string> classes;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < model.classes().size(); ++i)
    if (i != ci) {
      classes.push_back(model.classes()[i]);
      keep.push_back(i);
    }
  Matrix form = make_matrix(keep.size(), keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b) {
      const auto& f = model.form();
      form[a][b] = f[keep[a]][keep[b]] - f[keep[a]][ci] * f[keep[b]][ci] / cc;
    }
  const std::set<std::string> gone{curve};
  std::vector<CurveGenerator> generators;
  for (const auto& g : model.generators()) {
    RationalDivisor pushed = surface_pushforward(g.cls, gone);
    if (pushed.empty()) continue;
    bool dup = std::any_of(generators.begin(), generators.end(),
                           [&](const CurveGenerator& h) { return h.cls == pushed; });
    if (!dup) generators.push_back({g.name, pushed});
  }
  std::set<std::string> primes = model.prime_curves();
  primes.erase(curve);
  std::optional<RationalDivisor> canonical;
  if (model.canonical()) canonical = surface_pushforward(*model.canonical(), gone);
  return {SurfaceModel(std::move(classes), std::move(form), std::move(generators), std::move(primes),
                       std::move(canonical)),
          curve};
}

}  // namespace wzd
