#pragma once

// Weak, Fujita, CKM and surface Zariski decompositions: data, validators,
// the nef threshold, and constructions from log minimal models.

#include "wzd/pair.hpp"

namespace wzd {

enum class DecompositionKind { weak, fujita, ckm, surface_zariski };

inline std::string to_string(DecompositionKind k) {
  switch (k) {
    case DecompositionKind::weak: return "weak";
    case DecompositionKind::fujita: return "fujita";
    case DecompositionKind::ckm: return "ckm";
    case DecompositionKind::surface_zariski: return "surface_zariski";
  }
  return "";
}

inline DecompositionKind parse_decomposition_kind(const std::string& s) {
  if (s == "weak") return DecompositionKind::weak;
  if (s == "fujita") return DecompositionKind::fujita;
  if (s == "ckm") return DecompositionKind::ckm;
  if (s == "surface_zariski") return DecompositionKind::surface_zariski;
  throw InputError("unknown decomposition kind '" + s + "'");
}

template <class Model>
struct WeakDecomposition {
  Model model;  // W
  RationalDivisor p;
  RationalDivisor n;
  RationalVector nef_certificate;  // P.R over the model's nef curves
  DecompositionKind kind = DecompositionKind::weak;
};

template <class Model>
RationalVector nef_pairings(const Model& m, const RationalDivisor& d) {
  RationalVector v;
  for (auto c : ModelTraits<Model>::nef_curves(m)) v.push_back(ModelTraits<Model>::pairing(m, d, c));
  return v;
}

template <class Model>
WeakDecomposition<Model> make_decomposition(Model m, RationalDivisor p, RationalDivisor n,
                                            DecompositionKind kind = DecompositionKind::weak) {
  ModelTraits<Model>::check(m, p);
  ModelTraits<Model>::check(m, n);
  auto cert = nef_pairings(m, p);
  return {std::move(m), std::move(p), std::move(n), std::move(cert), kind};
}

struct ValidationReport {
  bool valid = true;
  std::string kind;
  std::vector<std::string> witnesses;
  std::vector<std::string> notes;
  std::optional<std::int64_t> m_max;
  std::optional<std::size_t> challengers;
  std::vector<std::string> rejected;  // challengers failing their own preconditions

  void fail(std::string witness) {
    valid = false;
    witnesses.push_back(std::move(witness));
  }
  void absorb(const ValidationReport& o, const std::string& prefix) {
    if (!o.valid) valid = false;
    for (const auto& w : o.witnesses) witnesses.push_back(prefix + w);
  }
};

// ---------------------------------------------------------------------------
// Moving divisors between a model and its modifications

/// Pullback along a modification `to` -> `from` (toric: a refinement).
inline RationalDivisor lift(const RationalDivisor& d, const ToricVariety& from, const ToricVariety& to) {
  if (from == to) {
    from.check_divisor(d);
    return d;
  }
  if (!refines(to, from)) throw PreconditionError("model mismatch: fan does not refine the base fan");
  return pullback(d, from, to);
}

/// Surface lattices carry no modifications other than the identity.
inline RationalDivisor lift(const RationalDivisor& d, const SurfaceModel& from, const SurfaceModel& to) {
  if (!(from == to)) throw PreconditionError("model mismatch: surface models differ");
  from.check_divisor(d);
  return d;
}

inline ToricVariety common_model(const ToricVariety& a, const ToricVariety& b) {
  return a == b ? a : common_refinement(a, b);
}

inline SurfaceModel common_model(const SurfaceModel& a, const SurfaceModel& b) {
  if (!(a == b)) throw PreconditionError("incompatible model: surface models differ");
  return a;
}

/// Pairing of D with every basis direction that detects numerical
/// equivalence: walls on a complete fan, all classes on a lattice.
inline RationalVector numerical_class(const ToricVariety& x, const RationalDivisor& d) {
  return x.wall_pairings(d);
}

inline RationalVector numerical_class(const SurfaceModel& m, const RationalDivisor& d) {
  RationalVector v;
  for (const auto& c : m.classes()) v.push_back(m.intersect(d, RationalDivisor::prime(c)));
  return v;
}

// ---------------------------------------------------------------------------
// Validators

/// pullback(D) == P + N numerically on W, P nef, N >= 0.
template <class Model>
ValidationReport validate_weak(const RationalDivisor& d, const Model& base, const WeakDecomposition<Model>& wzd) {
  using T = ModelTraits<Model>;
  ValidationReport r;
  r.kind = "weak";
  const auto lifted = lift(d, base, wzd.model);
  T::check(wzd.model, wzd.p);
  T::check(wzd.model, wzd.n);
  const auto diff = numerical_class(wzd.model, lifted - wzd.p - wzd.n);
  for (std::size_t i = 0; i < diff.size(); ++i)
    if (diff[i] != 0) {
      r.fail("numerical class: pullback(D) - P - N pairs to " + to_string(diff[i]) + " at index " + std::to_string(i));
      break;
    }
  for (auto c : T::nef_curves(wzd.model)) {
    const auto v = T::pairing(wzd.model, wzd.p, c);
    if (v < 0) r.fail("nef: P." + T::describe(wzd.model, c).name + " = " + to_string(v));
  }
  for (const auto& [id, c] : wzd.n.terms())
    if (c < 0) r.fail("effective: N has coefficient " + to_string(c) + " on " + id);
  return r;
}

/// sections(mP) == sections(mD) for m = 1..m_max, with N = D - P >= 0.
inline ValidationReport validate_ckm(const RationalDivisor& d, const RationalDivisor& p, const ToricVariety& x,
                                     std::int64_t m_max) {
  if (m_max < 1) throw InputError("validate_ckm: m_max must be positive");
  if (!(d - p).is_effective()) throw PreconditionError("validate_ckm: N = D - P is not effective");
  ValidationReport r;
  r.kind = "ckm";
  r.m_max = m_max;
  r.notes.push_back("section spaces compared for m = 1.." + std::to_string(m_max));
  for (std::int64_t m = 1; m <= m_max; ++m) {
    const Rational q(static_cast<long>(m));
    const auto sp = sections(q * p, x);
    const auto sd = sections(q * d, x);
    if (sp != sd) {
      r.fail("m = " + std::to_string(m) + ": " + std::to_string(sp.size()) + " sections of mP vs " +
             std::to_string(sd.size()) + " of mD");
      break;
    }
  }
  return r;
}

template <class Model>
struct Challenger {
  Model model;
  RationalDivisor p;
  RationalDivisor n;
};

/// Finite-challenger check of Fujita maximality: every challenger P' on a
/// modification satisfies P' <= pullback(P) on a common model.
template <class Model>
ValidationReport validate_fujita(const RationalDivisor& d, const Model& base, const WeakDecomposition<Model>& wzd,
                                 const std::vector<Challenger<Model>>& challengers) {
  using T = ModelTraits<Model>;
  ValidationReport r;
  r.kind = "fujita";
  r.notes.push_back("finite challenger verification; not a proof over all models");
  const auto lifted = lift(d, base, wzd.model);
  if (!(lifted == wzd.p + wzd.n)) r.fail("decomposition: P + N differs from the pullback of D");
  for (auto c : T::nef_curves(wzd.model))
    if (T::pairing(wzd.model, wzd.p, c) < 0) r.fail("nef: P." + T::describe(wzd.model, c).name + " < 0");
  if (!wzd.n.is_effective()) r.fail("effective: N is not effective");

  std::size_t accepted = 0;
  for (std::size_t k = 0; k < challengers.size(); ++k) {
    const auto& ch = challengers[k];
    const std::string tag = "challenger " + std::to_string(k);
    RationalDivisor target;
    try {
      target = lift(d, base, ch.model);
    } catch (const PreconditionError& e) {
      throw PreconditionError(tag + ": incompatible model (" + e.what() + ")");
    }
    T::check(ch.model, ch.p);
    T::check(ch.model, ch.n);
    if (!(ch.p + ch.n == target)) {
      r.rejected.push_back(tag + ": P' + N' is not the pullback of D");
      continue;
    }
    if (!ch.n.is_effective()) {
      r.rejected.push_back(tag + ": N' is not effective");
      continue;
    }
    bool nef = true;
    for (auto c : T::nef_curves(ch.model)) nef = nef && T::pairing(ch.model, ch.p, c) >= 0;
    if (!nef) {
      r.rejected.push_back(tag + ": P' is not nef");
      continue;
    }
    ++accepted;
    const Model common = common_model(wzd.model, ch.model);
    const auto diff = lift(wzd.p, wzd.model, common) - lift(ch.p, ch.model, common);
    for (const auto& [id, c] : diff.terms())
      if (c < 0) {
        r.fail(tag + ": P' exceeds pullback(P) on " + id + " by " + to_string(-c));
        break;
      }
  }
  r.challengers = accepted;
  return r;
}

// ---------------------------------------------------------------------------
// Nef threshold

struct NefThreshold {
  Rational mu;
  std::optional<std::size_t> ray;  // index into the pairing vectors
};

/// mu = min(1, min over N.R < 0 of P.R / -N.R), lowest index on ties.
inline NefThreshold nef_threshold(const RationalVector& p_pairs, const RationalVector& n_pairs) {
  if (p_pairs.size() != n_pairs.size()) throw InputError("nef_threshold: pairing vectors differ in length");
  for (std::size_t i = 0; i < p_pairs.size(); ++i)
    if (p_pairs[i] < 0)
      throw PreconditionError("nef_threshold: P is not nef (generator " + std::to_string(i) + " pairs to " +
                              to_string(p_pairs[i]) + ")");
  NefThreshold out{Rational(1), std::nullopt};
  for (std::size_t i = 0; i < p_pairs.size(); ++i) {
    if (n_pairs[i] >= 0) continue;
    const Rational t = p_pairs[i] / -n_pairs[i];
    if (t < out.mu) {
      out.mu = t;
      out.ray = i;
    }
  }
  return out;
}

template <class Model>
NefThreshold nef_threshold(const RationalDivisor& p, const RationalDivisor& n, const Model& m) {
  return nef_threshold(nef_pairings(m, p), nef_pairings(m, n));
}

// ---------------------------------------------------------------------------
// Constructions from a log minimal model

namespace detail {

inline std::vector<std::string> exceptional_over(const ToricVariety& v, const ToricVariety& y) {
  std::vector<std::string> out;
  for (std::size_t r = 0; r < v.ray_count(); ++r)
    if (!y.find_ray(v.rays()[r])) out.push_back(v.id(static_cast<int>(r)));
  return out;
}

inline std::vector<std::string> exceptional_over(const SurfaceModel& x, const SurfaceModel& y) {
  std::vector<std::string> out;
  for (const auto& c : x.classes())
    if (!y.has_class(c)) out.push_back(c);
  return out;
}

inline RationalDivisor pull_from_model(const RationalDivisor& d, const ToricVariety& y, const ToricVariety& v) {
  return lift(d, y, v);
}

inline RationalDivisor pull_from_model(const RationalDivisor& d, const SurfaceModel& y, const SurfaceModel& x) {
  const auto exc = exceptional_over(x, y);
  return surface_pullback(d, {exc.begin(), exc.end()}, x);
}

inline ToricVariety resolution_of(const ToricVariety& x, const ToricVariety& y) { return common_model(x, y); }
inline SurfaceModel resolution_of(const SurfaceModel& x, const SurfaceModel&) { return x; }

}  // namespace detail

/// P = h^*(target_Y), N = g^*(target_X) - P on a common model V. N must be
/// effective and exceptional over Y.
template <class Model>
WeakDecomposition<Model> from_lmm_fujita(const Pair<Model>& lmm, const Pair<Model>& base) {
  const Model v = detail::resolution_of(base.model, lmm.model);
  auto p = detail::pull_from_model(lmm.target(), lmm.model, v);
  auto n = lift(base.target(), base.model, v) - p;
  if (!n.is_effective()) throw GeometryError("from_lmm_fujita: negativity certificate failure (N is not effective)");
  const auto exc = detail::exceptional_over(v, lmm.model);
  for (const auto& [id, c] : n.terms())
    if (std::find(exc.begin(), exc.end(), id) == exc.end())
      throw GeometryError("from_lmm_fujita: N is not exceptional over Y (component " + id + ")");
  return make_decomposition(v, std::move(p), std::move(n), DecompositionKind::fujita);
}

/// Runs validate_ckm on the decomposition built by from_lmm_fujita.
inline ValidationReport ckm_from_lmm(const Pair<ToricVariety>& lmm, const Pair<ToricVariety>& base,
                                     std::int64_t m_max) {
  const auto wzd = from_lmm_fujita(lmm, base);
  const auto d = lift(base.target(), base.model, wzd.model);
  return validate_ckm(d, wzd.p, wzd.model, m_max);
}

/// Weak decomposition of K + B from a log minimal model of (X, B') with
/// B' <= B: P unchanged, N + g^*(B - B').
template <class Model>
WeakDecomposition<Model> monotone_boundary_wzd(const Pair<Model>& lmm, const Pair<Model>& base_small,
                                               const Boundary& b) {
  const auto extra = b.divisor() - base_small.boundary.divisor();
  if (!extra.is_effective()) throw PreconditionError("monotone_boundary_wzd: B' is not <= B");
  auto wzd = from_lmm_fujita(lmm, base_small);
  wzd.n += lift(extra, base_small.model, wzd.model);
  wzd.kind = DecompositionKind::weak;
  return wzd;
}

/// min{t >= 0 : base + tB pseudo-effective}, by one exact LP in (m, t).
inline Rational pseff_threshold(const Boundary& b, const ToricVariety& x, const RationalDivisor& base) {
  if (!x.complete()) throw PreconditionError("pseff_threshold: fan is not complete");
  const auto bc = x.coefficients(b.divisor());
  const auto kc = x.coefficients(base);
  const std::size_t n = static_cast<std::size_t>(x.dim());
  LinearProgram lp(n + 1);
  lp.set_nonnegative(n);
  RationalVector obj(n + 1, Rational(0));
  obj[n] = 1;
  lp.set_objective(obj);
  for (std::size_t r = 0; r < x.ray_count(); ++r) {
    RationalVector row = to_rational(x.rays()[r]);
    row.push_back(bc[r]);
    lp.add(row, Relation::greater_equal, -kc[r]);
  }
  RationalVector cap(n + 1, Rational(0));
  cap[n] = 1;
  lp.add(cap, Relation::less_equal, 1);
  const auto res = lp.minimize();
  if (res.status != LpStatus::optimal) throw PreconditionError("pseff_threshold: K + B is not pseudo-effective");
  return res.objective;
}

inline Rational pseff_threshold(const Boundary& b, const ToricVariety& x) {
  return pseff_threshold(b, x, canonical_divisor(x));
}

}  // namespace wzd
