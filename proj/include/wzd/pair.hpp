#pragma once

// Pairs (X, B) over either model class, and the small uniform interface the
// decomposition and MMP code needs from a model.

#include "wzd/surface.hpp"
#include "wzd/toric_ops.hpp"

namespace wzd {

/// kb: the pair's base divisor is K_X. divisor: an arbitrary divisor L stands
/// in for K_X, and the loop runs on L + B.
enum class PairMode { kb, divisor };

inline std::string to_string(PairMode m) { return m == PairMode::kb ? "kb" : "divisor"; }

template <class Model>
struct Pair {
  Model model;
  RationalDivisor base;
  Boundary boundary;
  PairMode mode = PairMode::kb;

  RationalDivisor target() const { return base + boundary.divisor(); }
};

/// How a curve handle is reported in traces.
struct CurveRef {
  std::string name;
  std::vector<std::string> face;      // toric only
  std::vector<std::string> adjacent;  // toric only
};

enum class StepKind { divisorial, flip, fibration, terminate_nef, no_contraction };

inline std::string to_string(StepKind k) {
  switch (k) {
    case StepKind::divisorial: return "divisorial";
    case StepKind::flip: return "flip";
    case StepKind::fibration: return "fibration";
    case StepKind::terminate_nef: return "terminate_nef";
    case StepKind::no_contraction: return "no_modeled_contraction";
  }
  return "";
}

template <class Model>
struct Transition {
  StepKind kind = StepKind::no_contraction;
  std::optional<Model> next;                 // divisorial / flip
  std::optional<std::string> contracted;     // divisorial
  std::optional<ToricVariety> fibration_base;  // fibration (toric only)
};

template <class Model>
struct ModelTraits;

template <>
struct ModelTraits<ToricVariety> {
  using Curve = std::size_t;  // wall index

  static const char* name() { return "toric"; }
  static RationalDivisor canonical(const ToricVariety& x) { return canonical_divisor(x); }
  static void check(const ToricVariety& x, const RationalDivisor& d) { x.check_divisor(d); }
  static std::vector<std::string> components(const ToricVariety& x) { return x.ray_ids(); }

  /// Curves against which nefness is certified.
  static std::vector<Curve> nef_curves(const ToricVariety& x) {
    std::vector<Curve> v(mori_generators(x).size());
    std::iota(v.begin(), v.end(), Curve{0});
    return v;
  }
  /// Candidate rays for contraction: one wall per extremal ray.
  static std::vector<Curve> rays(const ToricVariety& x) { return extremal_walls(x); }

  static Rational pairing(const ToricVariety& x, const RationalDivisor& d, Curve c) {
    return x.intersect(d, x.walls()[c]);
  }
  static CurveRef describe(const ToricVariety& x, Curve c) {
    const auto& w = x.walls()[c];
    CurveRef r;
    r.face = x.cone_ids(w.face);
    r.adjacent = {x.id(w.ray_a), x.id(w.ray_b)};
    std::string s = "wall{";
    for (std::size_t i = 0; i < r.face.size(); ++i) s += (i ? "," : "") + r.face[i];
    r.name = s + "}";
    return r;
  }
  static Transition<ToricVariety> surgery(const ToricVariety& x, Curve c) {
    auto res = contract_or_flip(x.walls()[c], x);
    Transition<ToricVariety> t;
    switch (res.kind) {
      case ContractionKind::divisorial:
        t.kind = StepKind::divisorial;
        t.next = std::move(res.target);
        t.contracted = res.contracted;
        break;
      case ContractionKind::flip:
        t.kind = StepKind::flip;
        t.next = std::move(res.target);
        break;
      case ContractionKind::fibration:
        t.kind = StepKind::fibration;
        t.fibration_base = std::move(res.target);
        break;
    }
    return t;
  }
  static RationalDivisor transport(const RationalDivisor& d, const ToricVariety& from, const ToricVariety& to) {
    return pushforward(d, from, to);
  }
};

template <>
struct ModelTraits<SurfaceModel> {
  using Curve = std::size_t;  // generator index

  static const char* name() { return "surface"; }
  static RationalDivisor canonical(const SurfaceModel& m) {
    if (!m.canonical()) throw PreconditionError("surface model declares no canonical class");
    return *m.canonical();
  }
  static void check(const SurfaceModel& m, const RationalDivisor& d) { m.check_divisor(d); }
  static std::vector<std::string> components(const SurfaceModel& m) { return m.classes(); }
  static std::vector<Curve> nef_curves(const SurfaceModel& m) {
    std::vector<Curve> v(m.generators().size());
    std::iota(v.begin(), v.end(), Curve{0});
    return v;
  }
  static std::vector<Curve> rays(const SurfaceModel& m) { return nef_curves(m); }
  static Rational pairing(const SurfaceModel& m, const RationalDivisor& d, Curve c) {
    return m.intersect(d, m.generators()[c].cls);
  }
  static CurveRef describe(const SurfaceModel& m, Curve c) { return {m.generators()[c].name, {}, {}}; }

  /// The generator's class must be a single prime curve of negative square;
  /// anything else has no modeled contraction.
  static std::optional<std::string> contractible(const SurfaceModel& m, Curve c) {
    const auto& cls = m.generators()[c].cls;
    if (cls.size() != 1) return std::nullopt;
    const auto& [id, coeff] = *cls.terms().begin();
    if (coeff <= 0 || !m.prime_curves().contains(id) || m.self_intersection(id) >= 0) return std::nullopt;
    return id;
  }
  static Transition<SurfaceModel> surgery(const SurfaceModel& m, Curve c) {
    Transition<SurfaceModel> t;
    const auto curve = contractible(m, c);
    if (!curve) return t;
    auto res = contract_curve(*curve, m);
    t.kind = StepKind::divisorial;
    t.next = std::move(res.model);
    t.contracted = *curve;
    return t;
  }
  static RationalDivisor transport(const RationalDivisor& d, const SurfaceModel& from, const SurfaceModel& to) {
    from.check_divisor(d);
    RationalDivisor out;
    for (const auto& [id, c] : d.terms())
      if (to.has_class(id)) out.set(id, c);
    return out;
  }
};

inline Pair<ToricVariety> make_kb_pair(ToricVariety x, RationalDivisor boundary) {
  x.check_divisor(boundary);
  auto k = canonical_divisor(x);
  return {std::move(x), std::move(k), Boundary(std::move(boundary)), PairMode::kb};
}

inline Pair<SurfaceModel> make_kb_pair(SurfaceModel m, RationalDivisor boundary) {
  m.check_divisor(boundary);
  auto k = ModelTraits<SurfaceModel>::canonical(m);
  return {std::move(m), std::move(k), Boundary(std::move(boundary)), PairMode::kb};
}

template <class Model>
Pair<Model> make_divisor_pair(Model m, RationalDivisor base, RationalDivisor boundary) {
  ModelTraits<Model>::check(m, base);
  ModelTraits<Model>::check(m, boundary);
  return {std::move(m), std::move(base), Boundary(std::move(boundary)), PairMode::divisor};
}

}  // namespace wzd
