#pragma once

// The LMMP guided by a weak Zariski decomposition, the LMMP with scaling,
// verification of log minimal models and Mori fibre spaces, theta descent
// and log smooth models.

#include "wzd/decomposition.hpp"

namespace wzd {

struct MmpOptions {
  int step_limit = 1000;
  int flip_limit = 64;
};

enum class Outcome { minimal_model, mori_fibre_space, step_limit, no_modeled_contraction };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::minimal_model: return "minimal_model";
    case Outcome::mori_fibre_space: return "mori_fibre_space";
    case Outcome::step_limit: return "step_limit";
    case Outcome::no_modeled_contraction: return "no_modeled_contraction";
  }
  return "";
}

template <class Model>
struct MMPState {
  Model model;
  RationalDivisor base;
  Boundary boundary;
  RationalDivisor p;
  RationalDivisor n;
  std::optional<RationalDivisor> h;  // scaling divisor, scaling runs only

  RationalDivisor target() const { return base + boundary.divisor(); }
};

template <class Model>
struct MMPStep {
  int index = 0;
  Rational threshold;  // mu for weak-ZD runs, lambda for scaling runs
  CurveRef ray;
  StepKind kind = StepKind::divisorial;
  Rational target_dot_ray;  // (K+B).R
  Rational n_dot_ray;       // N.R (weak-ZD runs) or H.R (scaling runs)
  std::optional<std::string> contracted;
  bool diagnostic_bound_ok = true;  // (K+B).R >= -2 dim X
  MMPState<Model> state_after;
  int theta_after = 0;
};

template <class Model>
struct MMPTrace {
  std::string driver;  // "wzd" or "scaling"
  PairMode mode = PairMode::kb;
  std::vector<MMPStep<Model>> steps;
  Outcome outcome = Outcome::minimal_model;
  MMPState<Model> final_state;
  RationalVector nef_certificate;  // target.R on the final model when minimal
  std::optional<std::size_t> fibration_ray;  // curve handle on the final model
  std::optional<ToricVariety> fibration_base;
  int flips = 0;
  MmpOptions options;
};

namespace detail {

template <class Model>
int dimension_of(const Model& m) {
  if constexpr (std::is_same_v<Model, ToricVariety>)
    return m.dim();
  else
    return 2;
}

template <class Model>
MMPState<Model> transported(const MMPState<Model>& s, const Model& next) {
  using T = ModelTraits<Model>;
  MMPState<Model> out{next,
                      T::transport(s.base, s.model, next),
                      Boundary(T::transport(s.boundary.divisor(), s.model, next)),
                      T::transport(s.p, s.model, next),
                      T::transport(s.n, s.model, next),
                      std::nullopt};
  if (s.h) out.h = T::transport(*s.h, s.model, next);
  return out;
}

}  // namespace detail

/// Loop: P <- P + mu N, contract or flip an extremal ray R with
/// N.R < 0 and (P + mu N).R = 0, transport everything, repeat.
template <class Model>
MMPTrace<Model> run_wzd_mmp(const Pair<Model>& pair, const WeakDecomposition<Model>& wzd, MmpOptions opt = {}) {
  using T = ModelTraits<Model>;
  if (!(wzd.model == pair.model))
    throw PreconditionError("run_wzd_mmp: the decomposition must live on the pair's model");
  const auto weak = validate_weak(pair.target(), pair.model, wzd);
  if (!weak.valid) throw PreconditionError("run_wzd_mmp: not a weak decomposition (" + weak.witnesses.front() + ")");
  if (pair.mode == PairMode::kb && theta(pair.boundary, wzd.n) != 0)
    throw PreconditionError("run_wzd_mmp: theta(B, N) > 0");

  MMPTrace<Model> trace;
  trace.driver = "wzd";
  trace.mode = pair.mode;
  trace.options = opt;
  MMPState<Model> s{pair.model, pair.base, pair.boundary, wzd.p, wzd.n, std::nullopt};
  while (true) {
    if (static_cast<int>(trace.steps.size()) >= opt.step_limit) {
      trace.outcome = Outcome::step_limit;
      break;
    }
    const auto pp = nef_pairings(s.model, s.p);
    for (std::size_t i = 0; i < pp.size(); ++i)
      if (pp[i] < 0)
        throw GeometryError("run_wzd_mmp: nef certificate failure for P on " +
                            T::describe(s.model, T::nef_curves(s.model)[i]).name);
    const auto np = nef_pairings(s.model, s.n);
    const auto th = nef_threshold(pp, np);
    s.p = s.p + th.mu * s.n;
    s.n = (1 - th.mu) * s.n;
    if (!th.ray) {
      trace.outcome = Outcome::minimal_model;
      trace.nef_certificate = nef_pairings(s.model, s.target());
      break;
    }
    std::optional<std::size_t> ray;
    for (auto c : T::rays(s.model))
      if (T::pairing(s.model, s.p, c) == 0 && T::pairing(s.model, s.n, c) < 0) {
        ray = c;
        break;
      }
    if (!ray) throw GeometryError("run_wzd_mmp: no extremal ray with N.R < 0 at the threshold");

    MMPStep<Model> step;
    step.index = static_cast<int>(trace.steps.size());
    step.threshold = th.mu;
    step.ray = T::describe(s.model, *ray);
    step.target_dot_ray = T::pairing(s.model, s.target(), *ray);
    step.n_dot_ray = T::pairing(s.model, s.n, *ray);
    if (step.target_dot_ray >= 0) throw GeometryError("run_wzd_mmp: selected ray is not negative for the target");
    step.diagnostic_bound_ok = step.target_dot_ray >= -2 * detail::dimension_of(s.model);

    auto tr = T::surgery(s.model, *ray);
    step.kind = tr.kind;
    step.contracted = tr.contracted;
    if (tr.kind == StepKind::fibration || tr.kind == StepKind::no_contraction) {
      step.state_after = s;
      step.theta_after = theta(s.boundary, s.n);
      trace.steps.push_back(step);
      trace.outcome = tr.kind == StepKind::fibration ? Outcome::mori_fibre_space : Outcome::no_modeled_contraction;
      trace.fibration_ray = *ray;
      trace.fibration_base = tr.fibration_base;
      break;
    }
    if (tr.kind == StepKind::flip && ++trace.flips > opt.flip_limit) {
      trace.outcome = Outcome::step_limit;
      break;
    }
    s = detail::transported(s, *tr.next);
    step.state_after = s;
    step.theta_after = theta(s.boundary, s.n);
    if (pair.mode == PairMode::kb && step.theta_after != 0)
      throw GeometryError("run_wzd_mmp: theta became positive after a step");
    trace.steps.push_back(step);
  }
  trace.final_state = s;
  return trace;
}

/// Ample surrogate: H.R > 0 on every generator.
template <class Model>
bool is_ample(const RationalDivisor& h, const Model& m) {
  for (auto c : ModelTraits<Model>::nef_curves(m))
    if (ModelTraits<Model>::pairing(m, h, c) <= 0) return false;
  return true;
}

/// An effective H with H.R >= 1 and (target + H).R >= 0 on every wall,
/// minimizing the coefficient sum. Throws when the fan is not projective.
inline RationalDivisor default_scaling_divisor(const ToricVariety& x, const RationalDivisor& target) {
  const auto& walls = mori_generators(x);
  const std::size_t r = x.ray_count();
  LinearProgram lp(r);
  RationalVector obj(r, Rational(1));
  lp.set_objective(obj);
  for (std::size_t i = 0; i < r; ++i) lp.set_nonnegative(i);
  for (const auto& w : walls) {
    const Rational t = x.intersect(target, w);
    lp.add(w.pairing, Relation::greater_equal, t < -1 ? -t : Rational(1));
  }
  const auto res = lp.minimize();
  if (res.status != LpStatus::optimal) throw PreconditionError("no ample divisor found: fan is not projective");
  return x.divisor(res.x);
}

/// LMMP with scaling of H: lambda_i = max over (K+B).R < 0 of -(K+B).R / H.R.
template <class Model>
MMPTrace<Model> run_mmp_with_scaling(const Pair<Model>& pair, const RationalDivisor& h, MmpOptions opt = {}) {
  using T = ModelTraits<Model>;
  T::check(pair.model, h);
  if (!is_ample(h, pair.model)) throw PreconditionError("run_mmp_with_scaling: H is not positive on every generator");
  for (auto c : T::nef_curves(pair.model))
    if (T::pairing(pair.model, pair.target() + h, c) < 0)
      throw PreconditionError("run_mmp_with_scaling: K + B + H is not nef");

  MMPTrace<Model> trace;
  trace.driver = "scaling";
  trace.mode = pair.mode;
  trace.options = opt;
  MMPState<Model> s{pair.model, pair.base, pair.boundary, pair.target() + h, {}, h};
  std::optional<Rational> previous;
  while (true) {
    if (static_cast<int>(trace.steps.size()) >= opt.step_limit) {
      trace.outcome = Outcome::step_limit;
      break;
    }
    const auto target = s.target();
    Rational lambda = 0;
    for (auto c : T::nef_curves(s.model)) {
      const auto t = T::pairing(s.model, target, c);
      if (t >= 0) continue;
      const auto hr = T::pairing(s.model, *s.h, c);
      if (hr <= 0) throw GeometryError("run_mmp_with_scaling: H is not positive on a negative curve");
      const Rational ratio = -t / hr;
      if (ratio > lambda) lambda = ratio;
    }
    if (previous && lambda > *previous) throw GeometryError("run_mmp_with_scaling: lambda increased");
    if (lambda == 0) {
      s.p = target;
      trace.outcome = Outcome::minimal_model;
      trace.nef_certificate = nef_pairings(s.model, target);
      break;
    }
    previous = lambda;
    s.p = target + lambda * *s.h;
    std::optional<std::size_t> ray;
    for (auto c : T::rays(s.model)) {
      const auto t = T::pairing(s.model, target, c);
      if (t < 0 && -t / T::pairing(s.model, *s.h, c) == lambda) {
        ray = c;
        break;
      }
    }
    if (!ray) throw GeometryError("run_mmp_with_scaling: no extremal ray attains lambda");

    MMPStep<Model> step;
    step.index = static_cast<int>(trace.steps.size());
    step.threshold = lambda;
    step.ray = T::describe(s.model, *ray);
    step.target_dot_ray = T::pairing(s.model, target, *ray);
    step.n_dot_ray = T::pairing(s.model, *s.h, *ray);
    step.diagnostic_bound_ok = step.target_dot_ray >= -2 * detail::dimension_of(s.model);
    auto tr = T::surgery(s.model, *ray);
    step.kind = tr.kind;
    step.contracted = tr.contracted;
    if (tr.kind == StepKind::fibration || tr.kind == StepKind::no_contraction) {
      step.state_after = s;
      trace.steps.push_back(step);
      trace.outcome = tr.kind == StepKind::fibration ? Outcome::mori_fibre_space : Outcome::no_modeled_contraction;
      trace.fibration_ray = *ray;
      trace.fibration_base = tr.fibration_base;
      break;
    }
    if (tr.kind == StepKind::flip && ++trace.flips > opt.flip_limit) {
      trace.outcome = Outcome::step_limit;
      break;
    }
    s = detail::transported(s, *tr.next);
    step.state_after = s;
    trace.steps.push_back(step);
  }
  trace.final_state = s;
  return trace;
}

template <class Model>
Pair<Model> final_pair(const MMPTrace<Model>& t) {
  return {t.final_state.model, t.final_state.base, t.final_state.boundary, t.mode};
}

// ---------------------------------------------------------------------------
// Log smooth models and the dlt surrogate

struct LogSmoothModel {
  ToricVariety model;
  Boundary boundary;   // B_W = strict transform of B + reduced exceptional part
  RationalDivisor f;   // K_W + B_W - f^*(K_X + B)
  std::vector<std::string> exceptional;
};

inline LogSmoothModel log_smooth_model(const Pair<ToricVariety>& pair, int max_steps = 200) {
  if (pair.mode != PairMode::kb) throw PreconditionError("log_smooth_model: requires a pair with base K_X");
  auto res = smooth_subdivision(pair.model, max_steps);
  RationalDivisor bw = pushforward(pair.boundary.divisor(), pair.model, res.model);
  for (const auto& id : res.new_rays) bw.set(id, 1);
  RationalDivisor f = canonical_divisor(res.model) + bw - pullback(pair.target(), pair.model, res.model);
  if (!f.is_effective()) throw GeometryError("log_smooth_model: F is not effective (pair is not log canonical)");
  for (const auto& [id, c] : f.terms())
    if (std::find(res.new_rays.begin(), res.new_rays.end(), id) == res.new_rays.end())
      throw GeometryError("log_smooth_model: F is not exceptional");
  return {res.model, Boundary(bw), f, res.new_rays};
}

/// Toric stand-in for Q-factorial dlt: simplicial, boundary in [0,1], and
/// every exceptional ray of the fixed resolution has positive log
/// discrepancy. Returns the first failing ray.
inline std::optional<std::string> dlt_surrogate_failure(const ToricVariety& y, const RationalDivisor& target) {
  const auto res = smooth_subdivision(y);
  for (const auto& id : res.new_rays) {
    const auto& v = res.model.rays()[static_cast<std::size_t>(res.model.index_of(id))];
    if (log_discrepancy(v, y, target) <= 0) return id;
  }
  return std::nullopt;
}

inline const char* dlt_surrogate_note() {
  return "dlt surrogate: simplicial fan, boundary in [0,1], positive log discrepancy on the exceptional rays of a "
         "fixed smooth subdivision";
}

// ---------------------------------------------------------------------------
// Verification of log minimal models and Mori fibre spaces

namespace detail {

inline void check_candidate_form(const Pair<ToricVariety>& base, const Pair<ToricVariety>& cand) {
  const auto& x = base.model;
  const auto& y = cand.model;
  if (x.dim() != y.dim()) throw PreconditionError("candidate has a different dimension");
  y.check_divisor(cand.boundary.divisor());
  for (std::size_t r = 0; r < y.ray_count(); ++r) {
    const auto id = y.id(static_cast<int>(r));
    const auto xr = x.find_ray(y.rays()[r]);
    const Rational expected = xr ? base.boundary[x.id(*xr)] : Rational(1);
    if (cand.boundary[id] != expected)
      throw PreconditionError("B_Y is not of the form B~ + E: coefficient of " + id + " is " +
                              to_string(cand.boundary[id]) + ", expected " + to_string(expected));
  }
  if (base.mode == PairMode::kb) {
    if (!(cand.base == canonical_divisor(y))) throw PreconditionError("candidate base divisor is not K_Y");
  } else {
    for (const auto& v : y.rays())
      if (!x.find_ray(v)) throw PreconditionError("divisor mode candidate has rays exceptional over X");
    if (!(cand.base == pushforward(base.base, x, y)))
      throw PreconditionError("candidate base divisor is not the pushforward of L");
  }
}

inline void check_candidate_form(const Pair<SurfaceModel>& base, const Pair<SurfaceModel>& cand) {
  for (const auto& c : cand.model.classes())
    if (!base.model.has_class(c)) throw PreconditionError("candidate class " + c + " is not a class of X");
  const auto exc = exceptional_over(base.model, cand.model);
  const std::set<std::string> gone(exc.begin(), exc.end());
  if (!(cand.boundary.divisor() == surface_pushforward(base.boundary.divisor(), gone)))
    throw PreconditionError("B_Y is not the pushforward of B");
  if (!(cand.base == surface_pushforward(base.base, gone)))
    throw PreconditionError("candidate base divisor is not the pushforward of the base divisor");
}

inline Rational discrepancy_on(const Pair<ToricVariety>& p, const IntVector& v) {
  return log_discrepancy(v, p.model, p.target());
}

}  // namespace detail

inline ValidationReport verify_lmm(const Pair<ToricVariety>& base, const Pair<ToricVariety>& cand) {
  detail::check_candidate_form(base, cand);
  ValidationReport r;
  r.kind = "lmm";
  const auto& x = base.model;
  const auto& y = cand.model;
  const auto ty = cand.target();
  if (base.mode == PairMode::kb) {
    r.notes.push_back(dlt_surrogate_note());
    if (auto bad = dlt_surrogate_failure(y, ty)) r.fail("(1) dlt surrogate fails at exceptional ray " + *bad);
  } else {
    r.notes.push_back("divisor mode: simplicial only, no dlt condition");
  }
  const auto& walls = mori_generators(y);
  for (std::size_t i = 0; i < walls.size(); ++i) {
    const auto v = y.intersect(ty, walls[i]);
    if (v < 0) r.fail("(2) K_Y + B_Y is negative on " + ModelTraits<ToricVariety>::describe(y, i).name);
  }
  for (std::size_t i = 0; i < x.ray_count(); ++i) {
    if (y.find_ray(x.rays()[i])) continue;
    const auto ax = detail::discrepancy_on(base, x.rays()[i]);
    const auto ay = detail::discrepancy_on(cand, x.rays()[i]);
    if (!(ax < ay))
      r.fail("(3) contracted divisor " + x.id(static_cast<int>(i)) + ": a(D,X,B) = " + to_string(ax) +
             " is not < a(D,Y,B_Y) = " + to_string(ay));
  }
  return r;
}

inline ValidationReport verify_lmm(const Pair<SurfaceModel>& base, const Pair<SurfaceModel>& cand) {
  detail::check_candidate_form(base, cand);
  ValidationReport r;
  r.kind = "lmm";
  r.notes.push_back("surface lattice: Mumford pullback discrepancies, no dlt condition");
  const auto& x = base.model;
  const auto& y = cand.model;
  const auto ty = cand.target();
  for (std::size_t c = 0; c < y.generators().size(); ++c) {
    const auto v = y.intersect(ty, y.generators()[c].cls);
    if (v < 0) r.fail("(2) K_Y + B_Y is negative on " + y.generators()[c].name);
  }
  const auto exc = detail::exceptional_over(x, y);
  const auto pulled = surface_pullback(ty, {exc.begin(), exc.end()}, x);
  const auto tx = base.target();
  for (const auto& c : exc) {
    const Rational ax = -tx[c], ay = -pulled[c];
    if (!(ax < ay))
      r.fail("(3) contracted curve " + c + ": a(D,X,B) = " + to_string(ax) + " is not < a(D,Y,B_Y) = " + to_string(ay));
  }
  return r;
}

/// `ray` is a wall index on the candidate's model, `base_t` the declared
/// base of the fibration.
inline ValidationReport verify_mfs(const Pair<ToricVariety>& base, const Pair<ToricVariety>& cand, std::size_t ray,
                                   const ToricVariety& base_t) {
  detail::check_candidate_form(base, cand);
  ValidationReport r;
  r.kind = "mfs";
  const auto& x = base.model;
  const auto& y = cand.model;
  const auto ty = cand.target();
  if (ray >= y.walls().size()) throw InputError("verify_mfs: wall index out of range");
  if (base.mode == PairMode::kb) {
    r.notes.push_back(dlt_surrogate_note());
    if (auto bad = dlt_surrogate_failure(y, ty)) r.fail("dlt surrogate fails at exceptional ray " + *bad);
  }
  if (base_t.dim() >= y.dim())
    r.fail("dimension: dim T = " + std::to_string(base_t.dim()) + " is not < dim Y = " + std::to_string(y.dim()));
  const auto& w = y.walls()[ray];
  const auto ext = extremal_walls(y);
  if (std::none_of(ext.begin(), ext.end(), [&](std::size_t e) { return same_curve_class(y.walls()[e], w); }))
    r.fail("extremality: the contracted curve does not span an extremal ray");
  const auto neg = y.intersect(ty, w);
  if (neg >= 0) r.fail("negativity: (K_Y + B_Y).R = " + to_string(neg) + " is not < 0");
  const auto contraction = contract_or_flip(w, y);
  if (contraction.kind != ContractionKind::fibration) r.fail("contraction of R is not a fibration");
  else if (contraction.target.dim() != base_t.dim()) r.fail("declared base does not match the contraction");

  const auto v = common_model(x, y);
  r.notes.push_back("weak inequality checked on the rays of a common refinement");
  for (std::size_t i = 0; i < v.ray_count(); ++i) {
    const auto& u = v.rays()[i];
    const auto ax = detail::discrepancy_on(base, u);
    const auto ay = detail::discrepancy_on(cand, u);
    const bool contracted = x.find_ray(u) && !y.find_ray(u);
    if (contracted ? !(ax < ay) : !(ax <= ay))
      r.fail(std::string(contracted ? "strict" : "weak") + " inequality fails on " + v.id(static_cast<int>(i)) +
             ": a(D,X,B) = " + to_string(ax) + ", a(D,Y,B_Y) = " + to_string(ay));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Theta descent

template <class Model>
struct DescentResult {
  Pair<Model> pair;
  WeakDecomposition<Model> wzd;
  AlphaSplit split;
  int theta_before = 0;
  int theta_after = 0;
};

/// (X, B) with K + B = P + N  ->  (X, B + C) with K + B + C = P + (N + C).
template <class Model>
DescentResult<Model> theta_descent_step(const Pair<Model>& pair, const WeakDecomposition<Model>& wzd) {
  if (!(wzd.model == pair.model))
    throw PreconditionError("theta_descent_step: the decomposition must live on the pair's model");
  const int before = theta(pair.boundary, wzd.n);
  if (before == 0) throw PreconditionError("theta_descent_step: theta(B, N) = 0");
  auto split = alpha_split(pair.boundary, wzd.n);
  Pair<Model> next{pair.model, pair.base, Boundary(pair.boundary.divisor() + split.c), pair.mode};
  auto nw = make_decomposition(wzd.model, wzd.p, wzd.n + split.c, wzd.kind);
  const int after = theta(next.boundary, nw.n);
  if (after >= before) throw GeometryError("theta_descent_step: theta did not drop");
  return {std::move(next), std::move(nw), std::move(split), before, after};
}

}  // namespace wzd
