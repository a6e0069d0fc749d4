#pragma once

// theta descent, the weak-ZD MMP, and verification of whatever it ends in.

#include "wzd/challengers.hpp"

#include <map>

namespace wzd {

/// A trivial weak decomposition of the pair's target: the effective
/// representative with P = 0 (toric), or the surface Zariski decomposition.
/// Empty when the target is not pseudo-effective.
inline std::optional<WeakDecomposition<ToricVariety>> trivial_decomposition(const Pair<ToricVariety>& pair) {
  const auto pe = is_pseudoeffective(pair.target(), pair.model);
  if (!pe.pseudoeffective) return std::nullopt;
  return make_decomposition(pair.model, RationalDivisor{}, pe.representative);
}

inline std::optional<WeakDecomposition<SurfaceModel>> trivial_decomposition(const Pair<SurfaceModel>& pair) {
  try {
    const auto z = zariski_decompose(pair.target(), pair.model);
    return make_decomposition(pair.model, z.p, z.n, DecompositionKind::surface_zariski);
  } catch (const GeometryError&) {
    return std::nullopt;
  }
}

struct PipelineOptions {
  MmpOptions mmp;
  std::size_t challengers = 50;
  std::uint64_t seed = 0;
  std::int64_t m_max = 12;
};

template <class Model>
struct PipelineResult {
  std::vector<DescentResult<Model>> descent;
  Pair<Model> pair;  // after descent
  MMPTrace<Model> trace;
  std::optional<WeakDecomposition<Model>> fujita;
  std::map<std::string, ValidationReport> reports;
  bool valid = true;
};

template <class Model>
PipelineResult<Model> run_pipeline(Pair<Model> pair, WeakDecomposition<Model> wzd, const PipelineOptions& opt = {}) {
  PipelineResult<Model> r;
  while (theta(pair.boundary, wzd.n) > 0) {
    auto step = theta_descent_step(pair, wzd);
    pair = step.pair;
    wzd = step.wzd;
    r.descent.push_back(std::move(step));
  }
  r.trace = run_wzd_mmp(pair, wzd, opt.mmp);
  auto record = [&](const std::string& key, ValidationReport rep) {
    r.valid = r.valid && rep.valid;
    r.reports[key] = std::move(rep);
  };
  const auto end = final_pair(r.trace);
  if (r.trace.outcome == Outcome::minimal_model) {
    record("lmm", verify_lmm(pair, end));
    r.fujita = from_lmm_fujita(end, pair);
    record("weak", validate_weak(pair.target(), pair.model, *r.fujita));
    const auto ch = generate_challengers(pair.target(), pair.model, *r.fujita, opt.challengers, opt.seed);
    record("fujita", validate_fujita(pair.target(), pair.model, *r.fujita, ch));
    if constexpr (std::is_same_v<Model, ToricVariety>) record("ckm", ckm_from_lmm(end, pair, opt.m_max));
  } else if (r.trace.outcome == Outcome::mori_fibre_space) {
    if constexpr (std::is_same_v<Model, ToricVariety>)
      record("mfs", verify_mfs(pair, end, *r.trace.fibration_ray, *r.trace.fibration_base));
  }
  r.pair = std::move(pair);
  return r;
}

}  // namespace wzd
