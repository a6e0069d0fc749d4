#pragma once

// Operations on toric varieties: star subdivisions, resolutions, extremal
// contractions and flips, common refinements, log discrepancies and stable
// base loci.

#include "wzd/toric.hpp"

#include <functional>

namespace wzd {

// ---------------------------------------------------------------------------
// Subdivisions

inline std::string fresh_ray_id(const std::set<std::string>& taken, const std::string& prefix, int& counter) {
  while (true) {
    std::string id = prefix + std::to_string(++counter);
    if (!taken.contains(id)) return id;
  }
}

/// Star subdivision of the fan at the primitive vector v (inserted with the
/// given id). v must lie in the support and not already be a ray.
inline ToricVariety star_subdivision(const ToricVariety& x, const IntVector& v, const std::string& id) {
  if (content_of(v) != 1) throw PreconditionError("star_subdivision: vector is not primitive");
  if (x.find_ray(v)) throw PreconditionError("star_subdivision: vector is already a ray");
  const auto loc = x.locate(to_rational(v));
  if (!loc) throw PreconditionError("star_subdivision: vector lies outside the support");
  Cone tau;
  const auto& home = x.max_cones()[loc->first];
  for (std::size_t i = 0; i < home.size(); ++i)
    if (loc->second[i] > 0) tau.push_back(home[i]);

  auto rays = x.rays();
  auto ids = x.ray_ids();
  const int vi = static_cast<int>(rays.size());
  rays.push_back(v);
  ids.push_back(id);
  std::vector<Cone> cones;
  for (const auto& c : x.max_cones()) {
    if (!std::includes(c.begin(), c.end(), tau.begin(), tau.end())) {
      cones.push_back(c);
      continue;
    }
    for (int drop : tau) {
      Cone nc;
      for (int r : c)
        if (r != drop) nc.push_back(r);
      nc.push_back(vi);
      cones.push_back(nc);
    }
  }
  return ToricVariety(x.dim(), rays, cones, ids);
}

/// Nonzero lattice points sum lambda_i u_i with 0 <= lambda_i < 1 in a
/// maximal cone, ordered by sum lambda then lexicographically.
inline std::vector<IntVector> parallelepiped_points(const ToricVariety& x, std::size_t cone) {
  const std::size_t n = static_cast<std::size_t>(x.dim());
  std::vector<std::int64_t> lo(n, 0), hi(n, 0);
  for (int r : x.max_cones()[cone])
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = x.rays()[static_cast<std::size_t>(r)][i];
      (c < 0 ? lo[i] : hi[i]) += c;
    }
  std::vector<std::pair<Rational, IntVector>> found;
  IntVector p(lo);
  while (true) {
    if (std::any_of(p.begin(), p.end(), [](auto c) { return c != 0; })) {
      const auto lambda = x.cone_coordinates(cone, to_rational(p));
      if (std::all_of(lambda.begin(), lambda.end(), [](const Rational& l) { return l >= 0 && l < 1; })) {
        Rational s = 0;
        for (const auto& l : lambda) s += l;
        found.emplace_back(s, p);
      }
    }
    std::size_t i = 0;
    while (i < n && p[i] == hi[i]) {
      p[i] = lo[i];
      ++i;
    }
    if (i == n) break;
    ++p[i];
  }
  std::sort(found.begin(), found.end());
  std::vector<IntVector> out;
  for (auto& f : found) out.push_back(std::move(f.second));
  return out;
}

struct Resolution {
  ToricVariety model;
  std::vector<std::string> new_rays;  // ids of exceptional rays, in insertion order
};

/// Resolves singularities by repeated star subdivision at the interior
/// lattice point of minimal height in the first singular cone.
inline Resolution smooth_subdivision(const ToricVariety& x, int max_steps = 200) {
  Resolution res{x, {}};
  std::set<std::string> taken(x.ray_ids().begin(), x.ray_ids().end());
  int counter = 0;
  for (int step = 0; !res.model.smooth(); ++step) {
    if (step >= max_steps) throw GeometryError("smooth_subdivision: step bound exceeded");
    for (std::size_t k = 0; k < res.model.max_cones().size(); ++k) {
      auto pts = parallelepiped_points(res.model, k);
      if (pts.empty()) continue;
      const std::string id = fresh_ray_id(taken, "e", counter);
      taken.insert(id);
      res.model = star_subdivision(res.model, pts.front(), id);
      res.new_rays.push_back(id);
      break;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Contractions and flips

enum class ContractionKind { divisorial, flip, fibration };

inline std::string to_string(ContractionKind k) {
  switch (k) {
    case ContractionKind::divisorial: return "divisorial";
    case ContractionKind::flip: return "flip";
    case ContractionKind::fibration: return "fibration";
  }
  return "";
}

struct ContractionResult {
  ContractionKind kind;
  ToricVariety target;                  // Y for divisorial/flip, T for fibration
  std::optional<std::string> contracted;  // ray id removed by a divisorial contraction
  std::vector<IntVector> projection;    // rows of N -> N/span(R), fibration only
};

inline std::vector<std::size_t> ray_indices_with_sign(const InvariantCurve& c, int sgn) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < c.pairing.size(); ++i)
    if (sign(c.pairing[i]) == sgn) out.push_back(i);
  return out;
}

namespace detail {

inline ContractionResult fibration(const ToricVariety& x, const std::vector<std::size_t>& positive) {
  std::vector<IntVector> span;
  for (auto i : positive) span.push_back(x.rays()[i]);
  const auto q = integer_kernel(span, static_cast<std::size_t>(x.dim()));
  const std::size_t k = q.size();
  auto project = [&](const IntVector& v) {
    IntVector out(k);
    for (std::size_t i = 0; i < k; ++i) {
      std::int64_t s = 0;
      for (std::size_t j = 0; j < v.size(); ++j) s += q[i][j] * v[j];
      out[i] = s;
    }
    return out;
  };
  if (k == 0) return {ContractionKind::fibration, ToricVariety(0, {}, {Cone{}}), std::nullopt, q};

  std::vector<IntVector> rays;
  std::map<IntVector, int> index;
  auto ray_index = [&](const IntVector& v) {
    IntVector p(v);
    const auto g = content_of(p);
    for (auto& c : p) c /= g;
    auto [it, inserted] = index.emplace(p, static_cast<int>(rays.size()));
    if (inserted) rays.push_back(p);
    return it->second;
  };
  std::set<Cone> cones;
  for (const auto& c : x.max_cones()) {
    std::vector<int> gens;
    std::vector<RationalVector> gvec;
    for (int r : c) {
      const auto img = project(x.rays()[static_cast<std::size_t>(r)]);
      if (std::all_of(img.begin(), img.end(), [](auto v) { return v == 0; })) continue;
      const int idx = ray_index(img);
      if (std::find(gens.begin(), gens.end(), idx) == gens.end()) {
        gens.push_back(idx);
        gvec.push_back(to_rational(rays[static_cast<std::size_t>(idx)]));
      }
    }
    if (rank_of(gvec) < k) continue;
    Cone extreme;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      std::vector<RationalVector> others;
      for (std::size_t j = 0; j < gens.size(); ++j)
        if (j != i) others.push_back(gvec[j]);
      if (!in_cone(others, gvec[i])) extreme.push_back(gens[i]);
    }
    std::sort(extreme.begin(), extreme.end());
    cones.insert(extreme);
  }
  // Keep only rays used by some cone, reindexing.
  std::vector<int> remap(rays.size(), -1);
  std::vector<IntVector> used;
  for (const auto& c : cones)
    for (int r : c)
      if (remap[static_cast<std::size_t>(r)] < 0) {
        remap[static_cast<std::size_t>(r)] = static_cast<int>(used.size());
        used.push_back(rays[static_cast<std::size_t>(r)]);
      }
  std::vector<Cone> out;
  for (const auto& c : cones) {
    Cone nc;
    for (int r : c) nc.push_back(remap[static_cast<std::size_t>(r)]);
    out.push_back(nc);
  }
  try {
    return {ContractionKind::fibration, ToricVariety(static_cast<int>(k), used, out), std::nullopt, q};
  } catch (const InputError& e) {
    throw GeometryError(std::string("fibration base is not a simplicial fan: ") + e.what());
  }
}

}  // namespace detail

/// Contraction of the extremal ray spanned by the wall curve, or its flip.
inline ContractionResult contract_or_flip(const InvariantCurve& ray, const ToricVariety& x) {
  if (!x.complete()) throw PreconditionError("contract_or_flip: fan is not complete");
  const auto positive = ray_indices_with_sign(ray, 1);
  const auto negative = ray_indices_with_sign(ray, -1);
  if (negative.empty()) return detail::fibration(x, positive);

  std::set<Cone> removed, added;
  for (const auto& w : x.walls()) {
    if (!same_curve_class(w, ray)) continue;
    Cone both = x.max_cones()[static_cast<std::size_t>(w.cone_a)];
    both.push_back(w.ray_b);
    std::sort(both.begin(), both.end());
    Cone kappa;
    for (int r : both)
      if (w.pairing[static_cast<std::size_t>(r)] == 0) kappa.push_back(r);
    auto cone_without = [&](std::size_t drop, const std::vector<std::size_t>& from) {
      Cone c(kappa);
      for (auto r : from)
        if (r != drop) c.push_back(static_cast<int>(r));
      std::sort(c.begin(), c.end());
      return c;
    };
    std::vector<std::size_t> j;
    j.insert(j.end(), positive.begin(), positive.end());
    j.insert(j.end(), negative.begin(), negative.end());
    for (auto p : positive) removed.insert(cone_without(p, j));
    for (auto n : negative) added.insert(cone_without(n, j));
  }
  for (const auto& c : removed)
    if (!x.find_cone(c))
      throw GeometryError("contract_or_flip: the ray is not extremal (cone {" +
                          [&] {
                            std::string s;
                            for (const auto& id : x.cone_ids(c)) s += (s.empty() ? "" : ",") + id;
                            return s;
                          }() +
                          "} is missing)");
  std::vector<Cone> cones;
  for (const auto& c : x.max_cones())
    if (!removed.contains(c)) cones.push_back(c);
  cones.insert(cones.end(), added.begin(), added.end());

  const bool divisorial = negative.size() == 1;
  auto rays = x.rays();
  auto ids = x.ray_ids();
  std::optional<std::string> contracted;
  if (divisorial) {
    const int gone = static_cast<int>(negative.front());
    for (const auto& c : cones)
      if (std::binary_search(c.begin(), c.end(), gone))
        throw GeometryError("contract_or_flip: exceptional ray '" + x.id(gone) + "' survives in the new fan");
    contracted = x.id(gone);
    rays.erase(rays.begin() + gone);
    ids.erase(ids.begin() + gone);
    for (auto& c : cones)
      for (auto& r : c)
        if (r > gone) --r;
  }
  try {
    return {divisorial ? ContractionKind::divisorial : ContractionKind::flip,
            ToricVariety(x.dim(), rays, cones, ids), contracted, {}};
  } catch (const InputError& e) {
    throw GeometryError(std::string("contract_or_flip: surgery does not produce a fan: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Common refinement

namespace detail {

// Extreme rays of {x : a x >= 0} (a pointed full-dimensional cone).
inline std::vector<IntVector> cone_extreme_rays(const Matrix& a, std::size_t n) {
  std::set<IntVector> rays;
  const std::size_t m = a.size();
  std::vector<bool> pick(m, false);
  if (n == 1) {
    for (int s : {1, -1}) {
      RationalVector v{Rational(s)};
      if (std::all_of(a.begin(), a.end(), [&](const RationalVector& r) { return dot(r, v) >= 0; }))
        rays.insert(IntVector{s});
    }
    return {rays.begin(), rays.end()};
  }
  std::fill(pick.begin(), pick.begin() + static_cast<long>(n - 1), true);
  do {
    Matrix sub;
    for (std::size_t i = 0; i < m; ++i)
      if (pick[i]) sub.push_back(a[i]);
    const auto ker = null_space(sub, n);
    if (ker.size() != 1) continue;
    for (int s : {1, -1}) {
      RationalVector v = ker[0];
      for (auto& c : v) c *= s;
      if (std::all_of(a.begin(), a.end(), [&](const RationalVector& r) { return dot(r, v) >= 0; }))
        rays.insert(primitive_on_ray(v));
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return {rays.begin(), rays.end()};
}

inline bool full_dimensional(const Matrix& a, std::size_t n) {
  LinearProgram lp(n + 1);
  RationalVector obj(n + 1, Rational(0));
  obj[n] = 1;
  lp.set_objective(obj);
  for (const auto& row : a) {
    RationalVector c(row);
    c.push_back(Rational(-1));
    lp.add(c, Relation::greater_equal, 0);
  }
  lp.add(obj, Relation::less_equal, 1);
  auto r = lp.maximize();
  return r.status == LpStatus::optimal && r.objective > 0;
}

}  // namespace detail

/// Coarsest simplicial common refinement of two fans with the same support
/// (dimension <= 3). Rays of `x` keep their ids; rays of `y` keep theirs
/// unless taken; new rays get fresh ids.
inline ToricVariety common_refinement(const ToricVariety& x, const ToricVariety& y) {
  if (x.dim() != y.dim()) throw PreconditionError("common_refinement: dimensions differ");
  if (x.dim() > 3) throw PreconditionError("common_refinement: only dimension <= 3 is supported");
  if (x.complete() != y.complete()) throw PreconditionError("common_refinement: supports differ");
  const std::size_t n = static_cast<std::size_t>(x.dim());
  if (n == 0) return x;

  std::vector<std::vector<IntVector>> pieces;
  for (std::size_t a = 0; a < x.max_cones().size(); ++a) {
    Matrix ha;
    for (std::size_t i = 0; i < n; ++i) {
      RationalVector e(n, Rational(0));
      e[i] = 1;
      ha.push_back(x.cone_coordinates(a, e));
    }
    ha = transpose(ha);  // rows of the inverse: lambda_i = row_i . v
    for (std::size_t b = 0; b < y.max_cones().size(); ++b) {
      Matrix h = ha;
      Matrix hb;
      for (std::size_t i = 0; i < n; ++i) {
        RationalVector e(n, Rational(0));
        e[i] = 1;
        hb.push_back(y.cone_coordinates(b, e));
      }
      hb = transpose(hb);
      h.insert(h.end(), hb.begin(), hb.end());
      if (!detail::full_dimensional(h, n)) continue;
      pieces.push_back(detail::cone_extreme_rays(h, n));
    }
  }
  if (!x.complete()) {
    for (const auto& fan : {&x, &y})
      for (std::size_t r = 0; r < fan->ray_count(); ++r)
        if (!(fan == &x ? y : x).locate(to_rational(fan->rays()[r])))
          throw PreconditionError("common_refinement: supports differ");
  }

  std::vector<IntVector> rays = x.rays();
  std::vector<std::string> ids = x.ray_ids();
  std::set<std::string> taken(ids.begin(), ids.end());
  std::map<IntVector, int> index;
  for (std::size_t i = 0; i < rays.size(); ++i) index[rays[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < y.ray_count(); ++i)
    if (!index.contains(y.rays()[i]) && !taken.contains(y.id(static_cast<int>(i)))) taken.insert(y.id(static_cast<int>(i)));
  std::set<IntVector> extra;
  for (const auto& p : pieces)
    for (const auto& r : p)
      if (!index.contains(r)) extra.insert(r);
  // y's rays first (in y order), then the remaining new rays.
  int counter = 0;
  for (std::size_t i = 0; i < y.ray_count(); ++i) {
    const auto& r = y.rays()[i];
    if (index.contains(r)) continue;
    index[r] = static_cast<int>(rays.size());
    rays.push_back(r);
    const bool own = std::count(x.ray_ids().begin(), x.ray_ids().end(), y.id(static_cast<int>(i))) == 0;
    ids.push_back(own ? y.id(static_cast<int>(i)) : fresh_ray_id(taken, "w", counter));
    taken.insert(ids.back());
    extra.erase(r);
  }
  for (const auto& r : extra) {
    index[r] = static_cast<int>(rays.size());
    rays.push_back(r);
    ids.push_back(fresh_ray_id(taken, "w", counter));
    taken.insert(ids.back());
  }

  std::set<Cone> cones;
  for (const auto& p : pieces) {
    Cone c;
    for (const auto& r : p) c.push_back(index.at(r));
    std::sort(c.begin(), c.end());
    if (c.size() == n) {
      cones.insert(c);
      continue;
    }
    // Pulling triangulation from the lowest-indexed ray (dimension 3 only).
    const int apex = c.front();
    std::vector<RationalVector> vec;
    for (int r : c) vec.push_back(to_rational(rays[static_cast<std::size_t>(r)]));
    for (std::size_t i = 1; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        // (c[i], c[j]) must be a facet edge not containing the apex.
        RationalVector normal{vec[i][1] * vec[j][2] - vec[i][2] * vec[j][1],
                              vec[i][2] * vec[j][0] - vec[i][0] * vec[j][2],
                              vec[i][0] * vec[j][1] - vec[i][1] * vec[j][0]};
        int pos = 0, neg = 0;
        for (std::size_t k = 0; k < c.size(); ++k) {
          const auto s = sign(dot(normal, vec[k]));
          pos += s > 0;
          neg += s < 0;
        }
        if ((pos == 0 || neg == 0) && sign(dot(normal, vec[0])) != 0) {
          Cone t{apex, c[i], c[j]};
          std::sort(t.begin(), t.end());
          cones.insert(t);
        }
      }
  }
  try {
    return ToricVariety(static_cast<int>(n), rays, {cones.begin(), cones.end()}, ids);
  } catch (const InputError& e) {
    throw GeometryError(std::string("common_refinement: result is not a fan: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Log discrepancies

/// Coefficient of v in the pullback of D to any model where v is a ray:
/// the piecewise linear extension of D's coefficients.
inline Rational pullback_coefficient(const RationalDivisor& d, const ToricVariety& x, const IntVector& v) {
  const auto loc = x.locate(to_rational(v));
  if (!loc) throw PreconditionError("vector lies outside the support of the fan");
  const auto coeff = x.coefficients(d);
  Rational c = 0;
  for (std::size_t i = 0; i < loc->second.size(); ++i)
    c += loc->second[i] * coeff[static_cast<std::size_t>(x.max_cones()[loc->first][i])];
  return c;
}

/// a(E_v, X, B) for the divisor over X given by a primitive vector v, where
/// `target` is K_X + B (or more generally the divisor whose pullback is
/// subtracted): a = -coefficient of v in the pullback of target.
inline Rational log_discrepancy(const IntVector& v, const ToricVariety& x, const RationalDivisor& target) {
  if (std::all_of(v.begin(), v.end(), [](auto c) { return c == 0; }))
    throw PreconditionError("log_discrepancy: zero vector");
  if (v.size() != static_cast<std::size_t>(x.dim())) throw InputError("log_discrepancy: vector has wrong dimension");
  if (content_of(v) != 1) throw PreconditionError("log_discrepancy: vector is not primitive");
  return -pullback_coefficient(target, x, v);
}

// ---------------------------------------------------------------------------
// Stable base locus

struct StableBaseLocus {
  std::vector<Cone> cones;        // minimal cones whose orbit closures form the locus
  std::vector<std::int64_t> multiples;  // multiples m that were checked
  bool stabilized = false;        // last two checked multiples agree
  bool empty_system = false;      // no sections at any checked multiple
};

/// Torus orbits O(sigma) contained in Bs|mD| for every checked multiple m of
/// the denominator lcm up to m_max. The locus reported is that of the
/// largest checked multiple.
inline StableBaseLocus stable_base_locus(const RationalDivisor& d, const ToricVariety& x, std::int64_t m_max = 24) {
  if (m_max < 1) throw InputError("stable_base_locus: m_max must be positive");
  Integer l = 1;
  for (const auto& [id, c] : d.terms()) l = lcm_of(l, c.get_den());
  if (l > m_max)
    throw PreconditionError("stable_base_locus: m_max " + std::to_string(m_max) +
                            " is below the denominator lcm " + l.get_str());
  const auto step = to_int64(l);
  const auto all = x.all_cones();
  StableBaseLocus out;
  std::optional<std::vector<Cone>> previous;
  for (std::int64_t m = step; m <= m_max; m += step) {
    const auto md = Rational(static_cast<long>(m)) * d;
    const auto pts = sections(md, x);
    const auto coeff = x.coefficients(md);
    std::vector<Cone> locus;
    if (pts.empty()) {
      locus = {Cone{}};
      out.empty_system = true;
    } else {
      out.empty_system = false;
      std::vector<Cone> in_base;
      for (const auto& c : all) {
        bool free = false;
        for (const auto& p : pts) {
          bool tight = true;
          for (int r : c)
            tight = tight && dot(to_rational(p), x.rays()[static_cast<std::size_t>(r)]) ==
                                 -coeff[static_cast<std::size_t>(r)];
          if (tight) {
            free = true;
            break;
          }
        }
        if (!free) in_base.push_back(c);
      }
      // Minimal cones: orbit closures V(sigma) contain the orbits of larger cones.
      for (const auto& c : in_base) {
        bool minimal = true;
        for (const auto& o : in_base)
          if (o != c && o.size() < c.size() && std::includes(c.begin(), c.end(), o.begin(), o.end())) minimal = false;
        if (minimal) locus.push_back(c);
      }
    }
    out.multiples.push_back(m);
    out.stabilized = previous && *previous == locus;
    previous = locus;
    out.cones = locus;
  }
  return out;
}

}  // namespace wzd
