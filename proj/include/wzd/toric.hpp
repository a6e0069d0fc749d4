#pragma once

// Simplicial fans and their torus-invariant divisors and curves.
//
// Rays carry stable string ids; divisors on a toric variety are keyed by
// those ids. Varieties produced by surgery keep the ids of surviving rays,
// so divisors can be transported by id (or by ray vector across unrelated
// fans).

#include "wzd/divisor.hpp"
#include "wzd/linalg.hpp"
#include "wzd/lp.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wzd {

using Cone = std::vector<int>;  // sorted ray indices

/// Torus-invariant curve V(tau) for a wall tau shared by two maximal cones.
struct InvariantCurve {
  Cone face;                 // the wall, dim-1 ray indices
  int cone_a = -1, cone_b = -1;
  int ray_a = -1, ray_b = -1;  // rays opposite the wall in cone_a / cone_b
  RationalVector pairing;    // D_rho . C for every ray rho
  IntVector relation;        // primitive integer multiple of `pairing`
};

class ToricVariety {
public:
  ToricVariety() = default;

  ToricVariety(int dim, std::vector<IntVector> rays, std::vector<Cone> max_cones,
               std::vector<std::string> ray_ids = {})
      : dim_(dim), rays_(std::move(rays)), ids_(std::move(ray_ids)), cones_(std::move(max_cones)) {
    if (ids_.empty())
      for (std::size_t i = 0; i < rays_.size(); ++i) ids_.push_back(std::to_string(i));
    validate();
  }

  int dim() const { return dim_; }
  const std::vector<IntVector>& rays() const { return rays_; }
  const std::vector<std::string>& ray_ids() const { return ids_; }
  const std::vector<Cone>& max_cones() const { return cones_; }
  const std::vector<InvariantCurve>& walls() const { return walls_; }
  bool complete() const { return complete_; }
  bool smooth() const { return smooth_; }
  bool simplicial() const { return true; }

  std::size_t ray_count() const { return rays_.size(); }
  const std::string& id(int ray) const { return ids_[static_cast<std::size_t>(ray)]; }

  int index_of(const std::string& ray_id) const {
    auto it = id_index_.find(ray_id);
    if (it == id_index_.end()) throw InputError("unknown ray id '" + ray_id + "'");
    return it->second;
  }
  std::optional<int> find_ray(const IntVector& v) const {
    auto it = vector_index_.find(v);
    if (it == vector_index_.end()) return std::nullopt;
    return it->second;
  }

  void check_divisor(const RationalDivisor& d) const {
    for (const auto& [id, c] : d.terms()) index_of(id);
  }

  /// Coefficient vector of a divisor, ordered by ray index.
  RationalVector coefficients(const RationalDivisor& d) const {
    check_divisor(d);
    RationalVector v(rays_.size(), Rational(0));
    for (const auto& [id, c] : d.terms()) v[static_cast<std::size_t>(index_of(id))] = c;
    return v;
  }

  RationalDivisor divisor(const RationalVector& coeffs) const {
    RationalDivisor d;
    for (std::size_t i = 0; i < coeffs.size(); ++i) d.set(ids_[i], coeffs[i]);
    return d;
  }

  /// div(chi^m) = sum <m, u_rho> D_rho.
  RationalDivisor principal(const RationalVector& m) const {
    RationalDivisor d;
    for (std::size_t i = 0; i < rays_.size(); ++i) d.set(ids_[i], dot(m, rays_[i]));
    return d;
  }

  /// Coordinates of v in the basis of a maximal cone's rays.
  RationalVector cone_coordinates(std::size_t cone, const RationalVector& v) const {
    return multiply(inverses_[cone], v);
  }

  /// A maximal cone containing v, with v's coordinates in it. Lowest cone
  /// index wins on shared faces.
  std::optional<std::pair<std::size_t, RationalVector>> locate(const RationalVector& v) const {
    for (std::size_t k = 0; k < cones_.size(); ++k) {
      auto lambda = cone_coordinates(k, v);
      if (std::all_of(lambda.begin(), lambda.end(), [](const Rational& x) { return x >= 0; }))
        return std::make_pair(k, std::move(lambda));
    }
    return std::nullopt;
  }

  std::optional<std::size_t> find_cone(const Cone& c) const {
    auto it = std::find(cones_.begin(), cones_.end(), c);
    if (it == cones_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - cones_.begin());
  }

  /// Every cone of the fan (all faces of maximal cones), including the
  /// zero cone, in deterministic order.
  std::vector<Cone> all_cones() const {
    std::set<Cone> out;
    for (const auto& c : cones_) {
      const std::size_t k = c.size();
      for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        Cone f;
        for (std::size_t i = 0; i < k; ++i)
          if (mask & (std::size_t{1} << i)) f.push_back(c[i]);
        out.insert(f);
      }
    }
    std::vector<Cone> v(out.begin(), out.end());
    std::stable_sort(v.begin(), v.end(), [](const Cone& a, const Cone& b) { return a.size() < b.size(); });
    return v;
  }

  std::vector<std::string> cone_ids(const Cone& c) const {
    std::vector<std::string> out;
    for (int r : c) out.push_back(id(r));
    return out;
  }

  Rational intersect(const RationalDivisor& d, const InvariantCurve& c) const {
    Rational s = 0;
    for (const auto& [id, coeff] : d.terms()) s += coeff * c.pairing[static_cast<std::size_t>(index_of(id))];
    return s;
  }

  RationalVector wall_pairings(const RationalDivisor& d) const {
    RationalVector v;
    v.reserve(walls_.size());
    for (const auto& w : walls_) v.push_back(intersect(d, w));
    return v;
  }

  friend bool operator==(const ToricVariety& a, const ToricVariety& b) {
    return a.dim_ == b.dim_ && a.rays_ == b.rays_ && a.ids_ == b.ids_ && a.cones_ == b.cones_;
  }

private:
  Matrix cone_matrix(const Cone& c) const {
    // Columns are the rays.
    Matrix m = make_matrix(static_cast<std::size_t>(dim_), c.size());
    for (std::size_t j = 0; j < c.size(); ++j)
      for (std::size_t i = 0; i < static_cast<std::size_t>(dim_); ++i)
        m[i][j] = Rational(static_cast<long>(rays_[static_cast<std::size_t>(c[j])][i]));
    return m;
  }

  std::vector<IntVector> cone_rays(const Cone& c) const {
    std::vector<IntVector> v;
    for (int r : c) v.push_back(rays_[static_cast<std::size_t>(r)]);
    return v;
  }

  void validate();
  void check_overlaps() const;
  void compute_walls();

  int dim_ = 0;
  std::vector<IntVector> rays_;
  std::vector<std::string> ids_;
  std::vector<Cone> cones_;
  std::vector<Matrix> inverses_;
  std::vector<Integer> multiplicities_;
  std::map<std::string, int> id_index_;
  std::map<IntVector, int> vector_index_;
  std::vector<InvariantCurve> walls_;
  bool complete_ = false;
  bool smooth_ = false;
};

inline void ToricVariety::validate() {
  if (dim_ < 0) throw InputError("fan dimension must be nonnegative");
  if (ids_.size() != rays_.size()) throw InputError("ray_ids size does not match rays");
  id_index_.clear();
  vector_index_.clear();
  for (std::size_t i = 0; i < rays_.size(); ++i) {
    const auto& r = rays_[i];
    if (r.size() != static_cast<std::size_t>(dim_))
      throw InputError("ray " + std::to_string(i) + " has wrong dimension");
    if (std::all_of(r.begin(), r.end(), [](auto x) { return x == 0; }))
      throw InputError("ray " + std::to_string(i) + " is zero");
    if (content_of(r) != 1) throw InputError("ray " + std::to_string(i) + " is not primitive");
    if (!vector_index_.emplace(r, static_cast<int>(i)).second)
      throw InputError("ray " + std::to_string(i) + " is repeated");
    if (!id_index_.emplace(ids_[i], static_cast<int>(i)).second)
      throw InputError("duplicate ray id '" + ids_[i] + "'");
  }
  if (cones_.empty()) throw InputError("fan has no maximal cones");
  std::vector<bool> used(rays_.size(), false);
  for (auto& c : cones_) {
    std::sort(c.begin(), c.end());
    if (c.size() != static_cast<std::size_t>(dim_))
      throw InputError("maximal cone is not simplicial of full dimension");
    if (std::adjacent_find(c.begin(), c.end()) != c.end()) throw InputError("maximal cone repeats a ray");
    for (int r : c) {
      if (r < 0 || static_cast<std::size_t>(r) >= rays_.size()) throw InputError("cone references unknown ray");
      used[static_cast<std::size_t>(r)] = true;
    }
  }
  for (std::size_t i = 0; i < used.size(); ++i)
    if (!used[i]) throw InputError("ray '" + ids_[i] + "' lies in no maximal cone");
  std::sort(cones_.begin(), cones_.end());
  if (std::adjacent_find(cones_.begin(), cones_.end()) != cones_.end())
    throw InputError("duplicate maximal cone");

  inverses_.clear();
  multiplicities_.clear();
  smooth_ = true;
  for (const auto& c : cones_) {
    if (dim_ == 0) {
      inverses_.emplace_back();
      multiplicities_.emplace_back(1);
      continue;
    }
    const Matrix m = cone_matrix(c);
    const Rational det = determinant(m);
    if (det == 0) throw InputError("maximal cone is not full dimensional");
    inverses_.push_back(*inverse(m));
    multiplicities_.push_back(abs(det.get_num()));
    if (abs(det) != 1) smooth_ = false;
  }
  compute_walls();
  if (!complete_) check_overlaps();
}

inline void ToricVariety::compute_walls() {
  walls_.clear();
  if (dim_ == 0) {
    complete_ = true;
    return;
  }
  std::map<Cone, std::vector<std::size_t>> faces;
  for (std::size_t k = 0; k < cones_.size(); ++k)
    for (std::size_t skip = 0; skip < cones_[k].size(); ++skip) {
      Cone f;
      for (std::size_t i = 0; i < cones_[k].size(); ++i)
        if (i != skip) f.push_back(cones_[k][i]);
      faces[f].push_back(k);
    }
  bool closed = true;
  for (const auto& [face, owners] : faces) {
    if (owners.size() > 2) throw InputError("a codimension-one cone lies in more than two maximal cones");
    if (owners.size() == 1) {
      closed = false;
      continue;
    }
    const auto opposite = [&](std::size_t k) {
      for (int r : cones_[k])
        if (!std::binary_search(face.begin(), face.end(), r)) return r;
      return -1;
    };
    InvariantCurve w;
    w.face = face;
    w.cone_a = static_cast<int>(owners[0]);
    w.cone_b = static_cast<int>(owners[1]);
    w.ray_a = opposite(owners[0]);
    w.ray_b = opposite(owners[1]);

    // Coordinates of u_b in the basis of cone_a: opposite sides iff the
    // coefficient on u_a is negative.
    const auto coords = cone_coordinates(owners[0], to_rational(rays_[static_cast<std::size_t>(w.ray_b)]));
    const auto pos_a = static_cast<std::size_t>(
        std::find(cones_[owners[0]].begin(), cones_[owners[0]].end(), w.ray_a) - cones_[owners[0]].begin());
    if (coords[pos_a] >= 0)
      throw InputError("maximal cones " + std::to_string(owners[0]) + " and " + std::to_string(owners[1]) +
                       " overlap across their common wall");

    const Integer mult_face = lattice_index(cone_rays(face));
    const Rational xa = ratio(mult_face, multiplicities_[owners[0]]);
    const Rational xb = ratio(mult_face, multiplicities_[owners[1]]);
    // x_a u_a + x_b u_b + sum_face x_i u_i = 0, solved in the basis of cone_a.
    RationalVector pairing(rays_.size(), Rational(0));
    pairing[static_cast<std::size_t>(w.ray_b)] = xb;
    for (std::size_t i = 0; i < cones_[owners[0]].size(); ++i)
      pairing[static_cast<std::size_t>(cones_[owners[0]][i])] = -xb * coords[i];
    if (pairing[static_cast<std::size_t>(w.ray_a)] != xa)
      throw GeometryError("wall relation is inconsistent with cone multiplicities");
    w.pairing = pairing;
    w.relation = primitive_on_ray(pairing);
    walls_.push_back(std::move(w));
  }
  complete_ = false;
  if (closed) {
    // A closed pseudomanifold with consistent sides covers R^n with constant
    // degree; count the cones containing a generic point.
    RationalVector probe(static_cast<std::size_t>(dim_));
    long seed = 1000003;
    for (auto& x : probe) {
      x = ratio(seed % 1999 - 997, 991);
      seed = seed * 7919 % 1000037;
    }
    int count = 0;
    for (std::size_t k = 0; k < cones_.size(); ++k) {
      auto lambda = cone_coordinates(k, probe);
      if (std::all_of(lambda.begin(), lambda.end(), [](const Rational& x) { return x >= 0; })) ++count;
    }
    if (count != 1) throw InputError("fan covers space with degree " + std::to_string(count));
    complete_ = true;
  }
}

inline void ToricVariety::check_overlaps() const {
  // Interiors of distinct maximal cones must be disjoint.
  const std::size_t n = static_cast<std::size_t>(dim_);
  for (std::size_t a = 0; a < cones_.size(); ++a)
    for (std::size_t b = a + 1; b < cones_.size(); ++b) {
      LinearProgram lp(n + 1);  // x, s
      RationalVector obj(n + 1, Rational(0));
      obj[n] = 1;
      lp.set_objective(obj);
      for (const auto* inv : {&inverses_[a], &inverses_[b]})
        for (const auto& row : *inv) {
          RationalVector c(row);
          c.push_back(Rational(-1));
          lp.add(c, Relation::greater_equal, 0);
        }
      RationalVector cap(n + 1, Rational(0));
      cap[n] = 1;
      lp.add(cap, Relation::less_equal, 1);
      auto r = lp.maximize();
      if (r.status == LpStatus::optimal && r.objective > 0)
        throw InputError("maximal cones " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
    }
}

/// K_X = -sum D_rho.
inline RationalDivisor canonical_divisor(const ToricVariety& x) {
  RationalDivisor k;
  for (const auto& id : x.ray_ids()) k.set(id, -1);
  return k;
}

inline Rational intersect(const RationalDivisor& d, const InvariantCurve& c, const ToricVariety& x) {
  return x.intersect(d, c);
}

/// All walls; on a complete fan their curves generate the cone of curves.
inline const std::vector<InvariantCurve>& mori_generators(const ToricVariety& x) {
  if (!x.complete()) throw PreconditionError("mori_generators: fan is not complete");
  return x.walls();
}

/// True when both walls' curve classes are positive multiples of each other.
inline bool same_curve_class(const InvariantCurve& a, const InvariantCurve& b) {
  return a.relation == b.relation;
}

/// Indices of walls spanning extremal rays of the cone of curves, one
/// (the lowest-indexed) per ray.
inline std::vector<std::size_t> extremal_walls(const ToricVariety& x) {
  const auto& walls = mori_generators(x);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < walls.size(); ++i) {
    bool seen = false;
    for (std::size_t j = 0; j < i && !seen; ++j) seen = same_curve_class(walls[i], walls[j]);
    if (seen) continue;
    std::vector<RationalVector> others;
    for (std::size_t j = 0; j < walls.size(); ++j)
      if (!same_curve_class(walls[i], walls[j])) others.push_back(walls[j].pairing);
    if (!in_cone(others, walls[i].pairing)) out.push_back(i);
  }
  return out;
}

inline bool is_nef(const RationalDivisor& d, const ToricVariety& x) {
  for (const auto& w : mori_generators(x))
    if (x.intersect(d, w) < 0) return false;
  return true;
}

/// Convexity of the support function: on every wall the linear functions of
/// the two adjacent cones must bend the right way. Independent of the wall
/// pairing computation.
inline bool support_function_convex(const RationalDivisor& d, const ToricVariety& x) {
  const auto coeff = x.coefficients(d);
  const std::size_t n = static_cast<std::size_t>(x.dim());
  auto cone_function = [&](std::size_t k) {
    // m with <m, u_rho> = -d_rho on the cone.
    Matrix a = make_matrix(n, n);
    RationalVector b(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<std::size_t>(x.max_cones()[k][i]);
      for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational(static_cast<long>(x.rays()[r][j]));
      b[i] = -coeff[r];
    }
    return *solve(a, b);
  };
  for (const auto& w : mori_generators(x)) {
    const auto ma = cone_function(static_cast<std::size_t>(w.cone_a));
    // Convex (nef) iff m_a evaluated on u_b is >= -d_b.
    const auto& ub = x.rays()[static_cast<std::size_t>(w.ray_b)];
    if (dot(ma, ub) < -coeff[static_cast<std::size_t>(w.ray_b)]) return false;
  }
  return true;
}

struct PseudoEffectivity {
  bool pseudoeffective = false;
  RationalDivisor representative;  // effective and numerically equivalent to D
  RationalVector character;        // m with representative = D + div(chi^m)
};

/// Exact LP: D is pseudo-effective iff D + div(chi^m) >= 0 for some m.
inline PseudoEffectivity is_pseudoeffective(const RationalDivisor& d, const ToricVariety& x) {
  if (!x.complete()) throw PreconditionError("is_pseudoeffective: fan is not complete");
  const auto coeff = x.coefficients(d);
  const std::size_t n = static_cast<std::size_t>(x.dim());
  LinearProgram lp(n);
  for (std::size_t r = 0; r < x.ray_count(); ++r) lp.add(to_rational(x.rays()[r]), Relation::greater_equal, -coeff[r]);
  auto res = lp.minimize();
  PseudoEffectivity out;
  if (res.status == LpStatus::infeasible) return out;
  out.pseudoeffective = true;
  out.character = res.x;
  out.representative = d + x.principal(res.x);
  return out;
}

/// Integral round-down of every coefficient.
inline RationalDivisor round_down(const RationalDivisor& d) {
  RationalDivisor out;
  for (const auto& [id, c] : d.terms()) out.set(id, Rational(floor_of(c)));
  return out;
}

/// Lattice points m with <m, u_rho> >= -floor(d_rho) for every ray.
inline std::vector<IntVector> sections(const RationalDivisor& d, const ToricVariety& x) {
  const auto coeff = x.coefficients(round_down(d));
  const std::size_t n = static_cast<std::size_t>(x.dim());
  if (n == 0) return {IntVector{}};
  LinearProgram lp(n);
  for (std::size_t r = 0; r < x.ray_count(); ++r) lp.add(to_rational(x.rays()[r]), Relation::greater_equal, -coeff[r]);
  std::vector<std::int64_t> lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    RationalVector obj(n, Rational(0));
    obj[i] = 1;
    lp.set_objective(obj);
    auto mn = lp.minimize();
    if (mn.status == LpStatus::infeasible) return {};
    auto mx = lp.maximize();
    if (mn.status == LpStatus::unbounded || mx.status == LpStatus::unbounded)
      throw PreconditionError("sections: section polytope is unbounded (fan is not complete)");
    lo[i] = to_int64(ceil_of(mn.objective));
    hi[i] = to_int64(floor_of(mx.objective));
    if (lo[i] > hi[i]) return {};
  }
  std::vector<std::int64_t> bound(x.ray_count());
  for (std::size_t r = 0; r < x.ray_count(); ++r) bound[r] = -to_int64(coeff[r].get_num());
  std::vector<IntVector> points;
  IntVector m(lo);
  while (true) {
    bool ok = true;
    for (std::size_t r = 0; r < x.ray_count() && ok; ++r) {
      std::int64_t s = 0;
      for (std::size_t i = 0; i < n; ++i) s += m[i] * x.rays()[r][i];
      ok = s >= bound[r];
    }
    if (ok) points.push_back(m);
    std::size_t i = 0;
    while (i < n && m[i] == hi[i]) {
      m[i] = lo[i];
      ++i;
    }
    if (i == n) break;
    ++m[i];
  }
  std::sort(points.begin(), points.end());
  return points;
}

/// f^*D for a fan `fine` refining `coarse`: the coefficient at a ray v is
/// the value of D's support function data, sum lambda_i d_i.
inline RationalDivisor pullback(const RationalDivisor& d, const ToricVariety& coarse, const ToricVariety& fine) {
  const auto coeff = coarse.coefficients(d);
  RationalDivisor out;
  for (std::size_t r = 0; r < fine.ray_count(); ++r) {
    const auto loc = coarse.locate(to_rational(fine.rays()[r]));
    if (!loc) throw PreconditionError("pullback: ray '" + fine.id(static_cast<int>(r)) + "' is outside the coarse fan");
    const auto& [k, lambda] = *loc;
    Rational c = 0;
    for (std::size_t i = 0; i < lambda.size(); ++i)
      c += lambda[i] * coeff[static_cast<std::size_t>(coarse.max_cones()[k][i])];
    out.set(fine.id(static_cast<int>(r)), c);
  }
  return out;
}

/// Birational transform from `source` to `target`, matching rays by vector.
/// Divisors of rays missing from the target are dropped.
inline RationalDivisor pushforward(const RationalDivisor& d, const ToricVariety& source, const ToricVariety& target) {
  source.check_divisor(d);
  RationalDivisor out;
  for (const auto& [id, c] : d.terms()) {
    const auto& v = source.rays()[static_cast<std::size_t>(source.index_of(id))];
    if (auto r = target.find_ray(v)) out.set(target.id(*r), c);
  }
  return out;
}

/// Checks that every maximal cone of `fine` lies inside a cone of `coarse`.
inline bool refines(const ToricVariety& fine, const ToricVariety& coarse) {
  if (fine.dim() != coarse.dim()) return false;
  for (const auto& c : fine.max_cones()) {
    RationalVector interior(static_cast<std::size_t>(fine.dim()), Rational(0));
    for (int r : c)
      for (std::size_t i = 0; i < interior.size(); ++i) interior[i] += fine.rays()[static_cast<std::size_t>(r)][i];
    const auto loc = coarse.locate(interior);
    if (!loc) return false;
    for (int r : c) {
      const auto lambda = coarse.cone_coordinates(loc->first, to_rational(fine.rays()[static_cast<std::size_t>(r)]));
      if (std::any_of(lambda.begin(), lambda.end(), [](const Rational& v) { return v < 0; })) return false;
    }
  }
  return true;
}

}  // namespace wzd
