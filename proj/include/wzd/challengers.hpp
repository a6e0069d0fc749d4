#pragma once

// Seeded generation of competing decompositions for the finite Fujita check.

#include "wzd/decomposition.hpp"

#include <random>

namespace wzd {

/// Small positive rational with denominator at most `den`.
inline Rational random_fraction(std::mt19937_64& rng, int num_max, int den) {
  const auto n = static_cast<long>(rng() % static_cast<std::uint64_t>(num_max + 1));
  const auto d = static_cast<long>(1 + rng() % static_cast<std::uint64_t>(den));
  return ratio(n, d);
}

/// Toric challengers P' + N' = f^*D on V and on star subdivisions of V:
/// P' = lambda f^*P + div(chi^m) with m a vertex of {m : P' <= f^*D} for a
/// random objective, kept when P' is nef.
inline std::vector<Challenger<ToricVariety>> generate_challengers(const RationalDivisor& d, const ToricVariety& base,
                                                                  const WeakDecomposition<ToricVariety>& wzd,
                                                                  std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& v = wzd.model;
  const std::size_t n = static_cast<std::size_t>(v.dim());
  std::vector<ToricVariety> models{v};
  // A few star subdivisions at small primitive vectors.
  int counter = 0;
  std::set<std::string> taken(v.ray_ids().begin(), v.ray_ids().end());
  for (int attempt = 0; attempt < 40 && models.size() < 4; ++attempt) {
    IntVector u(n);
    for (auto& c : u) c = static_cast<std::int64_t>(rng() % 5) - 2;
    if (std::all_of(u.begin(), u.end(), [](auto c) { return c == 0; }) || content_of(u) != 1 || v.find_ray(u))
      continue;
    if (!v.locate(to_rational(u))) continue;
    const auto id = fresh_ray_id(taken, "c", counter);
    taken.insert(id);
    models.push_back(star_subdivision(v, u, id));
  }

  std::vector<Challenger<ToricVariety>> out;
  for (std::size_t attempt = 0; out.size() < count && attempt < 40 * count + 40; ++attempt) {
    const auto& w = models[attempt % models.size()];
    const auto target = lift(d, base, w);
    const auto fp = lift(wzd.p, v, w);
    const Rational lambda = attempt % 5 == 0 ? Rational(1) : random_fraction(rng, 8, 8) / 8;
    const auto scaled = lambda * fp;
    LinearProgram lp(n);
    RationalVector obj(n);
    for (auto& c : obj) c = Rational(static_cast<long>(rng() % 7) - 3);
    lp.set_objective(obj);
    const auto tc = w.coefficients(target), sc = w.coefficients(scaled);
    for (std::size_t r = 0; r < w.ray_count(); ++r) lp.add(to_rational(w.rays()[r]), Relation::less_equal, tc[r] - sc[r]);
    // Keep the character in a box so the LP stays bounded.
    for (std::size_t i = 0; i < n; ++i) {
      RationalVector e(n, Rational(0));
      e[i] = 1;
      lp.add(e, Relation::less_equal, 4);
      lp.add(e, Relation::greater_equal, -4);
    }
    const auto res = lp.minimize();
    if (res.status != LpStatus::optimal) continue;
    const auto p = scaled + w.principal(res.x);
    if (!is_nef(p, w)) continue;
    out.push_back({w, p, target - p});
  }
  return out;
}

/// Surface challengers on the same lattice: P' = lambda P - E with E >= 0 on
/// prime curves, kept when P' is nef and N' = D - P' >= 0.
inline std::vector<Challenger<SurfaceModel>> generate_challengers(const RationalDivisor& d, const SurfaceModel& base,
                                                                  const WeakDecomposition<SurfaceModel>& wzd,
                                                                  std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> primes(base.prime_curves().begin(), base.prime_curves().end());
  std::vector<Challenger<SurfaceModel>> out;
  for (std::size_t attempt = 0; out.size() < count && attempt < 200 * count + 200; ++attempt) {
    RationalDivisor p = (attempt % 3 == 0 ? Rational(1) : random_fraction(rng, 8, 8) / 8) * wzd.p;
    for (const auto& c : primes)
      if (rng() % 2) p.add(c, -random_fraction(rng, 2, 8));
    const auto n = d - p;
    if (!n.is_effective()) continue;
    bool nef = true;
    for (const auto& g : base.generators()) nef = nef && base.intersect(p, g.cls) >= 0;
    if (!nef) continue;
    out.push_back({base, p, n});
  }
  return out;
}

}  // namespace wzd
