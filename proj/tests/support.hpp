#pragma once

// Fixture loading, random fixture generators and brute-force oracles shared
// by the unit tests and the acceptance runner. Oracles here avoid calling the
// routine they check.

#include "wzd/cli.hpp"

#include <random>

namespace wzd::test {

inline std::string fixture(const std::string& name) { return std::string(WZD_FIXTURE_DIR) + "/" + name; }
inline std::string golden(const std::string& name) { return std::string(WZD_GOLDEN_DIR) + "/" + name; }

inline ToricVariety fan(const std::string& name) { return io::fan_from(io::read_file(fixture(name)), name); }
inline SurfaceModel surface(const std::string& name) { return io::surface_from(io::read_file(fixture(name)), name); }
inline RationalDivisor div(const std::string& name) { return io::divisor_from(io::read_file(fixture(name)), name); }

inline Rational q(const std::string& s) { return parse_rational(s); }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int code = 0;
  std::string out, err;
};

inline CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// ---------------------------------------------------------------------------
// Fans

/// Smooth complete toric surface from a cyclic list of rays.
inline ToricVariety surface_fan(const std::vector<IntVector>& rays) {
  std::vector<Cone> cones;
  for (int i = 0; i < static_cast<int>(rays.size()); ++i) cones.push_back({i, (i + 1) % static_cast<int>(rays.size())});
  return ToricVariety(2, rays, cones);
}

inline ToricVariety hirzebruch(int a) { return surface_fan({{1, 0}, {0, 1}, {-1, a}, {0, -1}}); }

/// Random complete surface fan: a start fan blown up at random cone sums.
/// Cyclic ray order is kept so surface_fan applies.
inline ToricVariety random_smooth_surface(std::mt19937_64& rng, int blowups) {
  std::vector<std::vector<IntVector>> starts = {{{1, 0}, {0, 1}, {-1, -1}},
                                                {{1, 0}, {0, 1}, {-1, 0}, {0, -1}},
                                                {{1, 0}, {0, 1}, {-1, 1}, {0, -1}},
                                                {{1, 0}, {0, 1}, {-1, 2}, {0, -1}}};
  auto rays = starts[rng() % starts.size()];
  for (int b = 0; b < blowups; ++b) {
    const std::size_t i = rng() % rays.size();
    const auto& u = rays[i];
    const auto& v = rays[(i + 1) % rays.size()];
    rays.insert(rays.begin() + static_cast<long>(i + 1), IntVector{u[0] + v[0], u[1] + v[1]});
  }
  return surface_fan(rays);
}

/// Random complete simplicial surface fan, usually singular: rays sorted by angle.
inline ToricVariety random_simplicial_surface(std::mt19937_64& rng) {
  while (true) {
    std::vector<IntVector> rays;
    const int k = 3 + static_cast<int>(rng() % 3);
    for (int i = 0; i < k; ++i) {
      IntVector v{static_cast<std::int64_t>(rng() % 7) - 3, static_cast<std::int64_t>(rng() % 7) - 3};
      if ((v[0] == 0 && v[1] == 0) || content_of(v) != 1) continue;
      if (std::find(rays.begin(), rays.end(), v) != rays.end()) continue;
      rays.push_back(v);
    }
    if (rays.size() < 3) continue;
    std::sort(rays.begin(), rays.end(), [](const IntVector& a, const IntVector& b) {
      return std::atan2(double(a[1]), double(a[0])) < std::atan2(double(b[1]), double(b[0]));
    });
    bool ok = true;
    for (std::size_t i = 0; i < rays.size(); ++i) {
      const auto& u = rays[i];
      const auto& v = rays[(i + 1) % rays.size()];
      if (u[0] * v[1] - u[1] * v[0] <= 0) ok = false;  // consecutive rays must turn by less than pi
    }
    if (ok) return surface_fan(rays);
  }
}

/// Random effective divisor with small rational coefficients.
inline RationalDivisor random_effective(std::mt19937_64& rng, const std::vector<std::string>& ids, int den = 2,
                                        int max_num = 4) {
  RationalDivisor d;
  for (const auto& id : ids) d.set(id, ratio(static_cast<long>(rng() % (max_num + 1)), den));
  return d;
}

/// Random boundary with coefficients in {0, 1/2, 1}.
inline RationalDivisor random_boundary(std::mt19937_64& rng, const std::vector<std::string>& ids) {
  RationalDivisor b;
  for (const auto& id : ids) b.set(id, ratio(static_cast<long>(rng() % 3), 2));
  return b;
}

// ---------------------------------------------------------------------------
// Oracles

/// Farey fractions of order n in [0, 1].
inline std::vector<Rational> farey(int n) {
  std::set<Rational> s;
  for (int d = 1; d <= n; ++d)
    for (int k = 0; k <= d; ++k) s.insert(ratio(k, d));
  return {s.begin(), s.end()};
}

/// Every rational in [0, hi] with denominator at most n.
inline std::vector<Rational> grid_upto(const Rational& hi, int n) {
  std::set<Rational> s;
  const auto top = ceil_of(hi);
  for (long w = 0; w <= top.get_si(); ++w)
    for (const auto& f : farey(n))
      if (w + f <= hi) s.insert(w + f);
  return {s.begin(), s.end()};
}

/// mu by scanning every breakpoint P.R / (-N.R), capped at 1.
inline Rational brute_mu(const RationalVector& pp, const RationalVector& np) {
  Rational mu = 1;
  for (std::size_t i = 0; i < pp.size(); ++i)
    if (np[i] < 0) mu = std::min<Rational>(mu, pp[i] / -np[i]);
  return mu;
}

/// Exact negative definiteness by Sylvester's criterion on a Gram matrix,
/// evaluated with a fresh cofactor expansion.
inline Rational cofactor_det(const Matrix& a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  if (n == 1) return a[0][0];
  Rational s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    Matrix m;
    for (std::size_t i = 1; i < n; ++i) {
      RationalVector row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      m.push_back(row);
    }
    s += (j % 2 ? -1 : 1) * a[0][j] * cofactor_det(m);
  }
  return s;
}

inline bool negative_definite_oracle(const Matrix& g) {
  for (std::size_t k = 1; k <= g.size(); ++k) {
    Matrix m(k, RationalVector(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) m[i][j] = g[i][j];
    const auto d = cofactor_det(m);
    if ((k % 2 ? -d : d) <= 0) return false;
  }
  return true;
}

/// Pullback coefficient of a torus-invariant divisor at v: solve v as a
/// combination of the rays of a cone containing it and combine coefficients.
inline Rational psi_at(const ToricVariety& x, const RationalDivisor& d, const IntVector& v) {
  const auto coeffs = x.coefficients(d);
  for (const auto& c : x.max_cones()) {
    Matrix a(static_cast<std::size_t>(x.dim()), RationalVector(c.size()));
    for (std::size_t j = 0; j < c.size(); ++j)
      for (std::size_t i = 0; i < a.size(); ++i) a[i][j] = x.rays()[static_cast<std::size_t>(c[j])][i];
    const auto lam = solve(a, to_rational(v));
    if (!lam) continue;
    if (std::any_of(lam->begin(), lam->end(), [](const Rational& t) { return t < 0; })) continue;
    Rational s = 0;
    for (std::size_t j = 0; j < c.size(); ++j) s += (*lam)[j] * coeffs[static_cast<std::size_t>(c[j])];
    return s;
  }
  throw std::logic_error("psi_at: vector outside the fan");
}

/// Log discrepancy by the support function of -(K+B): a(v) = sum lambda_i (1 - b_i).
inline Rational log_discrepancy_oracle(const ToricVariety& x, const RationalDivisor& b, const IntVector& v) {
  RationalDivisor minus;
  for (std::size_t r = 0; r < x.ray_count(); ++r) minus.set(x.ray_ids()[r], 1 - b[x.ray_ids()[r]]);
  return psi_at(x, minus, v);
}

/// Pseudo-effectivity threshold by bisection over LP feasibility; returns a
/// bracket [lo, hi] of width below 2^-iters with K + hi B pseff.
inline std::pair<Rational, Rational> pseff_bisection(const ToricVariety& x, const RationalDivisor& base,
                                                     const RationalDivisor& b, int iters = 24) {
  Rational lo = 0, hi = 1;
  if (is_pseudoeffective(base, x).pseudoeffective) return {0, 0};
  for (int i = 0; i < iters; ++i) {
    const Rational mid = (lo + hi) / 2;
    if (is_pseudoeffective(base + mid * b, x).pseudoeffective)
      hi = mid;
    else
      lo = mid;
  }
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// Random surface lattices for the Zariski suite

struct SurfaceFixture {
  SurfaceModel model;
  RationalDivisor d;
};

/// One positive class H plus k negative curves whose Gram matrix is
/// negative definite; D an effective combination with Farey coefficients.
inline SurfaceFixture random_surface_fixture(std::mt19937_64& rng, int max_curves = 4) {
  while (true) {
    const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_curves));
    std::vector<std::string> classes{"H"};
    for (int i = 1; i <= k; ++i) classes.push_back("C" + std::to_string(i));
    const std::size_t n = classes.size();
    Matrix form(n, RationalVector(n, Rational(0)));
    form[0][0] = 1 + static_cast<long>(rng() % 3);
    for (std::size_t i = 1; i < n; ++i) {
      form[0][i] = form[i][0] = static_cast<long>(rng() % 3);
      form[i][i] = -ratio(2 + static_cast<long>(rng() % 6), 2);
      for (std::size_t j = 1; j < i; ++j) form[i][j] = form[j][i] = ratio(static_cast<long>(rng() % 3), 2);
    }
    Matrix g(n - 1, RationalVector(n - 1));
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 1; j < n; ++j) g[i - 1][j - 1] = form[i][j];
    if (!negative_definite_oracle(g)) continue;
    std::vector<CurveGenerator> gens;
    for (const auto& c : classes) gens.push_back({c, RationalDivisor::prime(c)});
    SurfaceModel m(classes, form, gens, std::set<std::string>(classes.begin(), classes.end()));
    RationalDivisor d;
    static const std::vector<Rational> coeffs{0, ratio(1, 2), 1, ratio(1, 3), ratio(3, 4)};
    for (const auto& c : classes) d.set(c, coeffs[rng() % coeffs.size()]);
    if (d.empty()) continue;
    return {m, d};
  }
}

/// Grid search over splittings D = P' + N' with N' on the Farey grid of
/// order `order`, N' <= D. Integer arithmetic after scaling by the common
/// denominator. Returns the candidates whose P' is nef.
inline std::int64_t scaled(const Rational& v, const Integer& by) {
  const Rational s = v * by;
  if (s.get_den() != 1) throw std::logic_error("scaled: not integral");
  return to_int64(s.get_num());
}

struct GridCandidate {
  RationalDivisor n;
  bool orthogonal = false;  // P'.C = 0 for every component C of N'
};

inline std::vector<GridCandidate> nef_grid_candidates(const SurfaceModel& m, const RationalDivisor& d, int order) {
  const auto& cls = m.classes();
  const std::size_t n = cls.size();
  // Scale: values a / L for the grid, form entries f / F.
  Integer L = 1, F = 1;
  for (int k = 1; k <= order; ++k) L = lcm_of(L, k);
  for (const auto& row : m.form())
    for (const auto& e : row) F = lcm_of(F, e.get_den());
  for (const auto& [id, c] : d.terms()) L = lcm_of(L, c.get_den());
  std::vector<std::vector<std::int64_t>> form(n, std::vector<std::int64_t>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) form[i][j] = scaled(m.form()[i][j], F);
  std::vector<std::vector<std::int64_t>> values(n);
  std::vector<std::int64_t> dv(n);
  for (std::size_t i = 0; i < n; ++i) {
    dv[i] = scaled(d[cls[i]], L);
    for (const auto& v : grid_upto(d[cls[i]], order)) values[i].push_back(scaled(v, L));
  }
  // Generator pairings as integer vectors over the classes.
  std::vector<std::vector<std::int64_t>> gen;
  for (const auto& g : m.generators()) {
    std::vector<std::int64_t> row(n, 0);
    Integer gl = 1;
    for (const auto& [id, c] : g.cls.terms()) gl = lcm_of(gl, c.get_den());
    for (std::size_t i = 0; i < n; ++i) {
      Rational s = 0;
      for (const auto& [id, c] : g.cls.terms()) s += c * gl * m.form()[i][m.index_of(id)] * F;
      row[i] = to_int64(s.get_num());
    }
    gen.push_back(row);
  }
  std::vector<std::int64_t> dpair(gen.size(), 0);
  for (std::size_t r = 0; r < gen.size(); ++r)
    for (std::size_t i = 0; i < n; ++i) dpair[r] += dv[i] * gen[r][i];

  std::vector<GridCandidate> out;
  std::vector<std::int64_t> pick(n), npair(gen.size(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == n) {
      for (std::size_t r = 0; r < gen.size(); ++r)
        if (dpair[r] - npair[r] < 0) return;
      GridCandidate c;
      for (std::size_t k = 0; k < n; ++k)
        if (pick[k] != 0) c.n.set(cls[k], Rational(pick[k]) / Rational(L));
      c.orthogonal = true;
      for (std::size_t k = 0; k < n; ++k) {
        if (pick[k] == 0) continue;
        std::int64_t s = 0;
        for (std::size_t t = 0; t < n; ++t) s += (dv[t] - pick[t]) * form[k][t];
        if (s != 0) c.orthogonal = false;
      }
      out.push_back(std::move(c));
      return;
    }
    for (auto v : values[i]) {
      pick[i] = v;
      for (std::size_t r = 0; r < gen.size(); ++r) npair[r] += v * gen[r][i];
      rec(i + 1);
      for (std::size_t r = 0; r < gen.size(); ++r) npair[r] -= v * gen[r][i];
    }
    pick[i] = 0;
  };
  rec(0);
  return out;
}

}  // namespace wzd::test
