// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>

using namespace wzd;
using wzd::test::fixture;
using wzd::test::q;

namespace {

struct Check {
  int failures = 0;
  std::string first;
  std::vector<std::string> facts;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures++ == 0) first = what;
  }
  void note(std::string s) { facts.push_back(std::move(s)); }
};

std::string str(const RationalDivisor& d) { return to_string(d); }

// ---------------------------------------------------------------------------
// 1. Surface Zariski suite

void surface_zariski(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  int fixtures = 0, grid_total = 0, grid_hits = 0;
  for (int t = 0; t < 220; ++t) {
    const auto fx = test::random_surface_fixture(rng, 4);
    const auto& m = fx.model;
    const auto z = zariski_decompose(fx.d, m);
    const std::string tag = "fixture " + std::to_string(t) + ": ";
    c.expect(z.p + z.n == fx.d, tag + "P + N != D");
    c.expect(z.n.is_effective(), tag + "N not effective");
    for (const auto& g : m.generators()) c.expect(m.intersect(z.p, g.cls) >= 0, tag + "P not nef on " + g.name);
    for (const auto& id : z.n.support())
      c.expect(m.intersect(z.p, RationalDivisor::prime(id)) == 0, tag + "P.C != 0 on " + id);
    if (!z.n.empty()) {
      const auto sup = z.n.support();
      const std::vector<std::string> s(sup.begin(), sup.end());
      c.expect(test::negative_definite_oracle(gram_matrix(s, m)), tag + "support not negative definite");
    }
    // Grid search at denominator <= 8.
    for (const auto& g : test::nef_grid_candidates(m, fx.d, 8)) {
      ++grid_total;
      c.expect(leq(z.n, g.n), tag + "grid challenger N' = " + str(g.n) + " below N = " + str(z.n));
      if (!g.orthogonal) continue;
      const auto sup = g.n.support();
      const std::vector<std::string> s(sup.begin(), sup.end());
      if (s.empty() || test::negative_definite_oracle(gram_matrix(s, m))) {
        c.expect(g.n == z.n, tag + "second Zariski splitting N' = " + str(g.n));
        if (g.n == z.n) ++grid_hits;
      }
    }
    ++fixtures;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(fixtures >= 200, "fewer than 200 fixtures");
  c.expect(grid_hits > 0, "the grid never reproduced the decomposition");
  c.expect(secs < 60, "runtime " + std::to_string(secs) + " s");
  c.note(std::to_string(fixtures) + " fixtures, " + std::to_string(grid_total) + " grid challengers, " +
         std::to_string(static_cast<int>(secs * 1000)) + " ms");
}

// ---------------------------------------------------------------------------
// 2. Nef threshold suite

void check_threshold(Check& c, const RationalVector& pp, const RationalVector& np, const std::string& tag) {
  const auto r = nef_threshold(pp, np);
  c.expect(r.mu == test::brute_mu(pp, np), tag + "mu differs from the scan");
  for (std::size_t i = 0; i < pp.size(); ++i) c.expect(pp[i] + r.mu * np[i] >= 0, tag + "P + mu N not nef");
  if (r.mu == 1) return;
  if (!r.ray) {
    c.expect(false, tag + "no ray for mu < 1");
    return;
  }
  c.expect(np[*r.ray] < 0, tag + "N.R >= 0");
  c.expect(pp[*r.ray] + r.mu * np[*r.ray] == 0, tag + "(P + mu N).R != 0");
  std::set<Rational> bps{1};
  for (std::size_t i = 0; i < pp.size(); ++i)
    if (np[i] < 0) bps.insert(pp[i] / -np[i]);
  Rational gap = 1;
  for (auto it = bps.begin(); std::next(it) != bps.end(); ++it) gap = std::min<Rational>(gap, *std::next(it) - *it);
  bool refuted = false;
  for (std::size_t i = 0; i < pp.size(); ++i) refuted = refuted || pp[i] + (r.mu + gap / 2) * np[i] < 0;
  c.expect(refuted, tag + "P + (mu + eps) N still nef");
}

void nef_thresholds(Check& c) {
  std::mt19937_64 rng(7);
  int n = 0;
  for (int t = 0; t < 1000; ++t, ++n) {
    const std::size_t k = 1 + rng() % 8;
    RationalVector pp(k), np(k);
    for (std::size_t i = 0; i < k; ++i) {
      pp[i] = ratio(static_cast<long>(rng() % 7), 1 + rng() % 5);
      np[i] = ratio(static_cast<long>(rng() % 11) - 6, 1 + rng() % 4);
    }
    check_threshold(c, pp, np, "vector " + std::to_string(t) + ": ");
  }
  for (int t = 0; t < 200; ++t, ++n) {
    const auto fx = test::random_surface_fixture(rng, 4);
    const auto z = zariski_decompose(fx.d, fx.model);
    const auto extra = test::random_effective(rng, fx.model.classes(), 3, 3);
    const std::string tag = "surface " + std::to_string(t) + ": ";
    check_threshold(c, nef_pairings(fx.model, z.p), nef_pairings(fx.model, z.n + extra), tag);
    const auto direct = nef_threshold(z.p, z.n + extra, fx.model);
    c.expect(direct.mu == nef_threshold(nef_pairings(fx.model, z.p), nef_pairings(fx.model, z.n + extra)).mu, tag);
  }
  for (int t = 0; t < 100; ++t, ++n) {
    const auto x = test::random_smooth_surface(rng, static_cast<int>(rng() % 4));
    const auto p = default_scaling_divisor(x, {});
    const auto nd = test::random_effective(rng, x.ray_ids(), 2, 3);
    check_threshold(c, nef_pairings(x, p), nef_pairings(x, nd), "toric " + std::to_string(t) + ": ");
  }
  c.note(std::to_string(n) + " fixtures");
}

// ---------------------------------------------------------------------------
// 3. Toric goldens

struct GoldenRun {
  std::string file;
  std::vector<std::string> args;
};

std::vector<GoldenRun> golden_runs() {
  return {
      {"f1_scaling.json",
       {"scaling-mmp", "--fan", fixture("f1.json"), "--boundary", fixture("zero.json"), "--h", fixture("f1_h.json")}},
      {"p1p1_scaling.json",
       {"scaling-mmp", "--fan", fixture("p1p1.json"), "--boundary", fixture("zero.json"), "--h",
        fixture("p1p1_h.json")}},
      {"f1_saturated_scaling.json",
       {"scaling-mmp", "--fan", fixture("f1.json"), "--boundary", fixture("f1_sum.json"), "--h",
        fixture("f1_h.json")}},
      {"p2_saturated_scaling.json",
       {"scaling-mmp", "--fan", fixture("p2.json"), "--boundary", fixture("p2_sum.json"), "--h",
        fixture("p2_sum.json")}},
      {"p1p1_saturated_mmp.json", {"mmp", "--fan", fixture("p1p1.json"), "--boundary", fixture("p1p1_sum.json")}},
  };
}

void toric_goldens(Check& c) {
  for (const auto& g : golden_runs()) {
    const auto r = test::cli(g.args);
    c.expect(r.code == 0, g.file + ": exit " + std::to_string(r.code));
    c.expect(r.out == test::slurp(test::golden(g.file)), g.file + ": bytes differ from the golden");
  }
  // The expected shapes, recomputed from the library.
  const auto f1 = test::fan("f1.json");
  const auto t = run_mmp_with_scaling(make_kb_pair(f1, {}), test::div("f1_h.json"));
  c.expect(t.steps.size() == 2, "F1: step count");
  if (t.steps.size() == 2) {
    c.expect(t.steps[0].kind == StepKind::divisorial && t.steps[0].contracted == "1", "F1: first step");
    c.expect(f1.rays()[1] == IntVector{0, 1}, "F1: contracted ray is not (0,1)");
    c.expect(t.final_state.model.ray_count() == 3 && t.final_state.model.smooth(), "F1: target is not P2");
    c.expect(t.steps[1].kind == StepKind::fibration && t.fibration_base && t.fibration_base->dim() == 0,
             "F1: second step is not a fibration to a point");
  }
  const auto p = run_mmp_with_scaling(make_kb_pair(test::fan("p1p1.json"), {}), test::div("p1p1_h.json"));
  c.expect(p.steps.size() == 1 && p.steps[0].kind == StepKind::fibration, "P1xP1: one fibration");
  for (const std::string name : {"p2", "p1p1", "f1"}) {
    const auto pair = make_kb_pair(test::fan(name + ".json"), test::div(name + "_sum.json"));
    c.expect(run_wzd_mmp(pair, make_decomposition(pair.model, {}, {})).steps.empty(), name + ": saturated run moved");
  }
  c.note(std::to_string(golden_runs().size()) + " goldens");
}

// ---------------------------------------------------------------------------
// 4. Pipeline closure

template <class Model>
void check_pipeline(Check& c, const Pair<Model>& pair, const std::string& tag, int& closed, int& descents) {
  const auto w = trivial_decomposition(pair);
  if (!w) return;
  PipelineOptions opt;
  opt.challengers = 50;
  opt.m_max = 12;
  opt.seed = 17;
  const auto r = run_pipeline(pair, *w, opt);
  int prev = theta(pair.boundary, w->n);
  for (const auto& d : r.descent) {
    c.expect(d.theta_before == prev && d.theta_after < d.theta_before, tag + "theta did not drop");
    prev = d.theta_after;
    ++descents;
  }
  c.expect(prev == 0, tag + "descent stopped at theta > 0");
  if (r.trace.outcome == Outcome::minimal_model) {
    ++closed;
    for (const std::string k : {"lmm", "weak", "fujita"}) {
      const auto it = r.reports.find(k);
      c.expect(it != r.reports.end() && it->second.valid,
               tag + k + (it != r.reports.end() && !it->second.witnesses.empty() ? ": " + it->second.witnesses[0] : ""));
    }
    const auto& f = r.reports.at("fujita");
    c.expect(f.challengers && *f.challengers >= 50,
             tag + "only " + std::to_string(f.challengers.value_or(0)) + " challengers accepted");
    if constexpr (std::is_same_v<Model, ToricVariety>) {
      c.expect(r.reports.count("ckm") && r.reports.at("ckm").valid && r.reports.at("ckm").m_max == 12, tag + "ckm");
    }
  } else if (r.trace.outcome == Outcome::mori_fibre_space) {
    if constexpr (std::is_same_v<Model, ToricVariety>) c.expect(r.reports.at("mfs").valid, tag + "mfs");
  } else {
    c.expect(false, tag + "outcome " + to_string(r.trace.outcome));
  }
}

void pipeline_closure(Check& c) {
  std::mt19937_64 rng(55);
  int closed = 0, descents = 0, theta_pos = 0;
  for (int t = 0; t < 40; ++t) {
    const auto x = t % 4 == 3 ? test::random_simplicial_surface(rng)
                              : test::random_smooth_surface(rng, static_cast<int>(rng() % 4));
    const auto ids = x.ray_ids();
    const auto pair = make_divisor_pair(x, test::random_effective(rng, ids, 2, 3), test::random_boundary(rng, ids));
    if (auto w = trivial_decomposition(pair); w && theta(pair.boundary, w->n) > 0) ++theta_pos;
    check_pipeline(c, pair, "toric " + std::to_string(t) + ": ", closed, descents);
  }
  const auto flip3 = test::fan("flip3.json");
  for (int t = 0; t < 8; ++t) {
    const auto pair = make_divisor_pair(flip3, test::random_effective(rng, flip3.ray_ids(), 2, 3), {});
    check_pipeline(c, pair, "flip3 " + std::to_string(t) + ": ", closed, descents);
  }
  for (const std::string name : {"p2", "p1p1", "f1"}) {
    check_pipeline(c, make_kb_pair(test::fan(name + ".json"), test::div(name + "_sum.json")), name + " kb: ", closed,
                   descents);
  }
  for (int t = 0; t < 20; ++t) {
    const auto fx = test::random_surface_fixture(rng, 3);
    const auto pair = make_divisor_pair(fx.model, fx.d, test::random_boundary(rng, fx.model.classes()));
    check_pipeline(c, pair, "lattice " + std::to_string(t) + ": ", closed, descents);
  }
  check_pipeline(c, make_kb_pair(test::surface("acc.json"), {}), "acc kb: ", closed, descents);
  c.expect(closed >= 50, "only " + std::to_string(closed) + " runs ended in a minimal model");
  c.expect(theta_pos >= 10, "too few theta > 0 fixtures");
  c.note(std::to_string(closed) + " minimal models, " + std::to_string(descents) + " descent steps");
}

// ---------------------------------------------------------------------------
// 5. Discrepancy suite

std::optional<std::size_t> wall_with_face(const ToricVariety& x, const std::vector<std::string>& face) {
  for (std::size_t i = 0; i < x.walls().size(); ++i)
    if (x.cone_ids(x.walls()[i].face) == face) return i;
  return std::nullopt;
}

void adjunction(Check& c, const ToricVariety& x, const std::string& tag) {
  const auto k = canonical_divisor(x);
  for (std::size_t i = 0; i < x.ray_count(); ++i) {
    const auto id = x.id(static_cast<int>(i));
    const auto w = wall_with_face(x, {id});
    if (!w) {
      c.expect(false, tag + "no invariant curve for " + id);
      continue;
    }
    const auto& curve = x.walls()[*w];
    c.expect(x.intersect(k, curve) + x.intersect(RationalDivisor::prime(id), curve) == -2, tag + "adjunction on " + id);
  }
}

void discrepancies(Check& c) {
  const auto a2 = test::fan("a2.json");
  c.expect(log_discrepancy({1, 1}, a2, canonical_divisor(a2)) == 2, "a(E) over A2 is not 2");
  c.expect(test::log_discrepancy_oracle(a2, {}, {1, 1}) == 2, "oracle a(E) over A2 is not 2");

  std::mt19937_64 rng(88);
  int subdivisions = 0, surfaces = 0;
  for (int t = 0; t < 30; ++t) {
    const auto x = test::random_simplicial_surface(rng);
    const auto b = test::random_boundary(rng, x.ray_ids());
    const auto pair = make_kb_pair(x, b);
    const auto l = log_smooth_model(pair);
    const auto& w = l.model;
    const std::string tag = "subdivision " + std::to_string(t) + ": ";
    c.expect(w.smooth() && refines(w, x), tag + "not a smooth refinement");
    RationalDivisor pulled, f_oracle, bw;
    for (std::size_t r = 0; r < w.ray_count(); ++r) {
      const auto id = w.id(static_cast<int>(r));
      const auto& v = w.rays()[r];
      pulled.set(id, test::psi_at(x, pair.target(), v));
      if (const auto xr = x.find_ray(v)) {
        bw.set(id, b[x.id(*xr)]);
      } else {
        bw.set(id, 1);
        f_oracle.set(id, test::log_discrepancy_oracle(x, b, v));
      }
    }
    c.expect(l.f == f_oracle, tag + "F = " + str(l.f) + ", oracle " + str(f_oracle));
    c.expect(l.boundary.divisor() == bw, tag + "B_W differs");
    const auto lhs = canonical_divisor(w) + bw;
    const auto rhs = pulled + f_oracle;
    for (const auto& curve : w.walls()) c.expect(w.intersect(lhs, curve) == w.intersect(rhs, curve), tag + "pairing");
    adjunction(c, w, tag);
    ++subdivisions;
    ++surfaces;
  }
  for (const std::string name : {"f1.json", "p2.json", "p1p1.json"}) {
    adjunction(c, test::fan(name), name + ": ");
    ++surfaces;
  }
  for (int t = 0; t < 30; ++t) {
    adjunction(c, test::random_smooth_surface(rng, static_cast<int>(rng() % 5)), "smooth " + std::to_string(t) + ": ");
    ++surfaces;
  }
  c.expect(subdivisions >= 20, "fewer than 20 subdivisions");
  c.note(std::to_string(subdivisions) + " subdivisions, " + std::to_string(surfaces) + " smooth surfaces");
}

// ---------------------------------------------------------------------------
// 6. Boundary monotonicity and pseff thresholds

void monotone(Check& c) {
  std::mt19937_64 rng(606);
  int checked = 0, bisected = 0;
  for (int t = 0; t < 200 && checked < 60; ++t) {
    const auto x = t % 5 == 4 ? test::fan("flip3.json") : test::random_smooth_surface(rng, static_cast<int>(rng() % 3));
    const auto ids = x.ray_ids();
    const auto l = test::random_effective(rng, ids, 2, 3);
    const auto pair = make_divisor_pair(x, l, test::random_boundary(rng, ids));
    const auto w = trivial_decomposition(pair);
    if (!w) continue;
    PipelineOptions opt;
    opt.challengers = 0;
    const auto r = run_pipeline(pair, *w, opt);
    if (r.trace.outcome != Outcome::minimal_model) continue;
    RationalDivisor b = r.pair.boundary.divisor();
    for (const auto& id : ids)
      if (rng() % 2) b.set(id, std::min<Rational>(1, b[id] + ratio(1 + static_cast<long>(rng() % 2), 2)));
    const auto mw = monotone_boundary_wzd(final_pair(r.trace), r.pair, Boundary(b));
    const std::string tag = "fixture " + std::to_string(t) + ": ";
    const auto rep = validate_weak(l + b, x, mw);
    c.expect(rep.valid, tag + (rep.witnesses.empty() ? "" : rep.witnesses[0]));
    c.expect(leq(r.fujita->n, mw.n), tag + "N shrank");
    ++checked;
  }
  c.expect(checked >= 50, "only " + std::to_string(checked) + " (B', B) fixtures");

  for (const std::string name : {"p2", "p1p1"}) {
    const auto x = test::fan(name + ".json");
    c.expect(pseff_threshold(Boundary(test::div(name + "_sum.json")), x) == 1, name + ": lambda != 1");
  }
  for (int t = 0; t < 60; ++t) {
    const auto x = test::random_smooth_surface(rng, static_cast<int>(rng() % 3));
    const auto ids = x.ray_ids();
    const auto base = canonical_divisor(x) + test::random_effective(rng, ids, 2, 2);
    const auto b = test::random_boundary(rng, ids);
    if (!is_pseudoeffective(base + b, x).pseudoeffective) continue;
    const auto lam = pseff_threshold(Boundary(b), x, base);
    const auto [lo, hi] = test::pseff_bisection(x, base, b, 24);
    c.expect(lo <= lam && lam <= hi, "threshold " + to_string(lam) + " outside [" + to_string(lo) + ", " +
                                         to_string(hi) + "]");
    ++bisected;
  }
  c.expect(bisected >= 20, "too few bisection comparisons");
  c.note(std::to_string(checked) + " (B', B) fixtures, " + std::to_string(bisected) + " bisections");
}

// ---------------------------------------------------------------------------
// 7. Determinism

std::vector<std::vector<std::string>> corpus_commands() {
  using V = std::vector<std::string>;
  std::vector<V> cmds;
  for (const auto& g : golden_runs()) cmds.push_back(g.args);
  const std::string f1 = fixture("f1.json"), acc = fixture("acc.json");
  cmds.push_back(V{"zariski-surface", "--model", fixture("f2.json"), "--divisor", fixture("s_plus_f.json")});
  cmds.push_back(V{"validate", "--kind", "fujita", "--fan", f1, "--divisor", fixture("f1_l.json"), "--p",
                   fixture("f1_p.json"), "--n", fixture("f1_n.json"), "--seed", "4"});
  cmds.push_back(V{"validate", "--kind", "ckm", "--fan", fixture("p2.json"), "--divisor", fixture("p2_sum.json"),
                   "--p", fixture("p2_sum.json")});
  cmds.push_back(V{"validate", "--kind", "weak", "--model", acc, "--divisor", fixture("acc_l.json"), "--p",
                   fixture("acc_p.json"), "--n", fixture("acc_n.json")});
  cmds.push_back(V{"nef-threshold", "--model", acc, "--p", fixture("acc_p.json"), "--n", fixture("acc_n.json")});
  cmds.push_back(V{"mmp", "--fan", f1, "--boundary", fixture("zero.json"), "--mode", "kb"});
  cmds.push_back(V{"mmp", "--model", acc, "--mode", "divisor", "--divisor", fixture("acc_l.json"), "--p",
                   fixture("acc_p.json"), "--n", fixture("acc_n.json")});
  cmds.push_back(V{"mmp", "--fan", fixture("flip3.json"), "--mode", "divisor", "--divisor", fixture("zero.json")});
  cmds.push_back(V{"sections", "--fan", fixture("p2.json"), "--divisor", fixture("p2_sum.json"), "--multiple", "3"});
  cmds.push_back(V{"sbl", "--fan", f1, "--divisor", fixture("f1_l.json")});
  cmds.push_back(V{"discrepancy", "--fan", fixture("quadric_cone.json"), "--vector", "1,1", "--log-smooth"});
  cmds.push_back(V{"theta", "--boundary", fixture("f1_e.json"), "--n", fixture("f1_l.json")});
  cmds.push_back(V{"alpha-split", "--n", fixture("f1_l.json"), "--format", "text"});
  cmds.push_back(V{"pipeline", "--fan", f1, "--mode", "divisor", "--divisor", fixture("f1_l.json")});
  cmds.push_back(V{"pipeline", "--model", acc});
  cmds.push_back(V{"pipeline", "--fan", fixture("flip3.json")});
  return cmds;
}

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

void determinism(Check& c) {
  const auto cmds = corpus_commands();
  const auto tmp = (std::filesystem::temp_directory_path() / "wzd_acceptance_out.json").string();
  std::set<std::string> verbs;
  for (const auto& args : cmds) {
    verbs.insert(args[0]);
    const auto first = test::cli(args);
    for (int i = 0; i < 2; ++i) {
      const auto again = test::cli(args);
      c.expect(again.out == first.out && again.code == first.code, args[0] + ": in-process rerun differs");
    }
    std::string cmd = shell_quote(WZD_CLI_PATH);
    for (const auto& a : args) cmd += " " + shell_quote(a);
    cmd += " > " + shell_quote(tmp) + " 2> /dev/null";
    const int status = std::system(cmd.c_str());
    c.expect(WEXITSTATUS(status) == first.code, args[0] + ": subprocess exit code differs");
    c.expect(test::slurp(tmp) == first.out, args[0] + ": subprocess output differs");
  }
  std::filesystem::remove(tmp);
  c.expect(verbs.size() == 11, "corpus covers " + std::to_string(verbs.size()) + " verbs");
  c.note(std::to_string(cmds.size()) + " commands x 3 runs + subprocess");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"1 surface zariski suite", surface_zariski},
      {"2 nef threshold suite", nef_thresholds},
      {"3 toric golden runs", toric_goldens},
      {"4 pipeline closure", pipeline_closure},
      {"5 discrepancy suite", discrepancies},
      {"6 boundary monotonicity and pseff threshold", monotone},
      {"7 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::string detail;
    for (const auto& f : c.facts) detail += (detail.empty() ? "" : "; ") + f;
    if (c.failures == 0) {
      std::cout << "PASS " << name << (detail.empty() ? "" : " (" + detail + ")") << "\n";
    } else {
      ++failed;
      std::cout << "FAIL " << name << ": " << c.failures << " failed checks, first: " << c.first << "\n";
    }
  }
  return failed == 0 ? 0 : 1;
}
