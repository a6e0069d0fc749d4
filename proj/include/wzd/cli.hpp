#pragma once

// Command-line front end. `run` is the whole program minus process setup so
// tests can drive it in-process.

#include "wzd/json_io.hpp"
#include "wzd/pipeline.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

namespace wzd::cli {

using io::json;

struct Options {
  std::string verb;
  std::string fan, model, divisor, boundary, p, n, h, wzd_fan, challengers, kind;
  std::string mode = "kb";
  std::string output, format = "json", log;
  std::vector<std::string> vectors;
  std::int64_t m_max = 0;
  std::int64_t multiple = 1;
  int step_limit = 1000;
  int flip_limit = 64;
  std::size_t generate = 50;
  std::uint64_t seed = 0;
  bool log_smooth = false;
};

namespace detail {

inline void flatten(const json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    if (j.empty()) os << prefix << " = {}\n";
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os);
  } else if (j.is_array()) {
    if (j.empty()) os << prefix << " = []\n";
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", os);
  } else {
    os << prefix << " = " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

class Session {
public:
  Session(const Options& o, std::ostream& out) : o_(o), out_(out), start_(std::chrono::steady_clock::now()) {
    if (!o.log.empty()) {
      log_.open(o.log);
      if (!log_) throw InputError(o.log + ": cannot open log file");
    }
  }

  void phase(const std::string& name) {
    if (!log_) return;
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_);
    log_ << o_.verb << " " << name << " " << ms.count() << "ms\n";
  }

  void emit(const json& j) {
    std::string text;
    if (o_.format == "text") {
      std::ostringstream os;
      flatten(j, "", os);
      text = os.str();
    } else {
      text = io::dump(j);
    }
    if (o_.output.empty()) {
      out_ << text;
    } else {
      std::ofstream f(o_.output, std::ios::binary);
      if (!f) throw InputError(o_.output + ": cannot open output file");
      f << text;
    }
    phase("emit");
  }

private:
  const Options& o_;
  std::ostream& out_;
  std::ofstream log_;
  std::chrono::steady_clock::time_point start_;
};

inline RationalDivisor load_divisor(const std::string& path, bool required, const std::string& flag) {
  if (path.empty()) {
    if (required) throw InputError("missing required option " + flag);
    return {};
  }
  return io::divisor_from(io::read_file(path), path);
}

inline ToricVariety load_fan(const std::string& path) {
  if (path.empty()) throw InputError("missing required option --fan");
  return io::fan_from(io::read_file(path), path);
}

inline SurfaceModel load_surface(const std::string& path) {
  if (path.empty()) throw InputError("missing required option --model");
  return io::surface_from(io::read_file(path), path);
}

inline bool toric_selected(const Options& o) {
  if (!o.fan.empty() && !o.model.empty()) throw InputError("give exactly one of --fan and --model");
  if (o.fan.empty() && o.model.empty()) throw InputError("missing model: give --fan or --model");
  return !o.fan.empty();
}

template <class Model>
Model load_model(const Options& o) {
  if constexpr (std::is_same_v<Model, ToricVariety>)
    return load_fan(o.fan);
  else
    return load_surface(o.model);
}

template <class Model>
Pair<Model> load_pair(const Options& o, const Model& m) {
  const auto b = load_divisor(o.boundary, false, "--boundary");
  if (o.mode == "kb") return make_kb_pair(m, b);
  return make_divisor_pair(m, load_divisor(o.divisor, true, "--divisor"), b);
}

/// A weak decomposition of the pair's target: given on the command line, or
/// the trivial one from an effective representative (toric), or the surface
/// Zariski decomposition.
template <class Model>
std::optional<WeakDecomposition<Model>> initial_decomposition(const Options& o, const Pair<Model>& pair) {
  if (!o.p.empty() || !o.n.empty())
    return make_decomposition(pair.model, load_divisor(o.p, true, "--p"), load_divisor(o.n, true, "--n"));
  return trivial_decomposition(pair);
}

inline MmpOptions mmp_options(const Options& o) {
  if (o.step_limit < 0) throw InputError("--step-limit must be nonnegative");
  if (o.flip_limit < 0) throw InputError("--flip-limit must be nonnegative");
  return {o.step_limit, o.flip_limit};
}

// ---------------------------------------------------------------------------
// Verbs

inline int zariski_surface(const Options& o, Session& s) {
  const auto m = load_surface(o.model);
  const auto d = load_divisor(o.divisor, true, "--divisor");
  s.phase("load");
  try {
    s.emit(io::to_json(zariski_decompose(d, m)));
    return 0;
  } catch (const GeometryError& e) {
    s.emit({{"valid", false}, {"reason", e.what()}});
    return 1;
  }
}

template <class Model>
ValidationReport surface_or_toric_validate(const Options& o, const Model& base) {
  const auto d = load_divisor(o.divisor, true, "--divisor");
  const auto p = load_divisor(o.p, true, "--p");
  const auto n = load_divisor(o.n, true, "--n");
  Model w = base;
  if constexpr (std::is_same_v<Model, ToricVariety>)
    if (!o.wzd_fan.empty()) w = load_fan(o.wzd_fan);
  const auto wzd = make_decomposition(w, p, n);
  if (o.kind == "weak") return validate_weak(d, base, wzd);

  std::vector<Challenger<Model>> ch;
  if (!o.challengers.empty()) {
    const auto j = io::read_file(o.challengers);
    if (!j.is_array()) throw InputError(o.challengers + ": expected an array of challengers");
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string path = o.challengers + "/" + std::to_string(i);
      Model cm = w;
      if constexpr (std::is_same_v<Model, ToricVariety>) {
        if (j[i].contains("fan")) cm = io::fan_from(j[i]["fan"], path + "/fan");
      } else {
        if (j[i].contains("model")) cm = io::surface_from(j[i]["model"], path + "/model");
      }
      ch.push_back({cm, io::divisor_from(io::field(j[i], "P", path), path + "/P"),
                    io::divisor_from(io::field(j[i], "N", path), path + "/N")});
    }
  }
  const auto generated = generate_challengers(d, base, wzd, o.generate, o.seed);
  ch.insert(ch.end(), generated.begin(), generated.end());
  return validate_fujita(d, base, wzd, ch);
}

inline int validate(const Options& o, Session& s) {
  ValidationReport r;
  if (o.kind == "ckm") {
    const auto x = load_fan(o.fan);
    const auto d = load_divisor(o.divisor, true, "--divisor");
    const auto p = load_divisor(o.p, true, "--p");
    s.phase("load");
    r = validate_ckm(d, p, x, o.m_max > 0 ? o.m_max : 12);
  } else if (o.kind == "surface_zariski") {
    const auto m = load_surface(o.model);
    const auto d = load_divisor(o.divisor, true, "--divisor");
    const auto p = load_divisor(o.p, true, "--p");
    const auto n = load_divisor(o.n, true, "--n");
    s.phase("load");
    r.kind = "surface_zariski";
    try {
      const auto z = zariski_decompose(d, m);
      if (!(z.p == p)) r.fail("P differs from the Zariski positive part " + to_string(z.p));
      if (!(z.n == n)) r.fail("N differs from the Zariski negative part " + to_string(z.n));
    } catch (const GeometryError& e) {
      r.fail(e.what());
    }
  } else if (o.kind == "weak" || o.kind == "fujita") {
    if (toric_selected(o))
      r = surface_or_toric_validate(o, load_fan(o.fan));
    else
      r = surface_or_toric_validate(o, load_surface(o.model));
  } else {
    throw InputError("--kind must be one of weak, fujita, ckm, surface_zariski");
  }
  s.emit(io::to_json(r));
  return r.valid ? 0 : 1;
}

template <class Model>
int nef_threshold_verb(const Options& o, Session& s) {
  using T = ModelTraits<Model>;
  const auto m = load_model<Model>(o);
  const auto p = load_divisor(o.p, true, "--p");
  const auto n = load_divisor(o.n, true, "--n");
  T::check(m, p);
  T::check(m, n);
  const auto th = nef_threshold(p, n, m);
  json ray = nullptr;
  if (th.ray) ray = io::to_json(T::describe(m, T::nef_curves(m)[*th.ray]));
  s.emit({{"mu", to_string(th.mu)},
          {"ray", ray},
          {"p_pairings", io::to_json(nef_pairings(m, p))},
          {"n_pairings", io::to_json(nef_pairings(m, n))}});
  return 0;
}

template <class Model>
int mmp_verb(const Options& o, Session& s, bool scaling) {
  const auto m = load_model<Model>(o);
  const auto pair = load_pair(o, m);
  const auto opt = mmp_options(o);
  s.phase("load");
  if (!scaling) {
    if (auto wzd = initial_decomposition(o, pair)) {
      const auto trace = run_wzd_mmp(pair, *wzd, opt);
      s.phase("run");
      s.emit(io::to_json(trace));
      return 0;
    }
  }
  RationalDivisor h;
  if (!o.h.empty()) {
    h = load_divisor(o.h, true, "--h");
  } else if constexpr (std::is_same_v<Model, ToricVariety>) {
    h = default_scaling_divisor(pair.model, pair.target());
  } else {
    throw InputError("missing required option --h");
  }
  auto trace = run_mmp_with_scaling(pair, h, opt);
  s.phase("run");
  s.emit(io::to_json(trace));
  return 0;
}

inline int sections_verb(const Options& o, Session& s) {
  const auto x = load_fan(o.fan);
  const auto d = load_divisor(o.divisor, true, "--divisor");
  if (o.multiple < 1) throw InputError("--multiple must be positive");
  const auto pts = sections(Rational(static_cast<long>(o.multiple)) * d, x);
  json jp = json::array();
  for (const auto& p : pts) jp.push_back(p);
  s.emit({{"multiple", o.multiple}, {"count", pts.size()}, {"points", jp}});
  return 0;
}

inline int sbl_verb(const Options& o, Session& s) {
  const auto x = load_fan(o.fan);
  const auto d = load_divisor(o.divisor, true, "--divisor");
  const auto r = stable_base_locus(d, x, o.m_max > 0 ? o.m_max : 24);
  s.emit(io::to_json(r, x));
  return 0;
}

inline IntVector parse_vector(const std::string& text) {
  IntVector v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto q = parse_rational(item);
    if (q.get_den() != 1) throw InputError("--vector entries must be integers: '" + text + "'");
    v.push_back(to_int64(q.get_num()));
  }
  if (v.empty()) throw InputError("empty --vector");
  return v;
}

inline int discrepancy_verb(const Options& o, Session& s) {
  const auto x = load_fan(o.fan);
  const auto pair = load_pair(o, x);
  json list = json::array();
  for (const auto& text : o.vectors) {
    const auto v = parse_vector(text);
    list.push_back({{"vector", v}, {"a", to_string(log_discrepancy(v, x, pair.target()))}});
  }
  json out = {{"discrepancies", list}};
  if (o.log_smooth) out["log_smooth_model"] = io::to_json(log_smooth_model(pair));
  s.emit(out);
  return 0;
}

inline int theta_verb(const Options& o, Session& s) {
  const Boundary b(load_divisor(o.boundary, false, "--boundary"));
  const auto n = load_divisor(o.n, true, "--n");
  s.emit({{"theta", theta(b, n)}});
  return 0;
}

inline int alpha_split_verb(const Options& o, Session& s) {
  const Boundary b(load_divisor(o.boundary, false, "--boundary"));
  const auto n = load_divisor(o.n, true, "--n");
  const auto a = alpha_split(b, n);
  s.emit({{"alpha", to_string(a.alpha)}, {"C", io::to_json(a.c)}, {"A", io::to_json(a.a)}});
  return 0;
}

template <class Model>
int pipeline_verb(const Options& o, Session& s) {
  const auto m = load_model<Model>(o);
  auto pair = load_pair(o, m);
  auto wzd = initial_decomposition(o, pair);
  if (!wzd) {
    s.emit({{"valid", false}, {"reason", "target is not pseudo-effective: no weak decomposition to start from"}});
    return 1;
  }
  PipelineOptions opt{mmp_options(o), o.generate, o.seed, o.m_max > 0 ? o.m_max : 12};
  const auto r = run_pipeline(pair, *wzd, opt);
  s.phase("run");
  json descent = json::array();
  for (const auto& d : r.descent)
    descent.push_back({{"alpha", to_string(d.split.alpha)},
                       {"C", io::to_json(d.split.c)},
                       {"A", io::to_json(d.split.a)},
                       {"theta_before", d.theta_before},
                       {"theta_after", d.theta_after}});
  json reports = json::object();
  for (const auto& [k, rep] : r.reports) reports[k] = io::to_json(rep);
  json out = {{"descent", descent},
              {"boundary", io::to_json(r.pair.boundary.divisor())},
              {"trace", io::to_json(r.trace)},
              {"reports", reports},
              {"valid", r.valid}};
  if (r.fujita) out["fujita_decomposition"] = io::to_json(*r.fujita);
  s.emit(out);
  return r.valid ? 0 : 1;
}

template <template <class> class Verb>
int dispatch(const Options& o, Session& s) {
  return toric_selected(o) ? Verb<ToricVariety>::run(o, s) : Verb<SurfaceModel>::run(o, s);
}

template <class M>
struct NefVerb {
  static int run(const Options& o, Session& s) { return nef_threshold_verb<M>(o, s); }
};
template <class M>
struct MmpVerb {
  static int run(const Options& o, Session& s) { return mmp_verb<M>(o, s, false); }
};
template <class M>
struct ScalingVerb {
  static int run(const Options& o, Session& s) { return mmp_verb<M>(o, s, true); }
};
template <class M>
struct PipelineVerb {
  static int run(const Options& o, Session& s) { return pipeline_verb<M>(o, s); }
};

inline void report_error(std::ostream& err, const std::string& type, const std::string& message) {
  err << json{{"error", {{"type", type}, {"message", message}}}}.dump() << "\n";
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Weak Zariski decompositions and the MMP on surface lattices and toric varieties", "wzd"};
  app.set_help_flag("--help", "Print help and exit");
  app.require_subcommand(1);

  auto model_opts = [&](CLI::App* c) {
    c->add_option("--fan", o.fan, "Toric fan JSON");
    c->add_option("--model", o.model, "Surface lattice JSON");
  };
  auto common = [&](CLI::App* c) {
    c->add_option("--output", o.output, "Write the artifact to this file");
    c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "text"}));
    c->add_option("--log", o.log, "Timing log file");
  };
  auto pair_opts = [&](CLI::App* c) {
    c->add_option("--boundary", o.boundary, "Boundary divisor JSON");
    c->add_option("--mode", o.mode, "kb or divisor")->check(CLI::IsMember({"kb", "divisor"}));
    c->add_option("--divisor", o.divisor, "Base divisor L (divisor mode)");
  };
  auto mmp_opts = [&](CLI::App* c) {
    c->add_option("--step-limit", o.step_limit, "Maximum number of steps");
    c->add_option("--flip-limit", o.flip_limit, "Maximum number of flips");
  };

  auto* z = app.add_subcommand("zariski-surface", "Zariski decomposition on a surface lattice");
  z->add_option("--model", o.model, "Surface lattice JSON");
  z->add_option("--divisor", o.divisor, "Divisor JSON");
  common(z);

  auto* v = app.add_subcommand("validate", "Validate a decomposition");
  v->add_option("--kind", o.kind, "weak | fujita | ckm | surface_zariski")->required();
  model_opts(v);
  v->add_option("--divisor", o.divisor, "Divisor D");
  v->add_option("--p", o.p, "Positive part");
  v->add_option("--n", o.n, "Negative part");
  v->add_option("--wzd-fan", o.wzd_fan, "Fan of the model carrying P and N");
  v->add_option("--m-max", o.m_max, "Largest multiple for ckm");
  v->add_option("--challengers", o.challengers, "Challenger list JSON (fujita)");
  v->add_option("--generate", o.generate, "Number of generated challengers (fujita)");
  v->add_option("--seed", o.seed, "Seed for generated challengers");
  common(v);

  auto* nt = app.add_subcommand("nef-threshold", "Nef threshold of P + tN");
  model_opts(nt);
  nt->add_option("--p", o.p, "Positive part");
  nt->add_option("--n", o.n, "Negative part");
  common(nt);

  auto* mm = app.add_subcommand("mmp", "MMP guided by a weak Zariski decomposition");
  model_opts(mm);
  pair_opts(mm);
  mmp_opts(mm);
  mm->add_option("--p", o.p, "Positive part");
  mm->add_option("--n", o.n, "Negative part");
  mm->add_option("--h", o.h, "Scaling divisor when no decomposition exists");
  mm->add_option("--seed", o.seed, "Accepted for interface symmetry; the run is deterministic");
  common(mm);

  auto* sc = app.add_subcommand("scaling-mmp", "MMP with scaling");
  model_opts(sc);
  pair_opts(sc);
  mmp_opts(sc);
  sc->add_option("--h", o.h, "Scaling divisor (default: computed ample divisor)");
  common(sc);

  auto* se = app.add_subcommand("sections", "Lattice points of the section polytope");
  se->add_option("--fan", o.fan, "Toric fan JSON");
  se->add_option("--divisor", o.divisor, "Divisor JSON");
  se->add_option("--multiple", o.multiple, "Multiple m of the divisor");
  common(se);

  auto* sb = app.add_subcommand("sbl", "Stable base locus");
  sb->add_option("--fan", o.fan, "Toric fan JSON");
  sb->add_option("--divisor", o.divisor, "Divisor JSON");
  sb->add_option("--m-max", o.m_max, "Largest multiple checked (default 24)");
  common(sb);

  auto* di = app.add_subcommand("discrepancy", "Log discrepancies of toric valuations");
  di->add_option("--fan", o.fan, "Toric fan JSON");
  pair_opts(di);
  di->add_option("--vector", o.vectors, "Primitive vector, comma separated (repeatable)");
  di->add_flag("--log-smooth", o.log_smooth, "Also compute a log smooth model");
  common(di);

  auto* th = app.add_subcommand("theta", "theta(B, N)");
  th->add_option("--boundary", o.boundary, "Boundary divisor JSON");
  th->add_option("--n", o.n, "Negative part JSON");
  common(th);

  auto* al = app.add_subcommand("alpha-split", "alpha threshold and the split alpha N = C + A");
  al->add_option("--boundary", o.boundary, "Boundary divisor JSON");
  al->add_option("--n", o.n, "Negative part JSON");
  common(al);

  auto* pl = app.add_subcommand("pipeline", "theta descent, MMP, and verification of the result");
  model_opts(pl);
  pair_opts(pl);
  mmp_opts(pl);
  pl->add_option("--p", o.p, "Positive part");
  pl->add_option("--n", o.n, "Negative part");
  pl->add_option("--m-max", o.m_max, "Largest multiple for the ckm check (default 12)");
  pl->add_option("--generate", o.generate, "Number of generated Fujita challengers");
  pl->add_option("--seed", o.seed, "Seed for generated challengers");
  common(pl);

  std::vector<std::string> storage{"wzd"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    detail::report_error(err, "usage", e.what());
    return 2;
  }
  o.verb = app.get_subcommands().front()->get_name();

  try {
    detail::Session s(o, out);
    if (o.verb == "zariski-surface") return detail::zariski_surface(o, s);
    if (o.verb == "validate") return detail::validate(o, s);
    if (o.verb == "nef-threshold") return detail::dispatch<detail::NefVerb>(o, s);
    if (o.verb == "mmp") return detail::dispatch<detail::MmpVerb>(o, s);
    if (o.verb == "scaling-mmp") return detail::dispatch<detail::ScalingVerb>(o, s);
    if (o.verb == "sections") return detail::sections_verb(o, s);
    if (o.verb == "sbl") return detail::sbl_verb(o, s);
    if (o.verb == "discrepancy") return detail::discrepancy_verb(o, s);
    if (o.verb == "theta") return detail::theta_verb(o, s);
    if (o.verb == "alpha-split") return detail::alpha_split_verb(o, s);
    if (o.verb == "pipeline") return detail::dispatch<detail::PipelineVerb>(o, s);
  } catch (const InputError& e) {
    detail::report_error(err, "input", e.what());
    return 2;
  } catch (const PreconditionError& e) {
    detail::report_error(err, "precondition", e.what());
    return 2;
  } catch (const GeometryError& e) {
    detail::report_error(err, "geometry", e.what());
    return 1;
  }
  detail::report_error(err, "usage", "unknown verb");
  return 2;
}

}  // namespace wzd::cli
