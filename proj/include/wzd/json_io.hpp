#pragma once

// JSON reading and writing. Rationals travel as canonical "p/q" strings;
// objects use sorted keys so output is byte-stable.

#include "wzd/mmp.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace wzd::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Reading

inline Rational rational_from(const json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const InputError& e) {
      throw InputError(path + ": " + e.what());
    }
  }
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw InputError(path + ": expected a rational string or an integer");
}

inline std::int64_t integer_from(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw InputError(path + ": expected an integer");
  return j.get<std::int64_t>();
}

inline const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw InputError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(path + ": missing field '" + key + "'");
  return *it;
}

inline const json& array_field(const json& j, const std::string& key, const std::string& path) {
  const auto& a = field(j, key, path);
  if (!a.is_array()) throw InputError(path + "/" + key + ": expected an array");
  return a;
}

inline RationalDivisor divisor_from(const json& j, const std::string& path = "") {
  if (!j.is_object()) throw InputError(path + ": divisor must be an object of component -> rational");
  RationalDivisor d;
  for (auto it = j.begin(); it != j.end(); ++it) d.set(it.key(), rational_from(it.value(), path + "/" + it.key()));
  return d;
}

inline ToricVariety fan_from(const json& j, const std::string& path = "") {
  const auto dim = integer_from(field(j, "dim", path), path + "/dim");
  std::vector<IntVector> rays;
  const auto& jr = array_field(j, "rays", path);
  for (std::size_t i = 0; i < jr.size(); ++i) {
    const std::string p = path + "/rays/" + std::to_string(i);
    if (!jr[i].is_array()) throw InputError(p + ": expected an integer array");
    IntVector v;
    for (std::size_t k = 0; k < jr[i].size(); ++k) v.push_back(integer_from(jr[i][k], p + "/" + std::to_string(k)));
    rays.push_back(v);
  }
  std::vector<Cone> cones;
  const auto& jc = array_field(j, "max_cones", path);
  for (std::size_t i = 0; i < jc.size(); ++i) {
    const std::string p = path + "/max_cones/" + std::to_string(i);
    if (!jc[i].is_array()) throw InputError(p + ": expected an index array");
    Cone c;
    for (std::size_t k = 0; k < jc[i].size(); ++k)
      c.push_back(static_cast<int>(integer_from(jc[i][k], p + "/" + std::to_string(k))));
    cones.push_back(c);
  }
  std::vector<std::string> ids;
  if (j.contains("ray_ids")) {
    const auto& ji = array_field(j, "ray_ids", path);
    for (std::size_t i = 0; i < ji.size(); ++i) {
      if (!ji[i].is_string()) throw InputError(path + "/ray_ids/" + std::to_string(i) + ": expected a string");
      ids.push_back(ji[i].get<std::string>());
    }
  }
  try {
    return ToricVariety(static_cast<int>(dim), rays, cones, ids);
  } catch (const InputError& e) {
    throw InputError(path + (path.empty() ? "" : ": ") + e.what());
  }
}

inline SurfaceModel surface_from(const json& j, const std::string& path = "") {
  std::vector<std::string> classes;
  const auto& jc = array_field(j, "classes", path);
  for (std::size_t i = 0; i < jc.size(); ++i) {
    if (!jc[i].is_string()) throw InputError(path + "/classes/" + std::to_string(i) + ": expected a string");
    classes.push_back(jc[i].get<std::string>());
  }
  Matrix form;
  const auto& jf = array_field(j, "form", path);
  for (std::size_t i = 0; i < jf.size(); ++i) {
    const std::string p = path + "/form/" + std::to_string(i);
    if (!jf[i].is_array()) throw InputError(p + ": expected a row array");
    RationalVector row;
    for (std::size_t k = 0; k < jf[i].size(); ++k) row.push_back(rational_from(jf[i][k], p + "/" + std::to_string(k)));
    form.push_back(row);
  }
  std::vector<CurveGenerator> gens;
  const auto& jg = array_field(j, "mori_generators", path);
  for (std::size_t i = 0; i < jg.size(); ++i) {
    const std::string p = path + "/mori_generators/" + std::to_string(i);
    if (jg[i].is_string()) {
      const auto name = jg[i].get<std::string>();
      gens.push_back({name, RationalDivisor::prime(name)});
    } else {
      const auto& name = field(jg[i], "name", p);
      if (!name.is_string()) throw InputError(p + "/name: expected a string");
      gens.push_back({name.get<std::string>(), divisor_from(field(jg[i], "class", p), p + "/class")});
    }
  }
  std::set<std::string> primes;
  const auto& jp = array_field(j, "prime_curves", path);
  for (std::size_t i = 0; i < jp.size(); ++i) {
    if (!jp[i].is_string()) throw InputError(path + "/prime_curves/" + std::to_string(i) + ": expected a string");
    primes.insert(jp[i].get<std::string>());
  }
  std::optional<RationalDivisor> canonical;
  if (j.contains("canonical")) canonical = divisor_from(j["canonical"], path + "/canonical");
  try {
    return SurfaceModel(classes, form, gens, primes, canonical);
  } catch (const InputError& e) {
    throw InputError(path + (path.empty() ? "" : ": ") + e.what());
  }
}

inline json read_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw InputError(file + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(file + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Writing

inline json to_json(const Rational& q) { return to_string(q); }

inline json to_json(const RationalVector& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(to_string(q));
  return a;
}

inline json to_json(const RationalDivisor& d) {
  json o = json::object();
  for (const auto& [id, c] : d.terms()) o[id] = to_string(c);
  return o;
}

inline json to_json(const ToricVariety& x) {
  json rays = json::array(), cones = json::array();
  for (const auto& r : x.rays()) rays.push_back(r);
  for (const auto& c : x.max_cones()) cones.push_back(c);
  return {{"dim", x.dim()}, {"rays", rays}, {"max_cones", cones}, {"ray_ids", x.ray_ids()}};
}

inline json to_json(const SurfaceModel& m) {
  json form = json::array();
  for (const auto& row : m.form()) form.push_back(to_json(row));
  json gens = json::array();
  for (const auto& g : m.generators()) gens.push_back({{"name", g.name}, {"class", to_json(g.cls)}});
  json out = {{"classes", m.classes()},
              {"form", form},
              {"mori_generators", gens},
              {"prime_curves", std::vector<std::string>(m.prime_curves().begin(), m.prime_curves().end())}};
  if (m.canonical()) out["canonical"] = to_json(*m.canonical());
  return out;
}

inline json to_json(const CurveRef& c) {
  json o = {{"name", c.name}};
  if (!c.face.empty() || !c.adjacent.empty()) {
    o["face"] = c.face;
    o["adjacent"] = c.adjacent;
  }
  return o;
}

inline json to_json(const ValidationReport& r) {
  json trunc = json::object();
  if (r.m_max) trunc["m_max"] = *r.m_max;
  if (r.challengers) trunc["challengers"] = *r.challengers;
  return {{"valid", r.valid},     {"kind", r.kind},         {"witnesses", r.witnesses},
          {"notes", r.notes},     {"truncation", trunc},    {"rejected_challengers", r.rejected}};
}

inline json to_json(const ZariskiResult& z) {
  json hist = json::array();
  for (const auto& h : z.support_history) hist.push_back(h);
  return {{"P", to_json(z.p)},
          {"N", to_json(z.n)},
          {"negative_support", z.negative_support},
          {"certificate", to_json(z.certificate)},
          {"support_history", hist}};
}

template <class Model>
json to_json(const WeakDecomposition<Model>& w) {
  return {{"model", to_json(w.model)},
          {"P", to_json(w.p)},
          {"N", to_json(w.n)},
          {"nef_certificate", to_json(w.nef_certificate)},
          {"kind", to_string(w.kind)}};
}

template <class Model>
json to_json(const MMPState<Model>& s) {
  json o = {{"model", to_json(s.model)},
            {"base", to_json(s.base)},
            {"boundary", to_json(s.boundary.divisor())},
            {"P", to_json(s.p)},
            {"N", to_json(s.n)}};
  if (s.h) o["H"] = to_json(*s.h);
  return o;
}

template <class Model>
json to_json(const MMPTrace<Model>& t) {
  const bool scaling = t.driver == "scaling";
  json steps = json::array();
  for (const auto& s : t.steps) {
    json o = {{"index", s.index},
              {"kind", to_string(s.kind)},
              {scaling ? "lambda" : "mu", to_string(s.threshold)},
              {"ray", to_json(s.ray)},
              {"target_dot_ray", to_string(s.target_dot_ray)},
              {scaling ? "h_dot_ray" : "n_dot_ray", to_string(s.n_dot_ray)},
              {"diagnostic_bound_ok", s.diagnostic_bound_ok},
              {"theta_after", s.theta_after},
              {"state_after", to_json(s.state_after)}};
    if (s.contracted) o["contracted"] = *s.contracted;
    steps.push_back(o);
  }
  json out = {{"driver", t.driver},
              {"mode", to_string(t.mode)},
              {"outcome", to_string(t.outcome)},
              {"steps", steps},
              {"final", to_json(t.final_state)},
              {"flips", t.flips},
              {"options", {{"step_limit", t.options.step_limit}, {"flip_limit", t.options.flip_limit}}}};
  if (t.outcome == Outcome::minimal_model) out["nef_certificate"] = to_json(t.nef_certificate);
  if (t.fibration_base) out["fibration_base"] = to_json(*t.fibration_base);
  return out;
}

inline json to_json(const LogSmoothModel& m) {
  return {{"model", to_json(m.model)},
          {"boundary", to_json(m.boundary.divisor())},
          {"F", to_json(m.f)},
          {"exceptional", m.exceptional}};
}

inline json to_json(const StableBaseLocus& s, const ToricVariety& x) {
  json cones = json::array();
  for (const auto& c : s.cones) cones.push_back(x.cone_ids(c));
  return {{"cones", cones}, {"multiples", s.multiples}, {"stabilized", s.stabilized}, {"empty_system", s.empty_system}};
}

/// Pretty output with a trailing newline; sorted keys come from json's map.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace wzd::io
