#include "nlbvp/spec_io.hpp"

#include <fmt/format.h>

#include <fstream>

#include "nlbvp/errors.hpp"

namespace nlbvp {
namespace {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

const Json& require(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw StructuralError(fmt::format("missing key '{}'", key));
  return *it;
}

const char* support_name(ExteriorTerm::Support s) {
  return s == ExteriorTerm::Support::Interior ? "interior" : "reaches_boundary";
}

ExteriorTerm::Support support_from(const std::string& s) {
  if (s == "interior") return ExteriorTerm::Support::Interior;
  if (s == "reaches_boundary") return ExteriorTerm::Support::ReachesBoundary;
  throw StructuralError(fmt::format("unknown exterior support '{}'", s));
}

}  // namespace

Json function_to_json(const ScalarFunction& f) {
  if (f.is_table()) return Json{{"r", f.table_r()}, {"value", f.table_values()}};
  return f.encode();
}

ScalarFunction function_from_json(const Json& j) {
  if (j.is_string()) return ScalarFunction::parse(j.get<std::string>());
  if (j.is_number()) return ScalarFunction::constant(j.get<double>());
  if (j.is_object()) {
    return ScalarFunction::table(require(j, "r").get<std::vector<double>>(),
                                 require(j, "value").get<std::vector<double>>());
  }
  throw StructuralError("scalar function must be a string, number or {r, value} table");
}

Json spec_to_json(const ProblemSpec& spec) {
  Json orbits = Json::array();
  for (const auto& o : spec.orbits) {
    Json terms = Json::array();
    for (const auto& t : o.terms) {
      Json jt{{"angle", t.source_angle}, {"sigma", t.sigma},     {"target", t.target_angle},
              {"index", t.index},        {"weight", t.weight_at_vertex},
              {"rotation", t.rotation},  {"homothety", t.homothety}};
      if (t.weight_profile) jt["profile"] = function_to_json(*t.weight_profile);
      terms.push_back(std::move(jt));
    }
    Json jo{{"id", o.orbit_id}, {"half_openings", o.half_openings}, {"terms", terms}};
    if (!o.label.empty()) jo["label"] = o.label;
    if (!o.principal.empty()) {
      Json pp = Json::array();
      for (const auto& p : o.principal) pp.push_back({{"p11", p.p11}, {"p12", p.p12}, {"p22", p.p22}});
      jo["principal"] = pp;
    }
    orbits.push_back(std::move(jo));
  }
  Json ext = Json::array();
  for (const auto& e : spec.exterior_terms) {
    ext.push_back({{"orbit", e.orbit_id},
                   {"angle", e.side.angle},
                   {"sigma", e.side.sigma},
                   {"target", e.target_angle},
                   {"coefficient", function_to_json(e.coefficient)},
                   {"radius", e.radius},
                   {"omega", e.omega},
                   {"drift", e.drift},
                   {"support", support_name(e.support)}});
  }
  Json boundary = Json::array();
  for (const auto& d : spec.rhs.boundary) {
    boundary.push_back({{"orbit", d.orbit_id},
                        {"angle", d.side.angle},
                        {"sigma", d.side.sigma},
                        {"value", function_to_json(d.value)}});
  }
  const auto& tr = spec.truncation;
  Json out{{"orbits", orbits},
           {"exterior_terms", ext},
           {"rhs",
            {{"volume", function_to_json(spec.rhs.volume)},
             {"outer", function_to_json(spec.rhs.outer)},
             {"boundary", boundary}}},
           {"truncation",
            {{"epsilon", tr.epsilon},
             {"kappa1", tr.kappa1},
             {"kappa2", tr.kappa2},
             {"epsilon1", tr.epsilon1},
             {"levels", tr.levels}}}};
  if (!spec.name.empty()) out["name"] = spec.name;
  return out;
}

ProblemSpec spec_from_json(const Json& j) {
  ProblemSpec spec;
  try {
    spec.name = get_or<std::string>(j, "name", "");
    int next_id = 0;
    for (const auto& jo : require(j, "orbits")) {
      OrbitModel o;
      o.orbit_id = get_or<int>(jo, "id", next_id);
      next_id = o.orbit_id + 1;
      o.label = get_or<std::string>(jo, "label", "");
      o.half_openings = require(jo, "half_openings").get<std::vector<double>>();
      if (auto it = jo.find("principal"); it != jo.end()) {
        for (const auto& jp : *it) {
          o.principal.push_back({get_or<double>(jp, "p11", 1.0), get_or<double>(jp, "p12", 0.0),
                                 get_or<double>(jp, "p22", 1.0)});
        }
      }
      if (auto it = jo.find("terms"); it != jo.end()) {
        int auto_index = 1;
        for (const auto& jt : *it) {
          NonlocalTerm t;
          t.source_angle = get_or<int>(jt, "angle", 0);
          t.sigma = require(jt, "sigma").get<int>();
          t.target_angle = get_or<int>(jt, "target", t.source_angle);
          t.index = get_or<int>(jt, "index", auto_index++);
          if (auto p = jt.find("profile"); p != jt.end()) t.weight_profile = function_from_json(*p);
          if (auto w = jt.find("weight"); w != jt.end()) {
            t.weight_at_vertex = w->get<double>();
          } else if (t.weight_profile) {
            t.weight_at_vertex = (*t.weight_profile)(Vec2::Zero());
          } else {
            throw StructuralError("term needs 'weight' or 'profile'");
          }
          t.rotation = get_or<double>(jt, "rotation", 0.0);
          t.homothety = get_or<double>(jt, "homothety", 1.0);
          o.terms.push_back(std::move(t));
        }
      }
      spec.orbits.push_back(std::move(o));
    }
    if (auto it = j.find("exterior_terms"); it != j.end()) {
      for (const auto& je : *it) {
        ExteriorTerm e;
        e.orbit_id = get_or<int>(je, "orbit", 0);
        e.side = {get_or<int>(je, "angle", 0), require(je, "sigma").get<int>()};
        e.target_angle = get_or<int>(je, "target", e.side.angle);
        e.coefficient = function_from_json(require(je, "coefficient"));
        e.radius = get_or<double>(je, "radius", 0.5);
        e.omega = get_or<double>(je, "omega", 0.0);
        e.drift = get_or<double>(je, "drift", 0.0);
        e.support = support_from(get_or<std::string>(je, "support", "interior"));
        spec.exterior_terms.push_back(std::move(e));
      }
    }
    if (auto it = j.find("rhs"); it != j.end()) {
      if (auto v = it->find("volume"); v != it->end()) spec.rhs.volume = function_from_json(*v);
      if (auto v = it->find("outer"); v != it->end()) spec.rhs.outer = function_from_json(*v);
      if (auto b = it->find("boundary"); b != it->end()) {
        for (const auto& jb : *b) {
          spec.rhs.boundary.push_back({get_or<int>(jb, "orbit", 0),
                                       {get_or<int>(jb, "angle", 0), require(jb, "sigma").get<int>()},
                                       function_from_json(require(jb, "value"))});
        }
      }
    }
    if (auto it = j.find("truncation"); it != j.end()) {
      auto& tr = spec.truncation;
      tr.epsilon = get_or<double>(*it, "epsilon", tr.epsilon);
      tr.kappa1 = get_or<double>(*it, "kappa1", tr.epsilon / 2.0);
      tr.kappa2 = get_or<double>(*it, "kappa2", tr.kappa1 / 2.0);
      tr.epsilon1 = get_or<double>(*it, "epsilon1", tr.epsilon1);
      tr.levels = get_or<int>(*it, "levels", tr.levels);
    }
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(fmt::format("malformed problem spec: {}", e.what()));
  }
  spec.validate();
  return spec;
}

ProblemSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError(fmt::format("cannot open spec '{}'", path.string()));
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(fmt::format("cannot parse '{}': {}", path.string(), e.what()));
  }
  return spec_from_json(j);
}

void save_spec(const ProblemSpec& spec, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write spec '{}'", path.string()));
  out << spec_to_json(spec).dump(2) << '\n';
}

}  // namespace nlbvp
