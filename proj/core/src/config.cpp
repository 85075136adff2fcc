#include "sobexlab/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "sobexlab/errors.hpp"

namespace sobexlab::cli {

using nlohmann::json;

Config default_config() { return {}; }

namespace {

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key))
      throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

Config config_from_json(const json& j) {
  Config cfg;
  check_keys(j, "config", {"domain", "quadrature", "experiment", "output"});

  if (j.contains("domain")) {
    const json& d = j.at("domain");
    check_keys(d, "domain",
               {"type", "n", "p", "q", "m", "placement", "kmax",
                "aspect_shrink", "profile", "knots"});
    maybe(d, "type", cfg.domain.type);
    if (cfg.domain.type != "mushroom" && cfg.domain.type != "comb" &&
        cfg.domain.type != "cusp")
      throw ConfigError("domain: unknown type '" + cfg.domain.type + "'");
    maybe(d, "n", cfg.domain.n);
    maybe(d, "p", cfg.domain.p);
    maybe(d, "q", cfg.domain.q);
    maybe(d, "m", cfg.domain.m);
    maybe(d, "placement", cfg.domain.placement);
    if (cfg.domain.placement != "diagonal")
      throw ConfigError("domain: only the diagonal placement is implemented");
    maybe(d, "kmax", cfg.domain.kmax);
    maybe(d, "aspect_shrink", cfg.domain.aspect_shrink);
    maybe(d, "profile", cfg.domain.profile);
    if (d.contains("knots")) {
      cfg.domain.knots.clear();
      for (const auto& kn : d.at("knots")) {
        if (!kn.is_array() || kn.size() != 2)
          throw ConfigError("domain.knots: expected [t, value] pairs");
        cfg.domain.knots.emplace_back(kn[0].get<double>(),
                                      kn[1].get<double>());
      }
    }
  }

  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    check_keys(q, "quadrature",
               {"method", "radial_nodes", "axial_nodes", "angular_nodes",
                "graded_panels", "grading_ratio", "mc_samples", "seed",
                "target_rel_error", "estimate_error"});
    if (q.contains("method"))
      cfg.quadrature.method = norms::parse_method(q.at("method").get<std::string>());
    maybe(q, "radial_nodes", cfg.quadrature.radial_nodes);
    maybe(q, "axial_nodes", cfg.quadrature.axial_nodes);
    maybe(q, "angular_nodes", cfg.quadrature.angular_nodes);
    maybe(q, "graded_panels", cfg.quadrature.graded_panels);
    maybe(q, "grading_ratio", cfg.quadrature.grading_ratio);
    maybe(q, "mc_samples", cfg.quadrature.mc_samples);
    maybe(q, "seed", cfg.quadrature.seed);
    maybe(q, "target_rel_error", cfg.quadrature.target_rel_error);
    maybe(q, "estimate_error", cfg.quadrature.estimate_error);
    if (cfg.quadrature.grading_ratio <= 0 || cfg.quadrature.grading_ratio >= 1)
      throw ConfigError("quadrature: grading_ratio must be in (0,1)");
  }

  if (j.contains("experiment")) {
    const json& e = j.at("experiment");
    check_keys(e, "experiment", {"name", "fields", "mlist", "kmax", "p", "q"});
    maybe(e, "name", cfg.experiment.name);
    if (e.contains("fields"))
      cfg.experiment.fields =
          e.at("fields").get<std::vector<std::string>>();
    if (e.contains("mlist"))
      cfg.experiment.mlist = e.at("mlist").get<std::vector<int>>();
    maybe(e, "kmax", cfg.experiment.kmax);
    maybe(e, "p", cfg.experiment.p);
    maybe(e, "q", cfg.experiment.q);
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, "output", {"json", "csv"});
    maybe(o, "json", cfg.output.json);
    maybe(o, "csv", cfg.output.csv);
  }
  return cfg;
}

json config_to_json(const Config& cfg) {
  json d;
  d["type"] = cfg.domain.type;
  d["n"] = cfg.domain.n;
  d["p"] = cfg.domain.p;
  d["q"] = cfg.domain.q;
  d["m"] = cfg.domain.m;
  d["placement"] = cfg.domain.placement;
  d["kmax"] = cfg.domain.kmax;
  d["aspect_shrink"] = cfg.domain.aspect_shrink;
  d["profile"] = cfg.domain.profile;
  json knots = json::array();
  for (const auto& [t, v] : cfg.domain.knots) knots.push_back({t, v});
  d["knots"] = knots;

  json q;
  q["method"] = norms::method_name(cfg.quadrature.method);
  q["radial_nodes"] = cfg.quadrature.radial_nodes;
  q["axial_nodes"] = cfg.quadrature.axial_nodes;
  q["angular_nodes"] = cfg.quadrature.angular_nodes;
  q["graded_panels"] = cfg.quadrature.graded_panels;
  q["grading_ratio"] = cfg.quadrature.grading_ratio;
  q["mc_samples"] = cfg.quadrature.mc_samples;
  q["seed"] = cfg.quadrature.seed;
  q["target_rel_error"] = cfg.quadrature.target_rel_error;
  q["estimate_error"] = cfg.quadrature.estimate_error;

  json e;
  e["name"] = cfg.experiment.name;
  e["fields"] = cfg.experiment.fields;
  e["mlist"] = cfg.experiment.mlist;
  e["kmax"] = cfg.experiment.kmax;
  e["p"] = cfg.experiment.p;
  e["q"] = cfg.experiment.q;

  json o;
  o["json"] = cfg.output.json;
  o["csv"] = cfg.output.csv;

  json root;
  root["domain"] = d;
  root["quadrature"] = q;
  root["experiment"] = e;
  root["output"] = o;
  return root;
}

std::string config_to_string(const Config& cfg) {
  return config_to_json(cfg).dump(2) + "\n";
}

Config load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path.string() + ": " +
                      e.what());
  }
  return config_from_json(j);
}

geometry::MushroomSpec mushroom_from(const Config& cfg) {
  if (cfg.domain.type != "mushroom")
    throw ConfigError("expected a mushroom domain config");
  return geometry::build_mushroom(cfg.domain.n, cfg.domain.p, cfg.domain.q,
                                  cfg.domain.m);
}

geometry::CombSpec comb_from(const Config& cfg) {
  if (cfg.domain.type != "comb")
    throw ConfigError("expected a comb domain config");
  return geometry::build_comb(cfg.domain.n, cfg.domain.kmax,
                              cfg.domain.aspect_shrink);
}

geometry::CuspSpec cusp_from(const Config& cfg) {
  if (cfg.domain.type != "cusp")
    throw ConfigError("expected a cusp domain config");
  if (cfg.domain.profile == "table")
    return geometry::build_cusp(cfg.domain.n,
                                geometry::tabulated_profile(cfg.domain.knots));
  const std::string prefix = "power:";
  if (cfg.domain.profile.rfind(prefix, 0) == 0) {
    const double s = std::stod(cfg.domain.profile.substr(prefix.size()));
    return geometry::build_cusp(cfg.domain.n, geometry::power_profile(s));
  }
  throw ConfigError("cusp: unknown profile '" + cfg.domain.profile + "'");
}

}  // namespace sobexlab::cli
