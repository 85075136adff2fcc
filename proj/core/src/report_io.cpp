#include "sobexlab/report_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sobexlab/errors.hpp"

namespace sobexlab::io {

using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

json num_or_null(double v) {
  if (std::isnan(v) || std::isinf(v)) return nullptr;
  return v;
}

}  // namespace

std::string rate_table_csv(const experiments::RateTable& table) {
  std::ostringstream os;
  os << "# sobexlab experiment " << table.name << "\n";
  for (const auto& [k, v] : table.meta) os << "# " << k << "=" << v << "\n";
  for (const auto& [name, fit] : table.fits)
    os << "# fit " << name << " slope=" << num(fit.slope)
       << " intercept=" << num(fit.intercept)
       << " max_residual=" << num(fit.max_residual) << " window=["
       << fit.k_lo << "," << fit.k_hi << "]\n";
  for (const auto& c : table.checks)
    os << "# check " << c.name << " " << (c.pass ? "pass" : "FAIL")
       << (c.detail.empty() ? "" : " " + c.detail) << "\n";
  os << "k,quantity,analytic_log2,quad_log2,formula_log2,stderr\n";
  for (const auto& c : table.cells)
    os << c.k << "," << c.quantity << "," << num(c.analytic_log2) << ","
       << num(c.quad_log2) << "," << num(c.formula_log2) << ","
       << num(c.stderr_) << "\n";
  return os.str();
}

json rate_table_json(const experiments::RateTable& table) {
  json j;
  j["name"] = table.name;
  json meta = json::object();
  for (const auto& [k, v] : table.meta) meta[k] = v;
  j["meta"] = meta;
  json cells = json::array();
  for (const auto& c : table.cells) {
    cells.push_back({{"k", c.k},
                     {"quantity", c.quantity},
                     {"analytic_log2", num_or_null(c.analytic_log2)},
                     {"quad_log2", num_or_null(c.quad_log2)},
                     {"formula_log2", num_or_null(c.formula_log2)},
                     {"stderr", num_or_null(c.stderr_)}});
  }
  j["cells"] = cells;
  json fits = json::object();
  for (const auto& [name, fit] : table.fits)
    fits[name] = {{"slope", fit.slope},
                  {"intercept", fit.intercept},
                  {"max_residual", fit.max_residual},
                  {"window", {fit.k_lo, fit.k_hi}}};
  j["fits"] = fits;
  json checks = json::array();
  for (const auto& c : table.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = checks;
  j["all_pass"] = table.all_pass();
  return j;
}

std::string norm_report_csv(const norms::NormReport& report) {
  std::ostringstream os;
  os << "# sobexlab norm field=" << report.field
     << " integrand=" << report.integrand << " p=" << num(report.p) << "\n";
  os << "# total=" << num(report.total)
     << " log2_total=" << num(report.log2_total)
     << " root=" << num(report.root) << "\n";
  os << "region,value,log2_value,stderr\n";
  for (const auto& r : report.regions)
    os << r.region << "," << num(r.integral.value) << ","
       << num(r.integral.log2_value) << "," << num(r.integral.stderr_) << "\n";
  return os.str();
}

json norm_report_json(const norms::NormReport& report) {
  json j;
  j["field"] = report.field;
  j["integrand"] = report.integrand;
  j["p"] = report.p;
  json regions = json::array();
  for (const auto& r : report.regions)
    regions.push_back({{"region", r.region},
                       {"value", r.integral.value},
                       {"log2_value", num_or_null(r.integral.log2_value)},
                       {"stderr", r.integral.stderr_},
                       {"evals", r.integral.evals}});
  j["regions"] = regions;
  j["total"] = report.total;
  j["log2_total"] = num_or_null(report.log2_total);
  j["stderr_total"] = report.stderr_total;
  j["root"] = report.root;
  return j;
}

json mushroom_json(const geometry::MushroomSpec& spec) {
  json j;
  j["n"] = spec.n;
  j["p"] = spec.p;
  j["q"] = spec.q;
  j["m"] = spec.m;
  j["placement"] = "diagonal";
  j["strict_regime"] = spec.strict_regime;
  j["qstar_nm1"] = spec.qstar_nm1;
  json derived;
  derived["z"] = spec.z;
  derived["log2_tilde_r"] = spec.log2_tilde_r;
  derived["log2_r"] = spec.log2_r;
  j["derived"] = derived;
  return j;
}

json placement_json(const geometry::PlacementReport& report) {
  json j;
  j["pass"] = report.pass;
  auto issues = [](const std::vector<geometry::PlacementIssue>& list) {
    json arr = json::array();
    for (const auto& v : list)
      arr.push_back({{"check", v.check},
                     {"k1", v.k1},
                     {"k2", v.k2},
                     {"detail", v.detail}});
    return arr;
  };
  j["violations"] = issues(report.violations);
  j["doubled_head_overlaps"] = issues(report.doubled_head_overlaps);
  return j;
}

void atomic_write(const std::filesystem::path& path,
                  const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : ".";
  fs::create_directories(dir);
  const fs::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for write");
    out << content;
    if (!out.good()) throw ConfigError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace sobexlab::io
