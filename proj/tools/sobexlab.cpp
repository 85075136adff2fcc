// sobexlab: domain constructions, cut-offs, the extension operator, norm
// engine and rate experiments behind one command-line front end.
//
// Exit codes: 0 success, 1 usage/config error, 2 invariant failure,
// 3 numerical failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sobexlab/config.hpp"
#include "sobexlab/cutoffs.hpp"
#include "sobexlab/errors.hpp"
#include "sobexlab/experiments.hpp"
#include "sobexlab/extension.hpp"
#include "sobexlab/fields.hpp"
#include "sobexlab/geometry.hpp"
#include "sobexlab/norms.hpp"
#include "sobexlab/report_io.hpp"
#include "sobexlab/rng.hpp"

using namespace sobexlab;
using nlohmann::json;

namespace {

cli::Config load_or_default(const std::string& path) {
  if (path.empty()) return cli::default_config();
  return cli::load_config_file(path);
}

Point parse_point(const std::string& text, int n) {
  std::vector<double> coords;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) coords.push_back(std::stod(item));
  if (static_cast<int>(coords.size()) != n)
    throw ConfigError("point needs " + std::to_string(n) + " coordinates");
  Point p = Point::zero(n);
  for (int i = 0; i < n; ++i) p[i] = coords[i];
  return p;
}

void write_json(const std::string& path, const json& j) {
  if (path.empty()) return;
  io::atomic_write(path, j.dump(2) + "\n");
}

std::string config_header(const cli::Config& cfg) {
  return "# config: " + cli::config_to_json(cfg).dump() + "\n";
}

// --------------------------------------------------------------------------

int cmd_config_print_defaults() {
  std::cout << cli::config_to_string(cli::default_config());
  return 0;
}

int cmd_domain_describe(const std::string& cfg_path, const std::string& out) {
  const auto cfg = load_or_default(cfg_path);
  const auto spec = cli::mushroom_from(cfg);
  json j = io::mushroom_json(spec);
  if (!spec.strict_regime)
    std::cout << "warning: p <= q(n-1)/(n-1-q); outside the bounded-extension regime\n";
  write_json(out, j);
  std::cout << j.dump(2) << std::endl;
  return 0;
}

int cmd_domain_classify(const std::string& cfg_path, const std::string& point,
                        const std::string& out) {
  const auto cfg = load_or_default(cfg_path);
  json j;
  if (cfg.domain.type == "mushroom") {
    const auto spec = cli::mushroom_from(cfg);
    const auto tag = geometry::classify(spec, parse_point(point, spec.n));
    j["tag"] = tag.str();
    j["in_omega"] = tag.in_omega();
  } else if (cfg.domain.type == "comb") {
    const auto comb = cli::comb_from(cfg);
    const auto tag = geometry::classify(comb, parse_point(point, comb.n));
    switch (tag.kind) {
      case geometry::CombKind::Box: j["tag"] = "Box"; break;
      case geometry::CombKind::Cyl:
        j["tag"] = "Cyl(" + std::to_string(tag.k) + ")";
        break;
      case geometry::CombKind::HalfCyl:
        j["tag"] = "HalfCyl(" + std::to_string(tag.k) + ")";
        break;
      default: j["tag"] = "Outside";
    }
  } else {
    const auto cusp = cli::cusp_from(cfg);
    const auto kind = geometry::classify(cusp, parse_point(point, cusp.n));
    j["tag"] = kind == geometry::CuspKind::CuspPart   ? "CuspPart"
               : kind == geometry::CuspKind::BallPart ? "BallPart"
                                                      : "Outside";
  }
  write_json(out, j);
  std::cout << j.dump(2) << std::endl;
  return 0;
}

int cmd_domain_validate(const std::string& cfg_path, const std::string& out) {
  const auto cfg = load_or_default(cfg_path);
  const auto spec = cli::mushroom_from(cfg);
  const auto rep = geometry::validate_placement(spec);
  const json j = io::placement_json(rep);
  write_json(out, j);
  std::cout << j.dump(2) << std::endl;
  if (!rep.doubled_head_overlaps.empty())
    std::cout << "note: " << rep.doubled_head_overlaps.size()
              << " doubled-head overlap pair(s) reported (see JSON)\n";
  return rep.pass ? 0 : 2;
}

int cmd_cutoff_sample(double r, int samples, std::uint64_t seed,
                      const std::string& out) {
  if (r <= 0 || r > 1) throw ConfigError("cutoff sample: r must be in (0,1]");
  const CounterRng rng(seed, fnv1a("cutoff-sample"));
  std::ostringstream os;
  os << "s,xn,Li,Lo,grad_Li,bound\n";
  for (int i = 0; i < samples; ++i) {
    cutoffs::CollarCoords c;
    c.r = r;
    c.s = r / 2 + r / 2 * rng.uniform(i, 0);
    c.xn = rng.uniform(i, 1);
    if (cutoffs::branch_of(c) == cutoffs::CollarBranch::Corner) continue;
    os << c.s << "," << c.xn << "," << cutoffs::eval_Li(c) << ","
       << cutoffs::eval_Lo(c) << "," << cutoffs::grad_Li_local(c).norm()
       << "," << cutoffs::grad_bound(c) << "\n";
  }
  if (out.empty())
    std::cout << os.str();
  else
    io::atomic_write(out, os.str());
  return 0;
}

int cmd_extend_sample(const std::string& cfg_path, const std::string& field,
                      const std::string& grid, const std::string& out) {
  const auto cfg = load_or_default(cfg_path);
  const auto spec = cli::mushroom_from(cfg);
  const auto u = fields::parse_field(field, spec);
  const extension::ExtensionField E(spec, u);

  std::vector<int> dims;
  {
    std::stringstream ss(grid);
    std::string item;
    while (std::getline(ss, item, ',')) dims.push_back(std::stoi(item));
  }
  if (static_cast<int>(dims.size()) != spec.n)
    throw ConfigError("grid needs " + std::to_string(spec.n) + " counts");

  std::ostringstream os;
  os << config_header(cfg);
  for (int i = 0; i < spec.n; ++i) os << "x" << (i + 1) << ",";
  os << "region,E,grad_E\n";
  std::vector<int> idx(spec.n, 0);
  while (true) {
    Point x = Point::zero(spec.n);
    for (int i = 0; i < spec.n - 1; ++i)
      x[i] = (idx[i] + 0.5) / dims[i];
    x.set_axial(3.0 * (idx[spec.n - 1] + 0.5) / dims[spec.n - 1]);
    const auto tag = geometry::classify(spec, x);
    double val = 0, gnorm = 0;
    val = E.value(x);
    try {
      gnorm = E.gradient(x).norm();
    } catch (const NumericalError&) {
      gnorm = std::numeric_limits<double>::quiet_NaN();
    }
    for (int i = 0; i < spec.n; ++i) os << x[i] << ",";
    os << tag.str() << "," << val << "," << gnorm << "\n";
    int c = spec.n - 1;
    while (c >= 0 && ++idx[c] == dims[c]) idx[c--] = 0;
    if (c < 0) break;
  }
  if (out.empty())
    std::cout << os.str();
  else
    io::atomic_write(out, os.str());
  return 0;
}

int cmd_norm(const std::string& cfg_path, const std::string& field,
             const std::string& integrand, double p,
             const std::string& regions, const std::string& out_json,
             const std::string& out_csv) {
  const auto cfg = load_or_default(cfg_path);
  const auto spec = cli::mushroom_from(cfg);
  const auto u = field.rfind("extend:", 0) == 0
                     ? extension::extend(
                           spec, fields::parse_field(field.substr(7), spec))
                     : fields::parse_field(field, spec);
  const auto sel = norms::parse_region_select(regions);
  const auto tags = norms::select_regions(spec, sel);
  const auto rep =
      integrand == "grad"
          ? norms::sobolev_seminorm(spec, u, tags, p, cfg.quadrature)
      : integrand == "lp"
          ? norms::lp_norm(spec, u, tags, p, cfg.quadrature)
          : throw ConfigError("integrand must be lp or grad");

  json j = io::norm_report_json(rep);
  j["config"] = cli::config_to_json(cfg);
  write_json(out_json, j);
  if (!out_csv.empty())
    io::atomic_write(out_csv, config_header(cfg) + io::norm_report_csv(rep));
  std::cout << "total = " << rep.total << " (log2 " << rep.log2_total
            << "), root = " << rep.root << std::endl;
  return 0;
}

int cmd_experiment(const std::string& name, const std::string& cfg_path,
                   const std::string& out_json, const std::string& out_csv) {
  const auto cfg = load_or_default(cfg_path);
  experiments::RateTable table;
  if (name == "homog") {
    table = experiments::homog_counterexample_report(
        cli::mushroom_from(cfg), cfg.experiment.mlist, cfg.quadrature);
  } else if (name == "opnorm") {
    table = experiments::operator_norm_sweep(cli::mushroom_from(cfg),
                                             cfg.experiment.fields,
                                             cfg.experiment.mlist,
                                             cfg.quadrature);
  } else if (name == "rate7") {
    table = experiments::rate_section7(cli::mushroom_from(cfg),
                                       cfg.experiment.kmax, cfg.quadrature);
  } else if (name == "rate6") {
    table = experiments::rate_section6(cli::comb_from(cfg),
                                       cfg.experiment.kmax, cfg.experiment.p,
                                       cfg.experiment.q, cfg.quadrature);
  } else {
    throw ConfigError("unknown experiment '" + name + "'");
  }

  json j = io::rate_table_json(table);
  j["config"] = cli::config_to_json(cfg);
  write_json(out_json, j);
  if (!out_csv.empty())
    io::atomic_write(out_csv, config_header(cfg) + io::rate_table_csv(table));

  for (const auto& c : table.checks)
    std::cout << (c.pass ? "[ok]   " : "[FAIL] ") << c.name
              << (c.detail.empty() ? "" : " -- " + c.detail) << "\n";
  for (const auto& [fname, fit] : table.fits)
    std::cout << "fit " << fname << ": slope " << fit.slope
              << " residual " << fit.max_residual << "\n";
  return table.all_pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"computational lab for Sobolev extension domains"};
  app.require_subcommand(1);

  std::string cfg_path, out_json, out_csv, point, field = "const:1";
  std::string grid = "8,8,12", regions = "all", integrand = "lp";
  double p = 2.0, r = 0.5;
  int samples = 256;
  std::uint64_t seed = 1;

  auto* domain = app.add_subcommand("domain", "domain construction tools");
  domain->require_subcommand(1);
  auto* describe = domain->add_subcommand("describe", "emit derived geometry");
  describe->add_option("--config", cfg_path);
  describe->add_option("--out", out_json);
  auto* classify = domain->add_subcommand("classify", "classify a point");
  classify->add_option("--config", cfg_path);
  classify->add_option("--point", point)->required();
  classify->add_option("--out", out_json);
  auto* validate = domain->add_subcommand("validate", "placement checks");
  validate->add_option("--config", cfg_path);
  validate->add_option("--out", out_json);

  auto* cutoff = app.add_subcommand("cutoff", "cut-off function tools");
  auto* csample = cutoff->add_subcommand("sample", "sample Li/Lo to CSV");
  csample->add_option("--r", r);
  csample->add_option("--samples", samples);
  csample->add_option("--seed", seed);
  csample->add_option("--out", out_csv);

  auto* extend = app.add_subcommand("extend", "extension operator tools");
  auto* esample = extend->add_subcommand("sample", "sample E(u) on a grid");
  esample->add_option("--config", cfg_path);
  esample->add_option("--field", field);
  esample->add_option("--grid", grid);
  esample->add_option("--out", out_csv);

  auto* norm = app.add_subcommand("norm", "norm engine");
  norm->add_option("--config", cfg_path);
  norm->add_option("--field", field);
  norm->add_option("--integrand", integrand);
  norm->add_option("--p", p);
  norm->add_option("--regions", regions);
  norm->add_option("--out", out_json);
  norm->add_option("--csv", out_csv);

  auto* experiment = app.add_subcommand("experiment", "rate and boundedness experiments");
  experiment->require_subcommand(1);
  std::vector<CLI::App*> experiments_subs;
  for (const char* name : {"homog", "opnorm", "rate6", "rate7"}) {
    auto* sub = experiment->add_subcommand(name);
    sub->add_option("--config", cfg_path);
    sub->add_option("--out", out_json);
    sub->add_option("--csv", out_csv);
    experiments_subs.push_back(sub);
  }

  auto* config = app.add_subcommand("config", "configuration tools");
  config->require_subcommand(1);
  config->add_subcommand("print-defaults", "canonical default config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (config->got_subcommand("print-defaults"))
      return cmd_config_print_defaults();
    if (domain->got_subcommand("describe"))
      return cmd_domain_describe(cfg_path, out_json);
    if (domain->got_subcommand("classify"))
      return cmd_domain_classify(cfg_path, point, out_json);
    if (domain->got_subcommand("validate"))
      return cmd_domain_validate(cfg_path, out_json);
    if (cutoff->got_subcommand("sample"))
      return cmd_cutoff_sample(r, samples, seed, out_csv);
    if (extend->got_subcommand("sample"))
      return cmd_extend_sample(cfg_path, field, grid, out_csv);
    if (app.got_subcommand("norm"))
      return cmd_norm(cfg_path, field, integrand, p, regions, out_json,
                      out_csv);
    for (std::size_t i = 0; i < experiments_subs.size(); ++i)
      if (experiment->got_subcommand(experiments_subs[i]))
        return cmd_experiment(experiments_subs[i]->get_name(), cfg_path,
                              out_json, out_csv);
    std::cerr << "no subcommand dispatched" << std::endl;
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 1;
  } catch (const InvariantFailure& e) {
    std::cerr << "invariant failure: " << e.what() << std::endl;
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
