#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sobexlab/geometry.hpp"
#include "sobexlab/norms.hpp"

namespace sobexlab::cli {

struct DomainConfig {
  std::string type = "mushroom";  // mushroom | comb | cusp
  // mushroom
  int n = 3;
  double p = 5.0;
  double q = 1.0;
  int m = 12;
  std::string placement = "diagonal";
  // comb
  int kmax = 12;
  bool aspect_shrink = false;
  // cusp
  std::string profile = "power:2";
  std::vector<std::pair<double, double>> knots;  // for profile == "table"
};

struct ExperimentConfig {
  std::string name = "opnorm";  // homog | opnorm | rate6 | rate7
  std::vector<std::string> fields = {"const:1", "poly:1", "poly:2", "trig:1"};
  std::vector<int> mlist = {8, 12};
  int kmax = 11;
  // exponents for the comb experiment (the comb domain has no (p,q) itself)
  double p = 1.5;
  double q = 1.0;
};

struct OutputConfig {
  std::string json;
  std::string csv;
};

struct Config {
  DomainConfig domain;
  norms::QuadratureSpec quadrature;
  ExperimentConfig experiment;
  OutputConfig output;
};

Config default_config();

// Strict parser: unknown keys anywhere are rejected with ConfigError.
Config config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Config& cfg);
std::string config_to_string(const Config& cfg);  // canonical 2-space dump
Config load_config_file(const std::filesystem::path& path);

geometry::MushroomSpec mushroom_from(const Config& cfg);
geometry::CombSpec comb_from(const Config& cfg);
geometry::CuspSpec cusp_from(const Config& cfg);

}  // namespace sobexlab::cli
