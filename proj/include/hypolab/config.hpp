#pragma once

#include <json.hpp>

#include <optional>
#include <string>

#include "hypolab/infomatrix.hpp"
#include "hypolab/kinetic.hpp"
#include "hypolab/particles.hpp"

namespace hypo {

using json = nlohmann::json;

struct KernelSpec {
  std::string name = "zero";  // zero | difference | separable
  double alpha = 0.0;         // difference amplitude
  double omega = 1.0;         // difference frequency
  double beta = 0.0;          // separable amplitude
  std::string g = "cos";      // separable factor
  KernelModel build() const;
};

struct PotentialSpec {
  std::string name = "zero";  // zero | cosine | quadratic
  double kappa = 0.0;
  PotentialModel build(const PositionDomain& domain) const;
};

struct DomainSpec {
  std::string kind = "torus";  // torus | line
  double period = kTwoPi;
  double half_width = 6.0;
  int dimension = 1;
  PositionDomain build() const;
};

struct DirectionSpec {
  bool search = false;
  DirectionPair fixed{1.0, 0.3};
  ZGridSpec z_grid;
};

struct BoundsSpec {
  std::optional<EigRange> wxx;  // overrides for the declared kernel/potential bounds
  std::optional<EigRange> wxy;
  std::optional<EigRange> u;
  double delta = 0.02;
};

struct PdeSpec {
  int nx = 64, nv = 64;
  double vmax = 6.0;
  double dt = 1e-3;
  double t_end = 2.0;
  int stride = 10;
  std::string transport = "semi_lagrangian";  // | sl_linear | upwind
  InitialConditionSpec initial;
  double fit_t0 = 1.0, fit_t1 = 5.0;
  std::vector<double> snapshot_times;
  SolverConfig build(const PositionDomain& domain, const DirectionPair& dir) const;
};

struct ParticleSpec {
  int n = 2000;
  double dt = 1e-3;
  double t_end = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> snapshot_times;
};

struct OutputSpec {
  std::string dir = "out";
  bool csv = true;
  bool json_reports = true;
};

struct ExperimentConfig {
  KernelSpec kernel;
  PotentialSpec potential;
  DomainSpec domain;
  DirectionSpec direction;
  GridSpec certification;
  BoundsSpec bounds;
  PdeSpec pde;
  ParticleSpec particles;
  OutputSpec outputs;

  /// Effective eigen-bound spec: config overrides, else builtin declarations.
  EigenBoundSpec effective_bounds() const;
};

ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);
json to_json(const ExperimentConfig& config);

}  // namespace hypo
