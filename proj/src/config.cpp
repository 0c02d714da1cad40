#include "hypolab/config.hpp"

#include <fstream>

namespace hypo {

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("field '") + key + "': " + ex.what());
  }
}

std::optional<EigRange> get_range(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  auto arr = j.at(key);
  if (!arr.is_array() || arr.size() != 2)
    throw ConfigError(std::string("field '") + key + "' must be [lo, hi]");
  return EigRange(arr[0].get<double>(), arr[1].get<double>());
}

void require_finite_number(double v, const char* key) {
  if (!std::isfinite(v)) throw ConfigError(std::string("field '") + key + "' is not finite");
}

InitialConditionSpec parse_initial(const json& j) {
  InitialConditionSpec spec;
  std::string kind = get_or<std::string>(j, "kind", "gaussian");
  if (kind == "equilibrium")
    spec.kind = InitialConditionSpec::Kind::equilibrium;
  else if (kind == "gaussian")
    spec.kind = InitialConditionSpec::Kind::gaussian;
  else if (kind == "shifted_maxwellian")
    spec.kind = InitialConditionSpec::Kind::shifted_maxwellian;
  else if (kind == "perturbed_equilibrium")
    spec.kind = InitialConditionSpec::Kind::perturbed_equilibrium;
  else
    throw ConfigError("unknown initial condition kind '" + kind + "'");
  spec.x0 = get_or(j, "x0", spec.x0);
  spec.v0 = get_or(j, "v0", spec.v0);
  spec.sx = get_or(j, "sx", spec.sx);
  spec.sv = get_or(j, "sv", spec.sv);
  spec.eps = get_or(j, "eps", spec.eps);
  spec.mode = get_or(j, "mode", spec.mode);
  return spec;
}

json initial_to_json(const InitialConditionSpec& s) {
  const char* kind = "gaussian";
  switch (s.kind) {
    case InitialConditionSpec::Kind::equilibrium: kind = "equilibrium"; break;
    case InitialConditionSpec::Kind::gaussian: kind = "gaussian"; break;
    case InitialConditionSpec::Kind::shifted_maxwellian: kind = "shifted_maxwellian"; break;
    case InitialConditionSpec::Kind::perturbed_equilibrium: kind = "perturbed_equilibrium"; break;
  }
  return {{"kind", kind}, {"x0", s.x0}, {"v0", s.v0}, {"sx", s.sx},
          {"sv", s.sv},   {"eps", s.eps}, {"mode", s.mode}};
}

}  // namespace

KernelModel KernelSpec::build() const {
  if (name == "zero") return make_zero_kernel();
  if (name == "difference") return make_difference_kernel(alpha, omega);
  if (name == "separable") return make_separable_kernel(beta, g);
  throw ConfigError("unknown kernel '" + name + "'");
}

PotentialModel PotentialSpec::build(const PositionDomain& domain) const {
  if (name == "zero") return make_zero_potential();
  if (name == "cosine") return make_cosine_potential(kappa);
  if (name == "quadratic") {
    if (domain.is_torus())
      throw ConfigError("quadratic potential requires a line domain");
    return make_quadratic_potential(kappa);
  }
  throw ConfigError("unknown potential '" + name + "'");
}

PositionDomain DomainSpec::build() const {
  if (kind == "torus") return PositionDomain::torus(period, dimension);
  if (kind == "line") return PositionDomain::line(half_width, dimension);
  throw ConfigError("unknown domain kind '" + kind + "'");
}

SolverConfig PdeSpec::build(const PositionDomain& domain, const DirectionPair& dir) const {
  SolverConfig cfg;
  cfg.grid = PhaseGrid::make(domain, nx, nv, vmax);
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.stride = stride;
  cfg.dir = dir;
  cfg.initial = initial;
  if (transport == "semi_lagrangian")
    cfg.transport = TransportScheme::semi_lagrangian;
  else if (transport == "sl_linear")
    cfg.transport = TransportScheme::sl_linear;
  else if (transport == "upwind")
    cfg.transport = TransportScheme::upwind;
  else
    throw ConfigError("unknown transport scheme '" + transport + "'");
  return cfg;
}

EigenBoundSpec ExperimentConfig::effective_bounds() const {
  EigenBoundSpec spec;
  KernelModel k = kernel.build();
  PositionDomain dom = domain.build();
  PotentialModel p = potential.build(dom);
  spec.wxx_range = bounds.wxx ? bounds.wxx : k.wxx_bounds;
  spec.wxy_range = bounds.wxy ? bounds.wxy : k.wxy_bounds;
  spec.u_range = bounds.u ? bounds.u : p.hess_bounds;
  return spec;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  ExperimentConfig cfg;

  if (j.contains("model")) {
    const auto& m = j.at("model");
    if (m.contains("kernel")) {
      const auto& k = m.at("kernel");
      cfg.kernel.name = get_or<std::string>(k, "name", "zero");
      cfg.kernel.alpha = get_or(k, "alpha", 0.0);
      cfg.kernel.omega = get_or(k, "omega", 1.0);
      cfg.kernel.beta = get_or(k, "beta", 0.0);
      cfg.kernel.g = get_or<std::string>(k, "g", "cos");
      require_finite_number(cfg.kernel.alpha, "alpha");
      require_finite_number(cfg.kernel.beta, "beta");
    }
    if (m.contains("potential")) {
      const auto& p = m.at("potential");
      cfg.potential.name = get_or<std::string>(p, "name", "zero");
      cfg.potential.kappa = get_or(p, "kappa", 0.0);
      require_finite_number(cfg.potential.kappa, "kappa");
    }
    if (m.contains("domain")) {
      const auto& d = m.at("domain");
      cfg.domain.kind = get_or<std::string>(d, "kind", "torus");
      cfg.domain.period = get_or(d, "period", kTwoPi);
      cfg.domain.half_width = get_or(d, "half_width", 6.0);
      cfg.domain.dimension = get_or(d, "dimension", 1);
    }
  }

  if (j.contains("direction")) {
    const auto& d = j.at("direction");
    if (d.contains("search")) {
      cfg.direction.search = true;
      const auto& s = d.at("search");
      auto read_axis = [&](const char* key, double& lo, double& hi, int& n) {
        auto arr = s.at(key);
        if (!arr.is_array() || arr.size() != 3)
          throw ConfigError(std::string("search axis '") + key + "' must be [lo, hi, n]");
        lo = arr[0].get<double>();
        hi = arr[1].get<double>();
        n = arr[2].get<int>();
      };
      read_axis("z1", cfg.direction.z_grid.z1_lo, cfg.direction.z_grid.z1_hi,
                cfg.direction.z_grid.n1);
      read_axis("z2", cfg.direction.z_grid.z2_lo, cfg.direction.z_grid.z2_hi,
                cfg.direction.z_grid.n2);
    } else {
      cfg.direction.fixed.z1 = get_or(d, "z1", 1.0);
      cfg.direction.fixed.z2 = get_or(d, "z2", 0.3);
      require_finite_number(cfg.direction.fixed.z1, "z1");
      require_finite_number(cfg.direction.fixed.z2, "z2");
    }
  }

  if (j.contains("certification"))
    cfg.certification.points_per_axis =
        get_or(j.at("certification"), "points_per_axis", cfg.certification.points_per_axis);

  if (j.contains("bounds")) {
    const auto& b = j.at("bounds");
    cfg.bounds.wxx = get_range(b, "wxx");
    cfg.bounds.wxy = get_range(b, "wxy");
    cfg.bounds.u = get_range(b, "u");
    cfg.bounds.delta = get_or(b, "delta", cfg.bounds.delta);
  }

  if (j.contains("pde")) {
    const auto& p = j.at("pde");
    cfg.pde.nx = get_or(p, "nx", cfg.pde.nx);
    cfg.pde.nv = get_or(p, "nv", cfg.pde.nv);
    cfg.pde.vmax = get_or(p, "vmax", cfg.pde.vmax);
    cfg.pde.dt = get_or(p, "dt", cfg.pde.dt);
    cfg.pde.t_end = get_or(p, "t_end", cfg.pde.t_end);
    cfg.pde.stride = get_or(p, "stride", cfg.pde.stride);
    cfg.pde.transport = get_or<std::string>(p, "transport", cfg.pde.transport);
    if (p.contains("initial")) cfg.pde.initial = parse_initial(p.at("initial"));
    if (p.contains("fit_window")) {
      auto w = p.at("fit_window");
      if (!w.is_array() || w.size() != 2) throw ConfigError("fit_window must be [t0, t1]");
      cfg.pde.fit_t0 = w[0].get<double>();
      cfg.pde.fit_t1 = w[1].get<double>();
    }
    cfg.pde.snapshot_times = get_or(p, "snapshot_times", cfg.pde.snapshot_times);
    require_finite_number(cfg.pde.dt, "pde.dt");
    require_finite_number(cfg.pde.t_end, "pde.t_end");
  }

  if (j.contains("particles")) {
    const auto& p = j.at("particles");
    cfg.particles.n = get_or(p, "n", cfg.particles.n);
    cfg.particles.dt = get_or(p, "dt", cfg.particles.dt);
    cfg.particles.t_end = get_or(p, "t_end", cfg.particles.t_end);
    cfg.particles.seed = get_or<std::uint64_t>(p, "seed", cfg.particles.seed);
    cfg.particles.snapshot_times = get_or(p, "snapshot_times", cfg.particles.snapshot_times);
  }

  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    cfg.outputs.dir = get_or<std::string>(o, "dir", cfg.outputs.dir);
    cfg.outputs.csv = get_or(o, "csv", cfg.outputs.csv);
    cfg.outputs.json_reports = get_or(o, "json", cfg.outputs.json_reports);
  }

  // construction validates names, ranges, and domain compatibility
  PositionDomain dom = cfg.domain.build();
  cfg.kernel.build();
  cfg.potential.build(dom);
  if (!cfg.direction.search && cfg.direction.fixed.z1 == 0.0)
    throw ConfigError("direction z1 must be nonzero (metric is singular at z1 = 0)");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ConfigError(path + ": " + ex.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["model"]["kernel"] = {{"name", c.kernel.name}, {"alpha", c.kernel.alpha},
                          {"omega", c.kernel.omega}, {"beta", c.kernel.beta},
                          {"g", c.kernel.g}};
  j["model"]["potential"] = {{"name", c.potential.name}, {"kappa", c.potential.kappa}};
  j["model"]["domain"] = {{"kind", c.domain.kind}, {"period", c.domain.period},
                          {"half_width", c.domain.half_width},
                          {"dimension", c.domain.dimension}};
  if (c.direction.search) {
    j["direction"]["search"] = {
        {"z1", {c.direction.z_grid.z1_lo, c.direction.z_grid.z1_hi, c.direction.z_grid.n1}},
        {"z2", {c.direction.z_grid.z2_lo, c.direction.z_grid.z2_hi, c.direction.z_grid.n2}}};
  } else {
    j["direction"] = {{"z1", c.direction.fixed.z1}, {"z2", c.direction.fixed.z2}};
  }
  j["certification"] = {{"points_per_axis", c.certification.points_per_axis}};
  json b;
  if (c.bounds.wxx) b["wxx"] = {c.bounds.wxx->lo, c.bounds.wxx->hi};
  if (c.bounds.wxy) b["wxy"] = {c.bounds.wxy->lo, c.bounds.wxy->hi};
  if (c.bounds.u) b["u"] = {c.bounds.u->lo, c.bounds.u->hi};
  b["delta"] = c.bounds.delta;
  j["bounds"] = b;
  j["pde"] = {{"nx", c.pde.nx},
              {"nv", c.pde.nv},
              {"vmax", c.pde.vmax},
              {"dt", c.pde.dt},
              {"t_end", c.pde.t_end},
              {"stride", c.pde.stride},
              {"transport", c.pde.transport},
              {"initial", initial_to_json(c.pde.initial)},
              {"fit_window", {c.pde.fit_t0, c.pde.fit_t1}},
              {"snapshot_times", c.pde.snapshot_times}};
  j["particles"] = {{"n", c.particles.n},
                    {"dt", c.particles.dt},
                    {"t_end", c.particles.t_end},
                    {"seed", c.particles.seed},
                    {"snapshot_times", c.particles.snapshot_times}};
  j["outputs"] = {{"dir", c.outputs.dir}, {"csv", c.outputs.csv},
                  {"json", c.outputs.json_reports}};
  return j;
}

}  // namespace hypo
