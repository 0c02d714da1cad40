#include "hypolab/report.hpp"

#include <cstdio>
#include <fstream>

namespace hypo {

json check_to_json(const CheckResult& check) {
  json j;
  j["name"] = check.name;
  j["applicable"] = check.applicable;
  j["feasible"] = check.feasible;
  json vals = json::object();
  for (const auto& [k, v] : check.values) vals[k] = v;
  j["values"] = vals;
  j["note"] = check.note;
  return j;
}

json certificate_report(const SpectralCertificate& cert, const std::vector<CheckResult>& checks) {
  json j;
  j["lambda"] = cert.lambda;
  j["z1"] = cert.dir.z1;
  j["z2"] = cert.dir.z2;
  j["argmin"] = {cert.x.size() ? cert.x[0] : 0.0, cert.y.size() ? cert.y[0] : 0.0};
  j["feasible"] = cert.feasible;
  j["grid"] = {{"points_per_axis", cert.grid.points_per_axis}};
  json arr = json::array();
  for (const auto& c : checks) arr.push_back(check_to_json(c));
  j["checks"] = arr;
  return j;
}

std::vector<CheckResult> run_analytic_checks(const ExperimentConfig& config) {
  std::vector<CheckResult> out;
  EigenBoundSpec bounds = config.effective_bounds();
  DirectionPair dir = config.direction.fixed;

  // case (1) needs the V = U + W Hessian eigenvalue range
  EigenBoundSpec case1 = bounds;
  if (bounds.wxx_range && bounds.u_range) {
    case1.wxx_range = EigRange(bounds.wxx_range->lo + bounds.u_range->lo,
                               bounds.wxx_range->hi + bounds.u_range->hi);
  } else {
    case1.wxx_range.reset();
  }
  out.push_back(check_case1_gershgorin(dir, case1));

  {
    CheckResult res;
    if (!bounds.u_range || !bounds.wxx_range || !bounds.wxy_range) {
      res.name = "case2_schur";
      res.applicable = false;
      res.note = "skipped: bounds not declared";
    } else if (bounds.wxy_range->max_abs() != 0.0) {
      res.name = "case2_schur";
      res.applicable = false;
      res.note = "skipped: requires grad^2_xy W = 0";
    } else {
      double lo = bounds.u_range->lo + bounds.wxx_range->lo;
      double hi = bounds.u_range->hi + bounds.wxx_range->hi;
      res = check_case2_schur(dir.z2, lo, hi, config.bounds.delta, dir.z1);
    }
    out.push_back(res);
  }

  if (bounds.u_range) {
    double lam_u = compute_lambda_U(dir, bounds.u_range->lo, bounds.u_range->hi);
    auto [lo, hi] = check_example2_interval(dir, lam_u);
    CheckResult interval;
    interval.name = "example2_interval";
    interval.values = {{"lambda_U", lam_u}, {"wxx_lo", lo}, {"wxx_hi", hi}};
    if (bounds.wxx_range) {
      interval.feasible = bounds.wxx_range->lo > lo && bounds.wxx_range->hi < hi;
      double wxx_rep_lo = bounds.wxx_range->lo;
      double wxx_rep_hi = bounds.wxx_range->hi;
      double wxy_abs = bounds.wxy_range ? bounds.wxy_range->max_abs() : 0.0;
      CheckResult chain_lo = check_example2_schur_chain(dir, lam_u, wxx_rep_lo, wxy_abs);
      CheckResult chain_hi = check_example2_schur_chain(dir, lam_u, wxx_rep_hi, wxy_abs);
      CheckResult chain = chain_lo.feasible && !chain_hi.feasible ? chain_hi : chain_lo;
      chain.feasible = chain_lo.feasible && chain_hi.feasible;
      out.push_back(interval);
      out.push_back(chain);
    } else {
      interval.note = "wxx bounds not declared; interval reported only";
      out.push_back(interval);
    }
  } else {
    CheckResult skipped;
    skipped.name = "example2_interval";
    skipped.applicable = false;
    skipped.note = "skipped: bounds not declared";
    out.push_back(skipped);
  }

  if (config.potential.name == "zero" && config.kernel.name == "difference") {
    double wdiff = std::abs(config.kernel.alpha) * config.kernel.omega * config.kernel.omega;
    out.push_back(check_remark3(dir, wdiff));
  }
  return out;
}

json evolve_report(const EvolveArtifacts& a) {
  json j;
  j["lambda"] = a.lambda;
  j["c_w"] = a.c_w;
  j["energy_identity_max_defect"] = a.energy_defect;
  j["dissipation"] = {{"applicable", a.dissipation.applicable},
                      {"de_decay_holds", a.dissipation.de_decay_holds},
                      {"energy_bound_holds", a.dissipation.energy_bound_holds},
                      {"worst_de_ratio", a.dissipation.worst_de_ratio},
                      {"worst_energy_ratio", a.dissipation.worst_energy_ratio}};
  j["rates"] = {{"e_gap", {{"rate", a.e_gap_fit.rate}, {"r_squared", a.e_gap_fit.r_squared}}},
                {"de_az", {{"rate", a.de_az_fit.rate}, {"r_squared", a.de_az_fit.r_squared}}}};
  j["energy_monotone"] = a.series.energy_monotone;
  j["max_energy_increase"] = a.series.max_energy_increase;
  j["e_equilibrium"] = a.series.e_equilibrium;
  j["de_az_equilibrium"] = a.series.de_az_equilibrium;
  // reconstructed Corollary prefactor, not a paper value
  if (a.lambda > 0.0 && a.c_w < 1.0)
    j["l1_prefactor_derived"] = std::sqrt(1.0 / (a.lambda * (1.0 - a.c_w)));
  j["rows"] = a.series.rows.size();
  return j;
}

void write_diagnostics_csv(const DiagnosticsSeries& series, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "wb");
  if (!out) throw Error("cannot open " + path + " for writing");
  std::fprintf(out, "t,mass,E,DE_a,DE_z,DE_az,L1,min_f\n");
  for (const auto& r : series.rows)
    std::fprintf(out, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.mass, r.E,
                 r.DE_a, r.DE_z, r.DE_az, r.L1, r.min_f);
  std::fclose(out);
}

void write_equilibrium_csv(const Equilibrium& eq, const PhaseGrid& grid,
                           const std::string& csv_path, const std::string& meta_path) {
  std::FILE* out = std::fopen(csv_path.c_str(), "wb");
  if (!out) throw Error("cannot open " + csv_path + " for writing");
  std::fprintf(out, "x,rho_inf\n");
  for (int i = 0; i < grid.nx; ++i)
    std::fprintf(out, "%.17g,%.17g\n", grid.xs[static_cast<std::size_t>(i)],
                 eq.rho_inf[static_cast<std::size_t>(i)]);
  std::fclose(out);
  json meta = {{"Z", eq.Z}, {"residual", eq.residual}, {"iterations", eq.iterations}};
  write_text(meta_path, meta.dump(2) + "\n");
}

void write_histogram_csv(const HistogramSnapshot& snap, const PhaseGrid& grid,
                         const std::string& x_path, const std::string& xv_path) {
  std::FILE* out = std::fopen(x_path.c_str(), "wb");
  if (!out) throw Error("cannot open " + x_path + " for writing");
  std::fprintf(out, "x,density\n");
  for (int i = 0; i < grid.nx; ++i)
    std::fprintf(out, "%.17g,%.17g\n", grid.xs[static_cast<std::size_t>(i)],
                 snap.x_density[static_cast<std::size_t>(i)]);
  std::fclose(out);
  out = std::fopen(xv_path.c_str(), "wb");
  if (!out) throw Error("cannot open " + xv_path + " for writing");
  std::fprintf(out, "x,v,density\n");
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.nv; ++j)
      std::fprintf(out, "%.17g,%.17g,%.17g\n", grid.xs[static_cast<std::size_t>(i)],
                   grid.vs[static_cast<std::size_t>(j)], snap.xv_density(i, j));
  std::fclose(out);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
}

}  // namespace hypo
