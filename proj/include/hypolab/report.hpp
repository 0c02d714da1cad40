#pragma once

#include "hypolab/config.hpp"

namespace hypo {

/// Certificate JSON: {lambda, z1, z2, argmin, feasible, grid, checks}.
json certificate_report(const SpectralCertificate& cert, const std::vector<CheckResult>& checks);

json check_to_json(const CheckResult& check);

/// All applicable closed-form checkers for a configured model.
std::vector<CheckResult> run_analytic_checks(const ExperimentConfig& config);

struct EvolveArtifacts {
  DiagnosticsSeries series;
  double lambda = 0.0;
  double energy_defect = 0.0;
  DissipationVerdict dissipation;
  RateFit e_gap_fit, de_az_fit;
  double c_w = 0.0;
};

json evolve_report(const EvolveArtifacts& artifacts);

void write_diagnostics_csv(const DiagnosticsSeries& series, const std::string& path);
void write_equilibrium_csv(const Equilibrium& eq, const PhaseGrid& grid,
                           const std::string& csv_path, const std::string& meta_path);
void write_histogram_csv(const HistogramSnapshot& snap, const PhaseGrid& grid,
                         const std::string& x_path, const std::string& xv_path);
void write_text(const std::string& path, const std::string& text);

}  // namespace hypo
