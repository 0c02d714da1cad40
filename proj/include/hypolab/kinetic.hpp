#pragma once

#include "hypolab/equilibrium.hpp"

namespace hypo {

enum class TransportScheme { semi_lagrangian, sl_linear, upwind };

struct InitialConditionSpec {
  enum class Kind { equilibrium, gaussian, shifted_maxwellian, perturbed_equilibrium };
  Kind kind = Kind::gaussian;
  double x0 = 0.5, v0 = 0.5;   // gaussian center
  double sx = 0.5, sv = 1.0;   // gaussian widths
  double eps = 0.1;            // perturbation amplitude
  int mode = 1;                // perturbation mode number
};

struct SolverConfig {
  PhaseGrid grid;
  double dt = 1e-3;
  double t_end = 1.0;
  TransportScheme transport = TransportScheme::semi_lagrangian;
  int stride = 10;  // diagnostics every `stride` steps
  DirectionPair dir{1.0, 0.3};
  InitialConditionSpec initial;
};

struct DiagnosticsRow {
  double t = 0.0;
  double mass = 0.0;   // quadrature mass before renormalization
  double E = 0.0;
  double DE_a = 0.0;
  double DE_z = 0.0;
  double DE_az = 0.0;
  double L1 = 0.0;     // to equilibrium
  double min_f = 0.0;
};

struct DiagnosticsSeries {
  std::vector<DiagnosticsRow> rows;
  double e_equilibrium = 0.0;
  double de_az_equilibrium = 0.0;
  bool energy_monotone = true;   // flag: E never rose by more than 1e-8 between samples
  double max_energy_increase = 0.0;
};

DensityField make_initial_condition(const InitialConditionSpec& spec, const PhaseGrid& grid,
                                    const Equilibrium& eq);

/// One Strang step: half x-transport, half v-force (convolution frozen),
/// full Chang-Cooper velocity collision, mirrored half-steps. Renormalizes.
DensityField step(const DensityField& f, const KernelModel& kernel,
                  const PotentialModel& potential, double dt,
                  TransportScheme scheme = TransportScheme::semi_lagrangian);

DiagnosticsSeries run(const SolverConfig& config, const KernelModel& kernel,
                      const PotentialModel& potential, const Equilibrium& eq,
                      std::vector<std::pair<double, DensityField>>* snapshots = nullptr,
                      const std::vector<double>& snapshot_times = {});

/// max over interior rows of |dE/dt + DE_a| / max(DE_a, 1e-12), dE/dt by
/// centered differences in t.
double check_energy_identity(const DiagnosticsSeries& series);

struct DissipationVerdict {
  bool applicable = false;       // lambda > 0
  bool de_decay_holds = false;   // DE_az(t) <= DE_az(0) e^{-2 lambda t} (1+tol)
  bool energy_bound_holds = false;  // E-E_inf <= e^{-2 lambda t} [DE_az(0)-DE_az_inf]/(2 lambda) (1+tol)
  double worst_de_ratio = 0.0;
  double worst_energy_ratio = 0.0;
};

DissipationVerdict check_dissipation_inequality(const DiagnosticsSeries& series, double lambda,
                                                double tol = 0.1);

enum class RateField { E_gap, DE_az, L1 };

struct RateFit {
  double rate = 0.0;       // positive decay constant
  double r_squared = 0.0;
};

/// Least-squares slope of log(field) vs t on [t0, t1]; field floored at 1e-14.
RateFit fit_rate(const DiagnosticsSeries& series, RateField field, double t0, double t1);

}  // namespace hypo
