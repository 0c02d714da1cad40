#pragma once

#include "hypolab/model.hpp"
#include "hypolab/phase_grid.hpp"

namespace hypo {

/// N-particle state of the mean-field underdamped Langevin system (d = 1).
struct ParticleState {
  std::vector<double> x, v;
  double t = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t step_index = 0;  // counter position in the noise stream
};

struct SimParams {
  int n_particles = 1000;
  double dt = 1e-3;
  double t_end = 1.0;
  std::uint64_t seed = 0;
  int threads = 1;
  bool with_noise = true;
  // initial product Gaussian
  double x0 = 0.5, v0 = 0.5, sx = 0.5, sv = 1.0;
};

struct HistogramSnapshot {
  double t = 0.0;
  std::vector<double> x_density;          // per grid cell, integrates to ~1
  Eigen::ArrayXXd xv_density;             // nx x nv
};

struct SimResult {
  std::vector<HistogramSnapshot> snapshots;
  ParticleState final_state;
};

ParticleState sample_initial_state(const SimParams& params, const PositionDomain& domain);

/// Euler-Maruyama step:
///   x_i <- wrap(x_i + v_i dt)
///   v_i <- v_i - v_i dt - [mean_j grad_x W(x_i, x_j) + U'(x_i)] dt + sqrt(2 dt) xi_i.
/// The mean-field force includes the i = j term (O(1/N), zero for the builtins
/// at coincidence). Noise comes from the counter stream; noise_scale multiplies
/// the sqrt(2 dt) amplitude (0 turns the noise off for deterministic checks).
void em_step(ParticleState& state, const KernelModel& kernel, const PotentialModel& potential,
             const PositionDomain& domain, double dt, double noise_scale = 1.0,
             int threads = 1);

/// Mean-field force on every particle; exact O(N) reduction when the kernel
/// declares one, otherwise the O(N^2) pairwise sum (parallel over i).
std::vector<double> mean_field_force(const std::vector<double>& x, const KernelModel& kernel,
                                     int threads = 1, bool force_pairwise = false);

HistogramSnapshot histogram(const ParticleState& state, const PhaseGrid& grid);

SimResult simulate(const SimParams& params, const KernelModel& kernel,
                   const PotentialModel& potential, const PositionDomain& domain,
                   const PhaseGrid& grid, const std::vector<double>& snapshot_times);

}  // namespace hypo
