#include "hypolab/particles.hpp"

#include <cmath>

#include "hypolab/rng.hpp"

namespace hypo {

namespace {

constexpr std::uint64_t kStreamInit = 0x1001;
constexpr std::uint64_t kStreamStep = 0x2002;

Vec point1(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

}  // namespace

ParticleState sample_initial_state(const SimParams& params, const PositionDomain& domain) {
  if (params.n_particles < 2) throw ConfigError("particle system needs N >= 2");
  ParticleState st;
  st.seed = params.seed;
  st.x.resize(static_cast<std::size_t>(params.n_particles));
  st.v.resize(static_cast<std::size_t>(params.n_particles));
  for (int i = 0; i < params.n_particles; ++i) {
    double gx = normal_draw(params.seed, kStreamInit, static_cast<std::uint64_t>(i), 0);
    double gv = normal_draw(params.seed, kStreamInit, static_cast<std::uint64_t>(i), 1);
    st.x[static_cast<std::size_t>(i)] = domain.wrap1(params.x0 + params.sx * gx);
    st.v[static_cast<std::size_t>(i)] = params.v0 + params.sv * gv;
  }
  return st;
}

std::vector<double> mean_field_force(const std::vector<double>& x, const KernelModel& kernel,
                                     int threads, bool force_pairwise) {
  const auto n = static_cast<std::int64_t>(x.size());
  std::vector<double> force(x.size(), 0.0);
  if (kernel.is_zero) return force;

  if (kernel.mean_force && !force_pairwise) {
    const auto& mf = *kernel.mean_force;
    std::vector<double> stats(static_cast<std::size_t>(std::max(1, mf.n_stats)), 0.0);
    for (double xi : x) mf.accumulate(xi, stats.data());
    for (auto& s : stats) s /= static_cast<double>(n);
    parallel_chunks(n, threads, [&](std::int64_t b, std::int64_t e, int) {
      for (std::int64_t i = b; i < e; ++i)
        force[static_cast<std::size_t>(i)] = mf.force(x[static_cast<std::size_t>(i)], stats.data());
    });
    return force;
  }

  parallel_chunks(n, threads, [&](std::int64_t b, std::int64_t e, int) {
    Vec xi(1), xj(1);
    for (std::int64_t i = b; i < e; ++i) {
      double s = 0.0;
      xi[0] = x[static_cast<std::size_t>(i)];
      for (std::int64_t j = 0; j < n; ++j) {
        xj[0] = x[static_cast<std::size_t>(j)];
        s += kernel.grad_x(xi, xj)[0];
      }
      force[static_cast<std::size_t>(i)] = s / static_cast<double>(n);
    }
  });
  return force;
}

void em_step(ParticleState& state, const KernelModel& kernel, const PotentialModel& potential,
             const PositionDomain& domain, double dt, double noise_scale, int threads) {
  if (dt <= 0.0) throw ConfigError("em_step requires dt > 0");
  const auto n = static_cast<std::int64_t>(state.x.size());
  auto force = mean_field_force(state.x, kernel, threads);
  const double amp = noise_scale * std::sqrt(2.0 * dt);
  const std::uint64_t counter = state.step_index;
  const std::uint64_t seed = state.seed;

  bool bad = false;
  parallel_chunks(n, threads, [&](std::int64_t b, std::int64_t e, int) {
    Vec xp(1);
    for (std::int64_t i = b; i < e; ++i) {
      auto idx = static_cast<std::size_t>(i);
      double x_old = state.x[idx];
      double v_old = state.v[idx];
      xp[0] = x_old;
      double drift = force[idx] + potential.grad(xp)[0];
      double noise =
          amp != 0.0 ? amp * normal_draw(seed, kStreamStep, counter, static_cast<std::uint64_t>(i))
                     : 0.0;
      state.x[idx] = domain.wrap1(x_old + v_old * dt);
      state.v[idx] = v_old - v_old * dt - drift * dt + noise;
      if (!std::isfinite(state.x[idx]) || !std::isfinite(state.v[idx])) bad = true;
    }
  });
  if (bad) throw InstabilityError("em_step produced non-finite state at t = " +
                                  std::to_string(state.t + dt));
  state.t += dt;
  state.step_index += 1;
}

HistogramSnapshot histogram(const ParticleState& state, const PhaseGrid& grid) {
  HistogramSnapshot snap;
  snap.t = state.t;
  snap.x_density.assign(static_cast<std::size_t>(grid.nx), 0.0);
  snap.xv_density = Eigen::ArrayXXd::Zero(grid.nx, grid.nv);
  const double lo = grid.domain.lo();
  const auto n = static_cast<double>(state.x.size());
  for (std::size_t p = 0; p < state.x.size(); ++p) {
    // cells are centered on the grid nodes
    double u = (state.x[p] - lo) / grid.hx;
    if (grid.domain.is_torus()) u += 0.5;
    int i = static_cast<int>(std::floor(u));
    if (grid.domain.is_torus())
      i = ((i % grid.nx) + grid.nx) % grid.nx;
    else if (i < 0 || i >= grid.nx)
      continue;
    snap.x_density[static_cast<std::size_t>(i)] += 1.0;
    int j = static_cast<int>(std::floor((state.v[p] + grid.vmax) / grid.hv + 0.5));
    if (j >= 0 && j < grid.nv) snap.xv_density(i, j) += 1.0;
  }
  for (auto& c : snap.x_density) c /= n * grid.hx;
  snap.xv_density /= n * grid.hx * grid.hv;
  return snap;
}

SimResult simulate(const SimParams& params, const KernelModel& kernel,
                   const PotentialModel& potential, const PositionDomain& domain,
                   const PhaseGrid& grid, const std::vector<double>& snapshot_times) {
  SimResult result;
  ParticleState state = sample_initial_state(params, domain);
  const auto n_steps = static_cast<long>(std::llround(params.t_end / params.dt));
  const double noise = params.with_noise ? 1.0 : 0.0;

  std::size_t next = 0;
  auto maybe_snapshot = [&](double t) {
    while (next < snapshot_times.size() && t >= snapshot_times[next] - 1e-12) {
      result.snapshots.push_back(histogram(state, grid));
      ++next;
    }
  };
  maybe_snapshot(0.0);
  for (long k = 1; k <= n_steps; ++k) {
    em_step(state, kernel, potential, domain, params.dt, noise, params.threads);
    maybe_snapshot(state.t);
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace hypo
