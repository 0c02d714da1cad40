#include "hypolab/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace hypo {

namespace {

Vec point1(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

// ---------------------------------------------------------------------------
// 1-d semi-Lagrangian interpolation for a constant shift
// ---------------------------------------------------------------------------

// Limited Hermite slope at the center node of the 5-point window
// (f2m, f1m, f0, f1p, f2p). Candidate is the fourth-order centered estimate.
// Monotone data gets Fritsch-Carlson limiting (interpolant stays in the node
// range); at data extrema the slope is kept for accuracy but clamped so every
// Bernstein coefficient of the adjacent cells stays nonnegative (|m| <= 3 f0).
// Positivity is therefore scheme-level, with no clipping of the output.
inline double limited_slope(double f2m, double f1m, double f0, double f1p, double f2p) {
  double dmm = f1m - f2m, dm = f0 - f1m, dp = f1p - f0, dpp = f2p - f1p;
  double c = (-dpp + 7.0 * dp + 7.0 * dm - dmm) / 12.0;
  if (dm * dp <= 0.0) {
    double cap = std::min(3.0 * f0, 2.0 * std::max(std::abs(dm), std::abs(dp)));
    return std::clamp(c, -cap, cap);
  }
  if (c * dm <= 0.0) c = 0.5 * (dm + dp);
  double lim = 3.0 * std::min(std::abs(dm), std::abs(dp));
  return std::copysign(std::min(std::abs(c), lim), c);
}

inline double hermite(double f0, double f1, double m0, double m1, double t) {
  double t2 = t * t;
  double t3 = t2 * t;
  return f0 * (2.0 * t3 - 3.0 * t2 + 1.0) + m0 * (t3 - 2.0 * t2 + t) +
         f1 * (-2.0 * t3 + 3.0 * t2) + m1 * (t3 - t2);
}

// shift_cells = s / h: out[k] = f(node_k - s), periodic indexing
void shift_periodic(const double* in, double* out, int n, double shift_cells, bool cubic) {
  double p = shift_cells - std::floor(shift_cells / n) * n;  // into [0, n)
  int off = static_cast<int>(std::floor(p));
  double theta = p - off;
  auto at = [&](int k) { return in[((k % n) + n) % n]; };
  if (theta == 0.0) {
    for (int k = 0; k < n; ++k) out[k] = at(k - off);
    return;
  }
  for (int k = 0; k < n; ++k) {
    int i0 = k - off - 1;  // f(node_k - s) lands in cell [i0, i0+1]
    double fmm = at(i0 - 2), fm = at(i0 - 1), f0 = at(i0), f1 = at(i0 + 1), f2 = at(i0 + 2),
           f3 = at(i0 + 3);
    double t = 1.0 - theta;
    if (!cubic) {
      out[k] = f0 * (1.0 - t) + f1 * t;
    } else {
      double m0 = limited_slope(fmm, fm, f0, f1, f2);
      double m1 = limited_slope(fm, f0, f1, f2, f3);
      out[k] = hermite(f0, f1, m0, m1, t);
    }
  }
}

// bounded axis: values vanish outside [0, n-1]
void shift_bounded(const double* in, double* out, int n, double shift_cells, bool cubic) {
  auto at = [&](int k) { return (k < 0 || k >= n) ? 0.0 : in[k]; };
  for (int k = 0; k < n; ++k) {
    double pos = k - shift_cells;
    if (pos <= -1.0 || pos >= n) {
      out[k] = 0.0;
      continue;
    }
    int i0 = static_cast<int>(std::floor(pos));
    double t = pos - i0;
    double fmm = at(i0 - 2), fm = at(i0 - 1), f0 = at(i0), f1 = at(i0 + 1), f2 = at(i0 + 2),
           f3 = at(i0 + 3);
    if (!cubic) {
      out[k] = f0 * (1.0 - t) + f1 * t;
    } else {
      double m0 = limited_slope(fmm, fm, f0, f1, f2);
      double m1 = limited_slope(fm, f0, f1, f2, f3);
      out[k] = hermite(f0, f1, m0, m1, t);
    }
  }
}

// ---------------------------------------------------------------------------
// Chang-Cooper velocity collision: d_t f = d_v (v f + d_v f), backward Euler,
// zero-flux boundaries. The flux J_{j+1/2} = P_j f_{j+1} - Q_j f_j with
// P = (w + E)/h, Q = E/h, E = w/expm1(w), w = v_{j+1/2} h makes the discrete
// Gaussian e^{-v^2/2} an exact steady state.
// ---------------------------------------------------------------------------

struct ChangCooper {
  int nv;
  double hv;
  std::vector<double> p, q;  // per interface j+1/2, j = 0..nv-2

  ChangCooper(const PhaseGrid& grid) : nv(grid.nv), hv(grid.hv) {
    p.resize(static_cast<std::size_t>(nv - 1));
    q.resize(static_cast<std::size_t>(nv - 1));
    for (int j = 0; j + 1 < nv; ++j) {
      double vmid = 0.5 * (grid.vs[static_cast<std::size_t>(j)] +
                           grid.vs[static_cast<std::size_t>(j) + 1]);
      double w = vmid * hv;
      double e = std::abs(w) < 1e-12 ? 1.0 - 0.5 * w : w / std::expm1(w);
      q[static_cast<std::size_t>(j)] = e / hv;
      p[static_cast<std::size_t>(j)] = (w + e) / hv;
    }
  }

  // solve (I - dt D) fn = f on one v column (Thomas algorithm)
  void solve(const double* f, double* fn, double dt, std::vector<double>& lo,
             std::vector<double>& di, std::vector<double>& up, std::vector<double>& rhs) const {
    double r = dt / hv;
    for (int j = 0; j < nv; ++j) {
      double diag = 1.0;
      if (j < nv - 1) diag += r * q[static_cast<std::size_t>(j)];
      if (j > 0) diag += r * p[static_cast<std::size_t>(j - 1)];
      di[static_cast<std::size_t>(j)] = diag;
      up[static_cast<std::size_t>(j)] = (j < nv - 1) ? -r * p[static_cast<std::size_t>(j)] : 0.0;
      lo[static_cast<std::size_t>(j)] = (j > 0) ? -r * q[static_cast<std::size_t>(j - 1)] : 0.0;
      rhs[static_cast<std::size_t>(j)] = f[j];
    }
    for (int j = 1; j < nv; ++j) {
      double m = lo[static_cast<std::size_t>(j)] / di[static_cast<std::size_t>(j - 1)];
      di[static_cast<std::size_t>(j)] -= m * up[static_cast<std::size_t>(j - 1)];
      rhs[static_cast<std::size_t>(j)] -= m * rhs[static_cast<std::size_t>(j - 1)];
    }
    fn[nv - 1] = rhs[static_cast<std::size_t>(nv - 1)] / di[static_cast<std::size_t>(nv - 1)];
    for (int j = nv - 2; j >= 0; --j)
      fn[j] = (rhs[static_cast<std::size_t>(j)] -
               up[static_cast<std::size_t>(j)] * fn[j + 1]) /
              di[static_cast<std::size_t>(j)];
  }
};

std::vector<double> force_field(const DensityField& f, const KernelModel& kernel,
                                const PotentialModel& potential) {
  const PhaseGrid& g = f.grid;
  std::vector<double> force(static_cast<std::size_t>(g.nx), 0.0);
  auto rho = f.x_marginal();
  for (int i = 0; i < g.nx; ++i) {
    double s = potential.grad(point1(g.xs[static_cast<std::size_t>(i)]))[0];
    if (!kernel.is_zero) {
      double conv = 0.0;
      for (int j = 0; j < g.nx; ++j)
        conv += kernel.grad_x(point1(g.xs[static_cast<std::size_t>(i)]),
                              point1(g.xs[static_cast<std::size_t>(j)]))[0] *
                rho[static_cast<std::size_t>(j)];
      s += conv * g.hx;
    }
    force[static_cast<std::size_t>(i)] = s;
  }
  return force;
}

void transport_half(DensityField& f, double dt_half, TransportScheme scheme,
                    std::vector<double>& row, std::vector<double>& out) {
  const PhaseGrid& g = f.grid;
  const bool cubic = scheme == TransportScheme::semi_lagrangian;
  for (int j = 0; j < g.nv; ++j) {
    double v = g.vs[static_cast<std::size_t>(j)];
    for (int i = 0; i < g.nx; ++i) row[static_cast<std::size_t>(i)] = f.values(i, j);
    if (scheme == TransportScheme::upwind) {
      double nu = v * dt_half / g.hx;
      for (int i = 0; i < g.nx; ++i) {
        int im = (i + g.nx - 1) % g.nx;
        int ip = (i + 1) % g.nx;
        double dfl = row[static_cast<std::size_t>(i)] - row[static_cast<std::size_t>(im)];
        double dfr = row[static_cast<std::size_t>(ip)] - row[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] =
            row[static_cast<std::size_t>(i)] - (nu > 0.0 ? nu * dfl : nu * dfr);
      }
    } else {
      shift_periodic(row.data(), out.data(), g.nx, v * dt_half / g.hx, cubic);
    }
    for (int i = 0; i < g.nx; ++i) f.values(i, j) = out[static_cast<std::size_t>(i)];
  }
}

void force_half(DensityField& f, const std::vector<double>& force, double dt_half,
                TransportScheme scheme, std::vector<double>& col, std::vector<double>& out) {
  const PhaseGrid& g = f.grid;
  const bool cubic = scheme != TransportScheme::sl_linear;
  for (int i = 0; i < g.nx; ++i) {
    // d_t f = G d_v f: f(v) <- f(v + G dt), i.e. shift by -G dt in node units
    double shift = -force[static_cast<std::size_t>(i)] * dt_half / g.hv;
    for (int j = 0; j < g.nv; ++j) col[static_cast<std::size_t>(j)] = f.values(i, j);
    shift_bounded(col.data(), out.data(), g.nv, shift, cubic);
    for (int j = 0; j < g.nv; ++j) f.values(i, j) = out[static_cast<std::size_t>(j)];
  }
}

struct StepResult {
  DensityField f;
  double mass_before_renorm = 0.0;
};

StepResult step_impl(const DensityField& f0, const KernelModel& kernel,
                     const PotentialModel& potential, double dt, TransportScheme scheme) {
  const PhaseGrid& g = f0.grid;
  if (scheme == TransportScheme::upwind && dt * g.vmax / g.hx > 1.0)
    throw ConfigError("upwind transport violates the CFL guard dt*vmax/hx <= 1");

  DensityField f = f0;
  auto force = force_field(f, kernel, potential);  // frozen for the whole step

  std::vector<double> row(static_cast<std::size_t>(g.nx)), rout(static_cast<std::size_t>(g.nx));
  std::vector<double> col(static_cast<std::size_t>(g.nv)), cout_(static_cast<std::size_t>(g.nv));
  std::vector<double> lo(static_cast<std::size_t>(g.nv)), di(static_cast<std::size_t>(g.nv)),
      up(static_cast<std::size_t>(g.nv)), rhs(static_cast<std::size_t>(g.nv));
  static thread_local std::unique_ptr<ChangCooper> cc;
  static thread_local double cc_hv = -1.0;
  static thread_local int cc_nv = -1;
  static thread_local double cc_vmax = -1.0;
  if (!cc || cc_hv != g.hv || cc_nv != g.nv || cc_vmax != g.vmax) {
    cc = std::make_unique<ChangCooper>(g);
    cc_hv = g.hv;
    cc_nv = g.nv;
    cc_vmax = g.vmax;
  }

  transport_half(f, 0.5 * dt, scheme, row, rout);
  force_half(f, force, 0.5 * dt, scheme, col, cout_);
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.nv; ++j) col[static_cast<std::size_t>(j)] = f.values(i, j);
    cc->solve(col.data(), cout_.data(), dt, lo, di, up, rhs);
    for (int j = 0; j < g.nv; ++j) f.values(i, j) = cout_[static_cast<std::size_t>(j)];
  }
  force_half(f, force, 0.5 * dt, scheme, col, cout_);
  transport_half(f, 0.5 * dt, scheme, row, rout);

  StepResult res;
  res.mass_before_renorm = f.mass();
  if (!std::isfinite(res.mass_before_renorm) || res.mass_before_renorm <= 0.0)
    throw InstabilityError("step produced non-finite or nonpositive mass at t-step");
  if (f.values.minCoeff() < -1e-12)
    throw InstabilityError("step produced negative density");
  f.values /= res.mass_before_renorm;
  res.f = std::move(f);
  return res;
}

}  // namespace

DensityField make_initial_condition(const InitialConditionSpec& spec, const PhaseGrid& grid,
                                    const Equilibrium& eq) {
  using Kind = InitialConditionSpec::Kind;
  DensityField f = DensityField::zero(grid);
  switch (spec.kind) {
    case Kind::equilibrium:
      f = eq.f_inf;
      break;
    case Kind::gaussian: {
      for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.nv; ++j) {
          double dx = grid.xs[static_cast<std::size_t>(i)] - spec.x0;
          if (grid.domain.is_torus()) {
            double p = grid.domain.period();
            dx = std::remainder(dx, p);
          }
          double dv = grid.vs[static_cast<std::size_t>(j)] - spec.v0;
          f.values(i, j) = std::exp(-0.5 * dx * dx / (spec.sx * spec.sx) -
                                    0.5 * dv * dv / (spec.sv * spec.sv));
        }
      break;
    }
    case Kind::shifted_maxwellian: {
      for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.nv; ++j) {
          double dv = grid.vs[static_cast<std::size_t>(j)] - spec.v0;
          f.values(i, j) = std::exp(-0.5 * dv * dv / (spec.sv * spec.sv));
        }
      break;
    }
    case Kind::perturbed_equilibrium: {
      double width = grid.domain.width();
      for (int i = 0; i < grid.nx; ++i) {
        double phase = kTwoPi * spec.mode * (grid.xs[static_cast<std::size_t>(i)] - grid.domain.lo()) / width;
        double factor = 1.0 + spec.eps * std::cos(phase);
        for (int j = 0; j < grid.nv; ++j) f.values(i, j) = eq.f_inf.values(i, j) * factor;
      }
      break;
    }
  }
  f.normalize();
  return f;
}

DensityField step(const DensityField& f, const KernelModel& kernel,
                  const PotentialModel& potential, double dt, TransportScheme scheme) {
  return step_impl(f, kernel, potential, dt, scheme).f;
}

DiagnosticsSeries run(const SolverConfig& config, const KernelModel& kernel,
                      const PotentialModel& potential, const Equilibrium& eq,
                      std::vector<std::pair<double, DensityField>>* snapshots,
                      const std::vector<double>& snapshot_times) {
  if (config.dt <= 0.0 || config.t_end <= 0.0) throw ConfigError("run needs dt, t_end > 0");
  if (config.stride < 1) throw ConfigError("diagnostic stride must be >= 1");
  if (!config.grid.compatible(eq.f_inf.grid))
    throw ConfigError("equilibrium grid does not match the solver grid");

  DiagnosticsSeries series;
  series.e_equilibrium = free_energy(eq.f_inf, kernel, potential);
  series.de_az_equilibrium = fisher_a(eq.f_inf, kernel, potential) +
                             fisher_z(eq.f_inf, kernel, potential, config.dir);

  DensityField f = make_initial_condition(config.initial, config.grid, eq);
  auto sample = [&](double t, double mass) {
    DiagnosticsRow row;
    row.t = t;
    row.mass = mass;
    row.E = free_energy(f, kernel, potential);
    row.DE_a = fisher_a(f, kernel, potential);
    row.DE_z = fisher_z(f, kernel, potential, config.dir);
    row.DE_az = row.DE_a + row.DE_z;
    row.L1 = l1_distance(f, eq.f_inf);
    row.min_f = f.min_value();
    if (!series.rows.empty()) {
      double rise = row.E - series.rows.back().E;
      series.max_energy_increase = std::max(series.max_energy_increase, rise);
      if (rise > 1e-8) series.energy_monotone = false;
    }
    series.rows.push_back(row);
  };

  std::size_t next_snap = 0;
  auto maybe_snapshot = [&](double t) {
    if (!snapshots) return;
    while (next_snap < snapshot_times.size() && t >= snapshot_times[next_snap] - 1e-12) {
      snapshots->emplace_back(t, f);
      ++next_snap;
    }
  };

  sample(0.0, f.mass());
  maybe_snapshot(0.0);
  const auto n_steps = static_cast<long>(std::llround(config.t_end / config.dt));
  for (long k = 1; k <= n_steps; ++k) {
    StepResult res;
    try {
      res = step_impl(f, kernel, potential, config.dt, config.transport);
    } catch (const InstabilityError& ex) {
      throw InstabilityError(std::string(ex.what()) + " at t = " +
                             std::to_string(k * config.dt));
    }
    f = std::move(res.f);
    double t = k * config.dt;
    if (k % config.stride == 0 || k == n_steps) sample(t, res.mass_before_renorm);
    maybe_snapshot(t);
  }
  return series;
}

double check_energy_identity(const DiagnosticsSeries& series) {
  const auto& rows = series.rows;
  if (rows.size() < 3) throw ConfigError("check_energy_identity needs at least 3 rows");
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < rows.size(); ++k) {
    double dt = rows[k + 1].t - rows[k - 1].t;
    double dedt = (rows[k + 1].E - rows[k - 1].E) / dt;
    double defect = std::abs(dedt + rows[k].DE_a) / std::max(rows[k].DE_a, 1e-12);
    worst = std::max(worst, defect);
  }
  return worst;
}

DissipationVerdict check_dissipation_inequality(const DiagnosticsSeries& series, double lambda,
                                                double tol) {
  DissipationVerdict verdict;
  if (lambda <= 0.0) return verdict;  // inapplicable
  verdict.applicable = true;
  verdict.de_decay_holds = true;
  verdict.energy_bound_holds = true;
  const double de0 = series.rows.front().DE_az;
  const double de_gap0 = de0 - series.de_az_equilibrium;
  for (const auto& row : series.rows) {
    double decay = std::exp(-2.0 * lambda * row.t);
    double de_bound = de0 * decay * (1.0 + tol);
    double de_ratio = row.DE_az / std::max(de_bound, 1e-300);
    verdict.worst_de_ratio = std::max(verdict.worst_de_ratio, de_ratio);
    if (row.DE_az > de_bound + 1e-12) verdict.de_decay_holds = false;

    double e_gap = row.E - series.e_equilibrium;
    double e_bound = decay * de_gap0 / (2.0 * lambda) * (1.0 + tol);
    double e_ratio = e_gap / std::max(e_bound, 1e-300);
    verdict.worst_energy_ratio = std::max(verdict.worst_energy_ratio, e_ratio);
    if (e_gap > e_bound + 1e-12) verdict.energy_bound_holds = false;
  }
  return verdict;
}

RateFit fit_rate(const DiagnosticsSeries& series, RateField field, double t0, double t1) {
  std::vector<double> ts, ys;
  for (const auto& row : series.rows) {
    if (row.t < t0 || row.t > t1) continue;
    double y = 0.0;
    switch (field) {
      case RateField::E_gap:
        y = row.E - series.e_equilibrium;
        break;
      case RateField::DE_az:
        y = row.DE_az;
        break;
      case RateField::L1:
        y = row.L1;
        break;
    }
    ts.push_back(row.t);
    ys.push_back(std::log(std::max(y, 1e-14)));
  }
  if (ts.size() < 4) throw ConfigError("fit_rate needs at least 4 samples in the window");
  double n = static_cast<double>(ts.size());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sy += ys[i];
    stt += ts[i] * ts[i];
    sty += ts[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  double denom = n * stt - st * st;
  double slope = (n * sty - st * sy) / denom;
  double ss_res = 0.0, ss_tot = 0.0;
  double intercept = (sy - slope * st) / n;
  double mean_y = sy / n;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double pred = intercept + slope * ts[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  RateFit fit;
  fit.rate = -slope;
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace hypo
