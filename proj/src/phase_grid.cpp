#include "hypolab/phase_grid.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace hypo {

PhaseGrid PhaseGrid::make(const PositionDomain& domain, int nx, int nv, double vmax) {
  if (domain.dimension != 1) throw ConfigError("phase grids require a 1-d position domain");
  if (nx < 4 || nv < 4) throw ConfigError("phase grid needs nx, nv >= 4");
  if (vmax < 5.0) throw ConfigError("vmax >= 5 required (Gaussian tail mass)");
  PhaseGrid g;
  g.domain = domain;
  g.nx = nx;
  g.nv = nv;
  g.vmax = vmax;
  g.hx = domain.width() / nx;
  g.hv = 2.0 * vmax / (nv - 1);
  g.xs.resize(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i)
    g.xs[static_cast<std::size_t>(i)] =
        domain.is_torus() ? i * g.hx : domain.lo() + (i + 0.5) * g.hx;
  g.vs.resize(static_cast<std::size_t>(nv));
  g.wv.resize(static_cast<std::size_t>(nv));
  for (int j = 0; j < nv; ++j) {
    g.vs[static_cast<std::size_t>(j)] = -vmax + j * g.hv;
    g.wv[static_cast<std::size_t>(j)] = (j == 0 || j == nv - 1) ? 0.5 * g.hv : g.hv;
  }
  return g;
}

double DensityField::mass() const {
  double m = 0.0;
  for (int j = 0; j < grid.nv; ++j)
    m += values.col(j).sum() * grid.wv[static_cast<std::size_t>(j)];
  return m * grid.hx;
}

void DensityField::normalize() {
  double m = mass();
  if (!(m > 0.0) || !std::isfinite(m))
    throw EvaluationError("density has nonpositive or non-finite mass " + std::to_string(m));
  values /= m;
}

std::vector<double> DensityField::x_marginal() const {
  std::vector<double> rho(static_cast<std::size_t>(grid.nx), 0.0);
  for (int i = 0; i < grid.nx; ++i) {
    double s = 0.0;
    for (int j = 0; j < grid.nv; ++j)
      s += values(i, j) * grid.wv[static_cast<std::size_t>(j)];
    rho[static_cast<std::size_t>(i)] = s;
  }
  return rho;
}

double l1_distance(const DensityField& f, const DensityField& g) {
  if (!f.grid.compatible(g.grid)) throw ConfigError("l1_distance needs matching grids");
  double s = 0.0;
  for (int j = 0; j < f.grid.nv; ++j)
    s += (f.values.col(j) - g.values.col(j)).abs().sum() * f.grid.wv[static_cast<std::size_t>(j)];
  return s * f.grid.hx;
}

void write_density_csv(const DensityField& f, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "wb");
  if (!out) throw Error("cannot open " + path + " for writing");
  std::fprintf(out, "x,v,f\n");
  for (int i = 0; i < f.grid.nx; ++i)
    for (int j = 0; j < f.grid.nv; ++j)
      std::fprintf(out, "%.17g,%.17g,%.17g\n", f.grid.xs[static_cast<std::size_t>(i)],
                   f.grid.vs[static_cast<std::size_t>(j)], f.values(i, j));
  std::fclose(out);
}

DensityField read_density_csv(const std::string& path, const PositionDomain& domain) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,v,f", 0) != 0)
    throw Error(path + ": expected header x,v,f");
  std::vector<double> xs, vs, fs;
  std::set<double> xset, vset;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double x, v, f;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &x, &v, &f) != 3)
      throw Error(path + ": bad row '" + line + "'");
    xs.push_back(x);
    vs.push_back(v);
    fs.push_back(f);
    xset.insert(x);
    vset.insert(v);
  }
  int nx = static_cast<int>(xset.size());
  int nv = static_cast<int>(vset.size());
  if (nx * nv != static_cast<int>(fs.size()))
    throw Error(path + ": rows do not form a tensor grid");
  double vmax = std::max(std::abs(*vset.begin()), std::abs(*vset.rbegin()));
  PhaseGrid grid = PhaseGrid::make(domain, nx, nv, vmax);
  DensityField out = DensityField::zero(grid);
  std::size_t r = 0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nv; ++j, ++r) {
      if (std::abs(xs[r] - grid.xs[static_cast<std::size_t>(i)]) > 1e-12 ||
          std::abs(vs[r] - grid.vs[static_cast<std::size_t>(j)]) > 1e-12)
        throw Error(path + ": node layout does not match the reconstructed grid");
      out.values(i, j) = fs[r];
    }
  return out;
}

}  // namespace hypo
