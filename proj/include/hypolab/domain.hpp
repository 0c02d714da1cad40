#pragma once

#include <Eigen/Core>

#include "hypolab/common.hpp"

namespace hypo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class DomainKind { torus, line };

/// Position domain per axis: a torus of given period, or a symmetric line
/// box [-half_width, half_width] used as a sampling/truncation window.
struct PositionDomain {
  DomainKind kind = DomainKind::torus;
  int dimension = 1;
  double extent = kTwoPi;  // period (torus) or half_width (line)

  static PositionDomain torus(double period = kTwoPi, int d = 1) {
    if (period <= 0.0) throw ConfigError("torus period must be positive");
    if (d < 1) throw ConfigError("dimension must be >= 1");
    return {DomainKind::torus, d, period};
  }
  static PositionDomain line(double half_width, int d = 1) {
    if (half_width <= 0.0) throw ConfigError("line half_width must be positive");
    if (d < 1) throw ConfigError("dimension must be >= 1");
    return {DomainKind::line, d, half_width};
  }

  bool is_torus() const { return kind == DomainKind::torus; }
  double period() const { return extent; }
  double half_width() const { return extent; }
  /// Total width of the sampling box per axis.
  double width() const { return is_torus() ? extent : 2.0 * extent; }
  double lo() const { return is_torus() ? 0.0 : -extent; }
  double hi() const { return is_torus() ? extent : extent; }

  /// Torus coordinates wrap into [0, period); line coordinates pass through.
  double wrap1(double x) const {
    if (!is_torus()) return x;
    double p = extent;
    double w = std::fmod(x, p);
    if (w < 0.0) w += p;
    if (w >= p) w = 0.0;  // fmod can land exactly on p after the add
    return w;
  }
  Vec wrap(Vec x) const {
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = wrap1(x[i]);
    return x;
  }
};

/// The constants (z1, z2) behind the direction matrices
///   a = (0; I_d),  z = (z1 I_d; z2 I_d)  (both 2d x d).
struct DirectionPair {
  double z1 = 1.0;
  double z2 = 0.3;

  Mat a_matrix(int d) const {
    Mat a = Mat::Zero(2 * d, d);
    a.bottomRows(d) = Mat::Identity(d, d);
    return a;
  }
  Mat z_matrix(int d) const {
    Mat z(2 * d, d);
    z.topRows(d) = z1 * Mat::Identity(d, d);
    z.bottomRows(d) = z2 * Mat::Identity(d, d);
    return z;
  }
  /// aa^T + zz^T = [[z1^2 I, z1 z2 I], [z1 z2 I, (1+z2^2) I]].
  Mat metric_block(int d) const {
    Mat m = Mat::Zero(2 * d, 2 * d);
    Mat id = Mat::Identity(d, d);
    m.topLeftCorner(d, d) = z1 * z1 * id;
    m.topRightCorner(d, d) = z1 * z2 * id;
    m.bottomLeftCorner(d, d) = z1 * z2 * id;
    m.bottomRightCorner(d, d) = (1.0 + z2 * z2) * id;
    return m;
  }
};

inline Mat metric_block(const DirectionPair& dir, int d) { return dir.metric_block(d); }

}  // namespace hypo
