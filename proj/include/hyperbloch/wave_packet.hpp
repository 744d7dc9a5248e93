#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hyperbloch/hyperbolic_plane.hpp"

// Compactly supported C^2 wave functions on the disk: finite sums of bump
// terms A (1 - t^2)^3 supported on hyperbolic balls, where t^2 is the
// squared scaled hyperbolic distance from the term's center,
//
//   t^2 = sinh^2(d(z, c)/2) / sinh^2(r/2)   (curvature -1 units).
//
// sinh^2(d/2) = |z - c|^2 / ((1-|z|^2)(1-|c|^2)) is rational in the chart, so
// values together with first and second chart derivatives are available in
// closed form; all three vanish continuously at the support boundary.

namespace hyperbloch::geom {

struct PacketTerm {
  DiskPoint center;
  std::complex<double> coefficient;
  double radius = 0.5;  // hyperbolic ball radius in the packet's curvature units
};

// Value, gradient and Hessian of a scalar field at a chart point.
struct ChartJet {
  std::complex<double> v{};
  std::complex<double> dx{}, dy{};
  std::complex<double> dxx{}, dxy{}, dyy{};
};

class WavePacket {
 public:
  WavePacket(std::vector<PacketTerm> terms, Curvature curvature)
      : terms_(std::move(terms)), curvature_(curvature) {
    for (const auto& t : terms_)
      if (t.radius <= 0.0)
        throw std::invalid_argument("WavePacket: radius must be positive");
  }

  const std::vector<PacketTerm>& terms() const { return terms_; }
  Curvature curvature() const { return curvature_; }

  std::complex<double> value(const DiskPoint& z) const { return jet(z).v; }

  ChartJet jet(const DiskPoint& z) const {
    ChartJet out;
    for (const auto& term : terms_) accumulate_term(term, z, out);
    return out;
  }

  // max over terms of dist(x0, center) + radius, in the packet's curvature
  // units.
  double support_radius(const DiskPoint& x0) const {
    double r = 0.0;
    for (const auto& t : terms_)
      r = std::max(r, distance(x0, t.center, curvature_) + t.radius);
    return r;
  }

  // Quick reject: true if the term balls cannot reach z.
  bool possibly_nonzero(const DiskPoint& z) const {
    for (const auto& t : terms_)
      if (distance(z, t.center, curvature_) < t.radius) return true;
    return false;
  }

 private:
  void accumulate_term(const PacketTerm& term, const DiskPoint& zp,
                       ChartJet& out) const {
    const std::complex<double> z = zp.z;
    const std::complex<double> c = term.center.z;
    const double x = z.real(), y = z.imag();
    const double cx = c.real(), cy = c.imag();
    const double cf = 1.0 - std::norm(c);

    // t^2 = Q / Q_r with Q = |z-c|^2 / ((1-|z|^2)(1-|c|^2)).
    const double r1 = term.radius * (curvature_ == Curvature::kMinusOne
                                         ? 1.0
                                         : 2.0);  // curvature -1 units
    const double sh = std::sinh(0.5 * r1);
    const double q_r = sh * sh;

    const double n = (x - cx) * (x - cx) + (y - cy) * (y - cy);
    const double d = (1.0 - x * x - y * y) * cf;
    const double q = n / d;
    const double tau = q / q_r;
    if (tau >= 1.0) return;

    const double n_x = 2.0 * (x - cx), n_y = 2.0 * (y - cy);
    const double d_x = -2.0 * x * cf, d_y = -2.0 * y * cf;
    const double d_xx = -2.0 * cf, d_yy = -2.0 * cf;

    const double q_x = (n_x - q * d_x) / d;
    const double q_y = (n_y - q * d_y) / d;
    const double q_xx = (2.0 - 2.0 * q_x * d_x - q * d_xx) / d;
    const double q_yy = (2.0 - 2.0 * q_y * d_y - q * d_yy) / d;
    const double q_xy = (0.0 - q_x * d_y - q_y * d_x - 0.0) / d;

    const double one = 1.0 - tau;
    const double phi = one * one * one;
    const double dphi = -3.0 * one * one / q_r;    // d(phi)/dQ
    const double ddphi = 6.0 * one / (q_r * q_r);  // d^2(phi)/dQ^2

    const std::complex<double> a = term.coefficient;
    out.v += a * phi;
    out.dx += a * dphi * q_x;
    out.dy += a * dphi * q_y;
    out.dxx += a * (ddphi * q_x * q_x + dphi * q_xx);
    out.dyy += a * (ddphi * q_y * q_y + dphi * q_yy);
    out.dxy += a * (ddphi * q_x * q_y + dphi * q_xy);
  }

  std::vector<PacketTerm> terms_;
  Curvature curvature_;
};

// Laplace-Beltrami operator in the disk chart (positive-spectrum sign):
// -s (1-|z|^2)^2 (d_11 + d_22) with s = 1 at curvature -4 and s = 1/4 at
// curvature -1.
inline double laplacian_metric_factor(std::complex<double> z, Curvature c) {
  const double s = (c == Curvature::kMinusFour) ? 1.0 : 0.25;
  const double f = 1.0 - std::norm(z);
  return -s * f * f;
}

inline std::complex<double> laplacian_from_hessian(
    std::complex<double> sum_second_derivatives, std::complex<double> z,
    Curvature c) {
  return laplacian_metric_factor(z, c) * sum_second_derivatives;
}

inline std::complex<double> laplacian(const WavePacket& psi,
                                      const DiskPoint& z) {
  const ChartJet j = psi.jet(z);
  return laplacian_from_hessian(j.dxx + j.dyy, z.z, psi.curvature());
}

// Directional chart derivative along the complex direction w.
inline std::complex<double> directional_derivative(const ChartJet& j,
                                                   std::complex<double> w) {
  return j.dx * w.real() + j.dy * w.imag();
}

}  // namespace hyperbloch::geom
