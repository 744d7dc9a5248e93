#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hyperbloch/bloch_hyperbolic.hpp"
#include "hyperbloch/hyperbolic_plane.hpp"

// Uniform periodic magnetic fields on the disk and the twisted hyperbolic
// Bloch transform. The rotationally symmetric potential
//
//   a = i f(|z|^2) (x dy - y dx),   f(t) = s b / (1 - t),
//
// (s = 2 at curvature -1, s = 1/2 at curvature -4) satisfies da = i b vol
// identically and a(0) = 0. For every deck transformation the difference
// eta_gamma = gamma^* a - a is closed, hence exact on the disk, and the
// letter factors u_l(x) = exp(-int_{x0}^{x} eta_l) are path independent.
// Automorphy factors of words are built from letter factors through the
// cocycle rule u_{l w}(x) = u_l(w x) u_w(x); this is well defined on the
// group precisely when the flux through the fundamental cell is an integer,
// which is enforced up front.

namespace hyperbloch::magnetic {

using geom::Curvature;
using geom::DiskPoint;
using geom::FuchsianGroup;
using geom::FundamentalCell;
using geom::MobiusMap;
using geom::WavePacket;
using group::GroupElement;
using linalg::Matrix;

class GaugePotential {
 public:
  GaugePotential(double field_strength, Curvature curvature)
      : b_(field_strength), curvature_(curvature) {}

  double field_strength() const { return b_; }
  Curvature curvature() const { return curvature_; }

  // Chart coefficients (a_1, a_2) with a = a_1 dx_1 + a_2 dx_2; both purely
  // imaginary.
  std::pair<std::complex<double>, std::complex<double>> coefficients(
      std::complex<double> z) const {
    const double f = radial_profile(std::norm(z));
    return {std::complex<double>(0.0, -f * z.imag()),
            std::complex<double>(0.0, f * z.real())};
  }

  // a evaluated on the chart vector w (complex shorthand for (Re w, Im w)).
  std::complex<double> pair_with(std::complex<double> z,
                                 std::complex<double> w) const {
    const auto [a1, a2] = coefficients(z);
    return a1 * w.real() + a2 * w.imag();
  }

  // da = curvature_coefficient dx ^ dy; equal to i b vol pointwise.
  std::complex<double> curvature_coefficient(std::complex<double> z) const {
    const double t = std::norm(z);
    const double f = radial_profile(t);
    const double fp = radial_profile_derivative(t);
    return std::complex<double>(0.0, 2.0 * (f + t * fp));
  }

 private:
  double radial_profile(double t) const {
    const double s = geom::length_scale(curvature_) == 2.0 ? 2.0 : 0.5;
    return s * b_ / (1.0 - t);
  }
  double radial_profile_derivative(double t) const {
    const double s = geom::length_scale(curvature_) == 2.0 ? 2.0 : 0.5;
    const double d = 1.0 - t;
    return s * b_ / (d * d);
  }

  double b_;
  Curvature curvature_;
};

inline GaugePotential uniform_potential(double field_strength,
                                        Curvature curvature) {
  return GaugePotential(field_strength, curvature);
}

// FLUX = (1/2 pi i) integral_C da, computed as a boundary integral over the
// geodesic sides of the cell (Stokes); Gauss-Legendre nodes per side resolve
// the analytic integrand to near machine precision.
inline double flux(const GaugePotential& a, const FundamentalCell& cell) {
  if (cell.vertices.empty())
    throw std::invalid_argument("flux: cell has no corner data");
  // 32-point Gauss-Legendre on [0,1].
  static const std::array<double, 16> kNodes = {
      0.0483076656877383162, 0.1444719615827964934, 0.2392873622521370745,
      0.3318686022821276497, 0.4213512761306353454, 0.5068999089322293900,
      0.5877157572407623290, 0.6630442669302152009, 0.7321821187402896804,
      0.7944837959679424069, 0.8493676137325699701, 0.8963211557660521240,
      0.9349060759377396892, 0.9647622555875064307, 0.9856115115452683354,
      0.9972638618494815635};
  static const std::array<double, 16> kWeights = {
      0.0965400885147278006, 0.0956387200792748594, 0.0938443990808045654,
      0.0911738786957638847, 0.0876520930044038111, 0.0833119242269467552,
      0.0781938957870703065, 0.0723457941088485062, 0.0658222227763618468,
      0.0586840934785355471, 0.0509980592623761762, 0.0428358980222266807,
      0.0342738629130214331, 0.0253920653092620595, 0.0162743947309056706,
      0.0070186100094700966};
  std::complex<double> loop = 0.0;
  const std::size_t nv = cell.vertices.size();
  for (std::size_t i = 0; i < nv; ++i) {
    const auto seg = geom::geodesic_segment(cell.vertices[i],
                                            cell.vertices[(i + 1) % nv]);
    std::complex<double> side = 0.0;
    for (std::size_t q = 0; q < kNodes.size(); ++q) {
      for (const double u : {0.5 - 0.5 * kNodes[q], 0.5 + 0.5 * kNodes[q]}) {
        const std::complex<double> z = seg.point(u);
        const std::complex<double> v = seg.velocity(u);
        side += 0.5 * kWeights[q] * a.pair_with(z, v);
      }
    }
    loop += side;
  }
  return (loop / std::complex<double>(0.0, 2.0 * 3.14159265358979323846))
      .real();
}

namespace detail {

// Adaptive Romberg quadrature of a smooth complex integrand on [0,1].
inline std::complex<double> romberg(
    const std::function<std::complex<double>(double)>& f, double tol) {
  constexpr int kMaxLevel = 14;
  std::array<std::array<std::complex<double>, kMaxLevel>, kMaxLevel> r{};
  double h = 1.0;
  r[0][0] = 0.5 * (f(0.0) + f(1.0));
  for (int level = 1; level < kMaxLevel; ++level) {
    h *= 0.5;
    std::complex<double> acc = 0.0;
    const int points = 1 << (level - 1);
    for (int k = 0; k < points; ++k) acc += f((2 * k + 1) * h);
    r[level][0] = 0.5 * r[level - 1][0] + h * acc;
    double pow4 = 1.0;
    for (int m = 1; m <= level; ++m) {
      pow4 *= 4.0;
      r[level][m] = r[level][m - 1] +
                    (r[level][m - 1] - r[level - 1][m - 1]) / (pow4 - 1.0);
    }
    if (level >= 3 &&
        std::abs(r[level][level] - r[level - 1][level - 1]) < tol)
      return r[level][level];
  }
  return r[kMaxLevel - 1][kMaxLevel - 1];
}

}  // namespace detail

// Magnetic context over a fixed group and cell; verifies flux quantization on
// construction. Non-integral flux admits no line bundle and is rejected;
// the escape hatch exists only for continuity studies of the letter factors
// at fixed word spellings.
class MagneticTwist {
 public:
  MagneticTwist(GaugePotential a, std::shared_ptr<const FuchsianGroup> group,
                std::shared_ptr<const FundamentalCell> cell,
                double path_tol = 1e-9, bool require_integral_flux = true)
      : a_(a), group_(std::move(group)), cell_(std::move(cell)),
        path_tol_(path_tol) {
    flux_ = flux(a_, *cell_);
    const double k = std::round(flux_);
    if (require_integral_flux &&
        std::abs(flux_ - k) > 1e-6 * (1.0 + std::abs(k)))
      throw std::invalid_argument(
          "MagneticTwist: flux is not integral, no line bundle exists");
  }

  const GaugePotential& potential() const { return a_; }
  double cell_flux() const { return flux_; }

  // Letter automorphy factor u_l(x) = exp(-int_{x0 -> x} [l^* a - a]) along
  // the straight chart segment; path independent since the integrand is
  // closed on the simply connected disk.
  std::complex<double> letter_factor(const MobiusMap& map,
                                     const DiskPoint& x) const {
    const std::complex<double> target = x.z;
    const auto integrand = [&](double t) -> std::complex<double> {
      const std::complex<double> z = t * target;
      const std::complex<double> v = target;  // d z / d t
      const std::complex<double> gz = map.apply_complex(z);
      const std::complex<double> gv = map.derivative(z) * v;
      return a_.pair_with(gz, gv) - a_.pair_with(z, v);
    };
    const std::complex<double> integral = detail::romberg(integrand, path_tol_);
    return std::exp(-integral);
  }

  // Automorphy factor of a word, composed right-to-left through the cocycle
  // identity u_{l w}(x) = u_l(w x) u_w(x).
  std::complex<double> automorphy(const GroupElement& gamma,
                                  const DiskPoint& x) const {
    std::complex<double> acc = 1.0;
    DiskPoint point = x;
    const auto& word = gamma.word();
    for (std::size_t j = word.size(); j-- > 0;) {
      const group::Letter l = word[j];
      MobiusMap m = group_->generator(l.generator_index());
      if (l.is_inverse()) m = m.inverse();
      acc *= letter_factor(m, point);
      point = m.apply(point);
    }
    return acc;
  }

  const FuchsianGroup& fuchsian() const { return *group_; }
  const FundamentalCell& cell() const { return *cell_; }

 private:
  GaugePotential a_;
  std::shared_ptr<const FuchsianGroup> group_;
  std::shared_ptr<const FundamentalCell> cell_;
  double path_tol_;
  double flux_ = 0.0;
};

// Twisted hyperbolic Bloch transform at a cell point:
// sum_gamma u_gamma(y) psi(gamma y) rho(gamma). At b = 0 every u is exactly
// one and the sum reproduces transform_h term by term.
inline Matrix twisted_transform(const WavePacket& psi,
                                const hbt::GaugeFrame& frame,
                                const MagneticTwist& twist,
                                const DiskPoint& y) {
  if (!frame.geometry().cell->contains_closed(y.z, 1e-9))
    throw std::invalid_argument("twisted_transform: point is not in the cell");
  const auto plan = hbt::detail::make_plan(psi, frame.geometry());
  const int n = frame.rep().rank();
  Matrix acc = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < plan.words.size(); ++k) {
    const std::complex<double> v = psi.value(plan.maps[k].apply(y));
    if (v == 0.0) continue;
    if (plan.on_shell[k])
      throw std::runtime_error(
          "twisted_transform: support reaches the cutoff shell");
    const std::complex<double> u = twist.automorphy(plan.words[k], y);
    acc += (u * v) * reps::evaluate(frame.rep(), plan.words[k]);
  }
  return acc;
}

}  // namespace hyperbloch::magnetic
