#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <set>
#include <stdexcept>
#include <vector>

#include "hyperbloch/bloch_abstract.hpp"
#include "hyperbloch/hyperbolic_plane.hpp"
#include "hyperbloch/rep_variety.hpp"
#include "hyperbloch/wave_packet.hpp"

// The hyperbolic Bloch transform
//
//   (B psi)([rho])(y) = sum_{x in pi^{-1}(y)} psi(x) U(x),
//
// realized in the piecewise-constant gauge U(x) = rho(gamma) for
// x in gamma(C), so the equivariance U(gamma x) = rho(gamma) U(x) holds by
// construction and the covariant derivative on cell interiors is the plain
// chart derivative. Preimage sums run over the words found by a pruned
// breadth-first search of the tiling (tiles form chains along geodesics, so
// pruning against a corridor ball around the support is exact); word length
// is capped by the geometry cutoff and a wave function whose support touches
// the cap is rejected rather than silently truncated.

namespace hyperbloch::hbt {

using geom::Curvature;
using geom::DiskPoint;
using geom::FuchsianGroup;
using geom::FundamentalCell;
using geom::MobiusMap;
using geom::WavePacket;
using group::GroupElement;
using linalg::Matrix;
using reps::RepEnsemble;
using reps::UnitaryRep;

// Shared geometric context: the Fuchsian group, a quadrature-equipped
// Dirichlet cell, the word-length cap for preimage sums, and the ball radius
// used by unfold().
struct BlochGeometry {
  std::shared_ptr<const FuchsianGroup> group;
  std::shared_ptr<const FundamentalCell> cell;
  int cutoff = 8;        // preimage word-length cap
  int unfold_radius = 3; // ball radius for unfolding points near the cell
};

inline BlochGeometry make_geometry(int genus, Curvature curvature, double h,
                                   int cutoff = 8, int unfold_radius = 3) {
  auto group = std::make_shared<FuchsianGroup>(geom::construct_group(genus, curvature));
  auto cell = std::make_shared<FundamentalCell>(
      geom::quadrature(*group, geom::dirichlet_cell(*group), h));
  return {std::move(group), std::move(cell), cutoff, unfold_radius};
}

class GaugeFrame {
 public:
  GaugeFrame(BlochGeometry geometry, UnitaryRep rep)
      : geometry_(std::move(geometry)), rep_(std::move(rep)) {
    if (!geometry_.group || !geometry_.cell)
      throw std::invalid_argument("GaugeFrame: empty geometry");
  }

  const BlochGeometry& geometry() const { return geometry_; }
  const UnitaryRep& rep() const { return rep_; }

  // U(x) = rho(gamma) for the unfolding x = gamma(x_cell); U = 1 on the cell.
  Matrix operator()(const DiskPoint& x) const {
    const auto uf = geom::unfold(*geometry_.group, *geometry_.cell, x,
                                 geometry_.unfold_radius);
    return reps::evaluate(rep_, uf.gamma);
  }

 private:
  BlochGeometry geometry_;
  UnitaryRep rep_;
};

inline Matrix frame(const GaugeFrame& f, const DiskPoint& x) { return f(x); }

namespace detail {

// Words whose tiles can meet the support of psi seen from evaluation points
// within `reach` of the base point, found by breadth-first search over side
// adjacency. Pruned words contribute exactly zero.
struct PreimagePlan {
  std::vector<GroupElement> words;
  std::vector<MobiusMap> maps;
  std::vector<bool> on_shell;
};

inline double cell_circumradius(const FundamentalCell& cell,
                                Curvature curvature) {
  double r = 0.0;
  for (const auto& v : cell.vertices)
    r = std::max(r, geom::distance(DiskPoint(0.0, 0.0), DiskPoint(v), curvature));
  return r;
}

inline PreimagePlan make_plan(const WavePacket& psi, const BlochGeometry& geo,
                              double reach) {
  const Curvature curv = geo.group->curvature();
  const DiskPoint x0 = geo.group->base_point();
  const int genus = geo.group->genus();

  // Every tile crossed by a geodesic from the base point into the support
  // lies within this center-to-center corridor (tile centers sit at most one
  // circumradius away from the geodesic).
  double farthest = 0.0;
  for (const auto& term : psi.terms())
    farthest = std::max(farthest,
                        geom::distance(x0, term.center, curv) + term.radius);
  const double corridor =
      farthest + reach + cell_circumradius(*geo.cell, curv) + 0.25;

  std::vector<GroupElement> moves;
  for (int i = 1; i <= 2 * genus; ++i) {
    moves.push_back(GroupElement::generator(genus, i, +1));
    moves.push_back(GroupElement::generator(genus, i, -1));
  }

  PreimagePlan plan;
  std::set<GroupElement> seen;
  std::vector<GroupElement> frontier{GroupElement::identity(genus)};
  seen.insert(frontier.front());
  while (!frontier.empty()) {
    std::vector<GroupElement> next;
    for (const GroupElement& w : frontier) {
      const MobiusMap m = geo.group->evaluate(w);
      const DiskPoint site(m.apply_complex(0.0));
      double support_gap = std::numeric_limits<double>::infinity();
      for (const auto& term : psi.terms())
        support_gap = std::min(support_gap,
                               geom::distance(term.center, site, curv) -
                                   term.radius);
      if (support_gap <= reach + 1e-9) {
        plan.words.push_back(w);
        plan.maps.push_back(m);
        plan.on_shell.push_back(w.length() >=
                                static_cast<std::size_t>(geo.cutoff));
      }
      if (w.length() >= static_cast<std::size_t>(geo.cutoff)) continue;
      if (geom::distance(x0, site, curv) > corridor) continue;
      for (const GroupElement& mv : moves) {
        GroupElement child = group::compose(w, mv);
        if (child.length() <= w.length()) continue;
        if (seen.insert(child).second) next.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
  }
  return plan;
}

inline PreimagePlan cell_plan(const WavePacket& psi, const BlochGeometry& geo) {
  return make_plan(psi, geo,
                   cell_circumradius(*geo.cell, geo.group->curvature()));
}

}  // namespace detail

// The quasi-periodic sum sum_gamma psi(gamma x) rho(gamma) at an arbitrary
// point x; throws if the support of psi touches the word-length cap, i.e.
// when the finite sum may miss preimages.
inline Matrix tilde_transform(const WavePacket& psi, const UnitaryRep& rep,
                              const BlochGeometry& geo, const DiskPoint& x) {
  const double reach =
      geom::distance(geo.group->base_point(), x, geo.group->curvature());
  const auto plan = detail::make_plan(psi, geo, reach);
  const int n = rep.rank();
  Matrix acc = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < plan.words.size(); ++k) {
    const std::complex<double> v = psi.value(plan.maps[k].apply(x));
    if (v == 0.0) continue;
    if (plan.on_shell[k])
      throw std::runtime_error(
          "tilde_transform: support reaches the word-length cap");
    acc += v * reps::evaluate(rep, plan.words[k]);
  }
  return acc;
}

// The hyperbolic Bloch transform at a cell point y.
inline Matrix transform_h(const WavePacket& psi, const GaugeFrame& f,
                          const DiskPoint& y) {
  if (!f.geometry().cell->contains_closed(y.z, 1e-9))
    throw std::invalid_argument("transform_h: point is not in the closed cell");
  const auto plan = detail::cell_plan(psi, f.geometry());
  const int n = f.rep().rank();
  Matrix acc = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < plan.words.size(); ++k) {
    const std::complex<double> v = psi.value(plan.maps[k].apply(y));
    if (v == 0.0) continue;
    if (plan.on_shell[k])
      throw std::runtime_error("transform_h: support reaches the word-length cap");
    acc += v * reps::evaluate(f.rep(), plan.words[k]);
  }
  return acc;
}

// B(psi) sampled on the cell quadrature nodes.
struct SectionSample {
  std::vector<Matrix> node_values;  // aligned with cell.nodes

  double l2_norm_sq(const FundamentalCell& cell) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < node_values.size(); ++i)
      acc += cell.weights[i] * node_values[i].squaredNorm();
    return acc;
  }
};

inline SectionSample section(const WavePacket& psi, const GaugeFrame& f) {
  const auto plan = detail::cell_plan(psi, f.geometry());
  const FundamentalCell& cell = *f.geometry().cell;
  const int n = f.rep().rank();

  std::vector<Matrix> images(plan.words.size());
  for (std::size_t k = 0; k < plan.words.size(); ++k)
    images[k] = reps::evaluate(f.rep(), plan.words[k]);

  SectionSample out;
  out.node_values.assign(cell.nodes.size(), Matrix());
  util::parallel_for_index(cell.nodes.size(), [&](std::size_t i) {
    Matrix acc = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < plan.words.size(); ++k) {
      const std::complex<double> v = psi.value(plan.maps[k].apply(cell.nodes[i]));
      if (v == 0.0) continue;
      if (plan.on_shell[k])
        throw std::runtime_error("section: support reaches the word-length cap");
      acc += v * images[k];
    }
    out.node_values[i] = std::move(acc);
  });
  return out;
}

// Frames for every member of an ensemble over one shared geometry.
struct FrameSet {
  BlochGeometry geometry;
  std::shared_ptr<const RepEnsemble> ensemble;

  std::size_t size() const { return ensemble->members.size(); }
  GaugeFrame frame(std::size_t k) const {
    return GaugeFrame(geometry, ensemble->members[k]);
  }
  double weight() const { return ensemble->weight_per_member(); }
};

// Adjoint transform of the section family generated by psi, evaluated at x:
// sum_k w_k tr(U_k(x)^* (B psi)_k(pi(x))).
inline std::complex<double> adjoint_h(const WavePacket& psi, const FrameSet& fs,
                                      const DiskPoint& x) {
  const auto uf = geom::unfold(*fs.geometry.group, *fs.geometry.cell, x,
                               fs.geometry.unfold_radius);
  std::complex<double> acc = 0.0;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    const GaugeFrame f = fs.frame(k);
    const Matrix section_value = transform_h(psi, f, uf.cell_point);
    const Matrix frame_value = reps::evaluate(fs.ensemble->members[k], uf.gamma);
    acc += (frame_value.adjoint() * section_value).trace();
  }
  return fs.weight() * acc;
}

// ---------------------------------------------------------------------------
// Intertwining residuals (Richardson-testable finite-difference checks).

// || B(d_w psi)(y) - D_w[B(psi)](y) ||_F with the exact directional
// derivative on the left (pushing w forward along each preimage) and a
// central difference of the transform on the right.
inline double derivative_intertwiner_residual(const WavePacket& psi,
                                              const GaugeFrame& f,
                                              const DiskPoint& y,
                                              std::complex<double> direction,
                                              double h) {
  const FundamentalCell& cell = *f.geometry().cell;
  const std::complex<double> step = h * direction;
  if (!cell.contains(y.z + step) || !cell.contains(y.z - step))
    throw std::invalid_argument(
        "derivative_intertwiner_residual: stencil leaves the cell");

  const auto plan = detail::cell_plan(psi, f.geometry());
  const int n = f.rep().rank();
  Matrix lhs = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < plan.words.size(); ++k) {
    const MobiusMap& m = plan.maps[k];
    const DiskPoint gy = m.apply(y);
    const geom::ChartJet jet = psi.jet(gy);
    const std::complex<double> pushed = m.derivative(y.z) * direction;
    const std::complex<double> dv = geom::directional_derivative(jet, pushed);
    if (dv == 0.0) continue;
    if (plan.on_shell[k])
      throw std::runtime_error(
          "derivative_intertwiner_residual: support reaches the cap");
    lhs += dv * reps::evaluate(f.rep(), plan.words[k]);
  }

  const Matrix plus = transform_h(psi, f, DiskPoint(y.z + step));
  const Matrix minus = transform_h(psi, f, DiskPoint(y.z - step));
  const Matrix rhs = (plus - minus) / (2.0 * h);
  return (lhs - rhs).norm();
}

// || B(Delta psi)(y) - Delta_FD[B(psi)](y) ||_F with the analytic hyperbolic
// Laplacian on the left and the metric-scaled five-point chart stencil on the
// right.
inline double laplacian_intertwiner_residual(const WavePacket& psi,
                                             const GaugeFrame& f,
                                             const DiskPoint& y, double h) {
  const FundamentalCell& cell = *f.geometry().cell;
  const std::complex<double> hx(h, 0.0), hy(0.0, h);
  if (!cell.contains(y.z + hx) || !cell.contains(y.z - hx) ||
      !cell.contains(y.z + hy) || !cell.contains(y.z - hy))
    throw std::invalid_argument(
        "laplacian_intertwiner_residual: stencil leaves the cell");

  const auto plan = detail::cell_plan(psi, f.geometry());
  const int n = f.rep().rank();
  const Curvature curv = f.geometry().group->curvature();
  Matrix lhs = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < plan.words.size(); ++k) {
    const DiskPoint gy = plan.maps[k].apply(y);
    const geom::ChartJet jet = psi.jet(gy);
    const std::complex<double> lap =
        geom::laplacian_from_hessian(jet.dxx + jet.dyy, gy.z, curv);
    if (lap == 0.0) continue;
    if (plan.on_shell[k])
      throw std::runtime_error(
          "laplacian_intertwiner_residual: support reaches the cap");
    lhs += lap * reps::evaluate(f.rep(), plan.words[k]);
  }

  const Matrix center = transform_h(psi, f, y);
  const Matrix stencil = (transform_h(psi, f, DiskPoint(y.z + hx)) +
                          transform_h(psi, f, DiskPoint(y.z - hx)) +
                          transform_h(psi, f, DiskPoint(y.z + hy)) +
                          transform_h(psi, f, DiskPoint(y.z - hy)) -
                          4.0 * center) /
                         (h * h);
  const Matrix rhs = geom::laplacian_metric_factor(y.z, curv) * stencil;
  return (lhs - rhs).norm();
}

// Translate of a packet by the deck transformation gamma:
// (T_gamma psi)(x) = psi(gamma^{-1} x), i.e. centers move with gamma.
inline WavePacket translate_packet(const WavePacket& psi,
                                   const FuchsianGroup& g,
                                   const GroupElement& gamma) {
  const MobiusMap m = g.evaluate(gamma);
  std::vector<geom::PacketTerm> terms = psi.terms();
  for (auto& t : terms) t.center = m.apply(t.center);
  return WavePacket(std::move(terms), psi.curvature());
}

// max over quadrature nodes of || B(T_gamma psi)(y) - rho(gamma) B(psi)(y) ||.
inline double holonomy_intertwiner_residual(const WavePacket& psi,
                                            const GaugeFrame& f,
                                            const GroupElement& gamma) {
  const FundamentalCell& cell = *f.geometry().cell;
  const WavePacket moved = translate_packet(psi, *f.geometry().group, gamma);
  const Matrix hol = reps::evaluate(f.rep(), gamma);
  const SectionSample base = section(psi, f);
  const SectionSample shifted = section(moved, f);
  double worst = 0.0;
  for (std::size_t i = 0; i < cell.nodes.size(); ++i)
    worst = std::max(worst,
                     (shifted.node_values[i] - hol * base.node_values[i]).norm());
  return worst;
}

// ---------------------------------------------------------------------------
// L^2 norm recovery.

// integral over M^n x C of |B psi|^2: equals
// sum_{w1,w2} S_{w1 w2} * (ensemble mean of chi(w1^{-1} w2)) with the node
// Gram matrix S_{w1 w2} = sum_nodes weight conj(psi(w1 y)) psi(w2 y);
// algebraically the same double sum as the member-by-member Hilbert-Schmidt
// quadrature, with the node sum hoisted out of the member loop.
inline double norm_recovery(const WavePacket& psi, const FrameSet& fs) {
  const auto plan = detail::cell_plan(psi, fs.geometry);
  const FundamentalCell& cell = *fs.geometry.cell;
  const std::size_t nw = plan.words.size();

  std::vector<std::vector<std::complex<double>>> vals(
      nw, std::vector<std::complex<double>>(cell.nodes.size()));
  for (std::size_t k = 0; k < nw; ++k) {
    for (std::size_t i = 0; i < cell.nodes.size(); ++i) {
      const std::complex<double> v = psi.value(plan.maps[k].apply(cell.nodes[i]));
      if (v != 0.0 && plan.on_shell[k])
        throw std::runtime_error("norm_recovery: support reaches the cap");
      vals[k][i] = v;
    }
  }

  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(static_cast<int>(nw),
                                                 static_cast<int>(nw));
  for (std::size_t k1 = 0; k1 < nw; ++k1)
    for (std::size_t k2 = 0; k2 < nw; ++k2) {
      std::complex<double> s = 0.0;
      for (std::size_t i = 0; i < cell.nodes.size(); ++i)
        s += cell.weights[i] * std::conj(vals[k1][i]) * vals[k2][i];
      gram(static_cast<int>(k1), static_cast<int>(k2)) = s;
    }

  std::vector<GroupElement> pair_words;
  pair_words.reserve(nw * nw);
  for (std::size_t k1 = 0; k1 < nw; ++k1)
    for (std::size_t k2 = 0; k2 < nw; ++k2)
      pair_words.push_back(
          group::compose(group::invert(plan.words[k1]), plan.words[k2]));

  std::vector<double> member_sums(fs.size());
  util::parallel_for_index(fs.size(), [&](std::size_t m) {
    const UnitaryRep& rep = fs.ensemble->members[m];
    std::complex<double> acc = 0.0;
    for (std::size_t k1 = 0; k1 < nw; ++k1)
      for (std::size_t k2 = 0; k2 < nw; ++k2) {
        const std::complex<double> g = gram(static_cast<int>(k1),
                                            static_cast<int>(k2));
        if (g == 0.0) continue;
        acc += g * reps::character(rep, pair_words[k1 * nw + k2]);
      }
    member_sums[m] = acc.real();
  });
  double total = 0.0;
  for (double s : member_sums) total += s;
  return fs.weight() * total;
}

// Direct evaluation of the same quantity from materialized sections; used to
// cross-check the hoisted version on small configurations.
inline double norm_recovery_direct(const WavePacket& psi, const FrameSet& fs) {
  const FundamentalCell& cell = *fs.geometry.cell;
  double total = 0.0;
  for (std::size_t k = 0; k < fs.size(); ++k)
    total += section(psi, fs.frame(k)).l2_norm_sq(cell);
  return fs.weight() * total;
}

// (sum_gamma ||psi||_{L^2(gamma C)})^2, the Banach-space norm bound.
inline double banach_bound(const WavePacket& psi, const BlochGeometry& geo) {
  const auto plan = detail::cell_plan(psi, geo);
  const FundamentalCell& cell = *geo.cell;
  double acc = 0.0;
  for (std::size_t k = 0; k < plan.words.size(); ++k) {
    double piece = 0.0;
    for (std::size_t i = 0; i < cell.nodes.size(); ++i)
      piece += cell.weights[i] *
               std::norm(psi.value(plan.maps[k].apply(cell.nodes[i])));
    acc += std::sqrt(piece);
  }
  return acc * acc;
}

// Exact L^2(H) norm of a packet whose term supports are pairwise disjoint:
// each bump integrates to 4 pi |A|^2 sinh^2(r/2)/7 in curvature -1 units.
inline double packet_l2_sq_disjoint(const WavePacket& psi) {
  const bool minus_one = psi.curvature() == Curvature::kMinusOne;
  double acc = 0.0;
  for (const auto& t : psi.terms()) {
    const double r1 = t.radius * (minus_one ? 1.0 : 2.0);  // curvature -1 units
    const double sh = std::sinh(0.5 * r1);
    // integral of (1-tau)^6 over the ball: area element 2 pi sinh(s) ds,
    // substitution v = sinh^2(s/2) gives 4 pi Q_r / 7; at curvature -4 areas
    // scale by 1/4.
    acc += std::norm(t.coefficient) * (minus_one ? 1.0 : 0.25) * 4.0 *
           3.14159265358979323846 * sh * sh / 7.0;
  }
  return acc;
}

}  // namespace hyperbloch::hbt
