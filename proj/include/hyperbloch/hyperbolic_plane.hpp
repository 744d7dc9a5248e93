#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hyperbloch/parallel.hpp"
#include "hyperbloch/surface_group.hpp"

// Poincare disk geometry: the SU(1,1) Mobius action, hyperbolic distance,
// an explicit Fuchsian realization of the genus-g surface group as the
// side-pairing group of the regular 4g-gon, the Dirichlet fundamental cell,
// unfolding of disk points to cell representatives, and area quadrature.
//
// Curvature conventions: the disk chart is shared, only metric quantities
// scale. At curvature -1 the metric is 4|dz|^2/(1-|z|^2)^2 (distance
// 2 artanh |.|, cell area 4 pi (g-1)); at curvature -4 it is
// |dz|^2/(1-|z|^2)^2 (half the distances, area pi (g-1)).

namespace hyperbloch::geom {

using group::GroupElement;

enum class Curvature { kMinusOne, kMinusFour };

inline double length_scale(Curvature c) {
  return c == Curvature::kMinusOne ? 2.0 : 1.0;
}

inline double area_density(std::complex<double> z, Curvature c) {
  const double s = length_scale(c);
  const double d = 1.0 - std::norm(z);
  return s * s / (d * d);
}

inline double surface_area(int genus, Curvature c) {
  const double s = length_scale(c);
  return s * s * 3.14159265358979323846 * (genus - 1);
}

struct DiskPoint {
  std::complex<double> z;

  DiskPoint() = default;
  explicit DiskPoint(std::complex<double> value) : z(value) {
    if (std::abs(z) > 1.0 - 1e-12)
      throw std::invalid_argument("DiskPoint too close to the ideal boundary");
  }
  DiskPoint(double x, double y) : DiskPoint(std::complex<double>(x, y)) {}
};

// Element of SU(1,1): the matrix [[a, b], [conj b, conj a]] with
// |a|^2 - |b|^2 = 1, acting by z -> (a z + b)/(conj(b) z + conj(a)).
class MobiusMap {
 public:
  MobiusMap() : a_(1.0), b_(0.0) {}
  MobiusMap(std::complex<double> a, std::complex<double> b) : a_(a), b_(b) {
    const double det = std::norm(a_) - std::norm(b_);
    if (std::abs(det - 1.0) > 1e-9)
      throw std::invalid_argument("MobiusMap: not in SU(1,1)");
    renormalize();
  }

  static MobiusMap identity() { return MobiusMap(); }

  static MobiusMap rotation(double phi) {
    return MobiusMap(std::polar(1.0, 0.5 * phi), 0.0);
  }

  // z -> (z - p)/(1 - conj(p) z), the map sending p to the origin.
  static MobiusMap to_origin(std::complex<double> p) {
    const double s = std::sqrt(1.0 - std::norm(p));
    return MobiusMap(std::complex<double>(1.0 / s), -p / s);
  }

  std::complex<double> a() const { return a_; }
  std::complex<double> b() const { return b_; }

  std::complex<double> apply_complex(std::complex<double> z) const {
    return (a_ * z + b_) / (std::conj(b_) * z + std::conj(a_));
  }

  DiskPoint apply(const DiskPoint& p) const {
    return DiskPoint(apply_complex(p.z));
  }

  // Holomorphic derivative d(gamma z)/dz.
  std::complex<double> derivative(std::complex<double> z) const {
    const std::complex<double> d = std::conj(b_) * z + std::conj(a_);
    return 1.0 / (d * d);
  }

  MobiusMap inverse() const { return MobiusMap(std::conj(a_), -b_); }

  friend MobiusMap operator*(const MobiusMap& m1, const MobiusMap& m2) {
    MobiusMap out;
    out.a_ = m1.a_ * m2.a_ + m1.b_ * std::conj(m2.b_);
    out.b_ = m1.a_ * m2.b_ + m1.b_ * std::conj(m2.a_);
    out.renormalize();
    return out;
  }

  double trace_abs() const { return std::abs(2.0 * a_.real()); }

  bool is_hyperbolic() const { return trace_abs() > 2.0 + 1e-12; }

  // Translation length along the axis, in curvature -1 units.
  double translation_length() const {
    return 2.0 * std::acosh(std::max(1.0, 0.5 * trace_abs()));
  }

  // Distance to +-identity, projective PSU(1,1) semantics.
  double projective_identity_residual() const {
    const double dp = std::sqrt(2.0 * std::norm(a_ - 1.0) + 2.0 * std::norm(b_));
    const double dm = std::sqrt(2.0 * std::norm(a_ + 1.0) + 2.0 * std::norm(b_));
    return std::min(dp, dm);
  }

  double projective_distance(const MobiusMap& other) const {
    const double dp = std::sqrt(2.0 * std::norm(a_ - other.a_) +
                                2.0 * std::norm(b_ - other.b_));
    const double dm = std::sqrt(2.0 * std::norm(a_ + other.a_) +
                                2.0 * std::norm(b_ + other.b_));
    return std::min(dp, dm);
  }

 private:
  void renormalize() {
    const double det = std::norm(a_) - std::norm(b_);
    const double s = 1.0 / std::sqrt(det);
    a_ *= s;
    b_ *= s;
  }

  std::complex<double> a_, b_;
};

inline double distance(const DiskPoint& p, const DiskPoint& q,
                       Curvature c = Curvature::kMinusOne) {
  const std::complex<double> num = p.z - q.z;
  const std::complex<double> den = 1.0 - std::conj(p.z) * q.z;
  const double t = std::abs(num / den);
  return length_scale(c) * std::atanh(std::min(t, 1.0 - 1e-17));
}

// The unique orientation-preserving isometry taking the directed geodesic
// segment (p1, q1) to (p2, q2); the two segments must have equal length.
inline MobiusMap isometry_between_segments(std::complex<double> p1,
                                           std::complex<double> q1,
                                           std::complex<double> p2,
                                           std::complex<double> q2) {
  const auto align = [](std::complex<double> p, std::complex<double> q) {
    const MobiusMap t = MobiusMap::to_origin(p);
    const std::complex<double> w = t.apply_complex(q);
    return MobiusMap::rotation(-std::arg(w)) * t;
  };
  const MobiusMap f1 = align(p1, q1);
  const MobiusMap f2 = align(p2, q2);
  return f2.inverse() * f1;
}

// Hyperbolic midpoint of the geodesic segment [p, q].
inline std::complex<double> hyperbolic_midpoint(std::complex<double> p,
                                                std::complex<double> q) {
  const MobiusMap t = MobiusMap::to_origin(p);
  const std::complex<double> w = t.apply_complex(q);
  const double r = std::abs(w);
  if (r < 1e-300) return p;
  const double half = std::tanh(0.5 * std::atanh(r));
  return t.inverse().apply_complex(half * (w / r));
}

// Parametrized geodesic segment u in [0,1] |-> z(u) from p to q, with chart
// velocity dz/du; the pullback of the straight segment through an aligning
// Mobius map.
struct GeodesicSegment {
  MobiusMap from_standard;
  std::complex<double> w;  // endpoint image in the standard frame

  std::complex<double> point(double u) const {
    return from_standard.apply_complex(u * w);
  }
  std::complex<double> velocity(double u) const {
    return from_standard.derivative(u * w) * w;
  }
};

inline GeodesicSegment geodesic_segment(std::complex<double> p,
                                        std::complex<double> q) {
  const MobiusMap t = MobiusMap::to_origin(p);
  return {t.inverse(), t.apply_complex(q)};
}

// ---------------------------------------------------------------------------
// Fuchsian realization: side pairings of the regular 4g-gon.

class FuchsianGroup {
 public:
  FuchsianGroup(int genus, Curvature curvature,
                std::vector<MobiusMap> generators,
                std::vector<std::complex<double>> polygon_vertices)
      : genus_(genus),
        curvature_(curvature),
        generators_(std::move(generators)),
        polygon_vertices_(std::move(polygon_vertices)) {
    if (static_cast<int>(generators_.size()) != 2 * genus_)
      throw std::invalid_argument("FuchsianGroup needs 2g generators");
  }

  int genus() const { return genus_; }
  Curvature curvature() const { return curvature_; }
  DiskPoint base_point() const { return DiskPoint(0.0, 0.0); }

  const MobiusMap& generator(int generator_index) const {
    return generators_[static_cast<std::size_t>(generator_index - 1)];
  }
  const std::vector<MobiusMap>& generators() const { return generators_; }

  // Vertices of the defining regular 4g-gon (counterclockwise).
  const std::vector<std::complex<double>>& polygon_vertices() const {
    return polygon_vertices_;
  }

  MobiusMap evaluate(const GroupElement& gamma) const {
    if (gamma.genus() != genus_)
      throw std::invalid_argument("FuchsianGroup: genus mismatch");
    MobiusMap m = MobiusMap::identity();
    for (group::Letter l : gamma.word()) {
      const MobiusMap& g = generator(l.generator_index());
      m = m * (l.is_inverse() ? g.inverse() : g);
    }
    return m;
  }

  // Residual of the relator evaluated letter by letter (the canonical word of
  // the relator element is empty, so this is the non-vacuous check).
  double relator_residual() const {
    MobiusMap m;
    for (group::Letter l : group::detail::relator_word(genus_)) {
      const MobiusMap& g = generator(l.generator_index());
      m = m * (l.is_inverse() ? g.inverse() : g);
    }
    return m.projective_identity_residual();
  }

 private:
  int genus_;
  Curvature curvature_;
  std::vector<MobiusMap> generators_;
  std::vector<std::complex<double>> polygon_vertices_;
};

// Standard generators a_i, b_i as side pairings of the regular 4g-gon
// centered at the origin with vertex angle 2 pi / 4g (angle sum 2 pi). The
// sides are labeled a_1 b_1 A_1 B_1 ... a_g b_g A_g B_g counterclockwise and
// the pairing of each label maps the directed side of the inverse label onto
// the reversed side of the positive one, carrying the polygon to the
// adjacent copy. The vertex cycle of this gluing reads
// prod_i a_i b_i^{-1} a_i^{-1} b_i, so the inverse b-pairings serve as the
// standard beta generators; the canonical relator then holds with matrix
// value exactly +1 in SU(1,1).
inline FuchsianGroup construct_group(int genus,
                                     Curvature curvature = Curvature::kMinusOne) {
  if (genus < 2)
    throw std::invalid_argument("construct_group: genus must be >= 2");
  const int p = 4 * genus;
  const double cot = 1.0 / std::tan(3.14159265358979323846 / p);
  const double vertex_range = std::acosh(cot * cot);  // curvature -1 units
  const double r_v = std::tanh(0.5 * vertex_range);

  std::vector<std::complex<double>> vertices(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k)
    vertices[static_cast<std::size_t>(k)] =
        std::polar(r_v, 2.0 * 3.14159265358979323846 * k / p);

  std::vector<MobiusMap> generators(static_cast<std::size_t>(2 * genus),
                                    MobiusMap::identity());
  for (int i = 0; i < genus; ++i) {
    const int base = 4 * i;
    const auto pair_sides = [&](int pos_side, int neg_side) {
      const auto v = [&](int k) {
        return vertices[static_cast<std::size_t>(((k % p) + p) % p)];
      };
      return isometry_between_segments(v(neg_side), v(neg_side + 1),
                                       v(pos_side + 1), v(pos_side));
    };
    generators[static_cast<std::size_t>(i)] = pair_sides(base, base + 2);
    generators[static_cast<std::size_t>(genus + i)] =
        pair_sides(base + 1, base + 3).inverse();
  }

  FuchsianGroup group(genus, curvature, std::move(generators),
                      std::move(vertices));
  if (group.relator_residual() > 1e-10)
    throw std::runtime_error("construct_group: side pairings violate the relator");
  return group;
}

// ---------------------------------------------------------------------------
// Dirichlet (Wigner-Seitz) cell about the origin.

struct FundamentalCell {
  int genus = 2;
  Curvature curvature = Curvature::kMinusOne;
  DiskPoint center;
  std::vector<GroupElement> neighbor_words;          // face words, shortlex
  std::vector<std::complex<double>> neighbor_sites;  // gamma(x0) per face
  std::vector<std::complex<double>> vertices;        // cell corners, ccw
  std::vector<DiskPoint> nodes;
  std::vector<double> weights;

  // Signed clearance: min over faces of d(z, gamma x0) - d(z, x0);
  // positive strictly inside.
  double clearance(std::complex<double> z) const {
    const DiskPoint zp(z);
    const DiskPoint c = center;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& site : neighbor_sites)
      best = std::min(best, distance(zp, DiskPoint(site)) - distance(zp, c));
    return best;
  }

  bool contains(std::complex<double> z, double tol = 0.0) const {
    return clearance(z) > tol;
  }
  bool contains_closed(std::complex<double> z, double tol = 1e-12) const {
    return clearance(z) >= -tol;
  }
};

namespace detail {

// Bisector of (x0, site): the geodesic through the midpoint orthogonal to
// the connecting geodesic, parametrized by arclength-like t.
struct Bisector {
  MobiusMap frame;  // maps standard frame; bisector = frame(i tanh(t/2))

  std::complex<double> point(double t) const {
    return frame.apply_complex(std::complex<double>(0.0, std::tanh(0.5 * t)));
  }
};

inline Bisector bisector_of(std::complex<double> site) {
  const std::complex<double> mid = hyperbolic_midpoint(0.0, site);
  const MobiusMap to_mid = MobiusMap::to_origin(mid);
  // Rotate so the image of the origin-to-site direction is the +x axis.
  const std::complex<double> dir = to_mid.apply_complex(site);
  const MobiusMap frame =
      MobiusMap(to_mid.inverse() * MobiusMap::rotation(std::arg(dir)));
  return {frame};
}

}  // namespace detail

// Finds the face words of the Dirichlet cell at the origin among all words of
// length <= cutoff. A candidate gamma contributes a face iff some point of
// its bisector lies strictly inside every other candidate's half-plane. The
// face set must be stable when the cutoff grows by one, otherwise the cutoff
// was too small.
inline FundamentalCell dirichlet_cell(const FuchsianGroup& g, int cutoff = 3,
                                      int max_radius = group::kDefaultMaxBallRadius) {
  struct Candidate {
    GroupElement word;
    std::complex<double> site;
  };

  const auto face_words_at = [&](int radius) {
    std::vector<Candidate> candidates;
    const double reach_limit =
        2.0 * std::acosh(std::pow(1.0 / std::tan(3.14159265358979323846 /
                                                 (4.0 * g.genus())),
                                  2.0)) +
        1e-6;  // twice the circumradius
    for (const GroupElement& w : group::ball(g.genus(), radius, max_radius)) {
      if (w.is_identity()) continue;
      const std::complex<double> site = g.evaluate(w).apply_complex(0.0);
      if (distance(DiskPoint(0.0, 0.0), DiskPoint(site)) <= reach_limit)
        candidates.push_back({w, site});
    }
    std::vector<std::size_t> faces;
    constexpr int kSamples = 1024;
    const double t_max = 6.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const detail::Bisector bis = detail::bisector_of(candidates[i].site);
      bool is_face = false;
      for (int s = 0; s <= kSamples && !is_face; ++s) {
        const double t = -t_max + 2.0 * t_max * s / kSamples;
        const std::complex<double> z = bis.point(t);
        const DiskPoint zp(z);
        const double dz0 = distance(zp, DiskPoint(0.0, 0.0));
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < candidates.size(); ++j) {
          if (j == i) continue;
          margin = std::min(
              margin, distance(zp, DiskPoint(candidates[j].site)) - dz0);
          if (margin <= 1e-7) break;
        }
        if (margin > 1e-7) is_face = true;
      }
      if (is_face) faces.push_back(i);
    }
    std::vector<Candidate> out;
    for (std::size_t i : faces) out.push_back(candidates[i]);
    return out;
  };

  auto faces = face_words_at(cutoff);
  {
    auto faces_next = face_words_at(cutoff + 1);
    if (faces.size() != faces_next.size())
      throw std::runtime_error(
          "dirichlet_cell: face set unstable, cutoff too small");
  }

  // Order faces counterclockwise by the direction of gamma(x0).
  std::sort(faces.begin(), faces.end(), [](const auto& x, const auto& y) {
    return std::arg(x.site) < std::arg(y.site);
  });

  FundamentalCell cell;
  cell.genus = g.genus();
  cell.curvature = g.curvature();
  cell.center = g.base_point();
  for (const auto& c : faces) {
    cell.neighbor_words.push_back(c.word);
    cell.neighbor_sites.push_back(c.site);
  }

  // Cell corners: intersect consecutive face bisectors.
  const std::size_t nf = faces.size();
  for (std::size_t i = 0; i < nf; ++i) {
    const auto& a = faces[i];
    const auto& b = faces[(i + 1) % nf];
    const detail::Bisector bis = detail::bisector_of(a.site);
    auto h = [&](double t) {
      const DiskPoint z(bis.point(t));
      return distance(z, DiskPoint(b.site)) - distance(z, DiskPoint(0.0, 0.0));
    };
    double lo = 0.0, hi = 6.0;
    // The corner toward b lies at positive t for ccw ordering; fall back to
    // negative t if the bracket fails.
    if (h(lo) * h(hi) > 0.0) {
      hi = -6.0;
      if (h(lo) * h(hi) > 0.0)
        throw std::runtime_error("dirichlet_cell: corner bracket failed");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (h(lo) * h(mid) <= 0.0)
        hi = mid;
      else
        lo = mid;
    }
    cell.vertices.push_back(bis.point(0.5 * (lo + hi)));
  }
  return cell;
}

// Factors z = gamma(z0) with z0 in the closed cell; gamma is the
// shortlex-least admissible word (deterministic at boundary ties).
struct Unfolding {
  GroupElement gamma;
  DiskPoint cell_point;
};

inline Unfolding unfold(const FuchsianGroup& g, const FundamentalCell& cell,
                        const DiskPoint& z, int cutoff,
                        int max_radius = group::kDefaultMaxBallRadius) {
  for (const GroupElement& w : group::ball(g.genus(), cutoff, max_radius)) {
    const std::complex<double> z0 =
        g.evaluate(w).inverse().apply_complex(z.z);
    if (cell.contains_closed(z0)) return {w, DiskPoint(z0)};
  }
  throw std::runtime_error("unfold: point not covered within cutoff");
}

// Midpoint-rule quadrature: Euclidean grid of spacing h intersected with the
// open cell, weighted by the hyperbolic area density.
inline FundamentalCell quadrature(const FuchsianGroup& g, FundamentalCell cell,
                                  double h) {
  if (h <= 0.0) throw std::invalid_argument("quadrature: h must be positive");
  double r_max = 0.0;
  for (const auto& v : cell.vertices) r_max = std::max(r_max, std::abs(v));
  if (cell.vertices.empty())
    throw std::runtime_error("quadrature: cell has no corners");
  r_max += h;
  cell.nodes.clear();
  cell.weights.clear();
  const int steps = static_cast<int>(std::ceil(2.0 * r_max / h));
  std::vector<std::vector<std::pair<DiskPoint, double>>> rows(
      static_cast<std::size_t>(steps));
  util::parallel_for_index(static_cast<std::size_t>(steps), [&](std::size_t j) {
    const double y = -r_max + (static_cast<double>(j) + 0.5) * h;
    auto& row = rows[j];
    for (int i = 0; i < steps; ++i) {
      const double x = -r_max + (i + 0.5) * h;
      const std::complex<double> z(x, y);
      if (std::abs(z) >= 1.0 - 1e-9) continue;
      if (!cell.contains(z)) continue;
      row.emplace_back(DiskPoint(z), h * h * area_density(z, g.curvature()));
    }
  });
  for (const auto& row : rows)
    for (const auto& [node, weight] : row) {
      cell.nodes.push_back(node);
      cell.weights.push_back(weight);
    }
  if (cell.nodes.empty())
    throw std::runtime_error("quadrature: no nodes inside the cell");
  return cell;
}

inline double quadrature_mass(const FundamentalCell& cell) {
  double s = 0.0;
  for (double w : cell.weights) s += w;
  return s;
}

}  // namespace hyperbloch::geom
