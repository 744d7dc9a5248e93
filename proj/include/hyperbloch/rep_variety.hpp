#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperbloch/linalg.hpp"
#include "hyperbloch/parallel.hpp"
#include "hyperbloch/rng.hpp"
#include "hyperbloch/surface_group.hpp"

// Points and Monte Carlo ensembles on the unitary representation varieties
//
//   M^n = Hom_irr(Gamma, U(n)) / U(n),   normalized to total mass 1/n.
//
// Rank one is exact: representations are points of the torus U(1)^{2g} and
// integrals use either i.i.d. uniform samples or tensor product grids. For
// n >= 2 the variety is sampled by drawing an i.i.d. Haar tuple of 2g
// unitaries and descending the relator misfit
//
//   f(rho) = || [rho(a_1),rho(b_1)]...[rho(a_g),rho(b_g)] - 1 ||_F^2
//
// to the solution variety with a projected gradient method (polar retraction,
// Barzilai-Borwein trial steps, monotone Armijo backtracking). This is a
// documented stand-in for the Atiyah-Bott/Goldman volume, not an exact
// sampler of it; only properties insensitive to that bias are asserted
// downstream.

namespace hyperbloch::reps {

using group::GammaFunction;
using group::GroupElement;
using linalg::Matrix;

inline constexpr double kRelatorTol = 1e-8;
inline constexpr double kIrreducibilitySvTol = 1e-8;
inline constexpr int kDefaultMaxIter = 5000;

inline constexpr double kTwoPi = 6.283185307179586476925287;

// Thrown when the sampler exhausts its retry budget; the CLI maps it to the
// numerical non-convergence exit code.
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A point of Jac_g = U(1)^{2g}: phases theta_j with lambda(a_j) = e^{i theta_j}
// for j <= g and lambda(b_{j-g}) = e^{i theta_j} for j > g.
struct JacobianPoint {
  std::vector<double> phases;  // 2g values in [0, 2*pi)

  int genus() const { return static_cast<int>(phases.size()) / 2; }

  std::complex<double> character(const GroupElement& gamma) const {
    const auto exps = group::abelianize(gamma);
    double total = 0.0;
    for (std::size_t j = 0; j < exps.size(); ++j)
      total += static_cast<double>(exps[j]) * phases[j];
    return {std::cos(total), std::sin(total)};
  }
};

class UnitaryRep {
 public:
  UnitaryRep(int genus, std::vector<Matrix> images, std::uint64_t seed)
      : genus_(genus), images_(std::move(images)), seed_(seed) {
    if (static_cast<int>(images_.size()) != 2 * genus_)
      throw std::invalid_argument("UnitaryRep needs 2g generator images");
    rank_ = static_cast<int>(images_.front().rows());
    for (const Matrix& u : images_)
      if (u.rows() != rank_ || u.cols() != rank_)
        throw std::invalid_argument("UnitaryRep images must share one rank");
    unitarity_residual_ = 0.0;
    for (const Matrix& u : images_)
      unitarity_residual_ =
          std::max(unitarity_residual_, linalg::unitarity_residual(u));
    relator_residual_ = (relator_matrix() - Matrix::Identity(rank_, rank_)).norm();
  }

  static UnitaryRep from_jacobian(const JacobianPoint& point,
                                  std::uint64_t seed = 0) {
    std::vector<Matrix> images;
    images.reserve(point.phases.size());
    for (double theta : point.phases) {
      Matrix m(1, 1);
      m(0, 0) = std::complex<double>(std::cos(theta), std::sin(theta));
      images.push_back(m);
    }
    return UnitaryRep(point.genus(), std::move(images), seed);
  }

  int rank() const { return rank_; }
  int genus() const { return genus_; }
  std::uint64_t seed() const { return seed_; }
  double unitarity_residual() const { return unitarity_residual_; }
  double relator_residual() const { return relator_residual_; }
  int irreducibility_defect() const { return defect_; }
  void set_irreducibility_defect(int d) { defect_ = d; }

  const Matrix& image(int generator_index) const {
    return images_[static_cast<std::size_t>(generator_index - 1)];
  }
  const std::vector<Matrix>& images() const { return images_; }

  Matrix relator_matrix() const {
    Matrix r = Matrix::Identity(rank_, rank_);
    for (int i = 0; i < genus_; ++i) {
      const Matrix& a = images_[static_cast<std::size_t>(i)];
      const Matrix& b = images_[static_cast<std::size_t>(genus_ + i)];
      r = r * a * b * a.adjoint() * b.adjoint();
    }
    return r;
  }

 private:
  int genus_;
  int rank_ = 0;
  std::vector<Matrix> images_;
  std::uint64_t seed_ = 0;
  double unitarity_residual_ = 0.0;
  double relator_residual_ = 0.0;
  int defect_ = 0;
};

// rho extended from generators to reduced words; inverse letters use the
// adjoint, so the result is unitary to rounding.
inline Matrix evaluate(const UnitaryRep& rep, const GroupElement& gamma) {
  if (rep.genus() != gamma.genus())
    throw std::invalid_argument("evaluate: genus mismatch");
  Matrix x = Matrix::Identity(rep.rank(), rep.rank());
  for (group::Letter l : gamma.word()) {
    const Matrix& u = rep.image(l.generator_index());
    if (l.is_inverse())
      x = x * u.adjoint();
    else
      x = x * u;
  }
  return x;
}

inline std::complex<double> character(const UnitaryRep& rep,
                                      const GroupElement& gamma) {
  return evaluate(rep, gamma).trace();
}

inline UnitaryRep conjugate(const UnitaryRep& rep, const Matrix& u) {
  if (linalg::unitarity_residual(u) > 1e-12)
    throw std::invalid_argument("conjugate: matrix is not unitary");
  std::vector<Matrix> images;
  images.reserve(rep.images().size());
  for (const Matrix& m : rep.images()) images.push_back(u * m * u.adjoint());
  UnitaryRep out(rep.genus(), std::move(images), rep.seed());
  out.set_irreducibility_defect(rep.irreducibility_defect());
  return out;
}

// dim(commutant) - 1; zero exactly on the irreducible locus.
inline int irreducibility_defect(const UnitaryRep& rep,
                                 double sv_tol = kIrreducibilitySvTol) {
  if (rep.rank() == 1) return 0;
  return linalg::commutant_dimension(rep.images(), sv_tol) - 1;
}

inline JacobianPoint sample_jacobian(int genus, std::uint64_t seed) {
  rng::Stream stream(seed, rng::kStreamJacobian, 0);
  JacobianPoint p;
  p.phases.resize(static_cast<std::size_t>(2 * genus));
  for (double& theta : p.phases) theta = stream.uniform(0.0, kTwoPi);
  return p;
}

// Tensor grid {2 pi k / m}^{2g}; exact for trigonometric polynomials of
// degree < m per axis. Axis index runs fastest on phase 2g-1.
inline std::vector<JacobianPoint> jacobian_grid(int genus, int resolution,
                                                std::size_t max_points = 1u
                                                                         << 24) {
  if (resolution < 1) throw std::invalid_argument("grid resolution must be >= 1");
  const int axes = 2 * genus;
  double count_d = 1.0;
  for (int i = 0; i < axes; ++i) count_d *= resolution;
  if (count_d > static_cast<double>(max_points))
    throw std::invalid_argument("jacobian_grid: point budget exceeded");
  const std::size_t count = static_cast<std::size_t>(count_d);
  std::vector<JacobianPoint> out(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    JacobianPoint p;
    p.phases.resize(static_cast<std::size_t>(axes));
    std::size_t rem = idx;
    for (int axis = axes - 1; axis >= 0; --axis) {
      const std::size_t k = rem % static_cast<std::size_t>(resolution);
      rem /= static_cast<std::size_t>(resolution);
      p.phases[static_cast<std::size_t>(axis)] =
          kTwoPi * static_cast<double>(k) / static_cast<double>(resolution);
    }
    out[idx] = std::move(p);
  }
  return out;
}

namespace detail {

struct FactorRef {
  int variable;  // index into the 2g-tuple
  bool dagger;
};

inline std::vector<FactorRef> relator_factors(int genus) {
  std::vector<FactorRef> f;
  for (int i = 0; i < genus; ++i) {
    f.push_back({i, false});
    f.push_back({genus + i, false});
    f.push_back({i, true});
    f.push_back({genus + i, true});
  }
  return f;
}

inline Matrix product_of(const std::vector<Matrix>& u,
                         const std::vector<FactorRef>& factors) {
  const int n = static_cast<int>(u.front().rows());
  Matrix r = Matrix::Identity(n, n);
  for (const FactorRef& f : factors)
    r = f.dagger ? Matrix(r * u[static_cast<std::size_t>(f.variable)].adjoint())
                 : Matrix(r * u[static_cast<std::size_t>(f.variable)]);
  return r;
}

struct RelatorDescent {
  bool converged = false;
  int iterations = 0;
};

// Projected gradient descent for f(U) = ||relator(U) - 1||_F^2 over the
// product of unitary groups. Trial steps are Barzilai-Borwein, globalized by
// monotone Armijo backtracking; every accepted iterate is retracted back to
// the manifold with a polar decomposition.
inline RelatorDescent descend_to_relator_variety(std::vector<Matrix>& u,
                                                 int genus, double tol,
                                                 int max_iter) {
  const int n = static_cast<int>(u.front().rows());
  const int vars = 2 * genus;
  const auto factors = relator_factors(genus);
  const std::size_t m = factors.size();
  const Matrix id = Matrix::Identity(n, n);

  auto misfit = [&](const std::vector<Matrix>& v) {
    return (product_of(v, factors) - id).squaredNorm();
  };

  // Riemannian gradient xi_v = U_v skew(U_v^H G_v) of the ambient gradient G.
  auto gradient = [&](const std::vector<Matrix>& v, double& f_out) {
    std::vector<Matrix> prefix(m), suffix(m);
    Matrix acc = id;
    for (std::size_t j = 0; j < m; ++j) {
      prefix[j] = acc;
      const Matrix& mat = v[static_cast<std::size_t>(factors[j].variable)];
      acc = factors[j].dagger ? Matrix(acc * mat.adjoint()) : Matrix(acc * mat);
    }
    const Matrix w = acc - id;
    f_out = w.squaredNorm();
    acc = id;
    for (std::size_t j = m; j-- > 0;) {
      suffix[j] = acc;
      const Matrix& mat = v[static_cast<std::size_t>(factors[j].variable)];
      acc = factors[j].dagger ? Matrix(mat.adjoint() * acc) : Matrix(mat * acc);
    }
    std::vector<Matrix> grad(static_cast<std::size_t>(vars),
                             Matrix::Zero(n, n));
    for (std::size_t j = 0; j < m; ++j) {
      const auto v_idx = static_cast<std::size_t>(factors[j].variable);
      if (factors[j].dagger)
        grad[v_idx] += suffix[j] * w.adjoint() * prefix[j];
      else
        grad[v_idx] += prefix[j].adjoint() * w * suffix[j].adjoint();
    }
    std::vector<Matrix> xi(static_cast<std::size_t>(vars));
    for (int k = 0; k < vars; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      const Matrix p = v[ks].adjoint() * grad[ks];
      xi[ks] = v[ks] * (0.5 * (p - p.adjoint()));
    }
    return xi;
  };

  double f = 0.0;
  std::vector<Matrix> xi = gradient(u, f);
  double step = 1.0 / (1.0 + std::sqrt(f));
  RelatorDescent result;

  std::vector<Matrix> u_prev, xi_prev;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (f <= tol * tol) {
      result.converged = true;
      result.iterations = iter;
      return result;
    }
    double xi_sq = 0.0;
    for (const Matrix& x : xi) xi_sq += x.squaredNorm();
    if (xi_sq < 1e-32) break;  // stalled at a non-global critical point

    // Barzilai-Borwein trial step from the previous displacement.
    if (!u_prev.empty()) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) {
        const Matrix s = u[k] - u_prev[k];
        const Matrix y = xi[k] - xi_prev[k];
        ss += s.squaredNorm();
        sy += (s.adjoint() * y).trace().real();
      }
      if (sy > 1e-18) step = ss / sy;
    }
    step = std::clamp(step, 1e-10, 1e3);

    bool accepted = false;
    std::vector<Matrix> trial(u.size());
    for (int bt = 0; bt < 40; ++bt) {
      for (std::size_t k = 0; k < u.size(); ++k)
        trial[k] = linalg::polar_unitary(u[k] - step * xi[k]);
      const double f_trial = misfit(trial);
      if (f_trial <= f - 1e-4 * step * 2.0 * xi_sq) {
        u_prev = std::move(u);
        xi_prev = std::move(xi);
        u = std::move(trial);
        trial.assign(u.size(), Matrix());
        xi = gradient(u, f);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    result.iterations = iter + 1;
  }
  double f_final = misfit(u);
  result.converged = f_final <= tol * tol;
  return result;
}

}  // namespace detail

// Draws a Haar tuple and projects it onto the relator variety. Non-convergent
// or reducible samples are rejected and retried on a seed derived from the
// attempt counter, so the result is a deterministic function of (n, seed).
inline UnitaryRep sample_unitary(int genus, int n, std::uint64_t seed,
                                 int max_iter = kDefaultMaxIter,
                                 double tol = kRelatorTol) {
  if (n < 2) throw std::invalid_argument("sample_unitary needs n >= 2");
  constexpr int kMaxAttempts = 32;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    rng::Stream stream(seed, rng::kStreamHaar,
                       static_cast<std::uint64_t>(attempt));
    std::vector<Matrix> u;
    u.reserve(static_cast<std::size_t>(2 * genus));
    for (int k = 0; k < 2 * genus; ++k)
      u.push_back(linalg::haar_unitary(n, stream));
    const auto status =
        detail::descend_to_relator_variety(u, genus, tol, max_iter);
    if (!status.converged) continue;
    UnitaryRep rep(genus, std::move(u), seed);
    const int defect = irreducibility_defect(rep);
    if (defect != 0) continue;
    rep.set_irreducibility_defect(0);
    if (rep.relator_residual() > tol) continue;
    return rep;
  }
  throw NonConvergence("sample_unitary: no convergent irreducible sample after retries (n=" +
                       std::to_string(n) + ", seed=" + std::to_string(seed) + ")");
}

// Weighted ensemble approximating mu_n; weights sum to mu_n(M^n) = 1/n.
struct RepEnsemble {
  enum class Quadrature { kMonteCarlo, kJacobianGrid };

  int rank = 1;
  int genus = 2;
  std::uint64_t seed = 0;
  Quadrature quadrature = Quadrature::kMonteCarlo;
  std::vector<UnitaryRep> members;

  double weight_per_member() const {
    return 1.0 / (static_cast<double>(rank) *
                  static_cast<double>(members.size()));
  }
};

inline RepEnsemble ensemble(int genus, int n, int count, std::uint64_t seed,
                            int max_iter = kDefaultMaxIter,
                            double tol = kRelatorTol) {
  if (count < 1) throw std::invalid_argument("ensemble needs count >= 1");
  RepEnsemble e;
  e.rank = n;
  e.genus = genus;
  e.seed = seed;
  e.quadrature = RepEnsemble::Quadrature::kMonteCarlo;
  e.members.reserve(static_cast<std::size_t>(count));
  std::vector<UnitaryRep> slots(static_cast<std::size_t>(count),
                                UnitaryRep::from_jacobian(
                                    JacobianPoint{std::vector<double>(
                                        static_cast<std::size_t>(2 * genus),
                                        0.0)}));
  util::parallel_for_index(static_cast<std::size_t>(count), [&](std::size_t k) {
    const std::uint64_t member_seed = rng::derive(seed, k);
    slots[k] = (n == 1)
                   ? UnitaryRep::from_jacobian(sample_jacobian(genus, member_seed),
                                               member_seed)
                   : sample_unitary(genus, n, member_seed, max_iter, tol);
  });
  e.members = std::move(slots);
  return e;
}

// Exact tensor-grid ensemble at rank one (weights 1/m^{2g}).
inline RepEnsemble grid_ensemble(int genus, int resolution) {
  RepEnsemble e;
  e.rank = 1;
  e.genus = genus;
  e.seed = 0;
  e.quadrature = RepEnsemble::Quadrature::kJacobianGrid;
  for (const JacobianPoint& p : jacobian_grid(genus, resolution))
    e.members.push_back(UnitaryRep::from_jacobian(p));
  return e;
}

struct ExpectationEstimate {
  std::complex<double> value;
  double stderr_ = 0.0;
  int samples = 0;
  int rank = 1;
};

// E_n(gamma) = integral of the normalized character over M^n. Off the
// commutator subgroup the U(1)^{2g} fiber average vanishes exactly (twisting
// rho by a character lambda scales chi(gamma) by lambda(gamma), which
// integrates to zero), so no sampling is performed there.
inline ExpectationEstimate expectation(const GroupElement& gamma,
                                       const RepEnsemble& e) {
  ExpectationEstimate est;
  est.samples = static_cast<int>(e.members.size());
  est.rank = e.rank;
  if (!group::in_commutator_subgroup(gamma)) {
    est.value = 0.0;
    est.stderr_ = 0.0;
    return est;
  }
  const double n = static_cast<double>(e.rank);
  std::vector<std::complex<double>> values(e.members.size());
  util::parallel_for_index(e.members.size(), [&](std::size_t k) {
    const UnitaryRep& rep = e.members[k];
    const std::complex<double> chi = character(rep, gamma);
    if (e.quadrature == RepEnsemble::Quadrature::kMonteCarlo && e.rank >= 2) {
      // Consistency twist: multiplying the images by a random character
      // leaves chi invariant on [Gamma,Gamma]; evaluate it for real.
      const JacobianPoint lambda =
          sample_jacobian(e.genus, rng::derive(rng::derive(e.seed, 0x74776973u), k));
      std::vector<Matrix> twisted;
      twisted.reserve(rep.images().size());
      for (std::size_t j = 0; j < rep.images().size(); ++j) {
        const double theta = lambda.phases[j];
        twisted.push_back(std::complex<double>(std::cos(theta),
                                               std::sin(theta)) *
                          rep.images()[j]);
      }
      UnitaryRep twisted_rep(rep.genus(), std::move(twisted), rep.seed());
      const std::complex<double> chi_tw = character(twisted_rep, gamma);
      if (std::abs(chi_tw - chi) > 1e-8 * (1.0 + std::abs(chi)))
        throw std::runtime_error(
            "expectation: character-twist consistency check failed");
    }
    values[k] = chi / n;
  });
  std::complex<double> mean = 0.0;
  for (const auto& v : values) mean += v;
  mean /= static_cast<double>(values.size());
  est.value = mean;
  if (values.size() > 1) {
    double var = 0.0;
    for (const auto& v : values) var += std::norm(v - mean);
    var /= static_cast<double>(values.size() - 1);
    est.stderr_ = std::sqrt(var / static_cast<double>(values.size()));
  }
  return est;
}

inline ExpectationEstimate expectation(const GroupElement& gamma, int n,
                                       int count, std::uint64_t seed) {
  if (!group::in_commutator_subgroup(gamma)) {
    ExpectationEstimate est;
    est.value = 0.0;
    est.stderr_ = 0.0;
    est.samples = count;
    est.rank = n;
    return est;
  }
  return expectation(gamma, ensemble(gamma.genus(), n, count, seed));
}

}  // namespace hyperbloch::reps
