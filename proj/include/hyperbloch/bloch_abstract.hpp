#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

#include "hyperbloch/parallel.hpp"
#include "hyperbloch/rep_variety.hpp"
#include "hyperbloch/surface_group.hpp"

// The abstract Bloch transform on finitely supported psi : Gamma -> C,
//
//   B(psi)([rho]) = [rho, sum_gamma psi(gamma) rho(gamma)],
//
// together with its ensemble adjoint, fiberwise translation action, and the
// matrices and band spectra of Gamma-periodic operators. Fibers carry a
// concrete representative rho; every exported scalar (norm, inner product,
// adjoint value, eigenvalue) is gauge invariant under conjugation of that
// representative.

namespace hyperbloch::bloch {

using group::GammaFunction;
using group::GroupElement;
using linalg::Matrix;
using reps::RepEnsemble;
using reps::UnitaryRep;

struct FiberElement {
  UnitaryRep rep;
  Matrix matrix;
};

inline FiberElement transform(const GammaFunction& psi, const UnitaryRep& rep) {
  if (psi.genus() != rep.genus())
    throw std::invalid_argument("transform: genus mismatch");
  Matrix acc = Matrix::Zero(rep.rank(), rep.rank());
  for (const auto& [gamma, amplitude] : psi.terms())
    acc += amplitude * reps::evaluate(rep, gamma);
  return {rep, std::move(acc)};
}

// T^_gamma [rho, A] = [rho, rho(gamma)^{-1} A]; unitary on fibers.
inline FiberElement hat_translate(const FiberElement& v,
                                  const GroupElement& gamma) {
  return {v.rep, reps::evaluate(v.rep, gamma).adjoint() * v.matrix};
}

// Section samples of B(psi) over an ensemble, aligned with its members.
class BlochField {
 public:
  BlochField(std::shared_ptr<const RepEnsemble> ensemble,
             std::vector<Matrix> values)
      : ensemble_(std::move(ensemble)), values_(std::move(values)) {
    if (!ensemble_ || values_.size() != ensemble_->members.size())
      throw std::invalid_argument("BlochField: values misaligned with ensemble");
  }

  const RepEnsemble& ensemble() const { return *ensemble_; }
  const std::shared_ptr<const RepEnsemble>& ensemble_handle() const {
    return ensemble_;
  }
  const std::vector<Matrix>& values() const { return values_; }
  const Matrix& value(std::size_t k) const { return values_[k]; }
  const UnitaryRep& rep(std::size_t k) const { return ensemble_->members[k]; }

  BlochField scaled_sum(std::complex<double> a, const BlochField& other,
                        std::complex<double> b) const {
    require_same_ensemble(other);
    std::vector<Matrix> vals(values_.size());
    for (std::size_t k = 0; k < values_.size(); ++k)
      vals[k] = a * values_[k] + b * other.values_[k];
    return BlochField(ensemble_, std::move(vals));
  }

  void require_same_ensemble(const BlochField& other) const {
    if (ensemble_ != other.ensemble_)
      throw std::invalid_argument("BlochField: ensemble mismatch");
  }

 private:
  std::shared_ptr<const RepEnsemble> ensemble_;
  std::vector<Matrix> values_;
};

inline BlochField field(const GammaFunction& psi,
                        std::shared_ptr<const RepEnsemble> ensemble) {
  std::vector<Matrix> values(ensemble->members.size());
  util::parallel_for_index(values.size(), [&](std::size_t k) {
    values[k] = transform(psi, ensemble->members[k]).matrix;
  });
  return BlochField(std::move(ensemble), std::move(values));
}

// <B psi | B psi'> = sum_k w_k tr(A_k^* A'_k); conjugate linear on the left.
inline std::complex<double> inner(const BlochField& f1, const BlochField& f2) {
  f1.require_same_ensemble(f2);
  const double w = f1.ensemble().weight_per_member();
  std::complex<double> acc = 0.0;
  for (std::size_t k = 0; k < f1.values().size(); ++k)
    acc += (f1.value(k).adjoint() * f2.value(k)).trace();
  return w * acc;
}

// B_n^* at gamma: the tau_gamma pairing integrated over the ensemble.
inline std::complex<double> adjoint(const BlochField& f,
                                    const GroupElement& gamma) {
  const double w = f.ensemble().weight_per_member();
  std::complex<double> acc = 0.0;
  for (std::size_t k = 0; k < f.values().size(); ++k)
    acc += (reps::evaluate(f.rep(k), gamma).adjoint() * f.value(k)).trace();
  return w * acc;
}

// H = sum_gamma c_gamma T_gamma with finitely many coefficients.
class PeriodicOperator {
 public:
  explicit PeriodicOperator(int genus) : coefficients_(genus) {}
  explicit PeriodicOperator(GammaFunction coefficients)
      : coefficients_(std::move(coefficients)) {}

  int genus() const { return coefficients_.genus(); }
  const GammaFunction& coefficients() const { return coefficients_; }

  void set(const GroupElement& gamma, std::complex<double> c) {
    coefficients_.set(gamma, c);
  }

  bool is_hermitian(double tol = 1e-13) const {
    for (const auto& [gamma, c] : coefficients_.terms()) {
      const std::complex<double> mirror =
          coefficients_.at(group::invert(gamma));
      if (std::abs(mirror - std::conj(c)) > tol) return false;
    }
    return true;
  }

  double coefficient_l1() const { return group::lp_norm(coefficients_, 1.0); }

  // H psi = sum_gamma c_gamma T_gamma psi.
  GammaFunction apply(const GammaFunction& psi) const {
    GammaFunction out(psi.genus());
    for (const auto& [gamma, c] : coefficients_.terms()) {
      GammaFunction t = group::translate(psi, gamma);
      t *= c;
      for (const auto& [g, a] : t.terms()) out.add(g, a);
    }
    return out;
  }

 private:
  GammaFunction coefficients_;
};

// Nearest-neighbour operator on the Cayley graph: one hop along each of the
// 4g signed generators.
inline PeriodicOperator adjacency_operator(int genus) {
  PeriodicOperator h(genus);
  for (int i = 1; i <= 2 * genus; ++i) {
    h.set(GroupElement::generator(genus, i, +1), 1.0);
    h.set(GroupElement::generator(genus, i, -1), 1.0);
  }
  return h;
}

// Matrix of B_n H B_n^* on the fiber at rho: since B(T_gamma psi) =
// rho(gamma)^{-1} B(psi), the operator acts by left multiplication with
// M(rho) = sum_gamma c_gamma rho(gamma)^{-1}.
inline Matrix conjugate_operator(const PeriodicOperator& h,
                                 const UnitaryRep& rep) {
  Matrix m = Matrix::Zero(rep.rank(), rep.rank());
  for (const auto& [gamma, c] : h.coefficients().terms())
    m += c * reps::evaluate(rep, gamma).adjoint();
  return m;
}

// Ascending eigenvalues of M(rho); reported once, without the n-fold
// columnwise multiplicity of the action on End(C^n).
inline std::vector<double> band_spectrum(const PeriodicOperator& h,
                                         const UnitaryRep& rep) {
  if (!h.is_hermitian())
    throw std::invalid_argument("band_spectrum needs a Hermitian operator");
  Matrix m = conjugate_operator(h, rep);
  const double herm_defect = (m - m.adjoint()).norm();
  if (herm_defect > 1e-10 * (1.0 + m.norm()))
    throw std::runtime_error("band_spectrum: fiber matrix is not Hermitian");
  m = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace hyperbloch::bloch
